#include "shiftlab/dissection.hpp"
#include "shiftlab/expsums.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace shiftlab {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Lattices at most this large get |S| at the sampled arcs.
constexpr double kArcSampleBudget = 1e6;

// Samples along the diagonal at the largest P whose lattice fits the |S|
// budget, or at the first P without |S| when none does.
std::vector<ArcSample> sample_arcs(const ExperimentSpec& spec, const ShiftExpansion& exp,
                                   const DissectionParams& params) {
  const auto lattice = [&](std::int64_t P) {
    return std::pow(2.0 * static_cast<double>(P) + 1, static_cast<double>(spec.system.n()));
  };
  std::int64_t P = std::max<std::int64_t>(spec.Ps.front(), 1);
  for (std::int64_t p : spec.Ps)
    if (p >= 1 && lattice(p) <= kArcSampleBudget) P = p;
  const bool with_S = lattice(P) <= kArcSampleBudget;
  const KernelParams kp = kernel_params(to_double(spec.eta), static_cast<double>(P), params.delta);
  const std::size_t R = spec.system.R();
  const auto base = classify(std::vector<Real>(R, Real(0)), Real(P), params, kp);
  const Real thr = base.major_threshold, T = base.T;
  std::vector<ArcSample> out;
  for (const Real& a : {Real(0), thr / 2, thr, Real(sqrt(thr * T)), T, Real(2 * T)}) {
    ArcSample s;
    s.alpha = static_cast<double>(a);
    s.P = P;
    const std::vector<Real> alpha(R, a);
    s.label = classify(alpha, Real(P), params, kp);
    if (with_S) {
      EvalOptions eo;
      eo.threads = spec.count.threads;
      s.abs_S = std::abs(shifted_S_fast(spec.system, exp, spec.mu, P, alpha, eo));
    }
    out.push_back(s);
  }
  return out;
}

json hypotheses_json(const HypothesisReport& h) {
  json j;
  j["numvars_ok"] = h.numvars_ok;
  j["numvars_threshold"] = h.numvars_threshold.str();
  j["kappa"] = to_string(h.kappa);
  j["kappa_exceeds_R_plus_1"] = h.kappa_exceeds_R_plus_1;
  j["slice_independent_degrees"] = std::vector<unsigned>(h.slice_independent_degrees.begin(), h.slice_independent_degrees.end());
  j["top_slice_ok"] = h.top_slice_ok;
  j["gradient_slice_ok"] = h.gradient_slice_ok;
  j["sigma_probe"] = {{"points", h.sigma_probe.points},
                      {"min_rank", h.sigma_probe.min_rank},
                      {"max_rank", h.sigma_probe.max_rank},
                      {"deficient", h.sigma_probe.deficient}};
  j["all_ok"] = h.all_ok();
  return j;
}

}  // namespace

std::string to_string(VerifyStatus s) {
  switch (s) {
    case VerifyStatus::pass:
      return "pass";
    case VerifyStatus::fail:
      return "fail";
    case VerifyStatus::no_target:
      return "no asymptotic target";
    case VerifyStatus::refused:
      return "refused";
  }
  return "?";
}

VerifyReport verify_asymptotic(const ExperimentSpec& spec) {
  if (spec.Ps.empty()) throw InvalidArgument("verify_asymptotic needs at least one P");
  VerifyReport rep;
  const ShiftExpansion exp = taylor_shift(spec.system);
  rep.hypotheses = check_hypotheses(spec.system);
  rep.params = dissection_params(exp, spec.theta0);
  rep.waived = !rep.hypotheses.all_ok() && spec.waive_hypotheses;
  if (!rep.hypotheses.all_ok() && !spec.waive_hypotheses) {
    rep.status = VerifyStatus::refused;
    rep.message = "hypotheses fail; rerun with the waiver to run the experiment uncertified";
    return rep;
  }

  rep.zero = find_nonsingular_real_zero(spec.system, spec.newton);
  rep.density = density(spec.system, spec.density);
  // A definite system still has a positive density at every finite L; only a
  // nonsingular real zero makes the limit positive.
  const bool positive = rep.zero.has_value() && rep.density.c > 2 * rep.density.std_error;

  CountSpec cs{spec.system, exp, spec.mu, spec.tau, spec.eta, spec.Ps.front(), spec.method};
  rep.series = count_series(cs, spec.Ps, positive ? rep.density.c : 0.0, spec.count);

  bool flagged = false;
  for (const auto& row : rep.series) flagged |= row.result.boundary_flags > 0;
  rep.certified = rep.hypotheses.all_ok() && !flagged;

  if (spec.sandwich && spec.system.R() <= 2) {
    for (const auto& row : rep.series) {
      const double points = std::pow(2.0 * static_cast<double>(row.P) + 1, static_cast<double>(spec.system.n()));
      if (row.P < 1 || points > spec.sandwich_options.budget) continue;
      RPlusMinusOptions o = spec.sandwich_options;
      if (!o.delta) o.delta = rep.params.delta;
      SandwichRow s;
      s.P = row.P;
      s.N = row.result.count;
      try {
        s.r = r_plus_minus(spec.system, exp, spec.mu, spec.tau, spec.eta, row.P, o);
      } catch (const BudgetExceeded&) {
        continue;  // counting and density still stand on their own
      }
      s.holds = sandwich_holds(s.r, s.N);
      rep.sandwich.push_back(s);
    }
  }
  const std::int64_t Plast = spec.Ps.back();
  rep.kernel_grid = sandwich_grid(kernel_params(to_double(spec.eta), static_cast<double>(Plast), rep.params.delta));
  rep.arcs = sample_arcs(spec, exp, rep.params);

  if (!positive) {
    rep.status = VerifyStatus::no_target;
    rep.message = rep.zero ? "no asymptotic target: density not distinguishable from zero"
                           : "no asymptotic target: no nonsingular real zero";
    return rep;
  }
  const auto dev = [](const SeriesRow& r) { return std::fabs(r.ratio - 1); };
  rep.within_tolerance = dev(rep.series.back()) <= spec.tolerance;
  rep.monotone = true;
  for (std::size_t i = 2; i < rep.series.size(); ++i) rep.monotone &= dev(rep.series[i]) <= dev(rep.series[i - 1]);
  // Stalling: the last step fails to shrink the deviation by a quarter.
  if (rep.series.size() >= 2) {
    const double a = dev(rep.series[rep.series.size() - 2]), b = dev(rep.series.back());
    rep.ratios_stall = b > 0.75 * a && b > spec.tolerance;
  }
  bool sandwich_ok = true;
  for (const auto& s : rep.sandwich) sandwich_ok &= s.holds;
  const bool ok = rep.within_tolerance && rep.monotone && sandwich_ok;
  rep.status = ok ? VerifyStatus::pass : VerifyStatus::fail;
  if (rep.waived)
    rep.message = std::string("uncertified run under waiver; ratios ") + (rep.ratios_stall ? "stall" : "do not stall");
  else if (!rep.certified)
    rep.message = "boundary flags present; counts are lower bounds";
  else
    rep.message = ok ? "ratios converge within tolerance" : "ratios outside tolerance or not monotone";
  return rep;
}

std::string report_json(const VerifyReport& r) {
  json j;
  j["status"] = to_string(r.status);
  j["message"] = r.message;
  j["certified"] = r.certified;
  j["waived"] = r.waived;
  j["hypotheses"] = hypotheses_json(r.hypotheses);
  j["params"] = {{"theta0", to_string(r.params.theta0)},
                 {"delta", to_string(r.params.delta)},
                 {"N", r.params.N.str()},
                 {"C_f", r.params.C_f.str()}};
  if (r.status == VerifyStatus::refused) return j.dump(2);
  if (r.zero)
    j["real_zero"] = {{"point", r.zero->point}, {"residual", r.zero->residual}, {"sigma_min", r.zero->sigma_min}};
  else
    j["real_zero"] = nullptr;
  j["density"] = json::parse(density_json(r.density));
  json rows = json::array();
  for (const auto& s : r.series) {
    json row{{"P", s.P},
             {"N", s.result.count},
             {"boundary_flags", s.result.boundary_flags},
             {"method", to_string(s.result.method)},
             {"seconds", s.result.seconds},
             {"main_term", s.main_term}};
    row["ratio"] = s.ratio_defined ? json(s.ratio) : json("inf");
    rows.push_back(row);
  }
  j["series"] = rows;
  j["within_tolerance"] = r.within_tolerance;
  j["monotone"] = r.monotone;
  j["ratios_stall"] = r.ratios_stall;
  json sw = json::array();
  for (const auto& s : r.sandwich)
    sw.push_back({{"P", s.P},
                  {"N", s.N},
                  {"R_minus", s.r.minus},
                  {"R_plus", s.r.plus},
                  {"tail", s.r.tail},
                  {"quad_error", s.r.quad_error},
                  {"A", s.r.A},
                  {"holds", s.holds}});
  j["sandwich"] = sw;
  bool grid_ok = true;
  double mismatch = 0;
  for (const auto& p : r.kernel_grid) {
    grid_ok &= p.ordered;
    mismatch = std::max(mismatch, p.max_mismatch);
  }
  j["kernel_grid"] = {{"points", r.kernel_grid.size()}, {"ordered", grid_ok}, {"max_mismatch", mismatch}};
  return j.dump(2);
}

std::string sandwich_csv(const std::vector<SandwichRow>& rows) {
  std::ostringstream os;
  os << "P,N,R_minus,R_plus,tail,quad_error,closed_minus,closed_plus,A,holds\n";
  for (const auto& s : rows)
    os << s.P << ',' << s.N << ',' << fmt(s.r.minus) << ',' << fmt(s.r.plus) << ',' << fmt(s.r.tail) << ','
       << fmt(s.r.quad_error) << ',' << fmt(s.r.closed_minus) << ',' << fmt(s.r.closed_plus) << ',' << fmt(s.r.A)
       << ',' << (s.holds ? 1 : 0) << '\n';
  return os.str();
}

std::string arcs_csv(const std::vector<ArcSample>& arcs) {
  std::ostringstream os;
  os << "P,alpha,kind,major_threshold,T,abs_S\n";
  for (const auto& a : arcs) {
    os << a.P << ',' << fmt(a.alpha) << ',' << to_string(a.label.kind) << ',' << fmt(static_cast<double>(a.label.major_threshold))
       << ',' << fmt(static_cast<double>(a.label.T)) << ',';
    if (a.abs_S) os << fmt(*a.abs_S);
    os << '\n';
  }
  return os.str();
}

std::string kernel_grid_csv(const std::vector<SandwichPoint>& grid) {
  std::ostringstream os;
  os << "t,ft_minus,band,ft_plus,quad_minus,quad_plus,ordered,max_mismatch\n";
  for (const auto& p : grid)
    os << fmt(p.t) << ',' << fmt(p.ft_minus) << ',' << fmt(p.band) << ',' << fmt(p.ft_plus) << ','
       << fmt(p.quad_minus) << ',' << fmt(p.quad_plus) << ',' << (p.ordered ? 1 : 0) << ',' << fmt(p.max_mismatch)
       << '\n';
  return os.str();
}

void write_bundle(const VerifyReport& report, const std::string& directory) {
  namespace fs = std::filesystem;
  fs::create_directories(directory);
  auto put = [&](const std::string& name, const std::string& text) {
    std::ofstream f(fs::path(directory) / name, std::ios::binary);
    if (!f) throw Error("cannot write " + (fs::path(directory) / name).string());
    f << text;
  };
  put("summary.json", report_json(report) + "\n");
  put("ratios.csv", series_csv(report.series));
  put("sandwich.csv", sandwich_csv(report.sandwich));
  put("arcs.csv", arcs_csv(report.arcs));
  put("kernel_grid.csv", kernel_grid_csv(report.kernel_grid));
}

}  // namespace shiftlab
