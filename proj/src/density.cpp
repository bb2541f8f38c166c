#include "shiftlab/density.hpp"

#include "shiftlab/parallel.hpp"

#include <Eigen/Dense>
#include <boost/random/sobol.hpp>
#include <json.hpp>

#include <cmath>
#include <random>

namespace shiftlab {

double tent(double L, double xi) {
  if (!(L >= 1)) throw InvalidArgument("tent needs L >= 1");
  return L * std::max(0.0, 1 - L * std::fabs(xi));
}

double tent_product(double L, const std::vector<double>& xi) {
  double p = 1;
  for (double x : xi) p *= tent(L, x);
  return p;
}

CompiledSystem::CompiledSystem(const FormSystem& system) : R_(system.R()), n_(system.n()) {
  for (std::size_t k = 0; k < R_; ++k)
    for (const auto& [e, c] : system.form(k).terms()) terms_.push_back({k, static_cast<double>(c), e.exps()});
}

void CompiledSystem::values(const double* t, double* out) const {
  std::fill(out, out + R_, 0.0);
  for (const auto& term : terms_) {
    double m = term.coeff;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::uint32_t p = 0; p < term.exps[i]; ++p) m *= t[i];
    out[term.form] += m;
  }
}

void CompiledSystem::jacobian(const double* t, double* out) const {
  std::fill(out, out + R_ * n_, 0.0);
  for (const auto& term : terms_) {
    for (std::size_t v = 0; v < n_; ++v) {
      if (term.exps[v] == 0) continue;
      double m = term.coeff * term.exps[v];
      for (std::size_t i = 0; i < n_; ++i) {
        const std::uint32_t e = i == v ? term.exps[i] - 1 : term.exps[i];
        for (std::uint32_t p = 0; p < e; ++p) m *= t[i];
      }
      out[term.form * n_ + v] += m;
    }
  }
}

std::vector<TentEstimate> tent_integrals(const FormSystem& system, const std::vector<double>& Ls,
                                         const QmcOptions& options) {
  if (options.samples < 1000) throw InvalidArgument("tent_integral needs at least 1000 samples");
  if (options.shifts < 2) throw InvalidArgument("tent_integral needs at least 2 shifts");
  for (double L : Ls)
    if (!(L >= 1)) throw InvalidArgument("tent_integral needs L >= 1");
  const CompiledSystem sys(system);
  const std::size_t n = sys.n(), R = sys.R();
  const std::uint64_t per_shift = (options.samples + options.shifts - 1) / options.shifts;

  std::mt19937_64 rng(options.seed);
  std::vector<std::vector<std::uint64_t>> shift_words(options.shifts, std::vector<std::uint64_t>(n));
  for (auto& s : shift_words)
    for (auto& w : s) w = rng();

  const double volume = std::ldexp(1.0, static_cast<int>(n));
  auto run_shift = [&](std::size_t s) {
    boost::random::sobol_engine<std::uint64_t, 64> gen(n);
    std::vector<double> t(n), f(R);
    std::vector<long double> acc(Ls.size(), 0);
    for (std::uint64_t i = 0; i < per_shift; ++i) {
      for (std::size_t a = 0; a < n; ++a) {
        const std::uint64_t v = (gen() ^ shift_words[s][a]) >> 11;
        t[a] = 2 * ((static_cast<double>(v) + 0.5) * 0x1p-53) - 1;
      }
      sys.values(t.data(), f.data());
      for (std::size_t l = 0; l < Ls.size(); ++l) {
        double p = 1;
        for (std::size_t k = 0; k < R && p != 0; ++k) p *= Ls[l] * std::max(0.0, 1 - Ls[l] * std::fabs(f[k]));
        acc[l] += p;
      }
    }
    std::vector<double> means(Ls.size());
    for (std::size_t l = 0; l < Ls.size(); ++l)
      means[l] = volume * static_cast<double>(acc[l] / static_cast<long double>(per_shift));
    return means;
  };
  const auto per = parallel_map<std::vector<double>>(options.shifts, options.threads, run_shift);

  std::vector<TentEstimate> out;
  const double m = options.shifts;
  for (std::size_t l = 0; l < Ls.size(); ++l) {
    double mean = 0;
    for (const auto& p : per) mean += p[l];
    mean /= m;
    double ss = 0;
    for (const auto& p : per) ss += (p[l] - mean) * (p[l] - mean);
    out.push_back({Ls[l], mean, std::sqrt(ss / (m - 1) / m), per_shift * options.shifts});
  }
  return out;
}

TentEstimate tent_integral(const FormSystem& system, double L, const QmcOptions& options) {
  return tent_integrals(system, {L}, options).front();
}

DensityEstimate density(const FormSystem& system, const DensityOptions& options) {
  if (options.ladder.empty()) throw InvalidArgument("density needs a nonempty ladder");
  for (std::size_t i = 1; i < options.ladder.size(); ++i)
    if (!(options.ladder[i] > options.ladder[i - 1])) throw InvalidArgument("density ladder must be increasing");
  DensityEstimate est;
  est.ladder = tent_integrals(system, options.ladder, options.qmc);
  const auto& last = est.ladder.back();
  est.c = last.value;
  est.std_error = last.std_error;
  if (est.ladder.size() >= 2) {
    const auto& prev = est.ladder[est.ladder.size() - 2];
    const double combined = std::hypot(last.std_error, prev.std_error);
    est.converged = std::fabs(last.value - prev.value) < std::max(2 * combined, options.rel_tol * std::fabs(last.value));
  }
  return est;
}

std::string density_json(const DensityEstimate& est) {
  nlohmann::json j;
  j["c"] = est.c;
  j["std_error"] = est.std_error;
  j["converged"] = est.converged;
  j["ladder"] = nlohmann::json::array();
  for (const auto& r : est.ladder)
    j["ladder"].push_back({{"L", r.L}, {"I_L", r.value}, {"samples", r.samples}, {"std_error", r.std_error}});
  return j.dump(2);
}

double jacobian_sigma_min(const CompiledSystem& sys, const std::vector<double>& t) {
  const std::size_t R = sys.R(), n = sys.n();
  if (R > n) return 0;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> J(R, n);
  sys.jacobian(t.data(), J.data());
  for (std::size_t k = 0; k < R; ++k) {
    const double norm = J.row(k).norm();
    if (norm == 0) return 0;
    J.row(k) /= norm;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
  return svd.singularValues().minCoeff();
}

std::optional<RealZero> find_nonsingular_real_zero(const FormSystem& system, const NewtonOptions& options) {
  const CompiledSystem sys(system);
  const std::size_t R = sys.R(), n = sys.n();
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> u(-1, 1);

  auto to_sphere = [](Eigen::VectorXd& t) {
    const double norm = t.norm();
    if (norm == 0) return false;
    t *= 0.5 / norm;
    return true;
  };
  auto eval = [&](const Eigen::VectorXd& t) {
    Eigen::VectorXd f(R);
    sys.values(t.data(), f.data());
    return f;
  };

  for (unsigned attempt = 0; attempt < options.attempts; ++attempt) {
    Eigen::VectorXd t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = u(rng);
    if (!to_sphere(t)) continue;
    Eigen::VectorXd f = eval(t);
    for (unsigned it = 0; it < options.max_iterations && f.lpNorm<Eigen::Infinity>() >= options.residual_tol; ++it) {
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> J(R, n);
      sys.jacobian(t.data(), J.data());
      const Eigen::VectorXd step = J.completeOrthogonalDecomposition().solve(f);
      bool accepted = false;
      for (double lambda = 1; lambda > 1e-8; lambda /= 2) {
        Eigen::VectorXd cand = t - lambda * step;
        if (!to_sphere(cand)) continue;
        Eigen::VectorXd fc = eval(cand);
        if (fc.norm() < f.norm()) {
          t = cand;
          f = fc;
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
    }
    if (f.lpNorm<Eigen::Infinity>() >= options.residual_tol) continue;
    std::vector<double> pt(t.data(), t.data() + n);
    if (t.lpNorm<Eigen::Infinity>() >= 1) continue;
    const double sigma = jacobian_sigma_min(sys, pt);
    if (sigma <= options.rank_tol) continue;
    return RealZero{pt, f.lpNorm<Eigen::Infinity>(), sigma, attempt};
  }
  return std::nullopt;
}

}  // namespace shiftlab
