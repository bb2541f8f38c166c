#include "shiftlab/config.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace shiftlab {

namespace {

using nlohmann::json;

std::string tag(const std::string& key) { return "config." + key; }

const json* find(const json& obj, const std::string& key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

const std::string& literal(const json& v, const std::string& where) {
  if (!v.is_string()) throw ParseError(where + ": numeric values are written as strings");
  return v.get_ref<const std::string&>();
}

Rational rational_at(const json& v, const std::string& where) {
  try {
    return parse_rational(literal(v, where));
  } catch (const ParseError& e) {
    if (std::string(e.what()).rfind(where, 0) == 0) throw;
    throw ParseError(where + ": " + e.what());
  }
}

BigInt integer_at(const json& v, const std::string& where) {
  try {
    return parse_integer(literal(v, where));
  } catch (const ParseError& e) {
    if (std::string(e.what()).rfind(where, 0) == 0) throw;
    throw ParseError(where + ": " + e.what());
  }
}

std::int64_t int64_at(const json& v, const std::string& where, std::int64_t lo, std::int64_t hi) {
  const BigInt b = integer_at(v, where);
  if (b < lo || b > hi) throw ParseError(where + ": must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<std::int64_t>(b);
}

double double_at(const json& v, const std::string& where) { return to_double(rational_at(v, where)); }

// Decimal literals keep all their digits; p/q literals go through the rational.
Real real_at(const json& v, const std::string& where) { return to_real(rational_at(v, where)); }

bool bool_at(const json& v, const std::string& where) {
  if (!v.is_boolean()) throw ParseError(where + ": expected true or false");
  return v.get<bool>();
}

const json& array_at(const json& v, const std::string& where) {
  if (!v.is_array()) throw ParseError(where + ": expected an array");
  return v;
}

IrrationalMu mu_at(const json& v, const std::string& where) {
  if (!v.is_object()) throw ParseError(where + ": expected an object with a \"kind\"");
  const json* kind = find(v, "kind");
  if (!kind || !kind->is_string()) throw ParseError(where + ".kind: expected a string");
  const std::string k = kind->get<std::string>();
  auto need = [&](const char* key) -> const json& {
    const json* f = find(v, key);
    if (!f) throw ParseError(where + "." + key + ": missing");
    return *f;
  };
  try {
    if (k == "sqrt") return IrrationalMu::sqrt_of(integer_at(need("D"), where + ".D"));
    if (k == "quadratic") {
      // (p + q sqrt D) / r
      return IrrationalMu::quadratic(integer_at(need("p"), where + ".p"), integer_at(need("q"), where + ".q"),
                                     integer_at(need("D"), where + ".D"), integer_at(need("r"), where + ".r"));
    }
    if (k == "decimal") {
      std::optional<Real> err;
      if (const json* e = find(v, "error")) err = real_at(*e, where + ".error");
      return IrrationalMu::decimal(literal(need("literal"), where + ".literal"), err);
    }
    if (k == "rational") return IrrationalMu::rational(rational_at(need("value"), where + ".value"));
  } catch (const ParseError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw ParseError(where + ": " + e.what());
  }
  throw ParseError(where + ".kind: expected sqrt, quadratic, decimal or rational");
}

void check_known(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* k : keys) ok |= key == k;
    if (!ok) throw ParseError(where + "." + key + ": unknown key");
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text, const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("config: top level must be an object");
  check_known(doc, "config",
              {"system", "mu", "tau", "eta", "P", "theta0", "density", "newton", "method", "tolerance",
               "waive_hypotheses", "sandwich", "c", "alphas", "probe_P", "out", "seed", "threads", "budget"});
  auto need = [&](const char* key) -> const json& {
    const json* f = find(doc, key);
    if (!f) throw ParseError(tag(key) + ": missing");
    return *f;
  };

  const json& sys = need("system");
  std::string source;
  auto read_system = [&]() -> FormSystem {
    if (sys.is_string()) {
      std::filesystem::path p(sys.get<std::string>());
      if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
      source = p.string();
      try {
        return load_form_document(p.string());
      } catch (const Error& e) {
        throw ParseError(tag("system") + " (" + p.string() + "): " + e.what());
      }
    }
    if (sys.is_object()) {
      source = "inline";
      try {
        return parse_form_document(sys.dump());
      } catch (const Error& e) {
        throw ParseError(tag("system") + ": " + e.what());
      }
    }
    throw ParseError(tag("system") + ": expected a path or an inline form document");
  };
  ExperimentConfig cfg(read_system());
  cfg.system_source = source;

  cfg.mu = mu_at(need("mu"), tag("mu"));

  const std::size_t R = cfg.system.R();
  if (const json* t = find(doc, "tau")) {
    const json& arr = array_at(*t, tag("tau"));
    for (std::size_t k = 0; k < arr.size(); ++k) cfg.tau.push_back(rational_at(arr[k], tag("tau[" + std::to_string(k) + "]")));
  } else {
    cfg.tau.assign(R, Rational(0));
  }
  if (cfg.tau.size() != R)
    throw ParseError(tag("tau") + ": expected " + std::to_string(R) + " entries, one per form");

  cfg.eta = rational_at(need("eta"), tag("eta"));
  if (cfg.eta <= 0) throw ParseError(tag("eta") + ": must be positive");

  const json& Ps = array_at(need("P"), tag("P"));
  if (Ps.empty()) throw ParseError(tag("P") + ": expected at least one value");
  for (std::size_t i = 0; i < Ps.size(); ++i) {
    cfg.Ps.push_back(int64_at(Ps[i], tag("P[" + std::to_string(i) + "]"), 0, std::int64_t(1) << 40));
    if (i > 0 && cfg.Ps[i] <= cfg.Ps[i - 1]) throw ParseError(tag("P") + ": values must increase");
  }

  if (const json* t = find(doc, "theta0")) {
    cfg.theta0 = rational_at(*t, tag("theta0"));
    if (*cfg.theta0 <= 0) throw ParseError(tag("theta0") + ": must be positive");
  }

  if (const json* d = find(doc, "density")) {
    const std::string w = tag("density");
    if (!d->is_object()) throw ParseError(w + ": expected an object");
    check_known(*d, w, {"ladder", "samples", "shifts", "rel_tol"});
    if (const json* l = find(*d, "ladder")) {
      const json& arr = array_at(*l, w + ".ladder");
      cfg.density.ladder.clear();
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string wi = w + ".ladder[" + std::to_string(i) + "]";
        const double L = double_at(arr[i], wi);
        if (L < 1) throw ParseError(wi + ": rungs must be >= 1");
        if (!cfg.density.ladder.empty() && L <= cfg.density.ladder.back())
          throw ParseError(w + ".ladder: rungs must increase");
        cfg.density.ladder.push_back(L);
      }
      if (cfg.density.ladder.empty()) throw ParseError(w + ".ladder: expected at least one rung");
    }
    if (const json* s = find(*d, "samples"))
      cfg.density.qmc.samples = static_cast<std::uint64_t>(int64_at(*s, w + ".samples", 1000, std::int64_t(1) << 40));
    if (const json* s = find(*d, "shifts"))
      cfg.density.qmc.shifts = static_cast<unsigned>(int64_at(*s, w + ".shifts", 2, 1 << 16));
    if (const json* s = find(*d, "rel_tol")) {
      cfg.density.rel_tol = double_at(*s, w + ".rel_tol");
      if (!(cfg.density.rel_tol > 0)) throw ParseError(w + ".rel_tol: must be positive");
    }
  }
  if (const json* nw = find(doc, "newton")) {
    const std::string w = tag("newton");
    if (!nw->is_object()) throw ParseError(w + ": expected an object");
    check_known(*nw, w, {"attempts", "max_iterations"});
    if (const json* a = find(*nw, "attempts")) cfg.newton.attempts = static_cast<unsigned>(int64_at(*a, w + ".attempts", 1, 1 << 20));
    if (const json* a = find(*nw, "max_iterations"))
      cfg.newton.max_iterations = static_cast<unsigned>(int64_at(*a, w + ".max_iterations", 1, 1 << 20));
  }

  if (const json* m = find(doc, "method")) {
    if (!m->is_string()) throw ParseError(tag("method") + ": expected generic, diagonal-mitm or auto");
    try {
      cfg.method = parse_count_method(m->get<std::string>());
    } catch (const Error& e) {
      throw ParseError(tag("method") + ": " + e.what());
    }
  }
  if (const json* t = find(doc, "tolerance")) {
    cfg.tolerance = double_at(*t, tag("tolerance"));
    if (!(cfg.tolerance > 0)) throw ParseError(tag("tolerance") + ": must be positive");
  }
  if (const json* w = find(doc, "waive_hypotheses")) cfg.waive_hypotheses = bool_at(*w, tag("waive_hypotheses"));
  if (const json* s = find(doc, "sandwich")) {
    const std::string w = tag("sandwich");
    if (!s->is_object()) throw ParseError(w + ": expected an object");
    check_known(*s, w, {"enabled", "A"});
    if (const json* e = find(*s, "enabled")) cfg.sandwich = bool_at(*e, w + ".enabled");
    if (const json* a = find(*s, "A")) {
      cfg.sandwich_A = double_at(*a, w + ".A");
      if (!(*cfg.sandwich_A > 0)) throw ParseError(w + ".A: must be positive");
    }
  }
  if (const json* c = find(doc, "c")) cfg.c = double_at(*c, tag("c"));

  if (const json* a = find(doc, "alphas")) {
    const json& arr = array_at(*a, tag("alphas"));
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string wi = tag("alphas[" + std::to_string(i) + "]");
      const json& row = array_at(arr[i], wi);
      if (row.size() != R) throw ParseError(wi + ": expected " + std::to_string(R) + " entries");
      std::vector<Real> alpha;
      for (std::size_t k = 0; k < row.size(); ++k) alpha.push_back(real_at(row[k], wi + "[" + std::to_string(k) + "]"));
      cfg.alphas.push_back(std::move(alpha));
    }
  }

  cfg.probe_P = cfg.Ps.front();
  if (const json* p = find(doc, "probe_P")) cfg.probe_P = int64_at(*p, tag("probe_P"), 1, std::int64_t(1) << 40);

  if (const json* o = find(doc, "out")) {
    if (!o->is_string()) throw ParseError(tag("out") + ": expected a directory path");
    cfg.out_dir = o->get<std::string>();
  }
  if (const json* s = find(doc, "seed"))
    cfg.seed = static_cast<std::uint64_t>(int64_at(*s, tag("seed"), 0, std::numeric_limits<std::int64_t>::max()));
  if (const json* t = find(doc, "threads")) cfg.threads = static_cast<unsigned>(int64_at(*t, tag("threads"), 1, 1024));
  if (const json* b = find(doc, "budget")) {
    cfg.budget = double_at(*b, tag("budget"));
    if (!(cfg.budget > 0)) throw ParseError(tag("budget") + ": must be positive");
  }
  apply_overrides(cfg, {});
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_config(buf.str(), dir.empty() ? "." : dir.string());
}

void apply_overrides(ExperimentConfig& config, const ConfigOverrides& o) {
  if (o.out_dir) config.out_dir = *o.out_dir;
  if (o.threads) {
    if (*o.threads < 1) throw InvalidArgument("threads must be >= 1");
    config.threads = *o.threads;
  }
  if (o.seed) config.seed = *o.seed;
  if (o.budget) {
    if (!(*o.budget > 0)) throw InvalidArgument("budget must be positive");
    config.budget = *o.budget;
  }
  config.density.qmc.seed = config.seed;
  config.density.qmc.threads = config.threads;
  config.newton.seed = config.seed;
}

ExperimentSpec to_experiment(const ExperimentConfig& c) {
  RPlusMinusOptions sandwich;
  sandwich.A = c.sandwich_A;
  sandwich.threads = c.threads;
  return ExperimentSpec{c.system, c.mu, c.tau, c.eta, c.Ps, c.theta0, c.density, c.newton, c.method,
                        CountOptions{c.budget, c.threads}, c.tolerance, c.waive_hypotheses, c.sandwich, sandwich};
}

CountSpec to_count_spec(const ExperimentConfig& c, std::int64_t P) {
  return CountSpec{c.system, taylor_shift(c.system), c.mu, c.tau, c.eta, P, c.method};
}

}  // namespace shiftlab
