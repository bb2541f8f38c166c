#include "shiftlab/forms.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

namespace shiftlab {

using json = nlohmann::json;

ExponentVector::ExponentVector(std::vector<std::uint32_t> exps) : exps_(std::move(exps)) {
  for (auto e : exps_) degree_ += e;
}

bool operator<(const ExponentVector& a, const ExponentVector& b) {
  if (a.degree_ != b.degree_) return a.degree_ < b.degree_;
  // a precedes b iff a is grevlex-larger: last nonzero entry of a - b negative.
  for (std::size_t i = a.exps_.size(); i-- > 0;) {
    if (a.exps_[i] != b.exps_[i]) return a.exps_[i] < b.exps_[i];
  }
  return false;
}

std::string ExponentVector::str() const {
  std::string s = "(";
  for (std::size_t i = 0; i < exps_.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(exps_[i]);
  }
  return s + ")";
}

std::vector<ExponentVector> monomials(std::size_t n, unsigned j) {
  std::vector<ExponentVector> out;
  std::vector<std::uint32_t> e(n, 0);
  // Enumerate compositions of j into n parts.
  auto rec = [&](auto&& self, std::size_t pos, unsigned remaining) -> void {
    if (pos + 1 == n) {
      e[pos] = remaining;
      out.emplace_back(e);
      return;
    }
    for (unsigned v = 0; v <= remaining; ++v) {
      e[pos] = v;
      self(self, pos + 1, remaining - v);
    }
  };
  if (n == 0) return out;
  rec(rec, 0, j);
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------- Form

Form::Form(std::size_t n, unsigned d, Terms terms) : n_(n), d_(d) {
  if (n < 1) throw InvalidArgument("a form needs at least one variable");
  if (d < 2) throw InvalidArgument("form degree must be at least 2");
  for (auto& [e, c] : terms) {
    if (e.size() != n) throw DimensionMismatch("exponent vector " + e.str() + " has wrong length");
    if (e.degree() != d) throw InvalidArgument("term " + e.str() + " is not of degree " + std::to_string(d));
    if (c != 0) terms_.emplace(e, c);
  }
}

Form Form::linear(std::size_t n, Terms terms) {
  Form f;
  f.n_ = n;
  f.d_ = 1;
  for (auto& [e, c] : terms) {
    if (e.size() != n || e.degree() != 1) throw InvalidArgument("linear form term " + e.str() + " malformed");
    if (c != 0) f.terms_.emplace(e, c);
  }
  return f;
}

bool Form::is_diagonal() const {
  for (const auto& [e, c] : terms_) {
    int nonzero = 0;
    for (auto v : e.exps()) nonzero += v != 0;
    if (nonzero != 1) return false;
  }
  return true;
}

BigInt Form::content() const {
  BigInt g = 0;
  for (const auto& [e, c] : terms_) g = gcd(g, c);
  return g;
}

Form Form::scaled(const BigInt& factor) const {
  Form f = *this;
  f.terms_.clear();
  if (factor != 0)
    for (const auto& [e, c] : terms_) f.terms_.emplace(e, c * factor);
  return f;
}

std::string Form::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    first = false;
    BigInt a = boost::multiprecision::abs(c);
    bool wrote = false;
    if (a != 1) {
      os << a;
      wrote = true;
    }
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      if (wrote) os << "*";
      os << "x" << (i + 1);
      if (e[i] > 1) os << "^" << e[i];
      wrote = true;
    }
  }
  return os.str();
}

// ---------------------------------------------------------------- Polynomial

Polynomial::Polynomial(std::size_t n, Terms terms) : n_(n) {
  for (auto& [e, c] : terms) add_term(e, c);
}

Polynomial Polynomial::from_form(const Form& f) {
  Polynomial p(f.n());
  for (const auto& [e, c] : f.terms()) p.add_term(e, Rational(c));
  return p;
}

void Polynomial::add_term(const ExponentVector& e, const Rational& c) {
  if (e.size() != n_) throw DimensionMismatch("exponent vector " + e.str() + " has wrong length");
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Polynomial Polynomial::derivative(std::size_t var) const {
  if (var >= n_) throw DimensionMismatch("derivative variable out of range");
  Polynomial out(n_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    auto exps = e.exps();
    const auto power = exps[var];
    exps[var] -= 1;
    out.add_term(ExponentVector(std::move(exps)), c * power);
  }
  return out;
}

namespace {

template <class T>
T monomial_value(const ExponentVector& e, const std::vector<T>& x) {
  T v = 1;
  for (std::size_t i = 0; i < e.size(); ++i)
    for (std::uint32_t p = 0; p < e[i]; ++p) v *= x[i];
  return v;
}

}  // namespace

Rational Polynomial::evaluate(const std::vector<Rational>& x) const {
  if (x.size() != n_) throw DimensionMismatch("point has " + std::to_string(x.size()) + " coordinates, expected " + std::to_string(n_));
  Rational s = 0;
  for (const auto& [e, c] : terms_) s += c * monomial_value(e, x);
  return s;
}

Rational eval_form(const Form& f, const std::vector<Rational>& x) {
  if (x.size() != f.n()) throw DimensionMismatch("point has " + std::to_string(x.size()) + " coordinates, expected " + std::to_string(f.n()));
  Rational s = 0;
  for (const auto& [e, c] : f.terms()) s += Rational(c) * monomial_value(e, x);
  return s;
}

Real eval_form(const Form& f, const std::vector<Real>& x) {
  if (x.size() != f.n()) throw DimensionMismatch("point has wrong number of coordinates");
  Real s = 0;
  for (const auto& [e, c] : f.terms()) s += Real(c) * monomial_value(e, x);
  return s;
}

std::vector<Polynomial> gradient(const Form& f) {
  Polynomial p = Polynomial::from_form(f);
  std::vector<Polynomial> g;
  g.reserve(f.n());
  for (std::size_t i = 0; i < f.n(); ++i) g.push_back(p.derivative(i));
  return g;
}

Polynomial directional_derivative_ones(const Form& f) {
  Polynomial out(f.n());
  for (const auto& part : gradient(f))
    for (const auto& [e, c] : part.terms()) out.add_term(e, c);
  return out;
}

// ---------------------------------------------------------------- FormSystem

FormSystem::FormSystem(std::vector<Form> forms, std::int64_t sigma, bool rescaled)
    : forms_(std::move(forms)), sigma_(sigma), rescaled_(rescaled) {
  if (forms_.empty()) throw InvalidArgument("a form system needs at least one form");
  if (sigma < 0) throw InvalidArgument("sigma must be nonnegative");
  n_ = forms_.front().n();
  d_ = forms_.front().d();
  for (const auto& f : forms_)
    if (f.n() != n_ || f.d() != d_) throw DimensionMismatch("all forms must share n and d");
  // Linear test integrands (d = 1) have no meaningful kappa.
  if (d_ >= 2) {
    BigInt denom = BigInt(forms_.size()) * (d_ - 1) * (BigInt(1) << (d_ - 1));
    kappa_ = Rational(BigInt(static_cast<std::int64_t>(n_) - sigma_), denom);
  }
}

bool FormSystem::is_diagonal() const {
  return std::all_of(forms_.begin(), forms_.end(), [](const Form& f) { return f.is_diagonal(); });
}

RescaleResult rescale_to_dfactorial(const FormSystem& sys) {
  const BigInt dfact = factorial(sys.d());
  std::vector<Form> forms;
  std::vector<BigInt> multipliers;
  for (const auto& f : sys.forms()) {
    BigInt g = gcd(dfact, f.content());
    BigInt m = g == 0 ? BigInt(1) : BigInt(dfact / g);
    multipliers.push_back(m);
    forms.push_back(f.scaled(m));
  }
  return {FormSystem(std::move(forms), sys.sigma(), true), std::move(multipliers)};
}

// ---------------------------------------------------------------- ShiftExpansion

ShiftExpansion::ShiftExpansion(std::size_t n, unsigned d, std::vector<Table> coeffs, std::vector<BigInt> value_at_ones)
    : n_(n), d_(d), coeffs_(std::move(coeffs)), value_at_ones_(std::move(value_at_ones)) {}

BigInt ShiftExpansion::coeff(std::size_t k, const ExponentVector& j) const {
  const auto& t = coeffs_.at(k);
  auto it = t.find(j);
  return it == t.end() ? BigInt(0) : it->second;
}

ShiftExpansion taylor_shift(const FormSystem& sys) {
  const std::size_t n = sys.n();
  const unsigned d = sys.d();
  const std::vector<Rational> ones(n, Rational(1));
  std::vector<ShiftExpansion::Table> tables(sys.R());
  std::vector<BigInt> at_ones;
  for (std::size_t k = 0; k < sys.R(); ++k) {
    const Polynomial f = Polynomial::from_form(sys.form(k));
    at_ones.push_back(boost::multiprecision::numerator(f.evaluate(ones)));
    for (unsigned deg = 1; deg <= d; ++deg) {
      for (const auto& j : monomials(n, deg)) {
        Polynomial p = f;
        BigInt jfact = 1;
        for (std::size_t i = 0; i < n && !p.is_zero(); ++i) {
          for (std::uint32_t t = 0; t < j[i]; ++t) p = p.derivative(i);
          jfact *= factorial(j[i]);
        }
        if (p.is_zero()) continue;
        Rational v = p.evaluate(ones) / Rational(jfact);
        if (boost::multiprecision::denominator(v) != 1)
          throw Error("shift coefficient " + j.str() + " is not an integer");
        if (v != 0) tables[k].emplace(j, boost::multiprecision::numerator(v));
      }
    }
  }
  return ShiftExpansion(n, d, std::move(tables), std::move(at_ones));
}

Polynomial slice(const ShiftExpansion& exp, std::size_t k, unsigned j) {
  if (k >= exp.R()) throw InvalidArgument("form index out of range");
  if (j < 1 || j > exp.d()) throw InvalidArgument("slice degree out of range");
  Polynomial p(exp.n());
  for (const auto& [e, c] : exp.table(k))
    if (e.degree() == j) p.add_term(e, Rational(c));
  return p;
}

IntMatrix slice_matrix(const ShiftExpansion& exp, unsigned j) {
  if (j < 1 || j > exp.d()) throw InvalidArgument("slice degree out of range");
  const auto rows = monomials(exp.n(), j);
  IntMatrix c(rows.size(), exp.R());
  for (std::size_t t = 0; t < rows.size(); ++t)
    for (std::size_t k = 0; k < exp.R(); ++k) c(t, k) = exp.coeff(k, rows[t]);
  return c;
}

std::set<unsigned> independent_degrees(const ShiftExpansion& exp) {
  std::set<unsigned> s;
  for (unsigned j = 1; j <= exp.d(); ++j)
    if (rank(slice_matrix(exp, j)) == exp.R()) s.insert(j);
  return s;
}

Rational taylor_reconstruct(const ShiftExpansion& exp, std::size_t k, const Rational& mu,
                            const std::vector<Rational>& x) {
  if (x.size() != exp.n()) throw DimensionMismatch("point has wrong number of coordinates");
  Rational mu_pow_d = 1;
  for (unsigned i = 0; i < exp.d(); ++i) mu_pow_d *= mu;
  Rational total = mu_pow_d * Rational(exp.value_at_ones(k));
  for (unsigned j = 1; j <= exp.d(); ++j) {
    Rational mu_pow = 1;
    for (unsigned i = 0; i < exp.d() - j; ++i) mu_pow *= mu;
    total += mu_pow * slice(exp, k, j).evaluate(x);
  }
  return total;
}

// ---------------------------------------------------------------- hypotheses

HypothesisReport check_hypotheses(const FormSystem& sys, const ProbeOptions& probe) {
  HypothesisReport rep;
  const BigInt R = sys.R();
  const unsigned d = sys.d();
  rep.numvars_threshold = BigInt(sys.sigma()) + R * (R + 1) * (d - 1) * (BigInt(1) << (d - 1));
  rep.numvars_ok = BigInt(sys.n()) > rep.numvars_threshold;
  rep.kappa = sys.kappa();
  rep.kappa_exceeds_R_plus_1 = rep.kappa > Rational(R + 1);

  const ShiftExpansion exp = taylor_shift(sys);
  rep.slice_independent_degrees = independent_degrees(exp);
  rep.top_slice_ok = rep.slice_independent_degrees.count(d) > 0;
  const BigInt n_dm1 = binomial(static_cast<unsigned>(d - 1 + sys.n() - 1), static_cast<unsigned>(sys.n() - 1));
  rep.gradient_slice_ok = rep.slice_independent_degrees.count(d - 1) > 0 && R <= n_dm1;

  std::vector<std::vector<Polynomial>> grads;
  for (const auto& f : sys.forms()) grads.push_back(gradient(f));
  std::mt19937_64 rng(probe.seed);
  std::uniform_int_distribution<std::int64_t> num(-probe.height, probe.height);
  std::uniform_int_distribution<std::int64_t> den(1, probe.height);
  rep.sigma_probe.points = probe.points;
  rep.sigma_probe.min_rank = sys.R();
  for (std::size_t s = 0; s < probe.points; ++s) {
    std::vector<Rational> x(sys.n());
    for (auto& xi : x) xi = Rational(BigInt(num(rng)), BigInt(den(rng)));
    RationalMatrix jac(sys.R(), sys.n());
    for (std::size_t k = 0; k < sys.R(); ++k)
      for (std::size_t i = 0; i < sys.n(); ++i) jac(k, i) = grads[k][i].evaluate(x);
    const std::size_t r = rank(jac);
    rep.sigma_probe.min_rank = std::min(rep.sigma_probe.min_rank, r);
    rep.sigma_probe.max_rank = std::max(rep.sigma_probe.max_rank, r);
    if (r < sys.R()) ++rep.sigma_probe.deficient;
  }
  return rep;
}

// ---------------------------------------------------------------- documents

namespace {

std::int64_t require_int(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ParseError(where + ": missing field '" + key + "'");
  const auto& v = j.at(key);
  if (!v.is_number_integer()) throw ParseError(where + "." + key + ": expected an integer");
  return v.get<std::int64_t>();
}

}  // namespace

FormSystem parse_form_document(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("form document: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("form document: top level must be an object");
  const auto n = require_int(doc, "n", "form document");
  const auto d = require_int(doc, "d", "form document");
  const auto sigma = doc.contains("sigma") ? require_int(doc, "sigma", "form document") : 0;
  if (n < 1) throw ParseError("form document.n: must be >= 1");
  if (d < 2) throw ParseError("form document.d: must be >= 2");
  if (!doc.contains("forms") || !doc.at("forms").is_array() || doc.at("forms").empty())
    throw ParseError("form document.forms: expected a nonempty array");
  std::vector<Form> forms;
  const auto& arr = doc.at("forms");
  for (std::size_t k = 0; k < arr.size(); ++k) {
    const std::string where = "forms[" + std::to_string(k) + "]";
    if (!arr[k].is_array()) throw ParseError(where + ": expected an array of terms");
    Form::Terms terms;
    for (std::size_t t = 0; t < arr[k].size(); ++t) {
      const std::string tw = where + "[" + std::to_string(t) + "]";
      const auto& term = arr[k][t];
      if (!term.is_object() || !term.contains("coeff") || !term.contains("exps"))
        throw ParseError(tw + ": expected {\"coeff\", \"exps\"}");
      if (!term.at("coeff").is_string()) throw ParseError(tw + ".coeff: expected an integer string");
      BigInt c;
      try {
        c = parse_integer(term.at("coeff").get<std::string>());
      } catch (const ParseError& e) {
        throw ParseError(tw + ".coeff: " + e.what());
      }
      const auto& ex = term.at("exps");
      if (!ex.is_array() || ex.size() != static_cast<std::size_t>(n))
        throw ParseError(tw + ".exps: expected " + std::to_string(n) + " exponents");
      std::vector<std::uint32_t> e;
      for (const auto& v : ex) {
        if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
          throw ParseError(tw + ".exps: exponents must be nonnegative integers");
        e.push_back(v.get<std::uint32_t>());
      }
      ExponentVector ev(std::move(e));
      if (ev.degree() != static_cast<std::uint32_t>(d))
        throw ParseError(tw + ".exps: total degree " + std::to_string(ev.degree()) + " != d");
      terms[ev] += c;
    }
    forms.emplace_back(static_cast<std::size_t>(n), static_cast<unsigned>(d), std::move(terms));
  }
  try {
    return FormSystem(std::move(forms), sigma);
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("form document: ") + e.what());
  }
}

FormSystem load_form_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open form document '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_form_document(buf.str());
}

std::string form_document(const FormSystem& sys) {
  json doc;
  doc["n"] = sys.n();
  doc["d"] = sys.d();
  doc["sigma"] = sys.sigma();
  json forms = json::array();
  for (const auto& f : sys.forms()) {
    json terms = json::array();
    for (const auto& [e, c] : f.terms()) terms.push_back({{"coeff", c.str()}, {"exps", e.exps()}});
    forms.push_back(terms);
  }
  doc["forms"] = forms;
  return doc.dump(2);
}

}  // namespace shiftlab
