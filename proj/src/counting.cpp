#include "shiftlab/counting.hpp"

#include "shiftlab/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <sstream>

namespace shiftlab {

namespace {

constexpr double kU = 0x1p-53;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void validate(const CountSpec& spec) {
  const auto& sys = spec.system;
  if (spec.P < 0) throw InvalidArgument("count needs P >= 0");
  if (spec.eta <= 0) throw InvalidArgument("count needs eta > 0");
  if (spec.tau.size() != sys.R()) throw DimensionMismatch("count: tau has the wrong length");
  if (spec.expansion.R() != sys.R() || spec.expansion.n() != sys.n() || spec.expansion.d() != sys.d())
    throw DimensionMismatch("count: expansion does not match the system");
}

Real abs_real(const Real& x) { return x < 0 ? Real(-x) : x; }

// Exact decision for one point, shared by both counting paths.
class BandOracle {
 public:
  explicit BandOracle(const CountSpec& spec) : spec_(spec), eta_(to_real(spec.eta)) {
    const unsigned d = spec.system.d();
    for (unsigned k = 0; k <= d; ++k) pow_.push_back(spec.mu.power(k));
    for (const auto& t : spec.tau) tau_.push_back(to_real(t));
  }

  Decision decide(const std::vector<std::int64_t>& x) const {
    const auto& exp = spec_.expansion;
    const unsigned d = exp.d();
    const auto exact_mu = spec_.mu.exact_rational();
    bool undecided = false;
    for (std::size_t k = 0; k < exp.R(); ++k) {
      std::vector<BigInt> F(d + 1, 0);
      for (const auto& [e, c] : exp.table(k)) {
        BigInt m = c;
        for (std::size_t i = 0; i < x.size(); ++i)
          for (std::uint32_t p = 0; p < e[i]; ++p) m *= x[i];
        F[e.degree()] += m;
      }
      if (exact_mu) {
        Rational v = -spec_.tau[k];
        Rational mp = 1;  // mu^{d-j}, j descending from d
        for (unsigned j = d; j >= 1; --j) {
          v += mp * Rational(F[j]);
          mp *= *exact_mu;
        }
        v += mp * Rational(exp.value_at_ones(k));
        if (v < 0) v = -v;
        if (v >= spec_.eta) return Decision::no;
        continue;
      }
      Enclosure v{-tau_[k], 0};
      for (unsigned j = 1; j <= d; ++j) {
        v.mid += Real(F[j]) * pow_[d - j].mid;
        v.rad += abs_real(Real(F[j])) * pow_[d - j].rad;
      }
      const Real f1(exp.value_at_ones(k));
      v.mid += f1 * pow_[d].mid;
      v.rad += abs_real(f1) * pow_[d].rad;
      const Enclosure absv{abs_real(v.mid), v.rad};
      switch (less_than(absv, Enclosure{eta_, 0})) {
        case Decision::no:
          return Decision::no;
        case Decision::undecided:
          undecided = true;
          break;
        case Decision::yes:
          break;
      }
    }
    return undecided ? Decision::undecided : Decision::yes;
  }

 private:
  const CountSpec& spec_;
  Real eta_;
  std::vector<Enclosure> pow_;
  std::vector<Real> tau_;
};

struct Tally {
  std::uint64_t count = 0;
  std::uint64_t flags = 0;
};

void resolve(const BandOracle& oracle, const std::vector<std::int64_t>& x, Tally& t) {
  switch (oracle.decide(x)) {
    case Decision::yes:
      ++t.count;
      break;
    case Decision::undecided:
      ++t.flags;
      break;
    case Decision::no:
      break;
  }
}

double double_with_error(const Real& v, double& err) {
  const double d = static_cast<double>(v);
  err += static_cast<double>(abs_real(v - Real(d)));
  return d;
}

// Doubles bracketing a positive rational.
std::pair<double, double> eta_bounds(const Rational& eta) {
  const double e = to_double(eta);
  return {e * (1 - 4 * kU), e * (1 + 4 * kU)};
}

}  // namespace

std::string to_string(CountMethod m) {
  switch (m) {
    case CountMethod::generic:
      return "generic";
    case CountMethod::diagonal_mitm:
      return "diagonal-mitm";
    case CountMethod::automatic:
      return "auto";
  }
  return "?";
}

CountMethod parse_count_method(const std::string& s) {
  if (s == "generic") return CountMethod::generic;
  if (s == "diagonal-mitm" || s == "mitm") return CountMethod::diagonal_mitm;
  if (s == "auto") return CountMethod::automatic;
  throw InvalidArgument("unknown count method '" + s + "'");
}

Decision band_membership(const CountSpec& spec, const std::vector<std::int64_t>& x) {
  validate(spec);
  if (x.size() != spec.system.n()) throw DimensionMismatch("band_membership: point has the wrong length");
  return BandOracle(spec).decide(x);
}

CountResult count_generic(const CountSpec& spec, const CountOptions& options) {
  validate(spec);
  const auto t0 = Clock::now();
  const auto& exp = spec.expansion;
  const std::size_t n = exp.n(), R = exp.R();
  const unsigned d = exp.d();
  const std::int64_t P = spec.P;
  const double points = std::pow(2.0 * static_cast<double>(P) + 1, static_cast<double>(n));
  if (points > options.budget)
    throw BudgetExceeded("count_generic: " + std::to_string(points) + " points exceed the budget");

  // Slice terms per (form, degree), with a bound on every forward difference.
  struct Term {
    i128 coeff;
    std::vector<std::uint32_t> exps;
  };
  std::vector<std::vector<std::vector<Term>>> terms(R, std::vector<std::vector<Term>>(d + 1));
  for (std::size_t k = 0; k < R; ++k) {
    std::vector<BigInt> mass(d + 1, 0);
    for (const auto& [e, c] : exp.table(k)) {
      mass[e.degree()] += c < 0 ? BigInt(-c) : c;
      terms[k][e.degree()].push_back({static_cast<i128>(c), e.exps()});
    }
    for (unsigned j = 1; j <= d; ++j) {
      const BigInt bound = mass[j] * boost::multiprecision::pow(BigInt(P + j + 1), j) * (BigInt(1) << j);
      if (bound > (BigInt(1) << 120))
        throw BudgetExceeded("count_generic: slice values would overflow 128-bit arithmetic");
    }
  }

  // v_k = c0_k + sum_j m_j F_{k,j}(x); every double carries an error bound.
  std::vector<double> m(d + 1), me(d + 1, 0);
  for (unsigned j = 1; j <= d; ++j) {
    const Enclosure pw = spec.mu.power(d - j);
    m[j] = double_with_error(pw.mid, me[j]);
    me[j] += static_cast<double>(pw.rad);
  }
  std::vector<double> c0(R), c0e(R, 0);
  {
    const Enclosure pd = spec.mu.power(d);
    for (std::size_t k = 0; k < R; ++k) {
      const Real f1(exp.value_at_ones(k));
      c0[k] = double_with_error(f1 * pd.mid - to_real(spec.tau[k]), c0e[k]);
      c0e[k] += static_cast<double>(abs_real(f1) * pd.rad);
    }
  }
  const auto [eta_lo, eta_hi] = eta_bounds(spec.eta);
  const double round_factor = (2.0 * d + 8) * kU;

  const BandOracle oracle(spec);
  const std::size_t inner = n - 1;
  const std::size_t slabs = n >= 2 ? static_cast<std::size_t>(2 * P + 1) : 1;

  auto upow = [](std::int64_t x, std::uint32_t e) {
    i128 r = 1;
    for (std::uint32_t i = 0; i < e; ++i) r *= x;
    return r;
  };

  auto slab = [&](std::size_t s) {
    Tally tally;
    std::vector<std::int64_t> x(n, -P);
    if (n >= 2) x[0] = -P + static_cast<std::int64_t>(s);
    // diff[k][j] is the forward-difference table of F_{k,j} along x[inner].
    std::vector<std::vector<std::vector<i128>>> diff(R, std::vector<std::vector<i128>>(d + 1));
    for (std::size_t k = 0; k < R; ++k)
      for (unsigned j = 1; j <= d; ++j) diff[k][j].assign(j + 1, 0);
    while (true) {
      for (std::size_t k = 0; k < R; ++k)
        for (unsigned j = 1; j <= d; ++j) {
          std::vector<i128> b(j + 1, 0);
          for (const auto& t : terms[k][j]) {
            i128 v = t.coeff;
            for (std::size_t i = 0; i < inner; ++i) v *= upow(x[i], t.exps[i]);
            b[t.exps[inner]] += v;
          }
          auto& df = diff[k][j];
          for (unsigned q = 0; q <= j; ++q) {
            const std::int64_t tq = -P + static_cast<std::int64_t>(q);
            i128 v = 0;
            for (unsigned p = 0; p <= j; ++p) v += b[p] * upow(tq, p);
            df[q] = v;
          }
          for (unsigned level = 1; level <= j; ++level)
            for (unsigned q = j; q >= level; --q) df[q] -= df[q - 1];
        }
      for (std::int64_t t = -P; t <= P; ++t) {
        bool out = false, sure = true;
        for (std::size_t k = 0; k < R && !out; ++k) {
          double S = c0[k], A = std::fabs(c0[k]), E = c0e[k];
          for (unsigned j = 1; j <= d; ++j) {
            const double F = static_cast<double>(diff[k][j][0]);
            const double term = m[j] * F;
            S += term;
            A += std::fabs(term);
            E += me[j] * std::fabs(F);
          }
          E = E * (1 + 1e-6) + round_factor * (A + eta_hi);
          const double a = std::fabs(S);
          if (a - E >= eta_hi) {
            out = true;
          } else if (!(a + E < eta_lo)) {
            sure = false;
          }
        }
        if (!out) {
          if (sure) {
            ++tally.count;
          } else {
            x[inner] = t;
            resolve(oracle, x, tally);
          }
        }
        for (std::size_t k = 0; k < R; ++k)
          for (unsigned j = 1; j <= d; ++j) {
            auto& df = diff[k][j];
            for (unsigned q = 0; q < j; ++q) df[q] += df[q + 1];
          }
      }
      std::size_t pos = inner;
      bool done = true;
      while (pos > 1) {
        --pos;
        if (x[pos] < P) {
          ++x[pos];
          for (std::size_t q = pos + 1; q < inner; ++q) x[q] = -P;
          done = false;
          break;
        }
      }
      if (done) break;
    }
    return tally;
  };

  CountResult res;
  res.P = P;
  res.method = CountMethod::generic;
  for (const auto& t : parallel_map<Tally>(slabs, options.threads, slab)) {
    res.count += t.count;
    res.boundary_flags += t.flags;
  }
  res.seconds = seconds_since(t0);
  return res;
}

namespace {

// Sorted values with a uniform bucket index for near-constant-time rank queries.
class SortedIndex {
 public:
  explicit SortedIndex(std::vector<double> v) : v_(std::move(v)) {
    if (v_.empty()) return;
    lo_ = v_.front();
    const double hi = v_.back();
    buckets_ = v_.size();
    width_ = hi > lo_ ? (hi - lo_) / static_cast<double>(buckets_) : 1;
    start_.resize(buckets_ + 2);
    std::size_t i = 0;
    for (std::size_t b = 0; b <= buckets_; ++b) {
      const double edge = lo_ + width_ * static_cast<double>(b);
      while (i < v_.size() && v_[i] < edge) ++i;
      start_[b] = i;
    }
    start_[buckets_ + 1] = v_.size();
  }

  // Number of entries < x.
  std::size_t less(double x) const { return rank(x, false); }
  // Number of entries <= x.
  std::size_t less_equal(double x) const { return rank(x, true); }
  double operator[](std::size_t i) const { return v_[i]; }
  std::size_t size() const { return v_.size(); }

 private:
  std::size_t rank(double x, bool inclusive) const {
    if (v_.empty()) return 0;
    const double pos = (x - lo_) / width_;
    if (!(pos >= 0)) return inclusive ? std::upper_bound(v_.begin(), v_.end(), x) - v_.begin()
                                      : std::lower_bound(v_.begin(), v_.end(), x) - v_.begin();
    std::size_t b = pos >= static_cast<double>(buckets_) ? buckets_ : static_cast<std::size_t>(pos);
    // the edge of bucket b may round either way, so widen by one bucket
    const std::size_t first = start_[b == 0 ? 0 : b - 1];
    const std::size_t last = start_[std::min(b + 2, buckets_ + 1)];
    auto begin = v_.begin() + static_cast<std::ptrdiff_t>(first);
    auto end = v_.begin() + static_cast<std::ptrdiff_t>(last);
    if (first > 0 && !(v_[first - 1] < x)) begin = v_.begin();
    if (last < v_.size() && !(v_[last] > x)) end = v_.end();
    auto it = inclusive ? std::upper_bound(begin, end, x) : std::lower_bound(begin, end, x);
    return static_cast<std::size_t>(it - v_.begin());
  }

  std::vector<double> v_;
  double lo_ = 0, width_ = 1;
  std::size_t buckets_ = 0;
  std::vector<std::size_t> start_;
};

// Merge-sort tree over points sorted by the first coordinate; counts points
// of an index range whose second coordinate lies in an interval.
class MergeSortTree {
 public:
  explicit MergeSortTree(const std::vector<double>& second) {
    size_ = 1;
    while (size_ < second.size()) size_ <<= 1;
    nodes_.assign(2 * size_, {});
    for (std::size_t i = 0; i < second.size(); ++i) nodes_[size_ + i] = {second[i]};
    for (std::size_t i = size_ - 1; i >= 1; --i) {
      auto& out = nodes_[i];
      const auto& a = nodes_[2 * i];
      const auto& b = nodes_[2 * i + 1];
      out.resize(a.size() + b.size());
      std::merge(a.begin(), a.end(), b.begin(), b.end(), out.begin());
    }
  }

  // Points with index in [l, r) and lo < y < hi (open) or lo <= y <= hi.
  std::size_t count(std::size_t l, std::size_t r, double lo, double hi, bool open) const {
    std::size_t total = 0;
    auto in_node = [&](const std::vector<double>& v) {
      const auto a = open ? std::upper_bound(v.begin(), v.end(), lo) : std::lower_bound(v.begin(), v.end(), lo);
      const auto b = open ? std::lower_bound(v.begin(), v.end(), hi) : std::upper_bound(v.begin(), v.end(), hi);
      return b > a ? static_cast<std::size_t>(b - a) : 0;
    };
    for (l += size_, r += size_; l < r; l >>= 1, r >>= 1) {
      if (l & 1) total += in_node(nodes_[l++]);
      if (r & 1) total += in_node(nodes_[--r]);
    }
    return total;
  }

 private:
  std::size_t size_ = 1;
  std::vector<std::vector<double>> nodes_;
};

// Per-variable shifted values c_{k,i} (x + mu)^d in double, with error bounds.
struct VariableTables {
  // value[k][i][x + P]
  std::vector<std::vector<std::vector<double>>> value;
  double max_error = 0;
  double max_abs = 0;
};

VariableTables variable_tables(const CountSpec& spec) {
  const auto& sys = spec.system;
  const std::size_t n = sys.n(), R = sys.R();
  const unsigned d = sys.d();
  const std::int64_t P = spec.P;
  VariableTables t;
  t.value.assign(R, std::vector<std::vector<double>>(n, std::vector<double>(2 * P + 1, 0)));
  const Real r = spec.mu.radius();
  for (std::size_t k = 0; k < R; ++k)
    for (const auto& [e, c] : sys.form(k).terms()) {
      std::size_t i = 0;
      while (e[i] == 0) ++i;
      const Real cr(c);
      for (std::int64_t x = -P; x <= P; ++x) {
        const Real base = Real(x) + spec.mu.value();
        const Real v = cr * pow(base, d);
        // |(b + e)^d - b^d| <= d (|b| + r)^{d-1} r
        double err = static_cast<double>(abs_real(cr) * Real(d) * pow(abs_real(base) + r, d - 1) * r);
        const double dv = double_with_error(v, err);
        t.value[k][i][static_cast<std::size_t>(x + P)] += dv;
        t.max_error = std::max(t.max_error, err + 2 * kU * std::fabs(dv));
        t.max_abs = std::max(t.max_abs, std::fabs(dv));
      }
    }
  return t;
}

// Mixed-radix odometer over the given variables.
struct Odometer {
  std::vector<std::size_t> vars;
  std::int64_t P;
  std::vector<std::int64_t> x;

  Odometer(std::vector<std::size_t> v, std::int64_t p) : vars(std::move(v)), P(p), x(vars.size(), -p) {}

  bool next(std::size_t fixed_prefix = 0) {
    std::size_t pos = x.size();
    while (pos > fixed_prefix) {
      --pos;
      if (x[pos] < P) {
        ++x[pos];
        for (std::size_t q = pos + 1; q < x.size(); ++q) x[q] = -P;
        return true;
      }
    }
    return false;
  }
};

}  // namespace

CountResult count_diagonal_mitm(const CountSpec& spec, const CountOptions& options) {
  validate(spec);
  const auto& sys = spec.system;
  if (!sys.is_diagonal()) throw InvalidArgument("count_diagonal_mitm needs a diagonal system");
  if (sys.R() > 2) return count_generic(spec, options);
  const auto t0 = Clock::now();
  const std::size_t n = sys.n(), R = sys.R();
  const std::int64_t P = spec.P;
  const std::size_t nA = (n + 1) / 2, nB = n - nA;
  const double streamed = std::pow(2.0 * static_cast<double>(P) + 1, static_cast<double>(nA));
  if (streamed > options.budget)
    throw BudgetExceeded("count_diagonal_mitm: streamed half of " + std::to_string(streamed) + " points exceeds the budget");

  const VariableTables tables = variable_tables(spec);
  std::vector<std::size_t> varsA(nA), varsB(nB);
  for (std::size_t i = 0; i < nA; ++i) varsA[i] = i;
  for (std::size_t i = 0; i < nB; ++i) varsB[i] = nA + i;

  std::vector<double> tau(R);
  double tau_err = 0;
  for (std::size_t k = 0; k < R; ++k) tau[k] = double_with_error(to_real(spec.tau[k]), tau_err);

  // Enumerate the sorted half: values b_k and the tuple index.
  const std::size_t side = static_cast<std::size_t>(2 * P + 1);
  std::size_t NB = 1;
  for (std::size_t i = 0; i < nB; ++i) NB *= side;
  std::vector<std::vector<double>> bval(R, std::vector<double>(NB));
  {
    Odometer od(varsB, P);
    for (std::size_t idx = 0; idx < NB; ++idx) {
      for (std::size_t k = 0; k < R; ++k) {
        double s = 0;
        for (std::size_t q = 0; q < nB; ++q) s += tables.value[k][varsB[q]][static_cast<std::size_t>(od.x[q] + P)];
        bval[k][idx] = s;
      }
      od.next();
    }
  }
  auto decode_b = [&](std::size_t idx, std::vector<std::int64_t>& x) {
    for (std::size_t q = nB; q-- > 0;) {
      x[varsB[q]] = static_cast<std::int64_t>(idx % side) - P;
      idx /= side;
    }
  };
  double bmax = 0;
  for (const auto& row : bval)
    for (double v : row) bmax = std::max(bmax, std::fabs(v));
  // Each half sums at most n table entries; rounding adds n u per magnitude.
  const double table_err = static_cast<double>(n) * tables.max_error;
  const double sum_round = (static_cast<double>(n) + 6) * kU * (static_cast<double>(n) * tables.max_abs);
  const auto [eta_lo, eta_hi] = eta_bounds(spec.eta);

  std::vector<std::size_t> order(NB);
  for (std::size_t i = 0; i < NB; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return bval[0][a] < bval[0][b]; });
  std::vector<double> first(NB), second;
  for (std::size_t i = 0; i < NB; ++i) first[i] = bval[0][order[i]];
  const SortedIndex index(first);
  std::unique_ptr<MergeSortTree> tree;
  if (R == 2) {
    second.resize(NB);
    for (std::size_t i = 0; i < NB; ++i) second[i] = bval[1][order[i]];
    tree = std::make_unique<MergeSortTree>(second);
  }

  const BandOracle oracle(spec);
  const std::size_t slabs = nA >= 1 ? side : 1;

  auto slab = [&](std::size_t s) {
    Tally tally;
    Odometer od(varsA, P);
    od.x[0] = -P + static_cast<std::int64_t>(s);
    std::vector<std::int64_t> x(n, 0);
    std::vector<double> a(R);
    do {
      for (std::size_t k = 0; k < R; ++k) {
        double v = -tau[k];
        for (std::size_t q = 0; q < nA; ++q) v += tables.value[k][varsA[q]][static_cast<std::size_t>(od.x[q] + P)];
        a[k] = v;
      }
      std::vector<double> E(R);
      for (std::size_t k = 0; k < R; ++k)
        E[k] = (table_err + tau_err + sum_round + 4 * kU * (std::fabs(a[k]) + bmax + eta_hi)) * (1 + 1e-6);
      auto check = [&](std::size_t pos) {
        for (std::size_t q = 0; q < nA; ++q) x[varsA[q]] = od.x[q];
        decode_b(order[pos], x);
        resolve(oracle, x, tally);
      };
      // b_1 window: inner (certainly in) and outer (not certainly out).
      const double lo_in = -eta_lo - a[0] + E[0], hi_in = eta_lo - a[0] - E[0];
      const double lo_out = -eta_hi - a[0] - E[0], hi_out = eta_hi - a[0] + E[0];
      const std::size_t o1 = index.less(lo_out), o2 = index.less_equal(hi_out);
      if (R == 1) {
        const std::size_t i1 = index.less_equal(lo_in), i2 = index.less(hi_in);
        if (i1 < i2) {
          tally.count += i2 - i1;
          for (std::size_t p = o1; p < i1; ++p) check(p);
          for (std::size_t p = i2; p < o2; ++p) check(p);
        } else {
          for (std::size_t p = o1; p < o2; ++p) check(p);
        }
      } else {
        const double lo2_in = -eta_lo - a[1] + E[1], hi2_in = eta_lo - a[1] - E[1];
        const double lo2_out = -eta_hi - a[1] - E[1], hi2_out = eta_hi - a[1] + E[1];
        const std::size_t i1 = index.less_equal(lo_in), i2 = index.less(hi_in);
        const std::size_t inner = i1 < i2 ? tree->count(i1, i2, lo2_in, hi2_in, true) : 0;
        const std::size_t outer = o1 < o2 ? tree->count(o1, o2, lo2_out, hi2_out, false) : 0;
        tally.count += inner;
        if (outer > inner)
          for (std::size_t p = o1; p < o2; ++p) {
            const double b2 = second[p];
            if (b2 < lo2_out || b2 > hi2_out) continue;
            const bool in_box = p >= i1 && p < i2 && b2 > lo2_in && b2 < hi2_in;
            if (!in_box) check(p);
          }
      }
    } while (od.next(1));
    return tally;
  };

  CountResult res;
  res.P = P;
  res.method = CountMethod::diagonal_mitm;
  for (const auto& t : parallel_map<Tally>(slabs, options.threads, slab)) {
    res.count += t.count;
    res.boundary_flags += t.flags;
  }
  res.seconds = seconds_since(t0);
  return res;
}

CountResult count(const CountSpec& spec, const CountOptions& options) {
  switch (spec.method) {
    case CountMethod::generic:
      return count_generic(spec, options);
    case CountMethod::diagonal_mitm:
      return count_diagonal_mitm(spec, options);
    case CountMethod::automatic:
      if (spec.system.is_diagonal() && spec.system.R() <= 2) return count_diagonal_mitm(spec, options);
      return count_generic(spec, options);
  }
  return count_generic(spec, options);
}

std::vector<SeriesRow> count_series(const CountSpec& spec, const std::vector<std::int64_t>& Ps, double c,
                                    const CountOptions& options) {
  std::vector<SeriesRow> rows;
  const auto& sys = spec.system;
  const double two_eta_R = std::pow(2 * to_double(spec.eta), static_cast<double>(sys.R()));
  const double exponent = static_cast<double>(sys.n()) - static_cast<double>(sys.R() * sys.d());
  for (std::int64_t P : Ps) {
    CountSpec s = spec;
    s.P = P;
    SeriesRow row;
    row.P = P;
    row.result = count(s, options);
    row.main_term = two_eta_R * c * std::pow(static_cast<double>(P), exponent);
    if (row.main_term > 0) {
      row.ratio = static_cast<double>(row.result.count) / row.main_term;
      row.ratio_defined = true;
    } else {
      row.ratio = std::numeric_limits<double>::infinity();
    }
    rows.push_back(row);
  }
  return rows;
}

std::string series_csv(const std::vector<SeriesRow>& rows) {
  std::ostringstream os;
  os << "P,N,boundary_flags,main_term,ratio,method\n";
  char buf[64];
  for (const auto& r : rows) {
    os << r.P << ',' << r.result.count << ',' << r.result.boundary_flags << ',';
    std::snprintf(buf, sizeof buf, "%.17g", r.main_term);
    os << buf << ',';
    if (r.ratio_defined) {
      std::snprintf(buf, sizeof buf, "%.17g", r.ratio);
      os << buf;
    } else {
      os << "inf";
    }
    os << ',' << to_string(r.result.method) << '\n';
  }
  return os.str();
}

}  // namespace shiftlab
