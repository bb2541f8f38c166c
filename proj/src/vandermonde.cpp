#include "shiftlab/vandermonde.hpp"

namespace shiftlab {

BigInt monomial_count(std::size_t n, unsigned j) {
  if (n < 1) throw InvalidArgument("monomial_count needs n >= 1");
  return binomial(static_cast<unsigned>(j + n - 1), static_cast<unsigned>(n - 1));
}

BigInt total_monomial_count(std::size_t n, unsigned d) {
  BigInt total = 0;
  for (unsigned j = 1; j <= d; ++j) total += monomial_count(n, j);
  return total;
}

namespace {

BigInt ipow(const BigInt& base, std::uint64_t e) {
  BigInt r = 1;
  for (std::uint64_t i = 0; i < e; ++i) r *= base;
  return r;
}

BigInt monomial(const std::vector<BigInt>& m, const ExponentVector& j) {
  BigInt v = 1;
  for (std::size_t i = 0; i < j.size(); ++i) v *= ipow(m[i], j[i]);
  return v;
}

}  // namespace

DirectionSet build_directions(std::size_t n, unsigned d) {
  if (n < 1) throw InvalidArgument("build_directions needs n >= 1");
  if (d < 2) throw InvalidArgument("build_directions needs d >= 2");
  const BigInt count = monomial_count(n, d);
  if (count > kMaxDirections)
    throw BudgetExceeded("N_d = " + count.str() + " exceeds the direction cap of " + std::to_string(kMaxDirections));
  DirectionSet dirs;
  dirs.n = n;
  dirs.d = d;
  dirs.nu.assign(n, BigInt(1));
  for (std::size_t s = 2; s <= n; ++s) {
    // nu_s = 2^{(d+1)^{s-2}}
    BigInt exponent = ipow(BigInt(d + 1), s - 2);
    dirs.nu[s - 1] = BigInt(1) << static_cast<unsigned>(exponent);
  }
  const auto nd = static_cast<std::size_t>(count);
  dirs.vectors.reserve(nd);
  for (std::size_t t = 1; t <= nd; ++t) {
    std::vector<BigInt> m(n);
    for (std::size_t s = 0; s < n; ++s) m[s] = ipow(dirs.nu[s], t - 1);
    dirs.vectors.push_back(std::move(m));
  }
  return dirs;
}

std::vector<BigInt> vandermonde_parameters(const DirectionSet& dirs, unsigned j) {
  std::vector<BigInt> params;
  for (const auto& e : monomials(dirs.n, j)) params.push_back(monomial(dirs.nu, e));
  return params;
}

VandermondeFamily build_family(const DirectionSet& dirs) {
  VandermondeFamily fam;
  for (unsigned j = 1; j <= dirs.d; ++j) {
    const auto cols = monomials(dirs.n, j);
    IntMatrix m(cols.size(), cols.size());
    for (std::size_t t = 0; t < cols.size(); ++t)
      for (std::size_t c = 0; c < cols.size(); ++c) m(t, c) = monomial(dirs.vectors[t], cols[c]);
    BigInt det = determinant(m);
    if (det == 0) throw Error("Vandermonde determinant Delta_" + std::to_string(j) + " vanished");
    fam.matrices.push_back(std::move(m));
    fam.dets.push_back(std::move(det));
  }
  return fam;
}

BigInt z_coefficient(unsigned j, const ExponentVector& i, const std::vector<BigInt>& m,
                     const std::vector<BigInt>& y) {
  if (m.size() != i.size() || y.size() != i.size())
    throw DimensionMismatch("z_coefficient: m, y and i must have the same length");
  if (j > i.degree()) return 0;
  BigInt total = 0;
  // Enumerate j' <= i componentwise with |j'|_1 = j.
  std::vector<std::uint32_t> jp(i.size(), 0);
  auto rec = [&](auto&& self, std::size_t pos, unsigned remaining) -> void {
    if (pos == i.size()) {
      if (remaining != 0) return;
      BigInt term = 1;
      for (std::size_t v = 0; v < i.size(); ++v) {
        term *= binomial(i[v], jp[v]);
        term *= ipow(m[v], jp[v]);
        term *= ipow(y[v], i[v] - jp[v]);
      }
      total += term;
      return;
    }
    for (unsigned v = 0; v <= std::min<unsigned>(i[pos], remaining); ++v) {
      jp[pos] = v;
      self(self, pos + 1, remaining - v);
    }
  };
  rec(rec, 0, j);
  return total;
}

}  // namespace shiftlab
