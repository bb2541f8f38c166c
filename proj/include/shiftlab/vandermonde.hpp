#pragma once

#include "shiftlab/exact_linalg.hpp"
#include "shiftlab/forms.hpp"

#include <vector>

namespace shiftlab {

// N_j = C(j+n-1, n-1), the number of monomials of degree j in n variables.
BigInt monomial_count(std::size_t n, unsigned j);
// N = N_1 + ... + N_d.
BigInt total_monomial_count(std::size_t n, unsigned d);

inline constexpr std::size_t kMaxDirections = 512;

// m_t = (nu_1^{t-1}, ..., nu_n^{t-1}), t = 1..N_d, with nu_1 = 1 and
// nu_s = 2^{(d+1)^{s-2}}. These make every M_j an invertible Vandermonde matrix.
struct DirectionSet {
  std::size_t n = 0;
  unsigned d = 0;
  std::vector<BigInt> nu;
  std::vector<std::vector<BigInt>> vectors;
};

DirectionSet build_directions(std::size_t n, unsigned d);

struct VandermondeFamily {
  // Index j-1 holds M_j (N_j x N_j) and Delta_j = det M_j.
  std::vector<IntMatrix> matrices;
  std::vector<BigInt> dets;

  const IntMatrix& M(unsigned j) const { return matrices.at(j - 1); }
  const BigInt& delta(unsigned j) const { return dets.at(j - 1); }
};

// M_j(t, c) = m_t^{j_c} under the global monomial order; determinants by
// fraction-free elimination. A zero determinant throws: it cannot happen for
// the direction recipe above.
VandermondeFamily build_family(const DirectionSet& dirs);

// Vandermonde parameters nu^{j_c} of M_j, in column order.
std::vector<BigInt> vandermonde_parameters(const DirectionSet& dirs, unsigned j);

// z_{j,i}(m, y) = sum over j' <= i with |j'|_1 = j of C(i, j') m^{j'} y^{i-j'}:
// the coefficient of x^j in (y + x m)^i.
BigInt z_coefficient(unsigned j, const ExponentVector& i, const std::vector<BigInt>& m,
                     const std::vector<BigInt>& y);

}  // namespace shiftlab
