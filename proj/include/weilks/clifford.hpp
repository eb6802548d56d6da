#pragma once

// Clifford algebras C(V, B) over Q with generators g_1..g_n, g_i g_j + g_j g_i
// = 2 B(g_i, g_j), so v^2 = B(v, v). The Gram matrix may be non-diagonal
// (hyperbolic f-bases). Elements are sparse maps from blades (bitmask of an
// increasing generator product) to tower scalars.

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "weilks/exactlinalg.hpp"

namespace weilks {

using Blade = std::uint32_t;  // bit i <-> generator g_{i+1}

int grade(Blade b);

namespace detail {
struct CliffordImpl;
}

class CliffordElement;

class CliffordAlgebra {
 public:
  static constexpr int kMaxGenerators = 20;
  static constexpr int kMaxDenseGenerators = 12;

  // Gram matrix must be rational, symmetric and nondegenerate. `prefix` names
  // the generators in printed blades ("g" or "f").
  static CliffordAlgebra from_gram(const MatrixF& gram, std::string prefix = "g");
  static CliffordAlgebra diagonal(const std::vector<BigRational>& norms, std::string prefix = "g");

  int n() const;
  const MatrixF& gram() const;
  bool is_diagonal() const;
  const std::string& prefix() const;
  std::size_t dim() const { return std::size_t{1} << n(); }
  std::size_t even_dim() const { return dim() / 2; }

  std::vector<Blade> all_blades() const;
  std::vector<Blade> even_blades() const;  // increasing mask order

  CliffordElement one() const;
  CliffordElement scalar(const TowerScalar& s) const;
  CliffordElement generator(int i) const;  // 1-based
  CliffordElement blade(Blade b, const TowerScalar& c = TowerScalar(1)) const;
  CliffordElement vector(const Vec& coeffs) const;  // sum c_i g_i
  // Build from the signed generator list, e.g. {1, 3} -> g1 g3 (any order).
  CliffordElement product_of(const std::vector<int>& gens) const;

  // Orthogonal basis from symmetric diagonalization (columns of P) and its
  // norms; for a diagonal Gram this is the generator basis itself.
  const SymmetricDiagonalization& orthogonal_basis() const;
  // z = e_1 ... e_n for the orthogonal basis above.
  CliffordElement pseudoscalar() const;
  // z^2 computed by multiplication, cross-checked against
  // (-1)^{n(n-1)/2} prod Q(e_k); throws VerificationFailure on mismatch.
  TowerScalar pseudoscalar_square() const;

  // Product of two blades as a rational combination of blades (memoized).
  const std::vector<std::pair<Blade, BigRational>>& blade_product(Blade a, Blade b) const;
  const std::vector<std::pair<Blade, BigRational>>& blade_reverse(Blade a) const;
  // Trace of right multiplication by an even blade on C^+ (memoized).
  const BigRational& blade_trace(Blade b) const;

  friend bool operator==(const CliffordAlgebra& a, const CliffordAlgebra& b) { return a.impl_ == b.impl_; }
  friend bool operator!=(const CliffordAlgebra& a, const CliffordAlgebra& b) { return a.impl_ != b.impl_; }

 private:
  explicit CliffordAlgebra(std::shared_ptr<detail::CliffordImpl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<detail::CliffordImpl> impl_;
  friend class CliffordElement;
};

class CliffordElement {
 public:
  using Terms = std::map<Blade, TowerScalar>;

  explicit CliffordElement(CliffordAlgebra alg) : alg_(std::move(alg)) {}
  CliffordElement(CliffordAlgebra alg, Terms terms);

  const CliffordAlgebra& algebra() const { return alg_; }
  const Terms& terms() const { return terms_; }
  TowerScalar coefficient(Blade b) const;
  TowerScalar scalar_part() const { return coefficient(0); }
  bool is_zero() const { return terms_.empty(); }
  bool is_even() const;
  bool is_scalar() const;

  CliffordElement operator+(const CliffordElement& o) const;
  CliffordElement operator-(const CliffordElement& o) const;
  CliffordElement operator-() const;
  CliffordElement operator*(const CliffordElement& o) const;
  CliffordElement operator*(const TowerScalar& s) const;
  friend CliffordElement operator*(const TowerScalar& s, const CliffordElement& x) { return x * s; }
  friend bool operator==(const CliffordElement& a, const CliffordElement& b);
  friend bool operator!=(const CliffordElement& a, const CliffordElement& b) { return !(a == b); }

  // Canonical anti-involution: reverses the order of generator factors.
  CliffordElement involution() const;
  CliffordElement grade_part(int k) const;
  CliffordElement even_part() const;

  // Coordinates on an ordered blade list; throws DomainError if a term falls
  // outside the list.
  Vec coordinates(const std::vector<Blade>& basis) const;

  // Blade notation, e.g. "1/2*f1f2f3f4 - g1g3"; "0" for zero.
  std::string to_string() const;

 private:
  void add_term(Blade b, const TowerScalar& c);
  CliffordAlgebra alg_;
  Terms terms_;
};

CliffordElement commutator(const CliffordElement& a, const CliffordElement& b);

// Trace of right multiplication by an even element on C^+.
TowerScalar trace(const CliffordElement& x);

enum class Side { left, right };

// Matrix of v -> x v (left) or v -> v x (right) on an ordered blade basis.
MatrixF mult_operator(const CliffordElement& x, Side side, const std::vector<Blade>& domain);
// Same on a basis of elements (coordinates solved exactly).
MatrixF mult_operator(const CliffordElement& x, Side side, const std::vector<CliffordElement>& domain);

std::vector<Vec> element_coordinates(const std::vector<CliffordElement>& xs, const std::vector<Blade>& basis);
CliffordElement element_from(const CliffordAlgebra& alg, const std::vector<Blade>& basis, const Vec& coords);

// Basis of the center of C^+ (even_only) or of C.
std::vector<CliffordElement> center_basis(const CliffordAlgebra& alg, bool even_only);

struct IdempotentSplit {
  CliffordElement e;
  CliffordElement e_prime;
  std::vector<CliffordElement> idempotents;  // e e', e(1-e'), (1-e)e', (1-e)(1-e')
  std::vector<std::size_t> image_dims;       // rank of right multiplication on C^+
};

// Needs g1, g2 and g3, g4 to be two orthogonal hyperbolic pairs. Verifies
// idempotency, orthogonality, completeness and the image dimensions.
IdempotentSplit idempotent_split(const CliffordAlgebra& alg);

struct PrimitiveIdempotent {
  CliffordElement beta;
  std::vector<Blade> factors;  // commuting blades x_i with x_i^2 = s_i^2 > 0
  std::size_t image_dim = 0;
};

// For a diagonal algebra with n = 2m: a product of `count` commuting factors
// (1 + x_i/s_i)/2 built from even blades, found by deterministic
// backtracking in (grade, index) order. Throws DomainError if none exists.
PrimitiveIdempotent find_idempotent(const CliffordAlgebra& alg, int count);

// Image of an element under the algebra map sending generator i of x's
// algebra to the vector with coordinates images.column(i) in `target`.
CliffordElement map_generators(const CliffordElement& x, const CliffordAlgebra& target, const MatrixF& images);

}  // namespace weilks
