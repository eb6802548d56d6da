#pragma once

// Dense exact matrices over quadratic towers, kernels and eigenspaces, and
// the congruence normal forms: symmetric diagonalization, Frobenius
// symplectic bases, Hermitian diagonalization with norm-class reduction,
// and rational quadratic form invariants.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "weilks/exactscalar.hpp"

namespace weilks {

using Vec = std::vector<TowerScalar>;

class MatrixF {
 public:
  MatrixF() = default;
  MatrixF(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

  static MatrixF identity(std::size_t n);
  static MatrixF diagonal(const Vec& d);
  static MatrixF from_rows(const std::vector<Vec>& rows);
  static MatrixF from_columns(const std::vector<Vec>& cols, std::size_t rows);
  static MatrixF from_ints(const std::vector<std::vector<long>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  TowerScalar& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const TowerScalar& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  Vec row(std::size_t i) const;
  Vec column(std::size_t j) const;
  std::vector<Vec> columns() const;

  // Join of the entry towers.
  Tower tower() const;
  bool is_zero() const;
  bool is_rational() const;

  MatrixF transpose() const;
  MatrixF conj() const;  // entrywise complex conjugation
  MatrixF conj_transpose() const { return conj().transpose(); }

  MatrixF operator+(const MatrixF& o) const;
  MatrixF operator-(const MatrixF& o) const;
  MatrixF operator*(const MatrixF& o) const;
  MatrixF operator*(const TowerScalar& s) const;
  MatrixF operator-() const { return *this * TowerScalar(-1); }
  Vec operator*(const Vec& v) const;
  friend bool operator==(const MatrixF& a, const MatrixF& b);
  friend bool operator!=(const MatrixF& a, const MatrixF& b) { return !(a == b); }

  TowerScalar trace() const;
  MatrixF block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<TowerScalar> a_;
};

MatrixF block_diagonal(const std::vector<MatrixF>& blocks);

// ---------------------------------------------------------------------------
// Row reduction and subspaces. Pivots are always the lowest usable row.

struct Rref {
  MatrixF reduced;
  std::vector<std::size_t> pivot_cols;
};

Rref rref(MatrixF m);
std::size_t rank(const MatrixF& m);
TowerScalar determinant(MatrixF m);
std::optional<MatrixF> inverse(const MatrixF& m);
std::vector<Vec> kernel_basis(const MatrixF& m);
// Basis of Ker(M - lambda*Id); lambda is supplied by the caller.
std::vector<Vec> eigenspace(const MatrixF& m, const TowerScalar& lambda);
// Some x with M x = b, if one exists.
std::optional<Vec> solve(const MatrixF& m, const Vec& b);

std::size_t span_rank(const std::vector<Vec>& vs);
bool independent(const std::vector<Vec>& vs);
bool span_contains(const std::vector<Vec>& basis, const Vec& v);
bool span_contains(const std::vector<Vec>& basis, const std::vector<Vec>& vs);
bool span_equal(const std::vector<Vec>& a, const std::vector<Vec>& b);

// Matrix of M on the M-invariant subspace with the given ordered basis:
// M * B = B * R. Throws DomainError when the span is not invariant.
MatrixF restrict_to(const MatrixF& m, const std::vector<Vec>& basis);

// Coordinates of v in an independent list (throws DomainError if v is not
// in the span).
Vec coordinates(const std::vector<Vec>& basis, const Vec& v);

Vec scale(const Vec& v, const TowerScalar& s);
Vec add(const Vec& a, const Vec& b);
bool is_zero(const Vec& v);

// ---------------------------------------------------------------------------
// Bilinear and Hermitian spaces.

enum class FormKind { symmetric, alternating };

class BilinearSpace {
 public:
  BilinearSpace(MatrixF gram, FormKind kind, std::string description = {});
  const MatrixF& gram() const { return gram_; }
  FormKind kind() const { return kind_; }
  const std::string& description() const { return description_; }
  std::size_t dim() const { return gram_.rows(); }
  TowerScalar value(const Vec& x, const Vec& y) const;

 private:
  MatrixF gram_;
  FormKind kind_;
  std::string description_;
};

// Hermitian form over K = Q(phi), linear in the first argument:
// H(x, y) = sum_jk x_j conj(y_k) G_jk, G_jk = H(b_j, b_k), so G^T = conj(G).
// A change of basis with columns P gives P^T G conj(P).
class HermitianSpace {
 public:
  HermitianSpace(MatrixF gram, ImagQuadratic k);
  const MatrixF& gram() const { return gram_; }
  const ImagQuadratic& field() const { return k_; }
  std::size_t dim() const { return gram_.rows(); }
  TowerScalar value(const Vec& x, const Vec& y) const;
  MatrixF transformed(const MatrixF& p) const;  // P^T G conj(P)

 private:
  MatrixF gram_;
  ImagQuadratic k_;
};

MatrixF congruence(const MatrixF& g, const MatrixF& p);  // P^T G P

struct SymmetricDiagonalization {
  MatrixF p;
  Vec diagonal;
  std::vector<SquareClass> classes;  // one per rational diagonal entry
};

// Congruence elimination; a zero diagonal with a partner j whose diagonal is
// also zero is completed by the pair (e_k + e_j, e_k - e_j).
SymmetricDiagonalization diagonalize_symmetric(const BilinearSpace& b);

struct SymplecticBasis {
  MatrixF p;
  Vec block_values;  // a_i with P^T G P = blockdiag([[0, a_i], [-a_i, 0]])
};

SymplecticBasis symplectic_basis(const BilinearSpace& b);

struct HermitianDiagonalization {
  MatrixF p_raw;                 // Gram-Schmidt basis (columns)
  std::vector<BigRational> raw;  // its diagonal
  MatrixF p;                     // after norm reduction and ordering
  std::vector<BigRational> reduced;
  std::vector<bool> unit;  // reduced[i] is +1 or -1
};

// Hermitian Gram-Schmidt with isotropic repair, then each entry is scaled by
// a norm to +-1 when is_norm allows it. Remaining entries are merged in pairs,
// <a, b> ~ <s, s a b>, until at most one non-unit is left, positive unless
// the form is negative definite. Output order: non-unit entries (positive
// first), then +1 entries, then -1 entries.
HermitianDiagonalization diagonalize_hermitian(const HermitianSpace& h);

// Positive definiteness by elimination without pivoting: all pivots > 0
// exactly (equivalently all leading principal minors > 0).
struct DefinitenessCertificate {
  bool positive_definite = false;
  std::size_t first_failure = 0;  // index of the first non-positive pivot
  Vec pivots;
};

DefinitenessCertificate certify_positive_definite(const MatrixF& g);

struct FormInvariants {
  std::size_t rank = 0;
  std::size_t positive = 0;
  std::size_t negative = 0;
  SquareClass discriminant{BigRational(1)};
  std::map<std::string, int> hasse;  // prime (decimal) -> c_p; absent means +1
  Vec diagonal;
};

// Rank, signature, discriminant and Hasse invariants c_p = prod_{i<j} (a_i, a_j)_p
// of a nondegenerate rational symmetric form.
FormInvariants form_invariants(const BilinearSpace& b);
bool equivalent(const FormInvariants& a, const FormInvariants& b);
bool rationally_equivalent(const BilinearSpace& a, const BilinearSpace& b);

MatrixF hyperbolic_plane();

}  // namespace weilks
