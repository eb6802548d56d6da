#include "weilks/exactlinalg.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <set>
#include <utility>

namespace weilks {

// ---------------------------------------------------------------------------
// MatrixF

MatrixF MatrixF::identity(std::size_t n) {
  MatrixF m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = TowerScalar(1);
  return m;
}

MatrixF MatrixF::diagonal(const Vec& d) {
  MatrixF m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

MatrixF MatrixF::from_rows(const std::vector<Vec>& rows) {
  if (rows.empty()) return MatrixF();
  MatrixF m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols_) throw DomainError("ragged matrix rows");
    for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

MatrixF MatrixF::from_columns(const std::vector<Vec>& cols, std::size_t rows) {
  MatrixF m(rows, cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j].size() != rows) throw DomainError("column length mismatch");
    for (std::size_t i = 0; i < rows; ++i) m(i, j) = cols[j][i];
  }
  return m;
}

MatrixF MatrixF::from_ints(const std::vector<std::vector<long>>& rows) {
  std::vector<Vec> r;
  for (const auto& row : rows) {
    Vec v;
    for (long x : row) v.emplace_back(x);
    r.push_back(std::move(v));
  }
  return from_rows(r);
}

Vec MatrixF::row(std::size_t i) const {
  return Vec(a_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
             a_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
}

Vec MatrixF::column(std::size_t j) const {
  Vec v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

std::vector<Vec> MatrixF::columns() const {
  std::vector<Vec> out;
  for (std::size_t j = 0; j < cols_; ++j) out.push_back(column(j));
  return out;
}

Tower MatrixF::tower() const {
  Tower t;
  for (const auto& x : a_)
    if (!x.is_rational()) t = join(t, x.tower());
  return t;
}

bool MatrixF::is_zero() const {
  return std::all_of(a_.begin(), a_.end(), [](const TowerScalar& x) { return x.is_zero(); });
}

bool MatrixF::is_rational() const {
  return std::all_of(a_.begin(), a_.end(), [](const TowerScalar& x) { return x.is_rational(); });
}

MatrixF MatrixF::transpose() const {
  MatrixF t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

MatrixF MatrixF::conj() const {
  MatrixF c = *this;
  for (auto& x : c.a_)
    if (!x.is_rational()) x = x.complex_conj();
  return c;
}

MatrixF MatrixF::operator+(const MatrixF& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw DomainError("matrix size mismatch in +");
  MatrixF r = *this;
  for (std::size_t k = 0; k < a_.size(); ++k)
    if (!o.a_[k].is_zero()) r.a_[k] += o.a_[k];
  return r;
}

MatrixF MatrixF::operator-(const MatrixF& o) const { return *this + (-o); }

MatrixF MatrixF::operator*(const MatrixF& o) const {
  if (cols_ != o.rows_) throw DomainError("matrix size mismatch in *");
  MatrixF r(rows_, o.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const TowerScalar& x = (*this)(i, k);
      if (x.is_zero()) continue;
      for (std::size_t j = 0; j < o.cols_; ++j) {
        const TowerScalar& y = o(k, j);
        if (!y.is_zero()) r(i, j) += x * y;
      }
    }
  return r;
}

MatrixF MatrixF::operator*(const TowerScalar& s) const {
  MatrixF r = *this;
  for (auto& x : r.a_)
    if (!x.is_zero()) x = x * s;
  return r;
}

Vec MatrixF::operator*(const Vec& v) const {
  if (v.size() != cols_) throw DomainError("matrix-vector size mismatch");
  Vec r(rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) {
      const TowerScalar& x = (*this)(i, j);
      if (!x.is_zero() && !v[j].is_zero()) r[i] += x * v[j];
    }
  return r;
}

bool operator==(const MatrixF& a, const MatrixF& b) {
  return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
}

TowerScalar MatrixF::trace() const {
  TowerScalar t;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

MatrixF MatrixF::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  MatrixF b(nr, nc);
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
  return b;
}

MatrixF block_diagonal(const std::vector<MatrixF>& blocks) {
  std::size_t n = 0, m = 0;
  for (const auto& b : blocks) {
    n += b.rows();
    m += b.cols();
  }
  MatrixF r(n, m);
  std::size_t i0 = 0, j0 = 0;
  for (const auto& b : blocks) {
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) r(i0 + i, j0 + j) = b(i, j);
    i0 += b.rows();
    j0 += b.cols();
  }
  return r;
}

// ---------------------------------------------------------------------------
// Row reduction

Rref rref(MatrixF m) {
  const std::size_t R = m.rows(), C = m.cols();
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  std::vector<std::size_t> nz;
  for (std::size_t c = 0; c < C && r < R; ++c) {
    std::size_t p = r;
    while (p < R && m(p, c).is_zero()) ++p;
    if (p == R) continue;
    if (p != r)
      for (std::size_t j = c; j < C; ++j) std::swap(m(p, j), m(r, j));
    TowerScalar inv = m(r, c).inverse();
    nz.clear();
    for (std::size_t j = c; j < C; ++j)
      if (!m(r, j).is_zero()) {
        m(r, j) = m(r, j) * inv;
        nz.push_back(j);
      }
    for (std::size_t i = 0; i < R; ++i) {
      if (i == r || m(i, c).is_zero()) continue;
      TowerScalar f = m(i, c);
      for (std::size_t j : nz) m(i, j) -= f * m(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return {std::move(m), std::move(pivots)};
}

std::size_t rank(const MatrixF& m) { return rref(m).pivot_cols.size(); }

TowerScalar determinant(MatrixF m) {
  if (!m.is_square()) throw DomainError("determinant of a non-square matrix");
  const std::size_t n = m.rows();
  TowerScalar det(1);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m(p, c).is_zero()) ++p;
    if (p == n) return TowerScalar();
    if (p != c) {
      for (std::size_t j = c; j < n; ++j) std::swap(m(p, j), m(c, j));
      det = -det;
    }
    det = det * m(c, c);
    TowerScalar inv = m(c, c).inverse();
    for (std::size_t i = c + 1; i < n; ++i) {
      if (m(i, c).is_zero()) continue;
      TowerScalar f = m(i, c) * inv;
      for (std::size_t j = c; j < n; ++j) m(i, j) -= f * m(c, j);
    }
  }
  return det;
}

std::optional<MatrixF> inverse(const MatrixF& m) {
  if (!m.is_square()) throw DomainError("inverse of a non-square matrix");
  const std::size_t n = m.rows();
  MatrixF aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
    aug(i, n + i) = TowerScalar(1);
  }
  Rref r = rref(std::move(aug));
  if (r.pivot_cols.size() < n || r.pivot_cols[n - 1] != n - 1) return std::nullopt;
  return r.reduced.block(0, n, n, n);
}

std::vector<Vec> kernel_basis(const MatrixF& m) {
  Rref r = rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto c : r.pivot_cols) is_pivot[c] = true;
  std::vector<Vec> out;
  for (std::size_t f = 0; f < m.cols(); ++f) {
    if (is_pivot[f]) continue;
    Vec v(m.cols());
    v[f] = TowerScalar(1);
    for (std::size_t i = 0; i < r.pivot_cols.size(); ++i)
      if (!r.reduced(i, f).is_zero()) v[r.pivot_cols[i]] = -r.reduced(i, f);
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<Vec> eigenspace(const MatrixF& m, const TowerScalar& lambda) {
  if (!m.is_square()) throw DomainError("eigenspace of a non-square matrix");
  MatrixF s = m;
  for (std::size_t i = 0; i < m.rows(); ++i) s(i, i) -= lambda;
  return kernel_basis(s);
}

std::optional<Vec> solve(const MatrixF& m, const Vec& b) {
  MatrixF aug(m.rows(), m.cols() + 1);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) aug(i, j) = m(i, j);
    aug(i, m.cols()) = b[i];
  }
  Rref r = rref(aug);
  Vec x(m.cols());
  for (std::size_t i = 0; i < r.pivot_cols.size(); ++i) {
    if (r.pivot_cols[i] == m.cols()) return std::nullopt;
    x[r.pivot_cols[i]] = r.reduced(i, m.cols());
  }
  return x;
}

std::size_t span_rank(const std::vector<Vec>& vs) {
  if (vs.empty()) return 0;
  return rank(MatrixF::from_rows(vs));
}

bool independent(const std::vector<Vec>& vs) { return span_rank(vs) == vs.size(); }

bool span_contains(const std::vector<Vec>& basis, const std::vector<Vec>& vs) {
  std::vector<Vec> all = basis;
  all.insert(all.end(), vs.begin(), vs.end());
  return span_rank(all) == span_rank(basis);
}

bool span_contains(const std::vector<Vec>& basis, const Vec& v) { return span_contains(basis, std::vector<Vec>{v}); }

bool span_equal(const std::vector<Vec>& a, const std::vector<Vec>& b) {
  std::size_t ra = span_rank(a);
  return ra == span_rank(b) && span_contains(a, b);
}

namespace {

// Solve B X = Y for independent columns B; throws if some column of Y is
// outside the span.
MatrixF solve_columns(const std::vector<Vec>& basis, const std::vector<Vec>& ys, const char* what) {
  if (basis.empty()) {
    for (const auto& y : ys)
      if (!is_zero(y)) throw DomainError(what);
    return MatrixF(0, ys.size());
  }
  const std::size_t n = basis[0].size(), k = basis.size();
  MatrixF aug(n, k + ys.size());
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < n; ++i) aug(i, j) = basis[j][i];
  for (std::size_t j = 0; j < ys.size(); ++j)
    for (std::size_t i = 0; i < n; ++i) aug(i, k + j) = ys[j][i];
  Rref r = rref(aug);
  if (r.pivot_cols.size() < k || r.pivot_cols[k - 1] != k - 1) throw DomainError("basis is not independent");
  if (r.pivot_cols.size() > k) throw DomainError(what);
  return r.reduced.block(0, k, k, ys.size());
}

}  // namespace

MatrixF restrict_to(const MatrixF& m, const std::vector<Vec>& basis) {
  std::vector<Vec> images;
  for (const auto& b : basis) images.push_back(m * b);
  return solve_columns(basis, images, "subspace is not invariant");
}

Vec coordinates(const std::vector<Vec>& basis, const Vec& v) {
  return solve_columns(basis, {v}, "vector is not in the span").column(0);
}

Vec scale(const Vec& v, const TowerScalar& s) {
  Vec r = v;
  for (auto& x : r)
    if (!x.is_zero()) x = x * s;
  return r;
}

Vec add(const Vec& a, const Vec& b) {
  Vec r = a;
  for (std::size_t i = 0; i < r.size(); ++i)
    if (!b[i].is_zero()) r[i] += b[i];
  return r;
}

bool is_zero(const Vec& v) {
  return std::all_of(v.begin(), v.end(), [](const TowerScalar& x) { return x.is_zero(); });
}

// ---------------------------------------------------------------------------
// Spaces

BilinearSpace::BilinearSpace(MatrixF gram, FormKind kind, std::string description)
    : gram_(std::move(gram)), kind_(kind), description_(std::move(description)) {
  if (!gram_.is_square()) throw DomainError("Gram matrix must be square");
  MatrixF t = gram_.transpose();
  if (kind_ == FormKind::symmetric ? t != gram_ : t != -gram_)
    throw DomainError(kind_ == FormKind::symmetric ? "Gram matrix is not symmetric" : "Gram matrix is not alternating");
  if (kind_ == FormKind::alternating)
    for (std::size_t i = 0; i < gram_.rows(); ++i)
      if (!gram_(i, i).is_zero()) throw DomainError("alternating form with nonzero diagonal");
}

TowerScalar BilinearSpace::value(const Vec& x, const Vec& y) const {
  Vec gy = gram_ * y;
  TowerScalar s;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!x[i].is_zero() && !gy[i].is_zero()) s += x[i] * gy[i];
  return s;
}

HermitianSpace::HermitianSpace(MatrixF gram, ImagQuadratic k) : gram_(std::move(gram)), k_(std::move(k)) {
  if (!gram_.is_square()) throw DomainError("Gram matrix must be square");
  if (gram_.transpose() != gram_.conj()) throw DomainError("Gram matrix is not Hermitian");
  for (std::size_t i = 0; i < gram_.rows(); ++i)
    for (std::size_t j = 0; j < gram_.cols(); ++j) k_.split(gram_(i, j));  // throws outside K
}

TowerScalar HermitianSpace::value(const Vec& x, const Vec& y) const {
  TowerScalar s;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j].is_zero()) continue;
    for (std::size_t k = 0; k < y.size(); ++k)
      if (!y[k].is_zero() && !gram_(j, k).is_zero()) s += x[j] * y[k].complex_conj() * gram_(j, k);
  }
  return s;
}

MatrixF HermitianSpace::transformed(const MatrixF& p) const { return p.transpose() * gram_ * p.conj(); }

MatrixF congruence(const MatrixF& g, const MatrixF& p) { return p.transpose() * g * p; }

MatrixF hyperbolic_plane() { return MatrixF::from_ints({{0, 1}, {1, 0}}); }

// ---------------------------------------------------------------------------
// Congruence normal forms

namespace {

// Simultaneous basis changes on a Gram matrix G (G_jk = F(b_j, b_k)) and the
// matrix P whose columns are the current basis. `sesqui` selects the
// Hermitian rule, conjugating the column operation.
struct Congruence {
  MatrixF g;
  MatrixF p;
  bool sesqui = false;

  TowerScalar cj(const TowerScalar& c) const { return sesqui ? c.complex_conj() : c; }

  // b_dst += c * b_src
  void add(std::size_t src, std::size_t dst, const TowerScalar& c) {
    const std::size_t n = g.rows();
    for (std::size_t i = 0; i < p.rows(); ++i)
      if (!p(i, src).is_zero()) p(i, dst) += c * p(i, src);
    for (std::size_t j = 0; j < n; ++j)
      if (!g(src, j).is_zero()) g(dst, j) += c * g(src, j);
    TowerScalar cc = cj(c);
    for (std::size_t i = 0; i < n; ++i)
      if (!g(i, src).is_zero()) g(i, dst) += cc * g(i, src);
  }

  void scale(std::size_t k, const TowerScalar& c) {
    const std::size_t n = g.rows();
    for (std::size_t i = 0; i < p.rows(); ++i) p(i, k) = p(i, k) * c;
    for (std::size_t j = 0; j < n; ++j) g(k, j) = g(k, j) * c;
    TowerScalar cc = cj(c);
    for (std::size_t i = 0; i < n; ++i) g(i, k) = g(i, k) * cc;
  }

  void swap(std::size_t a, std::size_t b) {
    if (a == b) return;
    const std::size_t n = g.rows();
    for (std::size_t i = 0; i < p.rows(); ++i) std::swap(p(i, a), p(i, b));
    for (std::size_t j = 0; j < n; ++j) std::swap(g(a, j), g(b, j));
    for (std::size_t i = 0; i < n; ++i) std::swap(g(i, a), g(i, b));
  }
};

}  // namespace

SymmetricDiagonalization diagonalize_symmetric(const BilinearSpace& b) {
  if (b.kind() != FormKind::symmetric) throw DomainError("diagonalize_symmetric needs a symmetric form");
  const std::size_t n = b.dim();
  Congruence c{b.gram(), MatrixF::identity(n)};
  for (std::size_t k = 0; k < n; ++k) {
    if (c.g(k, k).is_zero()) {
      std::size_t j = k + 1;
      while (j < n && c.g(k, j).is_zero()) ++j;
      if (j == n) throw DegenerateForm("symmetric form is degenerate", k);
      if (!c.g(j, j).is_zero()) {
        c.swap(k, j);
      } else {
        // (e_k, e_j) -> (e_k + e_j, e_k - e_j)
        c.add(j, k, TowerScalar(1));
        c.scale(j, TowerScalar(-2));
        c.add(k, j, TowerScalar(1));
      }
    }
    TowerScalar inv = c.g(k, k).inverse();
    for (std::size_t i = k + 1; i < n; ++i)
      if (!c.g(k, i).is_zero()) c.add(k, i, -(c.g(k, i) * inv));
  }
  SymmetricDiagonalization out;
  out.p = c.p;
  for (std::size_t i = 0; i < n; ++i) {
    out.diagonal.push_back(c.g(i, i));
    if (c.g(i, i).is_rational()) out.classes.emplace_back(c.g(i, i).to_rational());
  }
  if (congruence(b.gram(), out.p) != MatrixF::diagonal(out.diagonal))
    throw VerificationFailure("diagonalize_symmetric: P^T G P is not the reported diagonal");
  return out;
}

SymplecticBasis symplectic_basis(const BilinearSpace& b) {
  if (b.kind() != FormKind::alternating) throw DomainError("symplectic_basis needs an alternating form");
  const std::size_t n = b.dim();
  if (n % 2) throw DegenerateForm("alternating form of odd dimension is degenerate", n - 1);
  Congruence c{b.gram(), MatrixF::identity(n)};
  SymplecticBasis out;
  for (std::size_t k = 0; k < n; k += 2) {
    std::size_t j = k + 1;
    while (j < n && c.g(k, j).is_zero()) ++j;
    if (j == n) throw DegenerateForm("alternating form is degenerate", k);
    c.swap(k + 1, j);
    TowerScalar a = c.g(k, k + 1);
    TowerScalar inv = a.inverse();
    for (std::size_t i = k + 2; i < n; ++i) {
      TowerScalar ve = c.g(i, k), vf = c.g(i, k + 1);
      if (!ve.is_zero()) c.add(k + 1, i, ve * inv);
      if (!vf.is_zero()) c.add(k, i, -(vf * inv));
    }
    out.block_values.push_back(a);
  }
  out.p = c.p;
  std::vector<MatrixF> blocks;
  for (const auto& a : out.block_values) {
    MatrixF blk(2, 2);
    blk(0, 1) = a;
    blk(1, 0) = -a;
    blocks.push_back(blk);
  }
  if (congruence(b.gram(), out.p) != block_diagonal(blocks))
    throw VerificationFailure("symplectic_basis: P^T G P is not in block form");
  return out;
}

namespace {

// x, y in K with a N(x) + b N(y) = target. Writes y = Y / z with Y integral
// of small height and scans z; x = X / z with N(X) = (target z^2 - b N(Y)) / a
// solved exactly. Local solvability at p | 2abd can force p | z, so z runs
// over t * m with t a product of such primes.
std::optional<std::pair<TowerScalar, TowerScalar>> represent_binary(const ImagQuadratic& k, const BigRational& a,
                                                                   const BigRational& b, const BigRational& target) {
  const BigRational& d = k.d();
  mpz_class prod = 2 * a.numerator() * a.denominator() * b.numerator() * b.denominator() * d.numerator() *
                   d.denominator();
  std::vector<mpz_class> primes = prime_divisors(prod);
  if (primes.size() > 6) primes.resize(6);
  std::vector<mpz_class> radicals{1};
  for (const auto& p : primes) {
    std::size_t m = radicals.size();
    for (std::size_t i = 0; i < m; ++i) radicals.push_back(radicals[i] * p);
  }
  std::sort(radicals.begin(), radicals.end());
  auto try_z = [&](const TowerScalar& y, const BigRational& ny, const mpz_class& z)
      -> std::optional<std::pair<TowerScalar, TowerScalar>> {
    if (z <= 0) return std::nullopt;
    BigRational zq(z);
    BigRational c = (target * zq * zq - b * ny) / a;
    if (c.sign() < 0) return std::nullopt;
    BigRational iz = zq.inverse();
    if (c.is_zero()) return std::make_pair(TowerScalar(0), y * TowerScalar(iz));
    if (!is_norm(c, d).is_norm) return std::nullopt;
    if (auto x = k.norm_preimage(c)) return std::make_pair(*x * TowerScalar(iz), y * TowerScalar(iz));
    return std::nullopt;
  };
  constexpr int window = 24;
  for (int h = 0; h <= 6; ++h)
    for (int r = 0; r <= h; ++r)
      for (int q = -h; q <= h; ++q) {
        if (std::max(r, std::abs(q)) != h || (r == 0 && q < 0)) continue;
        TowerScalar y = k.make(BigRational(r), BigRational(q));
        BigRational ny = k.norm(y);
        // |target| z^2 close to |b N(Y)| is where the sign of the remainder can change
        mpz_class centre = sqrt(abs((b * ny / target).numerator() / (b * ny / target).denominator()));
        for (const auto& t : radicals) {
          for (int m = 1; m <= window; ++m)
            if (auto rep = try_z(y, ny, t * m)) return rep;
          mpz_class mc = centre / t;
          for (int m = -window; m <= window; ++m)
            if (mc + m > window)
              if (auto rep = try_z(y, ny, t * (mc + m))) return rep;
        }
      }
  return std::nullopt;
}

}  // namespace

HermitianDiagonalization diagonalize_hermitian(const HermitianSpace& h) {
  const std::size_t n = h.dim();
  const ImagQuadratic& K = h.field();
  Congruence c{h.gram(), MatrixF::identity(n), true};
  for (std::size_t k = 0; k < n; ++k) {
    if (c.g(k, k).is_zero()) {
      std::size_t j = k + 1;
      while (j < n && c.g(j, j).is_zero()) ++j;
      if (j < n) {
        c.swap(k, j);
      } else {
        j = k + 1;
        while (j < n && c.g(k, j).is_zero()) ++j;
        if (j == n) throw DegenerateForm("Hermitian form is degenerate", k);
        // isotropic pair: v = e_k + mu e_j, w = e_k - mu e_j, H(v,v) = 1, H(w,w) = -1
        TowerScalar cc = c.g(k, j);
        TowerScalar mu = cc * TowerScalar(K.norm(cc) * BigRational(2)).inverse();
        c.add(j, k, mu);
        c.scale(j, TowerScalar(-2) * mu);
        c.add(k, j, TowerScalar(1));
      }
    }
    TowerScalar inv = c.g(k, k).inverse();
    for (std::size_t i = k + 1; i < n; ++i)
      if (!c.g(i, k).is_zero()) c.add(k, i, -(c.g(i, k) * inv));
  }
  HermitianDiagonalization out;
  out.p_raw = c.p;
  for (std::size_t i = 0; i < n; ++i) out.raw.push_back(c.g(i, i).to_rational());
  {
    Vec dv;
    for (auto& x : out.raw) dv.emplace_back(x);
    if (h.transformed(out.p_raw) != MatrixF::diagonal(dv))
      throw VerificationFailure("diagonalize_hermitian: Gram-Schmidt output is not diagonal");
  }

  // Entry-wise norm reduction.
  std::vector<BigRational> dvals = out.raw;
  std::vector<bool> unit(n, false);
  auto reduce_entry = [&](std::size_t i) {
    BigRational a = dvals[i].abs();
    if (is_norm(a, K.d()).is_norm) {
      if (auto lam = K.norm_preimage(a)) {
        c.scale(i, lam->inverse());
        dvals[i] = BigRational(dvals[i].sign());
        unit[i] = true;
        return;
      }
    }
    // Strip rational square factors at least.
    BigRational core(SquareClass(dvals[i]).representative());
    if (auto s = rational_sqrt(dvals[i] / core)) {
      c.scale(i, TowerScalar(s->inverse()));
      dvals[i] = core;
    }
  };
  for (std::size_t i = 0; i < n; ++i) reduce_entry(i);

  // Pairwise merge. <a, b> ~ <s, s a b> whenever the signatures allow it
  // (Hermitian forms over K are classified by signature and determinant).
  auto merge = [&](std::size_t i, std::size_t j, int s) {
    const BigRational a = dvals[i], b = dvals[j];
    auto rep = represent_binary(K, a, b, BigRational(s));
    if (!rep) throw VerificationFailure("diagonalize_hermitian: no representation of " + std::to_string(s) + " by <" + a.to_string() + ", " + b.to_string() + "> over d = " + K.d().to_string());
    auto [x, y] = *rep;
    // v = x b_i + y b_j, w = conj(y) b b_i - conj(x) a b_j
    MatrixF p_old = c.p;
    for (std::size_t r = 0; r < n; ++r) {
      c.p(r, i) = x * p_old(r, i) + y * p_old(r, j);
      c.p(r, j) = y.complex_conj() * TowerScalar(b) * p_old(r, i) - x.complex_conj() * TowerScalar(a) * p_old(r, j);
    }
    dvals[i] = BigRational(s);
    dvals[j] = BigRational(s) * a * b;
    unit[i] = true;
    reduce_entry(j);
  };
  auto find = [&](bool want_unit, int sign, std::size_t skip) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < n; ++i)
      if (i != skip && unit[i] == want_unit && dvals[i].sign() == sign) return i;
    return std::nullopt;
  };
  for (int sign : {1, -1}) {
    // Same-sign non-units: <p1, p2> ~ <sign, p1 p2 sign>.
    while (auto i = find(false, sign, n)) {
      auto j = find(false, sign, *i);
      if (!j) break;
      merge(*i, *j, sign);
    }
  }
  if (auto ni = find(false, -1, n)) {
    // Move the negative non-unit to the positive side.
    if (auto pi = find(false, 1, n)) {
      merge(*ni, *pi, -1);
    } else if (auto ui = find(true, 1, n)) {
      merge(*ni, *ui, -1);
    }
  }

  // Order: non-units (positive first), then +1, then -1.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto rank_of = [&](std::size_t i) {
    if (!unit[i]) return dvals[i].sign() > 0 ? 0 : 1;
    return dvals[i].sign() > 0 ? 2 : 3;
  };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return rank_of(x) < rank_of(y); });
  out.p = MatrixF(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t r = 0; r < n; ++r) out.p(r, k) = c.p(r, order[k]);
    out.reduced.push_back(dvals[order[k]]);
    out.unit.push_back(unit[order[k]]);
  }
  Vec dv;
  for (auto& x : out.reduced) dv.emplace_back(x);
  if (h.transformed(out.p) != MatrixF::diagonal(dv))
    throw VerificationFailure("diagonalize_hermitian: reduced form does not match");
  return out;
}

DefinitenessCertificate certify_positive_definite(const MatrixF& g0) {
  if (!g0.is_square()) throw DomainError("positive definiteness of a non-square matrix");
  MatrixF g = g0;
  const std::size_t n = g.rows();
  DefinitenessCertificate out;
  std::vector<std::size_t> nz;
  for (std::size_t k = 0; k < n; ++k) {
    TowerScalar piv = g(k, k);
    out.pivots.push_back(piv);
    if (real_sign(piv) != Sign::positive) {
      out.first_failure = k;
      return out;
    }
    TowerScalar inv = piv.inverse();
    nz.clear();
    for (std::size_t j = k + 1; j < n; ++j)
      if (!g(k, j).is_zero()) nz.push_back(j);
    for (std::size_t i = k + 1; i < n; ++i) {
      if (g(i, k).is_zero()) continue;
      TowerScalar f = g(i, k) * inv;
      for (std::size_t j : nz) g(i, j) -= f * g(k, j);
    }
  }
  out.positive_definite = true;
  out.first_failure = n;
  return out;
}

FormInvariants form_invariants(const BilinearSpace& b) {
  if (!b.gram().is_rational()) throw DomainError("form_invariants needs a rational form");
  SymmetricDiagonalization sd = diagonalize_symmetric(b);
  FormInvariants out;
  out.rank = b.dim();
  out.diagonal = sd.diagonal;
  std::vector<BigRational> a;
  BigRational det(1);
  std::set<mpz_class> primes{mpz_class(2)};
  for (const auto& x : sd.diagonal) {
    BigRational q = x.to_rational();
    a.push_back(q);
    det *= q;
    (q.sign() > 0 ? out.positive : out.negative)++;
    for (const auto& z : {q.numerator(), q.denominator()})
      for (auto& p : prime_divisors(z)) primes.insert(p);
  }
  out.discriminant = SquareClass(det);
  for (const auto& p : primes) {
    int c = 1;
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = i + 1; j < a.size(); ++j) c *= hilbert_symbol(a[i], a[j], Place{p});
    out.hasse[p.get_str()] = c;
  }
  return out;
}

bool equivalent(const FormInvariants& a, const FormInvariants& b) {
  if (a.rank != b.rank || a.positive != b.positive || a.negative != b.negative) return false;
  if (a.discriminant != b.discriminant) return false;
  auto get = [](const FormInvariants& f, const std::string& p) {
    auto it = f.hasse.find(p);
    return it == f.hasse.end() ? 1 : it->second;
  };
  for (const auto& [p, c] : a.hasse)
    if (c != get(b, p)) return false;
  for (const auto& [p, c] : b.hasse)
    if (c != get(a, p)) return false;
  return true;
}

bool rationally_equivalent(const BilinearSpace& a, const BilinearSpace& b) {
  return equivalent(form_invariants(a), form_invariants(b));
}

}  // namespace weilks
