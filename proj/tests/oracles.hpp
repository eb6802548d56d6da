#pragma once

// Independent reference computations used only by the tests. Nothing here
// shares code with the library routines it checks.

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

// Fixed-seed generator shared by the property tests.
inline std::mt19937_64& rng() {
  static std::mt19937_64 g(0x5eed1234abcdULL);
  return g;
}

inline long uniform(long lo, long hi) {
  std::uniform_int_distribution<long> dist(lo, hi);
  return dist(rng());
}

// Local solvability of a*x^2 + b*y^2 = z^2 over Q_p by exhaustive search of
// primitive solutions modulo p^k that satisfy the Hensel lifting condition
// k >= 2*v + 1, v = min valuation of the gradient (2ax, 2by, 2z). For
// squarefree a, b the gradient valuation of a true primitive solution is at
// most 1 (odd p) or 2 (p = 2), so k = 3 resp. 5 decides the question.
// p == 0 stands for the real place.
inline int hilbert_by_search(long a, long b, long p) {
  if (p == 0) return (a < 0 && b < 0) ? -1 : 1;
  const long k = p == 2 ? 5 : 3;
  long pk = 1;
  for (long i = 0; i < k; ++i) pk *= p;
  auto val = [p, pk](long x) {
    x %= pk;
    if (x < 0) x += pk;
    if (x == 0) return 1000L;
    long v = 0;
    while (x % p == 0) {
      x /= p;
      ++v;
    }
    return v;
  };
  std::vector<std::vector<long>> roots(static_cast<std::size_t>(pk));
  for (long z = 0; z < pk; ++z) roots[static_cast<std::size_t>((z * z) % pk)].push_back(z);
  long am = ((a % pk) + pk) % pk;
  long bm = ((b % pk) + pk) % pk;
  for (long x = 0; x < pk; ++x) {
    for (long y = 0; y < pk; ++y) {
      long r = (am * ((x * x) % pk) % pk + bm * ((y * y) % pk) % pk) % pk;
      for (long z : roots[static_cast<std::size_t>(r)]) {
        if (x % p == 0 && y % p == 0 && z % p == 0) continue;
        long v = std::min({val(2 * a * x), val(2 * b * y), val(2 * z)});
        if (k >= 2 * v + 1) return 1;
      }
    }
  }
  return -1;
}

// Smallest squarefree integer in the square class of n != 0.
inline long squarefree(long n) {
  long s = n < 0 ? -1 : 1;
  long m = n < 0 ? -n : n;
  long core = 1;
  for (long p = 2; p * p <= m; ++p) {
    int e = 0;
    while (m % p == 0) {
      m /= p;
      ++e;
    }
    if (e % 2) core *= p;
  }
  return s * core * m;
}

// Bounded search for x^2 + d*y^2 = a*w^2 with w != 0; d, a integers.
inline bool norm_by_search(long a, long d, long bound) {
  for (long w = 1; w <= bound; ++w) {
    for (long y = 0; y <= bound; ++y) {
      long r = a * w * w - d * y * y;
      if (r < 0) break;
      long x = static_cast<long>(std::llround(std::sqrt(static_cast<long double>(r))));
      for (long c = x - 1; c <= x + 1; ++c)
        if (c >= 0 && c * c == r) return true;
    }
  }
  return false;
}

// Square rational matrices for the tensor-product representation of a
// diagonal Clifford algebra: g_k = Z x ... x Z x X(a_k) x 1 x ... x 1 with
// X(a) = [[0, a], [1, 0]] and Z = diag(1, -1).
struct DenseMatrix {
  std::size_t n = 0;
  std::vector<mpq_class> a;

  explicit DenseMatrix(std::size_t size = 0) : n(size), a(size * size) {}
  static DenseMatrix identity(std::size_t size) {
    DenseMatrix m(size);
    for (std::size_t i = 0; i < size; ++i) m(i, i) = 1;
    return m;
  }
  mpq_class& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
  const mpq_class& operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }

  DenseMatrix operator*(const DenseMatrix& o) const {
    DenseMatrix r(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        if (sgn((*this)(i, k)) == 0) continue;
        for (std::size_t j = 0; j < n; ++j) r(i, j) += (*this)(i, k) * o(k, j);
      }
    return r;
  }
  DenseMatrix operator+(const DenseMatrix& o) const {
    DenseMatrix r(n);
    for (std::size_t i = 0; i < a.size(); ++i) r.a[i] = a[i] + o.a[i];
    return r;
  }
  DenseMatrix scaled(const mpq_class& c) const {
    DenseMatrix r(n);
    for (std::size_t i = 0; i < a.size(); ++i) r.a[i] = a[i] * c;
    return r;
  }
  bool operator==(const DenseMatrix& o) const { return a == o.a; }

  static DenseMatrix kron(const DenseMatrix& x, const DenseMatrix& y) {
    DenseMatrix r(x.n * y.n);
    for (std::size_t i = 0; i < x.n; ++i)
      for (std::size_t j = 0; j < x.n; ++j)
        for (std::size_t k = 0; k < y.n; ++k)
          for (std::size_t l = 0; l < y.n; ++l) r(i * y.n + k, j * y.n + l) = x(i, j) * y(k, l);
    return r;
  }
};

inline std::vector<DenseMatrix> clifford_generators(const std::vector<mpq_class>& norms) {
  DenseMatrix z(2), id = DenseMatrix::identity(2);
  z(0, 0) = 1;
  z(1, 1) = -1;
  std::vector<DenseMatrix> gens;
  for (std::size_t k = 0; k < norms.size(); ++k) {
    DenseMatrix x(2);
    x(0, 1) = norms[k];
    x(1, 0) = 1;
    DenseMatrix m = DenseMatrix::identity(1);
    for (std::size_t f = 0; f < norms.size(); ++f) m = DenseMatrix::kron(m, f < k ? z : (f == k ? x : id));
    gens.push_back(m);
  }
  return gens;
}

// Image of sum c_b g_b (b a bitmask, generators multiplied in increasing order).
inline DenseMatrix clifford_image(const std::vector<DenseMatrix>& gens,
                                  const std::vector<std::pair<std::uint32_t, mpq_class>>& terms) {
  std::size_t size = gens.empty() ? 1 : gens[0].n;
  DenseMatrix r(size);
  for (const auto& [b, c] : terms) {
    DenseMatrix m = DenseMatrix::identity(size);
    for (std::size_t i = 0; i < gens.size(); ++i)
      if (b & (std::uint32_t{1} << i)) m = m * gens[i];
    r = r + m.scaled(c);
  }
  return r;
}

}  // namespace oracle
