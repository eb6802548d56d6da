#pragma once

// Exact scalars: rationals, quadratic towers Q(sqrt D1, sqrt D2), square
// classes, local Hilbert symbols and the norm test for Q(sqrt -d).
//
// Embedding convention (fixed everywhere): for D > 0, sqrt(D) is the
// positive real root; for D < 0, sqrt(D) = i*sqrt(|D|) with positive
// imaginary part. The fourth tower basis element is the product
// sqrt(D1)*sqrt(D2), not the principal root of D1*D2.

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "weilks/errors.hpp"

namespace weilks {

// Rational number with an int64 fast path; values that do not fit are kept
// in a GMP rational. The representation is canonical: a value is stored in
// the small form whenever it fits.
class BigRational {
 public:
  BigRational() noexcept = default;
  BigRational(int v) noexcept : num_(v) {}
  BigRational(long v);
  BigRational(long long v);
  BigRational(const mpz_class& v);
  BigRational(const mpz_class& num, const mpz_class& den);
  explicit BigRational(const mpq_class& v);

  BigRational(const BigRational& o);
  BigRational(BigRational&& o) noexcept = default;
  BigRational& operator=(const BigRational& o);
  BigRational& operator=(BigRational&& o) noexcept = default;
  ~BigRational() = default;

  // Accepts "a" or "a/b" with optional leading '-'.
  static BigRational parse(std::string_view text);

  bool is_zero() const noexcept { return !big_ && num_ == 0; }
  bool is_one() const noexcept { return !big_ && num_ == 1 && den_ == 1; }
  bool is_integer() const;
  int sign() const noexcept;

  mpz_class numerator() const;
  mpz_class denominator() const;
  mpq_class to_mpq() const;

  BigRational operator-() const;
  BigRational abs() const { return sign() < 0 ? -*this : *this; }
  BigRational inverse() const;

  BigRational& operator+=(const BigRational& o);
  BigRational& operator-=(const BigRational& o);
  BigRational& operator*=(const BigRational& o);
  BigRational& operator/=(const BigRational& o);

  friend BigRational operator+(BigRational a, const BigRational& b) { return a += b; }
  friend BigRational operator-(BigRational a, const BigRational& b) { return a -= b; }
  friend BigRational operator*(BigRational a, const BigRational& b) { return a *= b; }
  friend BigRational operator/(BigRational a, const BigRational& b) { return a /= b; }

  friend bool operator==(const BigRational& a, const BigRational& b);
  friend bool operator!=(const BigRational& a, const BigRational& b) { return !(a == b); }
  friend int compare(const BigRational& a, const BigRational& b);
  friend bool operator<(const BigRational& a, const BigRational& b) { return compare(a, b) < 0; }
  friend bool operator>(const BigRational& a, const BigRational& b) { return compare(a, b) > 0; }
  friend bool operator<=(const BigRational& a, const BigRational& b) { return compare(a, b) <= 0; }
  friend bool operator>=(const BigRational& a, const BigRational& b) { return compare(a, b) >= 0; }

  std::string to_string() const;
  friend std::ostream& operator<<(std::ostream& os, const BigRational& q) {
    return os << q.to_string();
  }

 private:
  void assign(const mpq_class& v);

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
  std::unique_ptr<mpq_class> big_;
};

// ---------------------------------------------------------------------------
// Integer helpers.

// n = sign * core * root^2 with core squarefree and positive. n != 0.
struct SquarefreeSplit {
  mpz_class core;  // signed squarefree part
  mpz_class root;  // positive
};
SquarefreeSplit squarefree_split(const mpz_class& n);

// Distinct prime divisors of |n| in increasing order (trial division).
std::vector<mpz_class> prime_divisors(const mpz_class& n);

// Exact square root of a nonnegative rational, if it is a square.
std::optional<BigRational> rational_sqrt(const BigRational& q);

// ---------------------------------------------------------------------------
// Square classes Q*/Q*^2, represented by the signed squarefree integer.

class SquareClass {
 public:
  explicit SquareClass(const BigRational& q);
  const mpz_class& representative() const { return rep_; }
  bool is_trivial() const { return rep_ == 1; }
  std::string to_string() const { return rep_.get_str(); }
  friend bool operator==(const SquareClass& a, const SquareClass& b) { return a.rep_ == b.rep_; }
  friend bool operator!=(const SquareClass& a, const SquareClass& b) { return !(a == b); }

 private:
  mpz_class rep_;
};

// ---------------------------------------------------------------------------
// Quadratic towers.

// Descriptor of Q, Q(sqrt D1) or Q(sqrt D1, sqrt D2). Slots hold squarefree
// integers different from 0 and 1; 0 marks an absent slot.
class Tower {
 public:
  Tower() = default;
  static Tower rational() { return Tower(); }
  static Tower quadratic(std::int64_t d);
  static Tower biquadratic(std::int64_t d1, std::int64_t d2);

  std::int64_t d1() const noexcept { return d1_; }
  std::int64_t d2() const noexcept { return d2_; }
  int depth() const noexcept { return d1_ == 0 ? 0 : (d2_ == 0 ? 1 : 2); }
  bool is_rational() const noexcept { return d1_ == 0; }

  // Which of the basis elements {1, r1, r2, r1*r2} are non-real under the
  // fixed embedding.
  bool imaginary(int k) const noexcept;

  std::string to_string() const;
  friend bool operator==(const Tower& a, const Tower& b) { return a.d1_ == b.d1_ && a.d2_ == b.d2_; }
  friend bool operator!=(const Tower& a, const Tower& b) { return !(a == b); }

 private:
  Tower(std::int64_t d1, std::int64_t d2) : d1_(d1), d2_(d2) {}
  std::int64_t d1_ = 0;
  std::int64_t d2_ = 0;
};

// Smallest tower containing both; keeps `a`'s descriptor when a contains b.
// Throws TowerError when more than two generators would be required.
Tower join(const Tower& a, const Tower& b);

enum class Sign { negative = -1, zero = 0, positive = 1 };

class TowerScalar {
 public:
  TowerScalar() = default;
  TowerScalar(int v) : c_{BigRational(v), {}, {}, {}} {}
  TowerScalar(long v) : c_{BigRational(v), {}, {}, {}} {}
  TowerScalar(long long v) : c_{BigRational(v), {}, {}, {}} {}
  TowerScalar(BigRational q) : c_{std::move(q), {}, {}, {}} {}
  TowerScalar(Tower t, std::array<BigRational, 4> coords);

  // The element sqrt(q) (fixed embedding) inside `t`; throws TowerError if
  // the square class of q is not present in t.
  static TowerScalar sqrt(const BigRational& q, const Tower& t);
  static std::optional<TowerScalar> try_sqrt(const BigRational& q, const Tower& t);
  // sqrt(q) in the smallest tower containing it.
  static TowerScalar sqrt(const BigRational& q);

  const Tower& tower() const noexcept { return t_; }
  const BigRational& coord(int k) const { return c_[static_cast<std::size_t>(k)]; }

  bool is_zero() const noexcept {
    return c_[0].is_zero() && c_[1].is_zero() && c_[2].is_zero() && c_[3].is_zero();
  }
  bool is_rational() const noexcept { return c_[1].is_zero() && c_[2].is_zero() && c_[3].is_zero(); }
  // True when every coordinate on a non-real basis element vanishes.
  bool is_real() const;
  BigRational to_rational() const;

  // Re-express in a tower containing this one.
  TowerScalar embed(const Tower& target) const;

  TowerScalar operator-() const;
  TowerScalar& operator+=(const TowerScalar& o);
  TowerScalar& operator-=(const TowerScalar& o);
  TowerScalar& operator*=(const TowerScalar& o);
  TowerScalar& operator/=(const TowerScalar& o);
  friend TowerScalar operator+(TowerScalar a, const TowerScalar& b) { return a += b; }
  friend TowerScalar operator-(TowerScalar a, const TowerScalar& b) { return a -= b; }
  friend TowerScalar operator*(const TowerScalar& a, const TowerScalar& b);
  friend TowerScalar operator/(const TowerScalar& a, const TowerScalar& b) { return a * b.inverse(); }

  TowerScalar inverse() const;
  // Flip sqrt(D1) (resp. sqrt(D2)); the product generator flips with it.
  TowerScalar conj1() const;
  TowerScalar conj2() const;
  // Complex conjugation under the fixed embedding.
  TowerScalar complex_conj() const;

  friend bool operator==(const TowerScalar& a, const TowerScalar& b);
  friend bool operator!=(const TowerScalar& a, const TowerScalar& b) { return !(a == b); }

  // Grammar: "a/b", "a/b + c/d*sqrt(D)", up to the four-term form whose
  // last term is "e/f*sqrt(D1)*sqrt(D2)". Unit coefficients are omitted.
  std::string to_string() const;
  static TowerScalar parse(std::string_view text);
  friend std::ostream& operator<<(std::ostream& os, const TowerScalar& x) {
    return os << x.to_string();
  }

 private:
  Tower t_;
  std::array<BigRational, 4> c_;
};

// Exact sign of a real element of a tower. Throws DomainError when x has a
// nonzero coordinate on a non-real generator.
Sign real_sign(const TowerScalar& x);

// ---------------------------------------------------------------------------
// Local symbols.

// A place of Q: a prime, or the real place (prime == 0).
struct Place {
  mpz_class prime;  // 0 for the real place
  static Place infinity() { return Place{0}; }
  bool is_infinite() const { return prime == 0; }
  std::string to_string() const { return is_infinite() ? "inf" : prime.get_str(); }
  friend bool operator==(const Place& a, const Place& b) { return a.prime == b.prime; }
};

int hilbert_symbol(const BigRational& a, const BigRational& b, const Place& p);

struct NormTest {
  bool is_norm = false;
  std::vector<Place> obstructions;  // places with (a, -d)_p = -1
};

// Whether a is a norm from K = Q(sqrt(-d)), d > 0.
NormTest is_norm(const BigRational& a, const BigRational& d);

// ---------------------------------------------------------------------------
// Imaginary quadratic field K = Q(phi), phi^2 = -d, phi realised inside a
// tower as s*sqrt(-D) with D squarefree.

class ImagQuadratic {
 public:
  explicit ImagQuadratic(const BigRational& d);

  const BigRational& d() const { return d_; }
  const Tower& tower() const { return tower_; }
  const TowerScalar& phi() const { return phi_; }

  TowerScalar make(const BigRational& p, const BigRational& q) const;  // p + q*phi
  // Write x (in a tower containing K) as p + q*phi.
  std::pair<BigRational, BigRational> split(const TowerScalar& x) const;
  BigRational norm(const TowerScalar& x) const;  // x * conj(x)

  // lambda in K with N(lambda) = a, or nullopt when a is not a norm.
  // Solved by descent on z^2 = A x^2 + B y^2.
  std::optional<TowerScalar> norm_preimage(const BigRational& a) const;

 private:
  BigRational d_;
  Tower tower_;
  TowerScalar phi_;
  BigRational phi_scale_;  // s, so that phi = s * r1
};

}  // namespace weilks
