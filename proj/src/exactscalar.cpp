#include "weilks/exactscalar.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <utility>

namespace weilks {

namespace {

using i128 = __int128;
using u128 = unsigned __int128;

// Values strictly inside (-kLimit, kLimit) are kept in the small form. The
// bound leaves room for sums of two products in 128-bit intermediates.
constexpr std::int64_t kLimit = std::int64_t{1} << 62;

bool fits(i128 v) { return v > -static_cast<i128>(kLimit) && v < static_cast<i128>(kLimit); }

std::int64_t gcd64(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(std::gcd(a < 0 ? -a : a, b < 0 ? -b : b));
}

mpz_class to_mpz(std::int64_t v) {
  mpz_class z;
  mpz_set_si(z.get_mpz_t(), static_cast<long>(v));
  return z;
}

bool mpz_fits_small(const mpz_class& z) {
  if (!mpz_fits_slong_p(z.get_mpz_t())) return false;
  long v = mpz_get_si(z.get_mpz_t());
  return fits(v);
}

}  // namespace

// ---------------------------------------------------------------------------
// BigRational

BigRational::BigRational(long v) : BigRational(static_cast<long long>(v)) {}

BigRational::BigRational(long long v) {
  if (fits(v)) {
    num_ = v;
  } else {
    mpq_class q;
    mpq_set_si(q.get_mpq_t(), static_cast<long>(v), 1);
    big_ = std::make_unique<mpq_class>(q);
  }
}

BigRational::BigRational(const mpz_class& v) { assign(mpq_class(v)); }

BigRational::BigRational(const mpz_class& num, const mpz_class& den) {
  if (den == 0) throw DivisionByZero();
  mpq_class q(num, den);
  q.canonicalize();
  assign(q);
}

BigRational::BigRational(const mpq_class& v) {
  mpq_class q(v);
  q.canonicalize();
  assign(q);
}

BigRational::BigRational(const BigRational& o) : num_(o.num_), den_(o.den_) {
  if (o.big_) big_ = std::make_unique<mpq_class>(*o.big_);
}

BigRational& BigRational::operator=(const BigRational& o) {
  if (this == &o) return *this;
  num_ = o.num_;
  den_ = o.den_;
  if (o.big_) {
    if (big_) *big_ = *o.big_;
    else big_ = std::make_unique<mpq_class>(*o.big_);
  } else {
    big_.reset();
  }
  return *this;
}

void BigRational::assign(const mpq_class& v) {
  if (mpz_fits_small(v.get_num()) && mpz_fits_small(v.get_den())) {
    num_ = mpz_get_si(v.get_num_mpz_t());
    den_ = mpz_get_si(v.get_den_mpz_t());
    big_.reset();
  } else {
    num_ = 0;
    den_ = 1;
    if (big_) *big_ = v;
    else big_ = std::make_unique<mpq_class>(v);
  }
}

BigRational BigRational::parse(std::string_view text) {
  std::string s(text);
  auto digits = [](const std::string& t) {
    return !t.empty() && std::all_of(t.begin(), t.end(), [](unsigned char c) { return std::isdigit(c); });
  };
  std::string body = s;
  if (!body.empty() && body[0] == '-') body = body.substr(1);
  auto slash = body.find('/');
  std::string n = body.substr(0, slash);
  std::string d = slash == std::string::npos ? "1" : body.substr(slash + 1);
  if (!digits(n) || !digits(d)) throw DomainError("malformed rational: '" + s + "'");
  mpz_class den(d);
  if (den == 0) throw DivisionByZero();
  mpz_class num(n);
  if (s[0] == '-') num = -num;
  return BigRational(num, den);
}

bool BigRational::is_integer() const { return big_ ? big_->get_den() == 1 : den_ == 1; }

int BigRational::sign() const noexcept {
  if (big_) return sgn(*big_);
  return (num_ > 0) - (num_ < 0);
}

mpz_class BigRational::numerator() const { return big_ ? mpz_class(big_->get_num()) : to_mpz(num_); }
mpz_class BigRational::denominator() const { return big_ ? mpz_class(big_->get_den()) : to_mpz(den_); }

mpq_class BigRational::to_mpq() const {
  if (big_) return *big_;
  mpq_class q;
  mpq_set_si(q.get_mpq_t(), static_cast<long>(num_), static_cast<unsigned long>(den_));
  return q;
}

BigRational BigRational::operator-() const {
  BigRational r;
  if (big_) r.assign(mpq_class(-*big_));
  else {
    r.num_ = -num_;
    r.den_ = den_;
  }
  return r;
}

BigRational BigRational::inverse() const {
  if (is_zero()) throw DivisionByZero();
  BigRational r;
  if (big_) {
    mpq_class q;
    mpq_inv(q.get_mpq_t(), big_->get_mpq_t());
    r.assign(q);
  } else if (num_ < 0) {
    r.num_ = -den_;
    r.den_ = -num_;
  } else {
    r.num_ = den_;
    r.den_ = num_;
  }
  return r;
}

BigRational& BigRational::operator+=(const BigRational& o) {
  if (!big_ && !o.big_) {
    if (den_ == 1 && o.den_ == 1) {
      i128 s = static_cast<i128>(num_) + o.num_;
      if (fits(s)) {
        num_ = static_cast<std::int64_t>(s);
        return *this;
      }
    } else {
      std::int64_t g = gcd64(den_, o.den_);
      i128 t = static_cast<i128>(num_) * (o.den_ / g) + static_cast<i128>(o.num_) * (den_ / g);
      std::int64_t g2 = gcd64(static_cast<std::int64_t>(t % g), g);
      if (g2 == 0) g2 = g;
      i128 n = t / g2;
      i128 d = static_cast<i128>(den_ / g2) * (o.den_ / g);
      if (fits(n) && fits(d)) {
        num_ = static_cast<std::int64_t>(n);
        den_ = n == 0 ? 1 : static_cast<std::int64_t>(d);
        return *this;
      }
    }
  }
  assign(to_mpq() + o.to_mpq());
  return *this;
}

BigRational& BigRational::operator-=(const BigRational& o) { return *this += -o; }

BigRational& BigRational::operator*=(const BigRational& o) {
  if (!big_ && !o.big_) {
    if (num_ == 0 || o.num_ == 0) {
      num_ = 0;
      den_ = 1;
      return *this;
    }
    std::int64_t g1 = gcd64(num_, o.den_);
    std::int64_t g2 = gcd64(o.num_, den_);
    i128 n = static_cast<i128>(num_ / g1) * (o.num_ / g2);
    i128 d = static_cast<i128>(den_ / g2) * (o.den_ / g1);
    if (fits(n) && fits(d)) {
      num_ = static_cast<std::int64_t>(n);
      den_ = static_cast<std::int64_t>(d);
      return *this;
    }
  }
  assign(to_mpq() * o.to_mpq());
  return *this;
}

BigRational& BigRational::operator/=(const BigRational& o) { return *this *= o.inverse(); }

bool operator==(const BigRational& a, const BigRational& b) {
  if (!a.big_ && !b.big_) return a.num_ == b.num_ && a.den_ == b.den_;
  if (a.big_ && b.big_) return *a.big_ == *b.big_;
  return false;  // canonical form: a small and a big value never coincide
}

int compare(const BigRational& a, const BigRational& b) {
  if (!a.big_ && !b.big_) {
    i128 l = static_cast<i128>(a.num_) * b.den_;
    i128 r = static_cast<i128>(b.num_) * a.den_;
    return (l > r) - (l < r);
  }
  int c = cmp(a.to_mpq(), b.to_mpq());
  return (c > 0) - (c < 0);
}

std::string BigRational::to_string() const {
  if (big_) return big_->get_str();
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

// ---------------------------------------------------------------------------
// Integer helpers

std::vector<mpz_class> prime_divisors(const mpz_class& n) {
  mpz_class m = abs(n);
  std::vector<mpz_class> out;
  if (m == 0) return out;
  for (unsigned long p = 2; mpz_class(p) * p <= m; p += (p == 2 ? 1 : 2)) {
    if (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
      out.emplace_back(p);
      while (mpz_divisible_ui_p(m.get_mpz_t(), p)) m /= p;
      if (m == 1) break;
      if (mpz_probab_prime_p(m.get_mpz_t(), 30) > 0) break;
    }
  }
  if (m > 1) out.push_back(m);
  return out;
}

SquarefreeSplit squarefree_split(const mpz_class& n) {
  if (n == 0) throw DomainError("squarefree part of zero");
  mpz_class m = abs(n);
  mpz_class core = 1;
  mpz_class root = 1;
  for (const auto& p : prime_divisors(m)) {
    unsigned e = 0;
    while (mpz_divisible_p(m.get_mpz_t(), p.get_mpz_t())) {
      m /= p;
      ++e;
    }
    for (unsigned k = 0; k < e / 2; ++k) root *= p;
    if (e % 2 == 1) core *= p;
  }
  if (n < 0) core = -core;
  return {core, root};
}

std::optional<BigRational> rational_sqrt(const BigRational& q) {
  if (q.sign() < 0) return std::nullopt;
  mpz_class n = q.numerator();
  mpz_class d = q.denominator();
  if (!mpz_perfect_square_p(n.get_mpz_t()) || !mpz_perfect_square_p(d.get_mpz_t())) return std::nullopt;
  mpz_class rn, rd;
  mpz_sqrt(rn.get_mpz_t(), n.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), d.get_mpz_t());
  return BigRational(rn, rd);
}

SquareClass::SquareClass(const BigRational& q) {
  if (q.is_zero()) throw DomainError("square class of zero");
  rep_ = squarefree_split(q.numerator() * q.denominator()).core;
}

namespace {

std::int64_t small_squarefree(const BigRational& q) {
  mpz_class c = SquareClass(q).representative();
  if (!mpz_fits_slong_p(c.get_mpz_t())) throw TowerError("radicand too large: " + c.get_str());
  return mpz_get_si(c.get_mpz_t());
}

}  // namespace

// ---------------------------------------------------------------------------
// Tower

Tower Tower::quadratic(std::int64_t d) {
  if (small_squarefree(BigRational(d)) != d || d == 1)
    throw DomainError("tower generator must be squarefree and different from 0, 1: " + std::to_string(d));
  return Tower(d, 0);
}

Tower Tower::biquadratic(std::int64_t d1, std::int64_t d2) {
  quadratic(d1);
  quadratic(d2);
  if (d1 == d2 || small_squarefree(BigRational(static_cast<long long>(d1)) * BigRational(static_cast<long long>(d2))) == 1)
    throw DomainError("tower generators must be independent modulo squares");
  return Tower(d1, d2);
}

bool Tower::imaginary(int k) const noexcept {
  switch (k) {
    case 1: return d1_ < 0;
    case 2: return d2_ < 0;
    case 3: return (d1_ < 0) != (d2_ < 0);
    default: return false;
  }
}

std::string Tower::to_string() const {
  if (d1_ == 0) return "Q";
  std::string s = "Q(sqrt(" + std::to_string(d1_) + ")";
  if (d2_ != 0) s += ", sqrt(" + std::to_string(d2_) + ")";
  return s + ")";
}

namespace {

// Square classes present in t, in basis order {1, r1, r2, r1*r2}.
std::vector<std::int64_t> tower_classes(const Tower& t) {
  std::vector<std::int64_t> out{1};
  if (t.d1() != 0) out.push_back(t.d1());
  if (t.d2() != 0) {
    out.push_back(t.d2());
    out.push_back(small_squarefree(BigRational(static_cast<long long>(t.d1())) *
                                   BigRational(static_cast<long long>(t.d2()))));
  }
  return out;
}

bool tower_contains(const Tower& t, std::int64_t cls) {
  auto c = tower_classes(t);
  return std::find(c.begin(), c.end(), cls) != c.end();
}

}  // namespace

Tower join(const Tower& a, const Tower& b) {
  if (a == b || b.is_rational()) return a;
  if (a.is_rational()) return b;
  Tower r = a;
  for (std::int64_t g : {b.d1(), b.d2()}) {
    if (g == 0 || tower_contains(r, g)) continue;
    if (r.depth() == 2)
      throw TowerError("towers " + a.to_string() + " and " + b.to_string() + " need more than two generators");
    r = Tower::biquadratic(r.d1(), g);
  }
  return r;
}

// ---------------------------------------------------------------------------
// TowerScalar

TowerScalar::TowerScalar(Tower t, std::array<BigRational, 4> coords) : t_(t), c_(std::move(coords)) {
  if (t_.depth() < 2 && (!c_[2].is_zero() || !c_[3].is_zero()))
    throw DomainError("coordinate outside tower " + t_.to_string());
  if (t_.depth() < 1 && !c_[1].is_zero()) throw DomainError("coordinate outside tower " + t_.to_string());
}

std::optional<TowerScalar> TowerScalar::try_sqrt(const BigRational& q, const Tower& t) {
  if (q.is_zero()) return TowerScalar(0);
  auto split = squarefree_split(q.numerator() * q.denominator());
  // q = core * (root/den)^2
  BigRational s = BigRational(split.root) / q.denominator();
  std::int64_t cls = small_squarefree(q);
  std::array<BigRational, 4> c{};
  if (cls == 1) {
    return TowerScalar(s);
  } else if (cls == t.d1()) {
    c[1] = s;
  } else if (t.d2() != 0 && cls == t.d2()) {
    c[2] = s;
  } else if (t.d2() != 0 && tower_contains(t, cls)) {
    // r1*r2 = sigma * g * sqrt(cls) with g^2 * cls = d1*d2.
    BigRational prod = BigRational(static_cast<long long>(t.d1())) * BigRational(static_cast<long long>(t.d2()));
    auto g = rational_sqrt(prod / BigRational(static_cast<long long>(cls)));
    if (!g) throw VerificationFailure("square class bookkeeping");
    BigRational sigma = (t.d1() < 0 && t.d2() < 0) ? BigRational(-1) : BigRational(1);
    c[3] = s * sigma / *g;
  } else {
    return std::nullopt;
  }
  return TowerScalar(t, std::move(c));
}

TowerScalar TowerScalar::sqrt(const BigRational& q, const Tower& t) {
  auto r = try_sqrt(q, t);
  if (!r) throw TowerError("sqrt(" + q.to_string() + ") is not in " + t.to_string());
  return *r;
}

TowerScalar TowerScalar::sqrt(const BigRational& q) {
  if (q.is_zero()) return TowerScalar(0);
  std::int64_t cls = small_squarefree(q);
  return sqrt(q, cls == 1 ? Tower() : Tower::quadratic(cls));
}

bool TowerScalar::is_real() const {
  for (int k = 1; k < 4; ++k)
    if (t_.imaginary(k) && !c_[static_cast<std::size_t>(k)].is_zero()) return false;
  return true;
}

BigRational TowerScalar::to_rational() const {
  if (!is_rational()) throw DomainError("not rational: " + to_string());
  return c_[0];
}

TowerScalar TowerScalar::embed(const Tower& target) const {
  if (target == t_) return *this;
  if (is_rational()) return TowerScalar(target, {c_[0], {}, {}, {}});
  TowerScalar r1 = sqrt(BigRational(static_cast<long long>(t_.d1())), target);
  TowerScalar out = TowerScalar(target, {c_[0], {}, {}, {}});
  out += r1 * TowerScalar(c_[1]);
  if (t_.d2() != 0) {
    TowerScalar r2 = sqrt(BigRational(static_cast<long long>(t_.d2())), target);
    out += r2 * TowerScalar(c_[2]);
    out += r1 * r2 * TowerScalar(c_[3]);
  }
  return out;
}

TowerScalar TowerScalar::operator-() const {
  TowerScalar r = *this;
  for (auto& c : r.c_)
    if (!c.is_zero()) c = -c;
  return r;
}

namespace {

// Bring both operands into one tower.
Tower common(const TowerScalar& a, const TowerScalar& b) {
  if (a.tower() == b.tower()) return a.tower();
  if (b.is_rational()) return a.tower();
  if (a.is_rational()) return b.tower();
  return join(a.tower(), b.tower());
}

}  // namespace

TowerScalar& TowerScalar::operator+=(const TowerScalar& o) {
  if (o.is_rational()) {
    c_[0] += o.c_[0];
    return *this;
  }
  Tower t = common(*this, o);
  if (t != t_) *this = embed(t);
  if (o.t_ == t) {
    for (std::size_t k = 0; k < 4; ++k)
      if (!o.c_[k].is_zero()) c_[k] += o.c_[k];
  } else {
    TowerScalar e = o.embed(t);
    for (std::size_t k = 0; k < 4; ++k)
      if (!e.c_[k].is_zero()) c_[k] += e.c_[k];
  }
  return *this;
}

TowerScalar& TowerScalar::operator-=(const TowerScalar& o) { return *this += -o; }

TowerScalar operator*(const TowerScalar& a, const TowerScalar& b) {
  if (b.is_rational()) {
    TowerScalar r = a;
    const BigRational& s = b.c_[0];
    for (auto& c : r.c_)
      if (!c.is_zero()) c *= s;
    return r;
  }
  if (a.is_rational()) return b * a;
  Tower t = common(a, b);
  if (a.t_ != t || b.t_ != t) return a.embed(t) * b.embed(t);
  BigRational d1(static_cast<long long>(t.d1()));
  BigRational d2(static_cast<long long>(t.d2()));
  const auto& x = a.c_;
  const auto& y = b.c_;
  std::array<BigRational, 4> z{};
  auto acc = [](BigRational& dst, const BigRational& p, const BigRational& q) {
    if (!p.is_zero() && !q.is_zero()) dst += p * q;
  };
  acc(z[0], x[0], y[0]);
  acc(z[1], x[0], y[1]);
  acc(z[1], x[1], y[0]);
  acc(z[2], x[0], y[2]);
  acc(z[2], x[2], y[0]);
  acc(z[3], x[0], y[3]);
  acc(z[3], x[3], y[0]);
  acc(z[3], x[1], y[2]);
  acc(z[3], x[2], y[1]);
  if (t.depth() >= 1) {
    BigRational s;
    acc(s, x[1], y[1]);
    if (!s.is_zero()) z[0] += d1 * s;
  }
  if (t.depth() == 2) {
    BigRational s0, s1, s2;
    acc(s0, x[2], y[2]);
    if (!s0.is_zero()) z[0] += d2 * s0;
    BigRational s3;
    acc(s3, x[3], y[3]);
    if (!s3.is_zero()) z[0] += d1 * d2 * s3;
    acc(s1, x[2], y[3]);
    acc(s1, x[3], y[2]);
    if (!s1.is_zero()) z[1] += d2 * s1;
    acc(s2, x[1], y[3]);
    acc(s2, x[3], y[1]);
    if (!s2.is_zero()) z[2] += d1 * s2;
  }
  return TowerScalar(t, std::move(z));
}

TowerScalar& TowerScalar::operator*=(const TowerScalar& o) { return *this = *this * o; }
TowerScalar& TowerScalar::operator/=(const TowerScalar& o) { return *this = *this / o; }

TowerScalar TowerScalar::conj1() const {
  TowerScalar r = *this;
  r.c_[1] = -r.c_[1];
  r.c_[3] = -r.c_[3];
  return r;
}

TowerScalar TowerScalar::conj2() const {
  TowerScalar r = *this;
  r.c_[2] = -r.c_[2];
  r.c_[3] = -r.c_[3];
  return r;
}

TowerScalar TowerScalar::complex_conj() const {
  TowerScalar r = *this;
  for (int k = 1; k < 4; ++k)
    if (t_.imaginary(k)) r.c_[static_cast<std::size_t>(k)] = -r.c_[static_cast<std::size_t>(k)];
  return r;
}

TowerScalar TowerScalar::inverse() const {
  if (is_zero()) throw DivisionByZero();
  if (is_rational()) return TowerScalar(c_[0].inverse());
  TowerScalar c1 = conj1();
  TowerScalar y = *this * c1;  // free of r1
  TowerScalar c2 = y.conj2();
  TowerScalar n = y * c2;  // rational
  return c1 * c2 * TowerScalar(n.to_rational().inverse());
}

bool operator==(const TowerScalar& a, const TowerScalar& b) {
  if (a.t_ == b.t_ || (a.is_rational() && b.is_rational())) return a.c_ == b.c_;
  if (a.is_rational() != b.is_rational()) {
    // A rational never equals an element with a nonzero irrational coordinate.
    return false;
  }
  Tower t = join(a.t_, b.t_);
  return a.embed(t).c_ == b.embed(t).c_;
}

std::string TowerScalar::to_string() const {
  std::string names[4] = {"", "", "", ""};
  if (t_.d1() != 0) names[1] = "sqrt(" + std::to_string(t_.d1()) + ")";
  if (t_.d2() != 0) {
    names[2] = "sqrt(" + std::to_string(t_.d2()) + ")";
    names[3] = names[1] + "*" + names[2];
  }
  std::string out;
  for (std::size_t k = 0; k < 4; ++k) {
    const BigRational& c = c_[k];
    if (c.is_zero()) continue;
    std::string term;
    bool neg = c.sign() < 0;
    BigRational a = c.abs();
    if (k == 0) term = a.to_string();
    else if (a.is_one()) term = names[k];
    else term = a.to_string() + "*" + names[k];
    if (out.empty()) out = (neg ? "-" : "") + term;
    else out += (neg ? " - " : " + ") + term;
  }
  return out.empty() ? "0" : out;
}

TowerScalar TowerScalar::parse(std::string_view text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  if (s.empty()) throw DomainError("empty scalar");
  // Split into signed terms at top-level '+'/'-'.
  std::vector<std::string> terms;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char ch = s[i];
    if (ch == '(') ++depth;
    else if (ch == ')') --depth;
    else if ((ch == '+' || ch == '-') && depth == 0 && i > start) {
      terms.push_back(s.substr(start, i - start));
      start = ch == '+' ? i + 1 : i;
    }
  }
  terms.push_back(s.substr(start));

  struct Term {
    BigRational coef;
    std::vector<std::int64_t> rad;
  };
  std::vector<Term> parsed;
  Tower t;
  for (auto& term : terms) {
    if (term.empty()) throw DomainError("malformed scalar: '" + s + "'");
    Term pt{BigRational(1), {}};
    std::string body = term;
    if (body[0] == '-') {
      pt.coef = BigRational(-1);
      body = body.substr(1);
    }
    std::size_t pos = 0;
    bool have_coef = false;
    while (pos <= body.size()) {
      std::size_t star = body.find('*', pos);
      std::string part = body.substr(pos, star == std::string::npos ? std::string::npos : star - pos);
      if (part.rfind("sqrt(", 0) == 0 && part.back() == ')') {
        std::string inner = part.substr(5, part.size() - 6);
        BigRational r = BigRational::parse(inner);
        if (!r.is_integer()) throw DomainError("radicand must be an integer: '" + part + "'");
        std::int64_t dv = small_squarefree(r);
        if (BigRational(static_cast<long long>(dv)) != r) throw DomainError("radicand must be squarefree: '" + part + "'");
        pt.rad.push_back(dv);
      } else {
        if (have_coef || !pt.rad.empty()) throw DomainError("malformed scalar term: '" + term + "'");
        pt.coef *= BigRational::parse(part);
        have_coef = true;
      }
      if (star == std::string::npos) break;
      pos = star + 1;
    }
    if (pt.rad.size() > 2) throw DomainError("too many radicals in term: '" + term + "'");
    parsed.push_back(std::move(pt));
  }
  // A product term fixes the generator order; other radicals join after it.
  for (const auto& pt : parsed)
    if (pt.rad.size() == 2) {
      t = Tower::biquadratic(pt.rad[0], pt.rad[1]);
      break;
    }
  for (const auto& pt : parsed)
    for (auto dv : pt.rad) t = join(t, Tower::quadratic(dv));
  TowerScalar out(t, std::array<BigRational, 4>{});
  for (const auto& pt : parsed) {
    TowerScalar v(pt.coef);
    for (auto dv : pt.rad) v = v * sqrt(BigRational(static_cast<long long>(dv)), t);
    out += v;
  }
  return out;
}

// ---------------------------------------------------------------------------
// real_sign

namespace {

int sign_of(const BigRational& q) { return q.sign(); }

// sign of a + b*sqrt(D), D > 0 not a square.
int sign_quad(const BigRational& a, const BigRational& b, const BigRational& D) {
  int sa = sign_of(a), sb = sign_of(b);
  if (sb == 0) return sa;
  if (sa == 0 || sa == sb) return sb;
  // opposite signs: compare a^2 with b^2 D
  int c = compare(a * a, b * b * D);
  return c > 0 ? sa : sb;
}

}  // namespace

Sign real_sign(const TowerScalar& x) {
  if (!x.is_real()) throw DomainError("real_sign of a non-real scalar: " + x.to_string());
  const Tower& t = x.tower();
  auto as_sign = [](int s) { return s > 0 ? Sign::positive : (s < 0 ? Sign::negative : Sign::zero); };
  if (x.is_rational()) return as_sign(x.coord(0).sign());
  BigRational d1(static_cast<long long>(t.d1()));
  BigRational d2(static_cast<long long>(t.d2()));
  if (t.depth() == 1) return as_sign(sign_quad(x.coord(0), x.coord(1), d1));
  if (t.d1() > 0 && t.d2() > 0) {
    // x = u + v*sqrt(d2), u, v in Q(sqrt d1)
    Tower t1 = Tower::quadratic(t.d1());
    TowerScalar u(t1, {x.coord(0), x.coord(1), {}, {}});
    TowerScalar v(t1, {x.coord(2), x.coord(3), {}, {}});
    int su = static_cast<int>(real_sign(u));
    int sv = static_cast<int>(real_sign(v));
    if (sv == 0) return as_sign(su);
    if (su == 0 || su == sv) return as_sign(sv);
    int c = static_cast<int>(real_sign(u * u - v * v * TowerScalar(d2)));
    return as_sign(c > 0 ? su : sv);
  }
  if (t.d1() > 0) return as_sign(sign_quad(x.coord(0), x.coord(1), d1));
  if (t.d2() > 0) return as_sign(sign_quad(x.coord(0), x.coord(2), d2));
  // both negative: r1*r2 = -sqrt(d1*d2)
  return as_sign(sign_quad(x.coord(0), -x.coord(3), d1 * d2));
}

// ---------------------------------------------------------------------------
// Hilbert symbols

namespace {

// Strip p-power: n = p^e * u.
unsigned long valuation(mpz_class& n, const mpz_class& p) {
  unsigned long e = 0;
  while (mpz_divisible_p(n.get_mpz_t(), p.get_mpz_t())) {
    n /= p;
    ++e;
  }
  return e;
}

}  // namespace

int hilbert_symbol(const BigRational& a, const BigRational& b, const Place& p) {
  if (a.is_zero() || b.is_zero()) throw DomainError("hilbert symbol of zero");
  if (p.is_infinite()) return (a.sign() < 0 && b.sign() < 0) ? -1 : 1;
  if (p.prime < 2 || mpz_probab_prime_p(p.prime.get_mpz_t(), 30) == 0)
    throw DomainError("not a prime: " + p.prime.get_str());
  // Same square class, integer representatives.
  mpz_class u = a.numerator() * a.denominator();
  mpz_class v = b.numerator() * b.denominator();
  unsigned long alpha = valuation(u, p.prime);
  unsigned long beta = valuation(v, p.prime);
  if (p.prime == 2) {
    unsigned long u8 = mpz_fdiv_ui(u.get_mpz_t(), 8);
    unsigned long v8 = mpz_fdiv_ui(v.get_mpz_t(), 8);
    auto eps = [](unsigned long r) { return ((r - 1) / 2) % 2; };
    auto omega = [](unsigned long r) { return ((r * r - 1) / 8) % 2; };
    unsigned long e = eps(u8) * eps(v8) + (alpha % 2) * omega(v8) + (beta % 2) * omega(u8);
    return e % 2 == 0 ? 1 : -1;
  }
  int s = 1;
  mpz_class half = (p.prime - 1) / 2;
  if ((alpha % 2) && (beta % 2) && mpz_odd_p(half.get_mpz_t())) s = -s;
  if (beta % 2) s *= mpz_legendre(u.get_mpz_t(), p.prime.get_mpz_t());
  if (alpha % 2) s *= mpz_legendre(v.get_mpz_t(), p.prime.get_mpz_t());
  return s;
}

NormTest is_norm(const BigRational& a, const BigRational& d) {
  if (a.is_zero()) throw DomainError("is_norm of zero");
  if (d.sign() <= 0) throw DomainError("is_norm needs d > 0");
  std::vector<mpz_class> primes{2};
  for (const auto& z : {a.numerator(), a.denominator(), d.numerator(), d.denominator()})
    for (auto& p : prime_divisors(z)) primes.push_back(p);
  std::sort(primes.begin(), primes.end());
  primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
  NormTest out;
  BigRational md = -d;
  if (hilbert_symbol(a, md, Place::infinity()) < 0) out.obstructions.push_back(Place::infinity());
  for (auto& p : primes)
    if (hilbert_symbol(a, md, Place{p}) < 0) out.obstructions.push_back(Place{p});
  out.is_norm = out.obstructions.empty();
  return out;
}

// ---------------------------------------------------------------------------
// ImagQuadratic

ImagQuadratic::ImagQuadratic(const BigRational& d) : d_(d) {
  if (d.sign() <= 0) throw DomainError("imaginary quadratic field needs d > 0");
  BigRational md = -d;
  std::int64_t cls = small_squarefree(md);
  tower_ = Tower::quadratic(cls);
  auto s = rational_sqrt(md / BigRational(static_cast<long long>(cls)));
  if (!s) throw VerificationFailure("square class bookkeeping");
  phi_scale_ = *s;
  phi_ = TowerScalar(tower_, {BigRational(), phi_scale_, {}, {}});
}

TowerScalar ImagQuadratic::make(const BigRational& p, const BigRational& q) const {
  return TowerScalar(tower_, {p, q * phi_scale_, {}, {}});
}

std::pair<BigRational, BigRational> ImagQuadratic::split(const TowerScalar& x) const {
  if (x.is_rational()) return {x.coord(0), BigRational()};
  Tower t = join(x.tower(), tower_);
  TowerScalar xe = x.embed(t);
  TowerScalar pe = phi_.embed(t);
  int k = 1;
  while (pe.coord(k).is_zero()) ++k;
  BigRational q = xe.coord(k) / pe.coord(k);
  for (int j = 1; j < 4; ++j)
    if (j != k && !xe.coord(j).is_zero()) throw DomainError("scalar not in K: " + x.to_string());
  return {xe.coord(0), q};
}

BigRational ImagQuadratic::norm(const TowerScalar& x) const {
  auto [p, q] = split(x);
  return p * p + d_ * q * q;
}

namespace {

// Square root of a modulo the odd prime p, a a nonzero square mod p.
mpz_class sqrt_mod_prime(const mpz_class& a, const mpz_class& p) {
  mpz_class r;
  mpz_class am = a % p;
  if (am < 0) am += p;
  if (am == 0) return 0;
  if (p == 2) return am;
  // Tonelli-Shanks.
  mpz_class q = p - 1;
  unsigned long s = 0;
  while (mpz_even_p(q.get_mpz_t())) {
    q /= 2;
    ++s;
  }
  mpz_class z = 2;
  while (mpz_legendre(z.get_mpz_t(), p.get_mpz_t()) != -1) ++z;
  mpz_class c, t, e;
  mpz_powm(c.get_mpz_t(), z.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
  mpz_powm(t.get_mpz_t(), am.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
  e = (q + 1) / 2;
  mpz_powm(r.get_mpz_t(), am.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
  unsigned long m = s;
  while (t != 1) {
    unsigned long i = 0;
    mpz_class tt = t;
    while (tt != 1) {
      tt = tt * tt % p;
      ++i;
    }
    mpz_class b = c;
    for (unsigned long k = 0; k + i + 1 < m; ++k) b = b * b % p;
    m = i;
    c = b * b % p;
    t = t * c % p;
    r = r * b % p;
  }
  return r;
}

// r with r^2 = a mod n for squarefree n > 0, or nullopt.
std::optional<mpz_class> sqrt_mod_squarefree(const mpz_class& a, const mpz_class& n) {
  mpz_class r = 0, mod = 1;
  for (const auto& p : prime_divisors(n)) {
    mpz_class ap = a % p;
    if (ap < 0) ap += p;
    mpz_class rp;
    if (ap == 0 || p == 2) {
      rp = ap;
    } else {
      if (mpz_legendre(ap.get_mpz_t(), p.get_mpz_t()) != 1) return std::nullopt;
      rp = sqrt_mod_prime(ap, p);
    }
    // CRT: r = r mod `mod`, r = rp mod p.
    mpz_class inv;
    mpz_invert(inv.get_mpz_t(), mod.get_mpz_t(), p.get_mpz_t());
    mpz_class k = (rp - r) * inv % p;
    if (k < 0) k += p;
    r += k * mod;
    mod *= p;
  }
  return r;
}

struct Triple {
  mpz_class x, y, z;
};

// Nontrivial (x, y, z) with z^2 = a x^2 + b y^2, a and b squarefree.
std::optional<Triple> solve_hilbert(const mpz_class& a, const mpz_class& b) {
  if (a == 1) return Triple{1, 0, 1};
  if (b == 1) return Triple{0, 1, 1};
  if (a < 0 && b < 0) return std::nullopt;
  if (abs(a) > abs(b)) {
    auto s = solve_hilbert(b, a);
    if (!s) return std::nullopt;
    return Triple{s->y, s->x, s->z};
  }
  // |a| <= |b|, |b| >= 2.
  mpz_class n = abs(b);
  auto r0 = sqrt_mod_squarefree(a, n);
  if (!r0) return std::nullopt;
  mpz_class r = *r0;
  if (2 * r > n) r -= n;
  mpz_class t = (r * r - a) / b;
  if (t == 0) return std::nullopt;  // a is a square, handled above
  SquarefreeSplit sp = squarefree_split(t);
  auto s = solve_hilbert(a, sp.core);
  if (!s) return std::nullopt;
  // N(r + sqrt a) = b t' k^2 and N(z' + x' sqrt a) = t' y'^2.
  Triple out{s->z + r * s->x, sp.core * sp.root * s->y, s->z * r + a * s->x};
  mpz_class g = gcd(gcd(out.x, out.y), out.z);
  if (g > 1) {
    out.x /= g;
    out.y /= g;
    out.z /= g;
  }
  return out;
}

}  // namespace

std::optional<TowerScalar> ImagQuadratic::norm_preimage(const BigRational& a) const {
  if (a.sign() <= 0) return std::nullopt;
  // x^2 + d y^2 = a. Write d = d0 f^2 and a * den(a)^2 = c0 g^2.
  mpz_class dn = d_.numerator() * d_.denominator();
  SquarefreeSplit ds = squarefree_split(dn);
  BigRational f = BigRational(ds.root) / BigRational(d_.denominator());  // d = d0 f^2
  mpz_class an = a.numerator() * a.denominator();
  SquarefreeSplit as = squarefree_split(an);
  BigRational g = BigRational(as.root) / BigRational(a.denominator());  // a = c0 g^2
  // Z^2 = -d0 X^2 + c0 Y^2 gives (Z/Y)^2 + d0 (X/Y)^2 = c0.
  auto s = solve_hilbert(-ds.core, as.core);
  if (!s) return std::nullopt;
  BigRational y(s->y);
  BigRational p = BigRational(s->z) / y * g;
  BigRational q = BigRational(s->x) / y * g / f;
  TowerScalar lam = make(p, q);
  if (norm(lam) != a) throw VerificationFailure("norm equation solution check failed");
  return lam;
}

}  // namespace weilks
