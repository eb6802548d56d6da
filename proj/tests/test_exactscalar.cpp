#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "weilks/exactscalar.hpp"

using namespace weilks;

namespace {

BigRational rnd_rational(long range = 12) {
  long n = oracle::uniform(-range, range);
  long d = oracle::uniform(1, range);
  return BigRational(mpz_class(n), mpz_class(d));
}

TowerScalar rnd_scalar(const Tower& t) {
  std::array<BigRational, 4> c{};
  for (int k = 0; k <= (t.depth() == 2 ? 3 : t.depth()); ++k) c[static_cast<std::size_t>(k)] = rnd_rational();
  return TowerScalar(t, c);
}

long double approx(const TowerScalar& x) {
  const Tower& t = x.tower();
  auto q = [](const BigRational& r) { return static_cast<long double>(r.to_mpq().get_d()); };
  long double v = q(x.coord(0));
  if (t.depth() >= 1 && t.d1() > 0) v += q(x.coord(1)) * std::sqrt(static_cast<long double>(t.d1()));
  if (t.depth() == 2) {
    if (t.d2() > 0) v += q(x.coord(2)) * std::sqrt(static_cast<long double>(t.d2()));
    long double r3 = std::sqrt(std::fabs(static_cast<long double>(t.d1()) * t.d2()));
    if (t.d1() > 0 && t.d2() > 0) v += q(x.coord(3)) * r3;
    if (t.d1() < 0 && t.d2() < 0) v -= q(x.coord(3)) * r3;
  }
  return v;
}

}  // namespace

TEST_CASE("BigRational agrees with GMP rationals, including overflow") {
  for (int trial = 0; trial < 2000; ++trial) {
    long e = oracle::uniform(0, 70);
    mpz_class big = mpz_class(1) << static_cast<unsigned long>(e);
    mpq_class a(mpz_class(oracle::uniform(-1000, 1000)) * big + oracle::uniform(-5, 5), oracle::uniform(1, 1000));
    mpq_class b(oracle::uniform(-1000, 1000), mpz_class(oracle::uniform(1, 1000)) * big + 1);
    a.canonicalize();
    b.canonicalize();
    BigRational x(a), y(b);
    CHECK((x + y).to_mpq() == a + b);
    CHECK((x - y).to_mpq() == a - b);
    CHECK((x * y).to_mpq() == a * b);
    if (b != 0) CHECK((x / y).to_mpq() == a / b);
    CHECK(compare(x, y) == (a < b ? -1 : (a > b ? 1 : 0)));
    CHECK(BigRational::parse(x.to_string()) == x);
  }
  BigRational huge = BigRational(std::int64_t{1} << 61) * BigRational(std::int64_t{1} << 61);
  CHECK(huge.to_string() == "5316911983139663491615228241121378304");
  CHECK((huge / huge).is_one());
  CHECK_THROWS_AS(BigRational(0).inverse(), DivisionByZero);
  CHECK_THROWS_AS(BigRational::parse("1/0"), DivisionByZero);
  CHECK_THROWS_AS(BigRational::parse("x"), DomainError);
  CHECK(BigRational::parse("-6/4").to_string() == "-3/2");
}

TEST_CASE("tower arithmetic examples") {
  Tower q3 = Tower::quadratic(-3);
  TowerScalar r = TowerScalar::sqrt(BigRational(-3), q3);
  CHECK((TowerScalar(1) + r) * (TowerScalar(1) - r) == TowerScalar(4));

  ImagQuadratic k(BigRational(5));
  TowerScalar x = k.make(BigRational(2), BigRational(7));
  CHECK(x.conj1() == k.make(BigRational(2), BigRational(-7)));
  CHECK(k.phi() * k.phi() == TowerScalar(-5));

  Tower q2 = Tower::quadratic(2);
  TowerScalar s2 = TowerScalar::sqrt(BigRational(2), q2);
  TowerScalar inv = s2.inverse();
  CHECK(inv * s2 == TowerScalar(1));
  CHECK(inv == TowerScalar(q2, {BigRational(), BigRational(mpz_class(1), mpz_class(2)), {}, {}}));
  CHECK_THROWS_AS(TowerScalar(q2, {}).inverse(), DivisionByZero);
}

TEST_CASE("towers join and reject a third generator") {
  Tower a = Tower::quadratic(-1);
  Tower b = Tower::quadratic(-3);
  Tower ab = join(a, b);
  CHECK(ab == Tower::biquadratic(-1, -3));
  // sqrt(3) = -sqrt(-1)*sqrt(-3) under the fixed embedding
  TowerScalar s3 = TowerScalar::sqrt(BigRational(3), ab);
  CHECK(s3 * s3 == TowerScalar(3));
  CHECK(real_sign(s3) == Sign::positive);
  CHECK(join(ab, Tower::quadratic(3)) == ab);
  CHECK_THROWS_AS(join(ab, Tower::quadratic(5)), TowerError);
  TowerScalar i = TowerScalar::sqrt(BigRational(-1));
  TowerScalar w = TowerScalar::sqrt(BigRational(-3));
  CHECK((i * w) * (i * w) == TowerScalar(3));
  CHECK_THROWS_AS(i * w * TowerScalar::sqrt(BigRational(5)), TowerError);
  CHECK_THROWS_AS(Tower::quadratic(4), DomainError);
  CHECK_THROWS_AS(Tower::biquadratic(2, 8 / 4), DomainError);
}

TEST_CASE("field axioms on fuzzed triples") {
  std::vector<Tower> towers{Tower::quadratic(2), Tower::quadratic(-3), Tower::biquadratic(-1, -3),
                            Tower::biquadratic(2, 3), Tower::biquadratic(-1, 6)};
  for (const Tower& t : towers) {
    for (int trial = 0; trial < 1000; ++trial) {
      TowerScalar x = rnd_scalar(t), y = rnd_scalar(t), z = rnd_scalar(t);
      REQUIRE((x * y) * z == x * (y * z));
      REQUIRE((x + y) * z == x * z + y * z);
      REQUIRE(x * y == y * x);
      if (!x.is_zero()) REQUIRE(x * x.inverse() == TowerScalar(1));
    }
  }
}

TEST_CASE("conjugations are involutive automorphisms with traces in the fixed field") {
  Tower t = Tower::biquadratic(-1, -3);
  for (int trial = 0; trial < 300; ++trial) {
    TowerScalar x = rnd_scalar(t), y = rnd_scalar(t);
    CHECK(x.conj1().conj1() == x);
    CHECK(x.conj2().conj2() == x);
    CHECK((x * y).conj1() == x.conj1() * y.conj1());
    CHECK((x + y).conj2() == x.conj2() + y.conj2());
    TowerScalar tr1 = x + x.conj1();
    CHECK(tr1.coord(1).is_zero());
    CHECK(tr1.coord(3).is_zero());
    TowerScalar tr2 = x + x.conj2();
    CHECK(tr2.coord(2).is_zero());
    CHECK(tr2.coord(3).is_zero());
    CHECK((x * x.complex_conj()).is_real());
  }
}

TEST_CASE("real_sign") {
  Tower q2 = Tower::quadratic(2);
  TowerScalar s2 = TowerScalar::sqrt(BigRational(2), q2);
  CHECK(real_sign(TowerScalar(0)) == Sign::zero);
  CHECK(real_sign(TowerScalar(3) - TowerScalar(2) * s2) == Sign::positive);
  CHECK(real_sign(TowerScalar(1) - s2) == Sign::negative);
  CHECK_THROWS_AS(real_sign(TowerScalar::sqrt(BigRational(-1))), DomainError);

  std::vector<Tower> towers{Tower::quadratic(2), Tower::biquadratic(2, 3), Tower::biquadratic(-1, -3),
                            Tower::biquadratic(5, -1), Tower::biquadratic(-2, 3)};
  int compared = 0;
  for (const Tower& t : towers) {
    for (int trial = 0; trial < 400; ++trial) {
      TowerScalar x = rnd_scalar(t);
      std::array<BigRational, 4> c{};
      for (int k = 0; k < 4; ++k)
        if (!t.imaginary(k)) c[static_cast<std::size_t>(k)] = x.coord(k);
      TowerScalar real(t, c);
      if (!real.is_zero()) CHECK(real_sign(real * real) == Sign::positive);
      long double v = approx(real);
      if (std::fabs(v) > 1e-9) {
        ++compared;
        CHECK(real_sign(real) == (v > 0 ? Sign::positive : Sign::negative));
      }
    }
  }
  CHECK(compared > 1500);
}

TEST_CASE("scalar strings round-trip") {
  std::vector<Tower> towers{Tower(), Tower::quadratic(-7), Tower::biquadratic(-1, -3), Tower::biquadratic(2, -5)};
  for (const Tower& t : towers) {
    for (int trial = 0; trial < 200; ++trial) {
      TowerScalar x = rnd_scalar(t);
      if (oracle::uniform(0, 3) == 0) x = TowerScalar(t, {BigRational(), BigRational(), {}, x.coord(3)});
      std::string s = x.to_string();
      TowerScalar y = TowerScalar::parse(s);
      CHECK(y == x);
      CHECK(y.to_string() == s);
    }
  }
  CHECK(TowerScalar::parse("1/2 - sqrt(-3)").to_string() == "1/2 - sqrt(-3)");
  CHECK(TowerScalar::parse("-2*sqrt(-1)*sqrt(-3)") * TowerScalar::parse("sqrt(-1)*sqrt(-3)") ==
        TowerScalar(-6));
  CHECK(TowerScalar(0).to_string() == "0");
  CHECK_THROWS_AS(TowerScalar::parse("sqrt(4)"), DomainError);
  CHECK_THROWS_AS(TowerScalar::parse("1 +"), DomainError);
}

TEST_CASE("square classes") {
  CHECK(SquareClass(BigRational(12)).representative() == 3);
  CHECK(SquareClass(BigRational(mpz_class(-8), mpz_class(9))).representative() == -2);
  CHECK(SquareClass(BigRational(mpz_class(3), mpz_class(12))).is_trivial());
  for (int trial = 0; trial < 300; ++trial) {
    BigRational a = rnd_rational(40), b = rnd_rational(40);
    if (a.is_zero() || b.is_zero()) continue;
    bool ratio_square = rational_sqrt((a / b).abs()).has_value() && (a / b).sign() > 0;
    CHECK((SquareClass(a) == SquareClass(b)) == ratio_square);
  }
}

TEST_CASE("hilbert symbol examples") {
  CHECK(hilbert_symbol(1, 7, Place{2}) == 1);
  CHECK(hilbert_symbol(-1, -1, Place{2}) == -1);
  CHECK(hilbert_symbol(-1, -1, Place{3}) == 1);
  CHECK(hilbert_symbol(-1, -1, Place::infinity()) == -1);
  CHECK_THROWS_AS(hilbert_symbol(0, 1, Place{3}), DomainError);
  CHECK_THROWS_AS(hilbert_symbol(2, 3, Place{4}), DomainError);
}

TEST_CASE("hilbert symbol matches local solvability search") {
  const long places[] = {2, 3, 5, 7, 0};
  int pairs = 0;
  while (pairs < 50) {
    long a = oracle::uniform(-30, 30), b = oracle::uniform(-30, 30);
    if (a == 0 || b == 0) continue;
    ++pairs;
    long sa = oracle::squarefree(a), sb = oracle::squarefree(b);
    for (long p : places) {
      Place pl = p == 0 ? Place::infinity() : Place{p};
      int h = hilbert_symbol(a, b, pl);
      INFO("a=" << a << " b=" << b << " p=" << p);
      CHECK(h == oracle::hilbert_by_search(sa, sb, p));
      CHECK(h == hilbert_symbol(b, a, pl));
    }
  }
}

TEST_CASE("hilbert symbol is bimultiplicative") {
  const long places[] = {2, 3, 5, 7, 11, 0};
  for (int trial = 0; trial < 200; ++trial) {
    BigRational a = rnd_rational(30), b = rnd_rational(30), c = rnd_rational(30);
    if (a.is_zero() || b.is_zero() || c.is_zero()) continue;
    for (long p : places) {
      Place pl = p == 0 ? Place::infinity() : Place{p};
      CHECK(hilbert_symbol(a * b, c, pl) == hilbert_symbol(a, c, pl) * hilbert_symbol(b, c, pl));
    }
  }
}

TEST_CASE("norm test") {
  CHECK(is_norm(1, 7).is_norm);
  CHECK(is_norm(2, 1).is_norm);
  CHECK(oracle::norm_by_search(2, 1, 10));
  NormTest t = is_norm(3, 1);
  CHECK_FALSE(t.is_norm);
  CHECK_FALSE(oracle::norm_by_search(3, 1, 60));
  bool at3 = false;
  for (auto& p : t.obstructions) at3 = at3 || p.prime == 3;
  CHECK(at3);
  CHECK_FALSE(is_norm(-1, 3).is_norm);

  ImagQuadratic k(BigRational(1));
  auto pre = k.norm_preimage(BigRational(2));
  REQUIRE(pre.has_value());
  CHECK(k.norm(*pre) == BigRational(2));
}

TEST_CASE("norm test agrees with bounded search") {
  int decided = 0, positives = 0, negatives = 0;
  for (int trial = 0; trial < 2000 && decided < 30; ++trial) {
    long a = oracle::uniform(1, 40), d = oracle::uniform(1, 15);
    bool found = oracle::norm_by_search(a, d, 40);
    NormTest t = is_norm(a, d);
    if (found) CHECK(t.is_norm);
    if (!t.is_norm) CHECK_FALSE(found);
    if (found || !t.is_norm) {
      ++decided;
      (found ? positives : negatives)++;
    }
  }
  CHECK(decided == 30);
  CHECK(positives > 0);
  CHECK(negatives > 0);
}

TEST_CASE("norm preimages are exact and exist exactly for norms") {
  for (int trial = 0; trial < 300; ++trial) {
    BigRational d(oracle::uniform(1, 40), oracle::uniform(1, 3));
    ImagQuadratic k(d);
    BigRational a(oracle::uniform(1, 5000), oracle::uniform(1, 60));
    auto pre = k.norm_preimage(a);
    CHECK(pre.has_value() == is_norm(a, d).is_norm);
    if (pre) CHECK(k.norm(*pre) == a);
    // products of norms with large denominators
    TowerScalar lam = k.make(BigRational(oracle::uniform(-999, 999), oracle::uniform(1, 97)),
                             BigRational(oracle::uniform(1, 999), oracle::uniform(1, 97)));
    auto back = k.norm_preimage(k.norm(lam));
    REQUIRE(back.has_value());
    CHECK(k.norm(*back) == k.norm(lam));
  }
}
