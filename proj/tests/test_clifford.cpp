#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "weilks/clifford.hpp"
#include "weilks/errors.hpp"

using namespace weilks;

namespace {

TowerScalar q(long n, long d = 1) { return TowerScalar(BigRational(mpz_class(n), mpz_class(d))); }

std::vector<BigRational> norms_of(const std::vector<long>& v) {
  std::vector<BigRational> out;
  for (long x : v) out.emplace_back(x);
  return out;
}

MatrixF f_gram(long l, long m) {
  return block_diagonal({hyperbolic_plane(), hyperbolic_plane(), MatrixF::from_ints({{l}}), MatrixF::from_ints({{m}})});
}

CliffordElement random_element(const CliffordAlgebra& alg, bool even, int terms, bool tower = false) {
  CliffordElement x(alg);
  for (int t = 0; t < terms; ++t) {
    Blade b = static_cast<Blade>(oracle::uniform(0, static_cast<long>(alg.dim()) - 1));
    if (even && grade(b) % 2) b ^= 1;
    TowerScalar c = q(oracle::uniform(-4, 4), oracle::uniform(1, 3));
    if (tower && oracle::uniform(0, 1)) c = c * TowerScalar::sqrt(BigRational(2));
    x = x + alg.blade(b, c);
  }
  return x;
}

std::vector<long> random_norms(int n) {
  std::vector<long> out;
  for (int i = 0; i < n; ++i) {
    long v = 0;
    while (v == 0) v = oracle::uniform(-3, 3);
    out.push_back(v);
  }
  return out;
}

CliffordAlgebra random_general_algebra(int n) {
  for (;;) {
    MatrixF g(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        long v = oracle::uniform(0, 2) ? oracle::uniform(-2, 2) : 0;
        g(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = q(v);
        g(static_cast<std::size_t>(j), static_cast<std::size_t>(i)) = q(v);
      }
    try {
      return CliffordAlgebra::from_gram(g);
    } catch (const DegenerateForm&) {
    }
  }
}

CliffordAlgebra random_algebra(int n) {
  if (oracle::uniform(0, 1)) return CliffordAlgebra::diagonal(norms_of(random_norms(n)));
  return random_general_algebra(n);
}

oracle::DenseMatrix dense_image(const std::vector<oracle::DenseMatrix>& gens, const CliffordElement& x) {
  std::vector<std::pair<std::uint32_t, mpq_class>> terms;
  for (const auto& [b, c] : x.terms()) terms.emplace_back(b, c.to_rational().to_mpq());
  return oracle::clifford_image(gens, terms);
}

}  // namespace

TEST_CASE("generators square to their norms and anticommute") {
  auto alg = CliffordAlgebra::diagonal(norms_of({2, -3, 5}));
  CHECK(alg.generator(1) * alg.generator(1) == alg.scalar(q(2)));
  CHECK(alg.generator(2) * alg.generator(2) == alg.scalar(q(-3)));
  CHECK(alg.generator(1) * alg.generator(2) == -(alg.generator(2) * alg.generator(1)));
  CHECK(alg.product_of({3, 1}) == -alg.blade(0b101));
  CHECK(alg.dim() == 8);
  CHECK(alg.even_blades().size() == 4);

  auto f = CliffordAlgebra::from_gram(f_gram(-1, -3), "f");
  CHECK_FALSE(f.is_diagonal());
  auto f1 = f.generator(1), f2 = f.generator(2);
  CHECK((f1 * f1).is_zero());
  CHECK(f1 * f2 + f2 * f1 == f.scalar(q(2)));
  CHECK((f1 * f2) * (f1 * f2) == (f1 * f2) * q(2));
  CHECK(f.generator(5) * f.generator(5) == f.scalar(q(-1)));
  CHECK(f.product_of({1, 2, 3, 4}).to_string() == "f1f2f3f4");
  CHECK(((f1 * f2) * q(1, 2) - f.product_of({1, 3})).to_string() == "1/2*f1f2 - f1f3");
  CHECK(f.scalar(q(0)).to_string() == "0");
}

TEST_CASE("invalid algebras are rejected") {
  CHECK_THROWS_AS(CliffordAlgebra::from_gram(MatrixF::from_ints({{1, 1}, {1, 1}})), DegenerateForm);
  CHECK_THROWS_AS(CliffordAlgebra::diagonal(norms_of(std::vector<long>(21, 1))), DomainError);
  auto alg = CliffordAlgebra::diagonal(norms_of({1, 1}));
  CHECK_THROWS_AS(alg.generator(3), DomainError);
  CHECK_THROWS_AS(trace(alg.generator(1)), DomainError);
}

TEST_CASE("products agree with the tensor-product matrix representation") {
  for (int trial = 0; trial < 60; ++trial) {
    int n = static_cast<int>(oracle::uniform(1, 6));
    auto norms = random_norms(n);
    std::vector<mpq_class> qn;
    for (long v : norms) qn.emplace_back(v);
    auto gens = oracle::clifford_generators(qn);
    auto alg = CliffordAlgebra::diagonal(norms_of(norms));
    auto x = random_element(alg, false, 4);
    auto y = random_element(alg, false, 4);
    CHECK(dense_image(gens, x * y) == dense_image(gens, x) * dense_image(gens, y));
  }
}

TEST_CASE("general Gram products agree with an orthogonalized diagonal algebra") {
  for (int trial = 0; trial < 40; ++trial) {
    int n = static_cast<int>(oracle::uniform(2, 6));
    auto alg = random_general_algebra(n);
    const auto& ob = alg.orthogonal_basis();
    std::vector<BigRational> d;
    for (const auto& x : ob.diagonal) d.push_back(x.to_rational());
    auto diag = CliffordAlgebra::diagonal(d);
    MatrixF images = *inverse(ob.p);
    auto x = random_element(alg, false, 4);
    auto y = random_element(alg, false, 4);
    CHECK(map_generators(x * y, diag, images) == map_generators(x, diag, images) * map_generators(y, diag, images));
    CHECK(map_generators(x.involution(), diag, images) == map_generators(x, diag, images).involution());
  }
}

TEST_CASE("involution examples") {
  auto alg = CliffordAlgebra::diagonal(norms_of({1, 1, -1}));
  CHECK(alg.product_of({1, 2}).involution() == -alg.product_of({1, 2}));
  CHECK(alg.product_of({1, 2, 3}).involution() == -alg.product_of({1, 2, 3}));
  CHECK(alg.generator(2).involution() == alg.generator(2));

  auto f = CliffordAlgebra::from_gram(f_gram(-1, -3), "f");
  CHECK(f.product_of({1, 2}).involution() == f.product_of({2, 1}));
  CHECK(f.product_of({1, 2}).involution() == f.scalar(q(2)) - f.product_of({1, 2}));
  auto alpha = -f.product_of({1, 3});
  CHECK(alpha.involution() == -alpha);
}

TEST_CASE("pseudoscalar squares") {
  for (auto [l, m] : std::vector<std::pair<long, long>>{{-1, -1}, {-1, -3}, {2, 5}, {-2, 3}}) {
    auto f = CliffordAlgebra::from_gram(f_gram(l, m), "f");
    CHECK(f.pseudoscalar_square() == q(-16 * l * m));
    auto z = f.pseudoscalar();
    CHECK(z * z == f.scalar(q(-16 * l * m)));
  }
  CHECK(CliffordAlgebra::diagonal(norms_of({1, 1})).pseudoscalar_square() == q(-1));
  CHECK(CliffordAlgebra::diagonal(norms_of({1, 1, -1, -1, -1, -1, -1, -1, -1, -1})).pseudoscalar_square() == q(-1));
  CHECK(CliffordAlgebra::diagonal(norms_of({2, 3, 5})).pseudoscalar_square() == q(-30));
}

TEST_CASE("trace on the even subalgebra") {
  auto alg = CliffordAlgebra::diagonal(norms_of({1, 1, -1, -1, -1, -1}));
  CHECK(trace(alg.one()) == q(32));
  CHECK(trace(alg.product_of({1, 2})).is_zero());
  CHECK(trace(alg.pseudoscalar()).is_zero());

  auto f = CliffordAlgebra::from_gram(f_gram(-1, -3), "f");
  CHECK(trace(f.one()) == q(32));
  CHECK(trace(f.product_of({1, 2})) == q(32));
  CHECK(trace(f.product_of({1, 3})).is_zero());
  // Against the matrix trace of right multiplication.
  for (Blade b : f.even_blades()) {
    if (grade(b) > 2) continue;
    CHECK(trace(f.blade(b)) == mult_operator(f.blade(b), Side::right, f.even_blades()).trace());
  }
}

TEST_CASE("centers") {
  auto c6 = center_basis(CliffordAlgebra::diagonal(norms_of({1, 1, -1, -1, -1, -1})), true);
  REQUIRE(c6.size() == 2);
  auto alg6 = c6[0].algebra();
  std::vector<Vec> got = element_coordinates(c6, alg6.all_blades());
  std::vector<Vec> want = element_coordinates({alg6.one(), alg6.pseudoscalar()}, alg6.all_blades());
  CHECK(span_equal(got, want));

  auto alg2 = CliffordAlgebra::diagonal(norms_of({2, 3}));
  CHECK(center_basis(alg2, true).size() == 2);

  auto alg4 = CliffordAlgebra::diagonal(norms_of({1, -1, 2, 3}));
  auto c4 = center_basis(alg4, true);
  CHECK(span_equal(element_coordinates(c4, alg4.all_blades()),
                   element_coordinates({alg4.one(), alg4.product_of({1, 2, 3, 4})}, alg4.all_blades())));
  CHECK(center_basis(alg4, false).size() == 1);
  CHECK(center_basis(CliffordAlgebra::diagonal(norms_of({1, 2, 3})), false).size() == 2);

  auto f = CliffordAlgebra::from_gram(f_gram(-1, -3), "f");
  auto cf = center_basis(f, true);
  CHECK(span_equal(element_coordinates(cf, f.all_blades()), element_coordinates({f.one(), f.pseudoscalar()}, f.all_blades())));
}

TEST_CASE("idempotent split of the hyperbolic f-basis") {
  auto f = CliffordAlgebra::from_gram(f_gram(-1, -3), "f");
  auto s = idempotent_split(f);
  CHECK(s.e == f.product_of({1, 2}) * q(1, 2));
  CHECK(s.idempotents[0] == f.product_of({1, 2, 3, 4}) * q(1, 4));
  CHECK(s.image_dims == std::vector<std::size_t>{8, 8, 8, 8});
  CHECK(rank(mult_operator(s.idempotents[0], Side::right, f.even_blades())) == 8);
  CHECK_THROWS_AS(idempotent_split(CliffordAlgebra::diagonal(norms_of({1, 1, 1, 1}))), DomainError);
}

TEST_CASE("primitive idempotents by blade search") {
  auto a6 = CliffordAlgebra::diagonal(norms_of({1, 1, -1, -1, -1, -1}));
  auto p6 = find_idempotent(a6, 2);
  CHECK(p6.factors == std::vector<Blade>{0b101, 0b1010});
  CHECK(p6.image_dim == 8);

  auto a10 = CliffordAlgebra::diagonal(norms_of({1, 1, -1, -1, -1, -1, -1, -1, -1, -1}));
  auto p10 = find_idempotent(a10, 4);
  CHECK(p10.factors == std::vector<Blade>{0b101, 0b1010, 0b11110000, 0b1100110000});
  CHECK(p10.image_dim == 32);
  CHECK(p10.beta * p10.beta == p10.beta);
}

TEST_CASE("multiplication operators") {
  auto f = CliffordAlgebra::from_gram(f_gram(-1, -3), "f");
  auto ev = f.even_blades();
  CHECK(mult_operator(f.one(), Side::left, ev) == MatrixF::identity(ev.size()));
  auto z = f.pseudoscalar();
  MatrixF lz = mult_operator(z, Side::left, ev);
  CHECK(lz * lz == MatrixF::identity(ev.size()) * q(-48));
  CHECK(lz == mult_operator(z, Side::right, ev));
  std::vector<CliffordElement> basis{f.one(), z};
  CHECK(mult_operator(z, Side::left, basis) == MatrixF::from_ints({{0, -48}, {1, 0}}));
  CHECK_THROWS_AS(mult_operator(f.generator(1), Side::left, ev), DomainError);
}

TEST_CASE("coordinates round trip") {
  auto alg = CliffordAlgebra::diagonal(norms_of({1, -1, 2, 3}));
  for (int trial = 0; trial < 20; ++trial) {
    auto x = random_element(alg, true, 5, true);
    CHECK(element_from(alg, alg.even_blades(), x.coordinates(alg.even_blades())) == x);
  }
  CHECK_THROWS_AS(alg.generator(1).coordinates(alg.even_blades()), DomainError);
}

TEST_CASE("property: associativity") {
  for (int trial = 0; trial < 500; ++trial) {
    int n = static_cast<int>(oracle::uniform(1, 8));
    auto alg = random_algebra(n);
    auto x = random_element(alg, false, 3, true);
    auto y = random_element(alg, false, 3);
    auto z = random_element(alg, false, 3, true);
    REQUIRE((x * y) * z == x * (y * z));
  }
}

TEST_CASE("property: involution is an anti-automorphism of order two") {
  for (int trial = 0; trial < 200; ++trial) {
    int n = static_cast<int>(oracle::uniform(1, 8));
    auto alg = random_algebra(n);
    auto x = random_element(alg, false, 3, true);
    auto y = random_element(alg, false, 3);
    REQUIRE((x * y).involution() == y.involution() * x.involution());
    REQUIRE(x.involution().involution() == x);
    REQUIRE((x + y).involution() == x.involution() + y.involution());
  }
}

TEST_CASE("property: trace is symmetric") {
  for (int trial = 0; trial < 200; ++trial) {
    int n = static_cast<int>(oracle::uniform(2, 8));
    auto alg = random_algebra(n);
    auto x = random_element(alg, true, 3, true);
    auto y = random_element(alg, true, 3);
    REQUIRE(trace(x * y) == trace(y * x));
  }
}

TEST_CASE("property: pseudoscalar centrality") {
  for (int trial = 0; trial < 40; ++trial) {
    int n = 2 * static_cast<int>(oracle::uniform(1, 4));
    auto alg = random_algebra(n);
    auto z = alg.pseudoscalar();
    auto x = random_element(alg, true, 4);
    REQUIRE(z * x == x * z);
    auto v = random_element(alg, false, 1).grade_part(1);
    REQUIRE(z * v == -(v * z));
  }
}
