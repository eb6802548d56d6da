#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "weilks/errors.hpp"
#include "weilks/kugasatake.hpp"

using namespace weilks;

namespace {

TowerScalar q(long n, long d = 1) { return TowerScalar(BigRational(mpz_class(n), mpz_class(d))); }

std::vector<BigRational> coeffs(const std::vector<long>& c) {
  std::vector<BigRational> out;
  for (long x : c) out.emplace_back(x);
  return out;
}

std::vector<BigRational> split_signature(std::size_t n) {
  std::vector<BigRational> c{BigRational(1), BigRational(1)};
  while (c.size() < n) c.emplace_back(-1);
  return c;
}

// The fourfold in a 64 x 64 matrix representation built from the diagonal
// basis e_1..e_6 with norms (2, -2, 2, -2, l, m), f_1 = (e_1 + e_2)/2,
// f_2 = (e_1 - e_2)/2, f_3 = (e_3 + e_4)/2, f_4 = (e_3 - e_4)/2.
struct DenseFourfold {
  long l, m;
  std::vector<oracle::DenseMatrix> e, f;

  // sum c * f_{i1} ... f_{ik}
  using Word = std::pair<mpq_class, std::vector<int>>;
  using Elem = std::vector<Word>;

  DenseFourfold(long l_, long m_) : l(l_), m(m_) {
    e = oracle::clifford_generators({2, -2, 2, -2, l, m});
    mpq_class h(1, 2);
    f = {(e[0] + e[1]).scaled(h), (e[0] + e[1].scaled(-1)).scaled(h), (e[2] + e[3]).scaled(h),
         (e[2] + e[3].scaled(-1)).scaled(h), e[4], e[5]};
  }
  oracle::DenseMatrix dense(const Elem& x) const {
    oracle::DenseMatrix r(64);
    for (const auto& [c, w] : x) {
      oracle::DenseMatrix p = oracle::DenseMatrix::identity(64);
      for (int i : w) p = p * f[static_cast<std::size_t>(i - 1)];
      r = r + p.scaled(c);
    }
    return r;
  }
  static Elem reversed(Elem x) {
    for (auto& [c, w] : x) std::reverse(w.begin(), w.end());
    return x;
  }
  std::vector<Elem> eps_delta_basis() const {
    mpq_class h(1, 2);
    return {{{1, {2, 4}}},       {{h, {1, 2, 3, 4}}},       {{1, {2, 3, 4, 5}}}, {{1, {1, 2, 4, 5}}},
            {{1, {2, 4, 5, 6}}}, {{h, {1, 2, 3, 4, 5, 6}}}, {{1, {2, 3, 4, 6}}}, {{1, {1, 2, 4, 6}}}};
  }
  oracle::DenseMatrix j() const { return (e[0] * e[2]).scaled(mpq_class(1, 2)); }
  oracle::DenseMatrix z() const { return e[0] * e[1] * e[2] * e[3] * e[4] * e[5]; }
  // Tr of right multiplication on C^+ is half the trace in this representation.
  mpq_class pairing(const Elem& alpha, const Elem& x, const Elem& y) const {
    oracle::DenseMatrix p = dense(alpha) * dense(reversed(x)) * dense(y);
    mpq_class t = 0;
    for (std::size_t i = 0; i < 64; ++i) t += p(i, i);
    return t / 2;
  }
};

// Images under J and z, read off the tables: index (0..7) and coefficient.
struct TableEntry {
  std::size_t to;
  long coeff;
};

std::vector<TableEntry> j_table() {
  return {{1, -1}, {0, 1}, {3, -1}, {2, 1}, {5, -1}, {4, 1}, {7, -1}, {6, 1}};
}

std::vector<TableEntry> z_table(long l, long m) {
  return {{4, 4}, {5, 4}, {6, 4 * l}, {7, 4 * l}, {0, -4 * l * m}, {1, -4 * l * m}, {2, -4 * m}, {3, -4 * m}};
}

MatrixF table_matrix(const std::vector<TableEntry>& t) {
  MatrixF out(8, 8);
  for (std::size_t k = 0; k < 8; ++k) out(t[k].to, k) = q(t[k].coeff);
  return out;
}

MatrixF m_block() { return MatrixF::from_ints({{0, -64}, {64, 0}}); }

const std::vector<std::pair<long, long>> kPairs{{-1, -1}, {-1, -3}, {-2, -5}, {-3, -7}};

}  // namespace

TEST_CASE("fourfold tables hold in a matrix representation") {
  for (auto [l, m] : std::vector<std::pair<long, long>>{{-1, -1}, {-1, -3}, {-2, -5}}) {
    DenseFourfold df(l, m);
    auto id = oracle::DenseMatrix::identity(64);
    CHECK(df.j() * df.j() == id.scaled(-1));
    CHECK(df.z() * df.z() == id.scaled(-16 * l * m));
    // Gram of the f-basis: Hyp + Hyp + [l] + [m]
    CHECK(df.f[0] * df.f[1] + df.f[1] * df.f[0] == id.scaled(2));
    CHECK(df.f[0] * df.f[0] == oracle::DenseMatrix(64));
    auto beta = df.dense({{mpq_class(1, 4), {1, 2, 3, 4}}});
    CHECK(beta * beta == beta);
    auto basis = df.eps_delta_basis();
    auto jt = j_table();
    auto zt = z_table(l, m);
    for (std::size_t k = 0; k < 8; ++k) {
      auto x = df.dense(basis[k]);
      CHECK(x * beta == x);
      CHECK(df.j() * x == df.dense(basis[jt[k].to]).scaled(jt[k].coeff));
      CHECK(df.z() * x == df.dense(basis[zt[k].to]).scaled(zt[k].coeff));
    }
    // E = blockdiag(M, -2l M, lm M, -2m M) with alpha = -f1 f3
    DenseFourfold::Elem alpha{{-1, {1, 3}}};
    std::vector<long> scale{1, -2 * l, l * m, -2 * m};
    for (std::size_t a = 0; a < 8; ++a)
      for (std::size_t b = 0; b < 8; ++b) {
        mpq_class expected = 0;
        if (a / 2 == b / 2 && a != b) expected = (a < b ? -64 : 64) * scale[a / 2];
        CHECK(df.pairing(alpha, basis[a], basis[b]) == expected);
      }
  }
}

TEST_CASE("build_ks on the fourfold") {
  KSVariety ks = build_ks(KSInput::fourfold(BigRational(-1), BigRational(-1)));
  const CliffordAlgebra& alg = ks.algebra;
  CHECK(ks.j * ks.j == alg.scalar(q(-1)));
  CHECK(ks.alpha == -alg.product_of({1, 3}));
  CHECK(ks.alpha.involution() == -ks.alpha);
  CHECK(ks.alpha.to_string() == "-f1f3");
  CHECK(ks.complex_dim() == 16);
  CHECK(ks.lattice.size() == 32);
  CHECK(ks.z_square == q(-16));
  CHECK(ks.d == BigRational(1));
  CHECK(ks.scale == BigRational(4));
  CHECK(ks.e.transpose() == -ks.e);
  CHECK(ks.positivity.positive_definite);
  REQUIRE(ks.positivity_basis.size() == 8);
  for (const auto& v : ks.positivity_basis) CHECK(real_sign(ks_pairing(ks.alpha, v, ks.j * v)) == Sign::positive);
  // alpha iota(f1 f3) = f1 f3 f3 f1 = 0: f1 f3 lies in the radical of E on C^+
  CliffordElement f13 = alg.product_of({1, 3});
  CHECK((ks.alpha * f13.involution()).is_zero());
  CHECK(ks.e_rank < 32);

  KSVariety ks3 = build_ks(KSInput::fourfold(BigRational(-1), BigRational(-3)));
  CHECK(ks3.z_square == q(-48));
  CHECK(ks3.d == BigRational(3));
  CHECK(ks3.scale == BigRational(4));
}

TEST_CASE("build_ks on diagonal input") {
  KSVariety ks = build_ks(KSInput::diagonal(split_signature(6)));
  CHECK(ks.j == ks.algebra.product_of({1, 2}));
  CHECK(ks.alpha.to_string() == "-g1g2");
  CHECK(ks.alpha_candidates_tried == 2);
  CHECK(ks.positivity.positive_definite);
  CHECK(ks.positivity_basis.size() == 32);
  for (std::size_t i = 0; i < 32; ++i) CHECK(real_sign(ks.positivity.pivots[i]) == Sign::positive);
  CHECK(ks.e_rank == 32);

  // d1 d2 = 16: J = g1 g2 / 4; z^2 = -(2 * 8 * 3 * 5) = -16 * 15
  KSVariety ks2 = build_ks(KSInput::diagonal(coeffs({2, 8, -1, -3, -5, -1})));
  CHECK(ks2.j == ks2.algebra.product_of({1, 2}) * q(1, 4));
  CHECK(ks2.z_square == q(-240));
  CHECK(ks2.d == BigRational(15));
  CHECK(ks2.scale == BigRational(4));

  // non-square d1 d2 puts sqrt(6) into J
  KSVariety ks3 = build_ks(KSInput::diagonal(coeffs({2, 3, -1, -1})));
  CHECK(ks3.j * ks3.j == ks3.algebra.scalar(q(-1)));
  CHECK_FALSE(ks3.j.terms().begin()->second.is_rational());

  CHECK_THROWS_AS(build_ks(KSInput::diagonal(coeffs({1, -1, -1, -1}))), DomainError);
  CHECK_THROWS_AS(build_ks(KSInput::diagonal(coeffs({1, 1, 1, -1}))), DomainError);
  CHECK_THROWS_AS(build_ks(KSInput::diagonal(coeffs({1, 1, -1}))), DomainError);
  CHECK_THROWS_AS(build_ks(KSInput::fourfold(BigRational(1), BigRational(-1))), DomainError);
}

TEST_CASE("beta split reproduces the eps/delta basis") {
  for (auto [l, m] : kPairs) {
    KSVariety ks = build_ks(KSInput::fourfold(BigRational(l), BigRational(m)));
    SubfoldModel sub = beta_split(ks);
    CHECK(sub.kernel_dim == 24);
    CHECK(sub.image_dim == 8);
    CHECK(sub.basis_in_image);
    CHECK(sub.basis_spans_image);
    CHECK(sub.basis[1].to_string() == "1/2*f1f2f3f4");
    CHECK(sub.basis[0].to_string() == "f2f4");
    CHECK(sub.basis[7].to_string() == "f1f2f4f6");
    CHECK(sub.idempotent_dims == std::vector<std::size_t>{8, 8, 8, 8});
    CHECK(sub.d == BigRational(l * m));
  }
}

TEST_CASE("J and z action tables and the holomorphic z-matrix") {
  for (auto [l, m] : kPairs) {
    CAPTURE(l);
    CAPTURE(m);
    KSVariety ks = build_ks(KSInput::fourfold(BigRational(l), BigRational(m)));
    SubfoldModel sub = beta_split(ks);
    CHECK(sub.j == table_matrix(j_table()));
    CHECK(sub.z == table_matrix(z_table(l, m)));
    ActionTables at = action_tables(ks, sub);
    CHECK(at.j_matches);
    CHECK(at.z_matches);
    CHECK(at.holomorphic_is_i_eigenspace);
    MatrixF expected = MatrixF::from_ints({{0, -4 * l * m, 0, 0}, {4, 0, 0, 0}, {0, 0, 0, -4 * m}, {0, 0, 4 * l, 0}});
    CHECK(at.z_holomorphic == expected);
    CHECK(at.z_holomorphic_matches);
    CHECK(at.multiplicities == std::make_pair(std::size_t{2}, std::size_t{2}));
  }
}

TEST_CASE("subfold polarization and Hermitian normal form") {
  for (auto [l, m] : kPairs) {
    CAPTURE(l);
    CAPTURE(m);
    KSVariety ks = build_ks(KSInput::fourfold(BigRational(l), BigRational(m)));
    SubfoldModel sub = beta_split(ks);
    MatrixF mb = m_block();
    CHECK(sub.e == block_diagonal({mb, mb * q(-2 * l), mb * q(l * m), mb * q(-2 * m)}));
    SubfoldPolarization sp = subfold_polarization(ks, sub);
    CHECK(sp.m_block == mb);
    CHECK(sp.e_matches);
    ImagQuadratic k{BigRational(l * m)};
    MatrixF phim = mb * k.phi();
    CHECK(sp.h == block_diagonal({phim, phim * q(-2 * l)}));
    CHECK(sp.h_matches);
    CHECK(sp.normal_form_ok);
    CHECK(sp.data.h().gram() == MatrixF::diagonal({q(1), q(1), q(-1), q(-1)}));
    CHECK(sp.discriminant.trivial);
    CHECK(sp.discriminant.to_string() == "1");
    CHECK(sp.eigentype == std::make_pair(std::size_t{2}, std::size_t{2}));
    // the normalized frame still carries E and J compatibly
    const MatrixF& jn = *sp.data.complex_structure();
    CHECK(jn * jn == -MatrixF::identity(8));
    CHECK(certify_positive_definite(sp.data.e().gram() * jn).positive_definite);
  }
}

TEST_CASE("Weil-Hodge suite on the fourfold instance") {
  for (auto [l, m] : std::vector<std::pair<long, long>>{{-1, -1}, {-1, -3}}) {
    KSVariety ks = build_ks(KSInput::fourfold(BigRational(l), BigRational(m)));
    SubfoldModel sub = beta_split(ks);
    WeilHodgeData data = subfold_polarization(ks, sub).data;
    WedgeKSpace w = build_wedge(4, data.d());
    TOperator t = t_operator(data, w);
    TChecks tc = check_t(data, w, t);
    CHECK(tc.h_tilde_diagonal);
    CHECK(tc.t_a1);
    CHECK(tc.t_squared);
    QuaternionRelations qr = quaternion_relations(data, w, t);
    CHECK(qr.phi_squared);
    CHECK(qr.anticommute);
    CHECK(qr.t_commutes_j2);
    TSplit s = split_t(data, w, t);
    CHECK(s.witness_diagonal);
    CHECK(s.equivalent_to_hyp_form);
    CHECK(s.wedge_e_identity);
    CHECK(s_hodge_type(data, w) == HodgeType{2, 8, 2});
    CHECK(t_hodge_type(data, w, s) == HodgeType{1, 4, 1});
  }
}

TEST_CASE("round trip: the T-form is twice the input form") {
  for (auto [l, m] : std::vector<std::pair<long, long>>{{-1, -3}, {-1, -1}}) {
    KSInput in = KSInput::fourfold(BigRational(l), BigRational(m));
    KSVariety ks = build_ks(in);
    SubfoldModel sub = beta_split(ks);
    RoundTrip rt = roundtrip_form_identity(in, subfold_polarization(ks, sub).data);
    CHECK(rt.equivalent);
    CHECK(rationally_equivalent(BilinearSpace(rt.t_form, FormKind::symmetric),
                                BilinearSpace(rt.doubled_input, FormKind::symmetric)));
    // and the T-form is Hyp + Hyp + [-2] + [-2d]
    long d = l * m;
    MatrixF hyp = hyperbolic_plane();
    MatrixF expected = block_diagonal({hyp, hyp, MatrixF::diagonal({q(-2)}), MatrixF::diagonal({q(-2 * d)})});
    CHECK(rationally_equivalent(BilinearSpace(rt.t_form, FormKind::symmetric),
                                BilinearSpace(expected, FormKind::symmetric)));
  }
  // a different input is not matched: diag form with another discriminant
  KSInput in = KSInput::fourfold(BigRational(-1), BigRational(-3));
  KSVariety ks = build_ks(in);
  SubfoldModel sub = beta_split(ks);
  RoundTrip rt = roundtrip_form_identity(in, subfold_polarization(ks, sub).data);
  MatrixF other = MatrixF::diagonal({q(2), q(-2), q(2), q(-2), q(-2), q(-2)});
  CHECK_FALSE(rationally_equivalent(BilinearSpace(rt.t_form, FormKind::symmetric),
                                    BilinearSpace(other, FormKind::symmetric)));
}

TEST_CASE("matrix algebra structure of the even Clifford algebra") {
  for (auto [l, m] : std::vector<std::pair<long, long>>{{-1, -1}, {-1, -3}}) {
    KSVariety ks = build_ks(KSInput::fourfold(BigRational(l), BigRational(m)));
    SubfoldModel sub = beta_split(ks);
    MatrixAlgebraCheck mc = verify_matrix_algebra(ks, sub);
    CHECK(mc.center.size() == 2);
    CHECK(mc.center_is_one_z);
    CHECK(mc.z_square == q(-16 * l * m));
    CHECK(mc.z_square_ok);
    CHECK(mc.regular_rank == 32);
    CHECK(mc.injective);
    CHECK(mc.k_linear);
    CHECK(mc.commutant_dim == 32);
    CHECK(mc.dimension_match);
    CHECK(mc.summand_dims == std::vector<std::size_t>{8, 8, 8, 8});
    CHECK(mc.summands_direct);
    CHECK(mc.summands_isomorphic);
  }
}

TEST_CASE("spin conjugates") {
  SUBCASE("trivial and rejected examples") {
    KSVariety ks = build_ks(KSInput::diagonal(split_signature(6)));
    Vec g1(6), g2(6), v(6);
    g1[0] = q(1);
    g2[1] = q(1);
    SpinConjugate s = spin_conjugate(ks, g1, g2);
    REQUIRE(s.accepted);
    CHECK((*s.j_prime == ks.j || *s.j_prime == -ks.j));
    v[0] = q(1);
    v[1] = q(1);
    SpinConjugate r = spin_conjugate(ks, v, g1);
    CHECK_FALSE(r.accepted);
    CHECK(r.reason.find("not a rational square") != std::string::npos);
    Vec g3(6);
    g3[2] = q(1);
    CHECK_FALSE(spin_conjugate(ks, g1, g3).accepted);  // Q(g1) Q(g3) = -1
  }
  SUBCASE("sampled conjugates keep the Weil eigentype") {
    for (auto [l, m] : std::vector<std::pair<long, long>>{{-1, -1}, {-1, -3}}) {
      KSVariety ks = build_ks(KSInput::fourfold(BigRational(l), BigRational(m)));
      SubfoldModel sub = beta_split(ks);
      std::vector<SpinConjugate> cs = sample_spin_conjugates(ks, 3, 20240601, &sub);
      REQUIRE(cs.size() == 3);
      for (const auto& c : cs) {
        CHECK(c.norm_one);
        CHECK(c.j_prime_squared);
        CHECK(c.pairing_identity);
        CHECK(c.positive);
        REQUIRE(c.eigentype.has_value());
        CHECK(*c.eigentype == std::make_pair(std::size_t{2}, std::size_t{2}));
        CHECK(*c.j_prime != ks.j);
      }
    }
  }
  SUBCASE("dense eigentype on diagonal n = 6") {
    KSVariety ks = build_ks(KSInput::diagonal(split_signature(6)));
    std::vector<SpinConjugate> cs = sample_spin_conjugates(ks, 3, 7, nullptr);
    REQUIRE(cs.size() == 3);
    for (const auto& c : cs) {
      REQUIRE(c.eigentype.has_value());
      CHECK(*c.eigentype == std::make_pair(std::size_t{8}, std::size_t{8}));
    }
  }
}

TEST_CASE("n = 2 mod 4: Weil type and discriminant one") {
  SUBCASE("n = 6") {
    HighdimCheck h = highdim_weil_check(KSInput::diagonal(split_signature(6)));
    CHECK(h.t == 8);
    CHECK(h.z_square == q(-1));
    CHECK(h.z_square_ok);
    CHECK(h.basis_size == 32);
    CHECK(h.basis_independent);
    CHECK(h.seeds.front().to_string() == "1");
    CHECK(h.j_blocks_ok);
    CHECK(h.holomorphic_ok);
    CHECK(h.z_blocks_ok);
    CHECK(h.multiplicities == std::make_pair(std::size_t{8}, std::size_t{8}));
    REQUIRE(h.dense_multiplicities.has_value());
    CHECK(*h.dense_multiplicities == h.multiplicities);
    CHECK(h.summand_dim == 8);
    CHECK(h.symplectic_ok);
    CHECK(h.normal_form_ok);
    CHECK(h.discriminant.trivial);
    CHECK(h.summand_eigentype == std::make_pair(std::size_t{2}, std::size_t{2}));
    CHECK(h.alpha_term_independent);
    CHECK(h.z_pairing_vanishes);
  }
  SUBCASE("n = 6 with a square factor in z^2") {
    // z^2 = -48 = -3 * 4^2; g1 g3 and g2 g4 square to 1 and 4
    HighdimCheck h = highdim_weil_check(KSInput::diagonal(coeffs({1, 4, -1, -1, -1, -12})));
    CHECK(h.d == BigRational(3));
    CHECK(h.scale == BigRational(4));
    CHECK(h.z_square_ok);
    CHECK(h.z_blocks_ok);
    CHECK(h.multiplicities == std::make_pair(std::size_t{8}, std::size_t{8}));
    CHECK(*h.dense_multiplicities == h.multiplicities);
    CHECK(h.normal_form_ok);
    CHECK(h.discriminant.trivial);
  }
  SUBCASE("n = 10") {
    HighdimCheck h = highdim_weil_check(KSInput::diagonal(split_signature(10)));
    CHECK(h.t == 128);
    CHECK(h.z_square == q(-1));
    CHECK(h.d == BigRational(1));
    CHECK(h.basis_size == 512);
    CHECK(h.basis_independent);
    CHECK(h.z_blocks_ok);
    CHECK(h.multiplicities == std::make_pair(std::size_t{128}, std::size_t{128}));
    CHECK(h.summand_dim == 32);
    CHECK(h.symplectic_ok);
    CHECK(h.normal_form_ok);
    CHECK(h.normal_form.size() == 16);
    CHECK(h.discriminant.trivial);
    CHECK(h.summand_eigentype == std::make_pair(std::size_t{8}, std::size_t{8}));
    CHECK(h.alpha_term_independent);
    CHECK(h.z_pairing_vanishes);
  }
  SUBCASE("rejected dimensions") {
    CHECK_THROWS_AS(highdim_weil_check(KSInput::diagonal(split_signature(8))), DomainError);
    CHECK_THROWS_AS(highdim_weil_check(KSInput::diagonal(split_signature(4))), DomainError);
    CHECK_THROWS_AS(highdim_weil_check(KSInput::diagonal(split_signature(14))), DomainError);
    CHECK_THROWS_AS(highdim_weil_check(KSInput::fourfold(BigRational(-1), BigRational(-1))), DomainError);
  }
}

TEST_CASE("alpha terms containing g_n do not change E on g_n-free blades (fuzzed)") {
  KSVariety ks = build_ks(KSInput::diagonal(coeffs({1, 1, -2, -1, -3, -1})));
  const CliffordAlgebra& alg = ks.algebra;
  const Blade gn = Blade{1} << 5;
  std::vector<Blade> free;
  for (Blade b : ks.lattice)
    if (!(b & gn)) free.push_back(b);
  for (int trial = 0; trial < 50; ++trial) {
    CliffordElement pert = ks.alpha;
    for (int k = 0; k < 3; ++k) {
      // an even blade containing g_6
      Blade b = static_cast<Blade>(oracle::uniform(0, 31));
      if (grade(b) % 2 == 0) b ^= 1;
      pert = pert + alg.blade(b | gn, q(oracle::uniform(-5, 5), oracle::uniform(1, 4)));
    }
    Blade x = free[static_cast<std::size_t>(oracle::uniform(0, static_cast<long>(free.size()) - 1))];
    Blade y = free[static_cast<std::size_t>(oracle::uniform(0, static_cast<long>(free.size()) - 1))];
    CHECK(ks_pairing(pert, alg.blade(x), alg.blade(y)) == ks_pairing(ks.alpha, alg.blade(x), alg.blade(y)));
    CHECK(ks_pairing(ks.alpha, ks.z * alg.blade(x), alg.blade(y)).is_zero());
  }
}

TEST_CASE("E(v, Jv) > 0 on random vectors of the fourfold (fuzzed)") {
  KSVariety ks = build_ks(KSInput::fourfold(BigRational(-1), BigRational(-3)));
  const CliffordAlgebra& alg = ks.algebra;
  for (int trial = 0; trial < 100; ++trial) {
    CliffordElement v(alg);
    for (const auto& b : ks.positivity_basis) v = v + b * q(oracle::uniform(-9, 9), oracle::uniform(1, 5));
    if (v.is_zero()) continue;
    CHECK(real_sign(ks_pairing(ks.alpha, v, ks.j * v)) == Sign::positive);
    // E is J-invariant
    CliffordElement w(alg);
    for (const auto& b : ks.positivity_basis) w = w + b * q(oracle::uniform(-3, 3));
    CHECK(ks_pairing(ks.alpha, ks.j * v, ks.j * w) == ks_pairing(ks.alpha, v, w));
  }
}
