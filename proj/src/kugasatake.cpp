#include "weilks/kugasatake.hpp"

#include <map>
#include <random>

#include "weilks/errors.hpp"

namespace weilks {

namespace {

TowerScalar imag_unit() { return TowerScalar::sqrt(BigRational(-1)); }

Vec unit(std::size_t n, std::size_t i) {
  Vec v(n);
  v[i] = TowerScalar(1);
  return v;
}

// Incremental echelon form of Clifford elements; the pivot of a row is its
// lowest blade.
class SparseSpan {
 public:
  explicit SparseSpan(CliffordAlgebra alg) : alg_(std::move(alg)) {}

  CliffordElement reduce(const CliffordElement& x) const {
    CliffordElement::Terms t = x.terms();
    auto it = t.begin();
    while (it != t.end()) {
      auto row = rows_.find(it->first);
      if (row == rows_.end()) {
        ++it;
        continue;
      }
      Blade b = it->first;
      TowerScalar c = it->second;
      for (const auto& [rb, rc] : row->second) {
        TowerScalar nv = t[rb] - c * rc;
        if (nv.is_zero()) t.erase(rb);
        else t[rb] = nv;
      }
      it = t.upper_bound(b);
    }
    return CliffordElement(alg_, t);
  }

  bool contains(const CliffordElement& x) const { return reduce(x).is_zero(); }

  // False if x is already in the span.
  bool add(const CliffordElement& x) {
    CliffordElement r = reduce(x);
    if (r.is_zero()) return false;
    auto lead = r.terms().begin();
    Blade p = lead->first;
    TowerScalar inv = lead->second.inverse();
    CliffordElement::Terms row;
    for (const auto& [b, c] : r.terms()) row[b] = c * inv;
    rows_.emplace(p, std::move(row));
    return true;
  }

  std::size_t size() const { return rows_.size(); }

 private:
  CliffordAlgebra alg_;
  std::map<Blade, CliffordElement::Terms> rows_;
};

// Tr(x y) from the memoized blade products and traces.
TowerScalar trace_of_product(const CliffordElement& x, const CliffordElement& y) {
  const CliffordAlgebra& alg = x.algebra();
  const bool diag = alg.is_diagonal();
  TowerScalar out;
  for (const auto& [bx, cx] : x.terms())
    for (const auto& [by, cy] : y.terms()) {
      if (diag && bx != by) continue;
      BigRational s;
      for (const auto& [b, r] : alg.blade_product(bx, by)) {
        const BigRational& tr = alg.blade_trace(b);
        if (!tr.is_zero()) s = s + r * tr;
      }
      if (!s.is_zero()) out = out + cx * cy * TowerScalar(s);
    }
  return out;
}

// E(x_i, y_j) = Tr(alpha iota(x_i) y_j).
MatrixF pairing_matrix(const CliffordElement& alpha, const std::vector<CliffordElement>& xs,
                       const std::vector<CliffordElement>& ys) {
  MatrixF out(xs.size(), ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    CliffordElement w = alpha * xs[i].involution();
    for (std::size_t j = 0; j < ys.size(); ++j) out(i, j) = trace_of_product(w, ys[j]);
  }
  return out;
}

std::vector<CliffordElement> blade_elements(const CliffordAlgebra& alg, const std::vector<Blade>& blades) {
  std::vector<CliffordElement> out;
  out.reserve(blades.size());
  for (Blade b : blades) out.push_back(alg.blade(b));
  return out;
}

std::vector<CliffordElement> left_multiply(const CliffordElement& x, const std::vector<CliffordElement>& ys) {
  std::vector<CliffordElement> out;
  out.reserve(ys.size());
  for (const auto& y : ys) out.push_back(x * y);
  return out;
}

bool is_alternating(const MatrixF& e) { return e.transpose() == -e; }

bool is_symmetric(const MatrixF& g) { return g.transpose() == g; }

// Multiplicities of +sqrt(-d), -sqrt(-d) for z on the i-eigenspace of j.
std::pair<std::size_t, std::size_t> eigen_multiplicities(const MatrixF& j, const MatrixF& z, const BigRational& d) {
  std::vector<Vec> hol = eigenspace(j, imag_unit());
  if (hol.size() * 2 != j.rows()) throw VerificationFailure("i-eigenspace of J does not have half dimension");
  MatrixF zr = restrict_to(z, hol);
  TowerScalar root = TowerScalar::sqrt(-d);
  return {eigenspace(zr, root).size(), eigenspace(zr, -root).size()};
}

}  // namespace

// ---------------------------------------------------------------------------
// Input

KSInput KSInput::diagonal(std::vector<BigRational> coeffs) {
  KSInput in;
  in.kind = Kind::diagonal;
  in.coeffs = std::move(coeffs);
  return in;
}

KSInput KSInput::fourfold(const BigRational& l, const BigRational& m) {
  KSInput in;
  in.kind = Kind::hyperbolic;
  in.l = l;
  in.m = m;
  return in;
}

MatrixF KSInput::gram() const {
  if (kind == Kind::diagonal) {
    Vec d;
    for (const auto& c : coeffs) d.emplace_back(c);
    return MatrixF::diagonal(d);
  }
  MatrixF g(6, 6);
  g(0, 1) = g(1, 0) = g(2, 3) = g(3, 2) = TowerScalar(1);
  g(4, 4) = TowerScalar(l);
  g(5, 5) = TowerScalar(m);
  return g;
}

MatrixF KSInput::orthogonal_basis() const {
  if (kind == Kind::diagonal) return MatrixF::identity(n());
  return MatrixF::from_ints({{1, 1, 0, 0, 0, 0},
                             {1, -1, 0, 0, 0, 0},
                             {0, 0, 1, 1, 0, 0},
                             {0, 0, 1, -1, 0, 0},
                             {0, 0, 0, 0, 1, 0},
                             {0, 0, 0, 0, 0, 1}});
}

std::string KSInput::to_string() const {
  if (kind == Kind::hyperbolic) return "Hyp+Hyp+[" + l.to_string() + "]+[" + m.to_string() + "]";
  std::string s = "diag(";
  for (std::size_t i = 0; i < coeffs.size(); ++i) s += (i ? ", " : "") + coeffs[i].to_string();
  return s + ")";
}

TowerScalar ks_pairing(const CliffordElement& alpha, const CliffordElement& x, const CliffordElement& y) {
  return trace(alpha * x.involution() * y);
}

// ---------------------------------------------------------------------------
// build_ks

namespace {

void validate(const KSInput& in) {
  if (in.kind == KSInput::Kind::hyperbolic) {
    if (in.l.sign() >= 0 || in.m.sign() >= 0) throw DomainError("fourfold input needs l, m < 0");
    return;
  }
  const std::size_t n = in.coeffs.size();
  if (n < 4 || n % 2) throw DomainError("dimension must be even and at least 4");
  for (std::size_t i = 0; i < n; ++i) {
    int s = in.coeffs[i].sign();
    if (i < 2 ? s <= 0 : s >= 0)
      throw DomainError("signature must be (2, n-2): coefficients c1, c2 > 0 > c3, ..., cn, got " + in.to_string());
  }
}

struct Positivity {
  MatrixF e;
  DefinitenessCertificate cert;
  bool ok = false;
};

Positivity check_alpha(const CliffordElement& alpha, const CliffordElement& j,
                       const std::vector<CliffordElement>& lattice, const std::vector<CliffordElement>& scope) {
  Positivity out;
  // cheap necessary condition first: E(b, J b) > 0 on the basis
  for (const auto& b : scope)
    if (real_sign(ks_pairing(alpha, b, j * b)) != Sign::positive) return out;
  out.e = pairing_matrix(alpha, lattice, lattice);
  MatrixF g = pairing_matrix(alpha, scope, left_multiply(j, scope));
  if (!is_symmetric(g)) return out;
  out.cert = certify_positive_definite(g);
  out.ok = out.cert.positive_definite;
  return out;
}

}  // namespace

KSVariety build_ks(const KSInput& input) {
  validate(input);
  const std::size_t n = input.n();
  CliffordAlgebra alg = CliffordAlgebra::from_gram(input.gram(), input.kind == KSInput::Kind::hyperbolic ? "f" : "g");
  MatrixF ob = input.orthogonal_basis();
  std::vector<CliffordElement> es;
  std::vector<BigRational> norms;
  for (std::size_t k = 0; k < n; ++k) {
    es.push_back(alg.vector(ob.column(k)));
    CliffordElement sq = es.back() * es.back();
    if (!sq.is_scalar()) throw VerificationFailure("orthogonal basis vector does not square to a scalar");
    norms.push_back(sq.scalar_part().to_rational());
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (!(es[a] * es[b] + es[b] * es[a]).is_zero()) throw VerificationFailure("orthogonal basis is not orthogonal");

  // the two positive directions span the J-plane
  std::vector<std::size_t> pos;
  for (std::size_t k = 0; k < n; ++k)
    if (norms[k].sign() > 0) pos.push_back(k);
  if (pos.size() != 2) throw DomainError("signature must be (2, n-2)");
  TowerScalar root = TowerScalar::sqrt(norms[pos[0]] * norms[pos[1]]);
  CliffordElement j = es[pos[0]] * es[pos[1]] * root.inverse();
  if (j * j != alg.scalar(TowerScalar(-1))) throw VerificationFailure("J^2 != -1");

  CliffordElement z = alg.one();
  for (const auto& e : es) z = z * e;
  CliffordElement z2 = z * z;
  if (!z2.is_scalar()) throw VerificationFailure("pseudoscalar square is not scalar");
  BigRational expected = (n * (n - 1) / 2) % 2 ? BigRational(-1) : BigRational(1);
  for (const auto& q : norms) expected = expected * q;
  if (z2.scalar_part() != TowerScalar(expected)) throw VerificationFailure("z^2 differs from the product of norms");

  KSVariety ks{input, alg, alg.even_blades(), j, alg.one(), z, z2.scalar_part(), {}, {}, {}, 0, {}, {}, 0};
  BigRational mz = -expected;
  SquareClass cls(mz);
  ks.d = BigRational(cls.representative());
  ks.scale = *rational_sqrt(mz / ks.d);

  std::vector<CliffordElement> lattice = blade_elements(alg, ks.lattice);
  std::vector<CliffordElement> scope = lattice;
  std::vector<CliffordElement> candidates;
  if (input.kind == KSInput::Kind::hyperbolic) {
    candidates.push_back(-alg.product_of({1, 3}));
    CliffordElement beta = alg.product_of({1, 2, 3, 4}) * TowerScalar(BigRational(1, 4));
    SparseSpan span(alg);
    scope.clear();
    for (const auto& b : lattice)
      if (span.add(b * beta)) scope.push_back(b * beta);
  } else {
    for (std::size_t a = 1; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) {
        CliffordElement c = alg.product_of({static_cast<int>(a), static_cast<int>(b)});
        candidates.push_back(c);
        candidates.push_back(-c);
      }
  }
  for (const auto& alpha : candidates) {
    ++ks.alpha_candidates_tried;
    if (alpha.involution() != -alpha) continue;
    Positivity p = check_alpha(alpha, j, lattice, scope);
    if (!p.ok) continue;
    ks.alpha = alpha;
    ks.e = std::move(p.e);
    ks.e_rank = rank(ks.e);
    ks.positivity_basis = std::move(scope);
    ks.positivity = std::move(p.cert);
    if (!is_alternating(ks.e)) throw VerificationFailure("E is not alternating");
    return ks;
  }
  throw SearchExhausted("no alpha with E(v, Jv) > 0 found among +-g_i g_j, i < j < n");
}

// ---------------------------------------------------------------------------
// Fourfold

SubfoldModel beta_split(const KSVariety& ks) {
  if (ks.input.kind != KSInput::Kind::hyperbolic) throw DomainError("beta split needs the fourfold input");
  const CliffordAlgebra& alg = ks.algebra;
  SubfoldModel out{alg.product_of({1, 2, 3, 4}) * TowerScalar(BigRational(1, 4)), 0, 0, {}, {}, false, false, {},
                   {}, {}, {}, {}, {}};
  if (out.beta * out.beta != out.beta) throw VerificationFailure("beta is not idempotent");
  MatrixF rb = mult_operator(out.beta, Side::right, ks.lattice);
  out.image_dim = rank(rb);
  out.kernel_dim = rb.cols() - out.image_dim;

  TowerScalar half(BigRational(1, 2));
  out.basis = {alg.product_of({2, 4}),          alg.product_of({1, 2, 3, 4}) * half,
               alg.product_of({2, 3, 4, 5}),    alg.product_of({1, 2, 4, 5}),
               alg.product_of({2, 4, 5, 6}),    alg.product_of({1, 2, 3, 4, 5, 6}) * half,
               alg.product_of({2, 3, 4, 6}),    alg.product_of({1, 2, 4, 6})};
  out.labels = {"eps1", "eps2", "eps3", "eps4", "delta1", "delta2", "delta3", "delta4"};
  out.basis_in_image = true;
  for (const auto& x : out.basis) out.basis_in_image = out.basis_in_image && x * out.beta == x;
  std::vector<Vec> coords = element_coordinates(out.basis, ks.lattice);
  out.basis_spans_image = independent(coords) && span_equal(coords, rb.columns());
  out.idempotent_dims = idempotent_split(alg).image_dims;

  out.j = mult_operator(ks.j, Side::left, out.basis);
  out.z = mult_operator(ks.z, Side::left, out.basis);
  out.phi = out.z * TowerScalar(BigRational(1, 4));
  out.e = pairing_matrix(ks.alpha, out.basis, out.basis);
  out.d = ks.input.l * ks.input.m;
  return out;
}

ActionTables action_tables(const KSVariety& ks, const SubfoldModel& sub) {
  const BigRational& l = ks.input.l;
  const BigRational& m = ks.input.m;
  ActionTables out;
  out.j_expected = MatrixF(8, 8);
  out.z_expected = MatrixF(8, 8);
  for (std::size_t o : {0u, 4u}) {
    // J eps1 = -eps2, J eps2 = eps1, J eps3 = -eps4, J eps4 = eps3; same for delta
    out.j_expected(o + 1, o + 0) = TowerScalar(-1);
    out.j_expected(o + 0, o + 1) = TowerScalar(1);
    out.j_expected(o + 3, o + 2) = TowerScalar(-1);
    out.j_expected(o + 2, o + 3) = TowerScalar(1);
  }
  TowerScalar four(4);
  out.z_expected(4, 0) = four;
  out.z_expected(5, 1) = four;
  out.z_expected(6, 2) = four * TowerScalar(l);
  out.z_expected(7, 3) = four * TowerScalar(l);
  out.z_expected(0, 4) = -four * TowerScalar(l * m);
  out.z_expected(1, 5) = -four * TowerScalar(l * m);
  out.z_expected(2, 6) = -four * TowerScalar(m);
  out.z_expected(3, 7) = -four * TowerScalar(m);
  out.j_matches = sub.j == out.j_expected;
  out.z_matches = sub.z == out.z_expected;

  TowerScalar i = imag_unit();
  for (auto [re, im] : std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {4, 5}, {2, 3}, {6, 7}}) {
    Vec u(8);
    u[re] = -i;
    u[im] = TowerScalar(1);
    out.holomorphic.push_back(u);
  }
  bool eigen = true;
  for (const auto& u : out.holomorphic) eigen = eigen && sub.j * u == scale(u, i);
  out.holomorphic_is_i_eigenspace = eigen && span_equal(out.holomorphic, eigenspace(sub.j, i));
  out.z_holomorphic = restrict_to(sub.z, out.holomorphic);
  out.z_holomorphic_expected = MatrixF(4, 4);
  out.z_holomorphic_expected(0, 1) = -four * TowerScalar(l * m);
  out.z_holomorphic_expected(1, 0) = four;
  out.z_holomorphic_expected(2, 3) = -four * TowerScalar(m);
  out.z_holomorphic_expected(3, 2) = four * TowerScalar(l);
  out.z_holomorphic_matches = out.z_holomorphic == out.z_holomorphic_expected;
  TowerScalar root = four * TowerScalar::sqrt(-(l * m));
  out.multiplicities = {eigenspace(out.z_holomorphic, root).size(), eigenspace(out.z_holomorphic, -root).size()};
  return out;
}

WeilHodgeData subfold_weil_data(const SubfoldModel& sub) {
  return WeilHodgeData::from_phi_action(sub.d, sub.phi, sub.e, sub.j);
}

SubfoldPolarization subfold_polarization(const KSVariety& ks, const SubfoldModel& sub) {
  const BigRational& l = ks.input.l;
  const BigRational& m = ks.input.m;
  ImagQuadratic k(sub.d);
  SubfoldPolarization out{MatrixF::from_ints({{0, -64}, {64, 0}}), sub.e, {}, false, {}, {}, false,
                          subfold_weil_data(sub).normalized(), {}, false, {}, {}};
  const MatrixF& mb = out.m_block;
  out.e_expected = block_diagonal({mb, mb * TowerScalar(-2 * l), mb * TowerScalar(l * m), mb * TowerScalar(-2 * m)});
  out.e_matches = out.e == out.e_expected;

  // H on the K-basis eps_1..eps_4, phi acting as z/4
  out.h = MatrixF(4, 4);
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b) {
      Vec pa = sub.phi * unit(8, a);
      TowerScalar e_phi;
      for (std::size_t c = 0; c < 8; ++c) e_phi = e_phi + pa[c] * sub.e(c, b);
      out.h(a, b) = e_phi + k.phi() * sub.e(a, b);
    }
  MatrixF phim = mb * k.phi();
  out.h_expected = block_diagonal({phim, phim * TowerScalar(-2 * l)});
  out.h_matches = out.h == out.h_expected;

  const MatrixF& g = out.data.h().gram();
  for (std::size_t a = 0; a < g.rows(); ++a) out.normal_form.push_back(g(a, a).to_rational());
  out.normal_form_ok = g == MatrixF::diagonal({TowerScalar(1), TowerScalar(1), TowerScalar(-1), TowerScalar(-1)});
  out.discriminant = discriminant(out.data);
  out.eigentype = weil_eigentype(out.data);
  return out;
}

RoundTrip roundtrip_form_identity(const KSInput& input, const WeilHodgeData& data) {
  WedgeKSpace w = build_wedge(data.k_rank(), data.d());
  TOperator t = t_operator(data, w);
  TSplit split = split_t(data, w, t);
  RoundTrip out;
  out.t_form = split.restricted;
  out.doubled_input = input.gram() * TowerScalar(2);
  BilinearSpace a(out.t_form, FormKind::symmetric, "H~ on T");
  BilinearSpace b(out.doubled_input, FormKind::symmetric, "2 Q");
  out.t_invariants = form_invariants(a);
  out.input_invariants = form_invariants(b);
  out.equivalent = equivalent(out.t_invariants, out.input_invariants);
  return out;
}

MatrixAlgebraCheck verify_matrix_algebra(const KSVariety& ks, const SubfoldModel& sub) {
  const CliffordAlgebra& alg = ks.algebra;
  MatrixAlgebraCheck out;
  out.center = center_basis(alg, true);
  out.center_is_one_z =
      out.center.size() == 2 && span_equal(element_coordinates(out.center, ks.lattice),
                                           element_coordinates({alg.one(), ks.z}, ks.lattice));
  out.z_square = ks.z_square;
  out.z_square_ok = ks.z_square == TowerScalar(BigRational(-16) * ks.input.l * ks.input.m);

  const std::size_t r = sub.basis.size();
  std::vector<Vec> images;
  out.k_linear = true;
  for (Blade b : ks.lattice) {
    MatrixF lb = mult_operator(alg.blade(b), Side::left, sub.basis);
    out.k_linear = out.k_linear && lb * sub.z == sub.z * lb;
    Vec flat;
    for (std::size_t a = 0; a < r; ++a)
      for (std::size_t c = 0; c < r; ++c) flat.push_back(lb(a, c));
    images.push_back(flat);
  }
  out.regular_rank = span_rank(images);
  out.injective = out.regular_rank == ks.lattice.size();

  // X Z - Z X = 0 as a linear system in the entries of X
  MatrixF sys(r * r, r * r);
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t c = 0; c < r; ++c)
      for (std::size_t k = 0; k < r; ++k) {
        // (XZ)(a,c) = sum_k X(a,k) Z(k,c);  (ZX)(a,c) = sum_k Z(a,k) X(k,c)
        sys(a * r + c, a * r + k) = sys(a * r + c, a * r + k) + sub.z(k, c);
        sys(a * r + c, k * r + c) = sys(a * r + c, k * r + c) - sub.z(a, k);
      }
  out.commutant_dim = kernel_basis(sys).size();
  out.dimension_match = out.injective && out.k_linear && out.commutant_dim == out.regular_rank &&
                        out.regular_rank == (r / 2) * (r / 2) * 2;

  IdempotentSplit split = idempotent_split(alg);
  std::vector<Vec> all;
  out.summands_isomorphic = true;
  for (const auto& e : split.idempotents) {
    MatrixF re = mult_operator(e, Side::right, ks.lattice);
    std::vector<Vec> cols;
    Rref rr = rref(re);
    for (std::size_t p : rr.pivot_cols) cols.push_back(re.column(p));
    out.summand_dims.push_back(cols.size());
    all.insert(all.end(), cols.begin(), cols.end());
    // a nonzero module map C^+ e -> C^+ beta, x -> x e b beta, is injective
    bool found = false;
    for (Blade b : ks.lattice) {
      CliffordElement u = e * alg.blade(b) * sub.beta;
      if (u.is_zero()) continue;
      std::vector<Vec> img;
      for (const auto& c : cols) img.push_back((element_from(alg, ks.lattice, c) * u).coordinates(ks.lattice));
      found = span_rank(img) == cols.size() && cols.size() == sub.basis.size();
      break;
    }
    out.summands_isomorphic = out.summands_isomorphic && found;
  }
  out.summands_direct = span_rank(all) == ks.lattice.size() && all.size() == ks.lattice.size();
  return out;
}

// ---------------------------------------------------------------------------
// Spin conjugates

std::pair<std::size_t, std::size_t> dense_weil_multiplicities(const KSVariety& ks, const CliffordElement& j) {
  MatrixF lj = mult_operator(j, Side::left, ks.lattice);
  MatrixF lz = mult_operator(ks.z * TowerScalar(ks.scale.inverse()), Side::left, ks.lattice);
  return eigen_multiplicities(lj, lz, ks.d);
}

SpinConjugate spin_conjugate(const KSVariety& ks, const Vec& v, const Vec& w, const SubfoldModel* sub) {
  const CliffordAlgebra& alg = ks.algebra;
  SpinConjugate out;
  const MatrixF& g = alg.gram();
  auto q = [&](const Vec& x) {
    TowerScalar s;
    for (std::size_t a = 0; a < x.size(); ++a)
      for (std::size_t b = 0; b < x.size(); ++b) s = s + x[a] * g(a, b) * x[b];
    return s;
  };
  TowerScalar qq = q(v) * q(w);
  if (!qq.is_rational() || qq.to_rational().sign() <= 0) {
    out.reason = "Q(v) Q(w) = " + qq.to_string() + " is not positive";
    return out;
  }
  auto root = rational_sqrt(qq.to_rational());
  if (!root) {
    out.reason = "Q(v) Q(w) = " + qq.to_string() + " is not a rational square";
    return out;
  }
  CliffordElement a = alg.vector(v) * alg.vector(w) * TowerScalar(root->inverse());
  CliffordElement ia = a.involution();
  out.accepted = true;
  out.a = a;
  out.norm_one = a * ia == alg.one();
  CliffordElement jp = a * ks.j * ia;
  out.j_prime = jp;
  out.j_prime_squared = jp * jp == alg.scalar(TowerScalar(-1));

  std::vector<CliffordElement> lattice = blade_elements(alg, ks.lattice);
  out.pairing_identity = true;
  for (const auto& x : lattice) {
    CliffordElement y = ia * x;
    if (ks_pairing(ks.alpha, x, jp * x) != ks_pairing(ks.alpha, y, ks.j * y)) {
      out.pairing_identity = false;
      break;
    }
  }
  MatrixF gp = pairing_matrix(ks.alpha, ks.positivity_basis, left_multiply(jp, ks.positivity_basis));
  out.positive = is_symmetric(gp) && certify_positive_definite(gp).positive_definite;

  if (sub) {
    MatrixF lj = mult_operator(jp, Side::left, sub->basis);
    out.eigentype = eigen_multiplicities(lj, sub->phi, sub->d);
  } else if (ks.input.n() <= 6) {
    out.eigentype = dense_weil_multiplicities(ks, jp);
  }
  return out;
}

std::vector<SpinConjugate> sample_spin_conjugates(const KSVariety& ks, std::size_t count, std::uint64_t seed,
                                                  const SubfoldModel* sub) {
  std::mt19937_64 rng(seed);
  // mt19937_64 output is fixed by the standard, distributions are not
  auto coord = [](std::mt19937_64& g) { return static_cast<long>(g() % 5) - 2; };
  const std::size_t n = ks.input.n();
  std::vector<SpinConjugate> out;
  for (int attempt = 0; attempt < 20000 && out.size() < count; ++attempt) {
    Vec v(n), w(n);
    for (std::size_t k = 0; k < n; ++k) {
      v[k] = TowerScalar(coord(rng));
      w[k] = TowerScalar(coord(rng));
    }
    SpinConjugate s = spin_conjugate(ks, v, w, sub);
    // a scalar gives J' = J; keep only genuine conjugates
    if (!s.accepted || s.a->is_scalar() || *s.j_prime == ks.j) continue;
    out.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// n = 2 mod 4

HighdimCheck highdim_weil_check(const KSInput& input) {
  if (input.kind != KSInput::Kind::diagonal) throw DomainError("higher-dimensional check needs diagonal coefficients");
  const std::size_t n = input.n();
  if (n % 4 != 2) throw DomainError("n = " + std::to_string(n) + " is not 2 mod 4");
  if (n > 10) throw DomainError("n = " + std::to_string(n) + " exceeds the supported maximum 10");
  KSVariety ks = build_ks(input);
  const CliffordAlgebra& alg = ks.algebra;
  HighdimCheck out;
  out.n = n;
  out.m = n / 2;
  out.t = std::size_t{1} << (2 * out.m - 3);
  out.z_square = ks.z_square;
  out.d = ks.d;
  out.scale = ks.scale;
  // -d = (-1)^m d_1 ... d_n with d_i = |c_i|
  BigRational prod(1);
  for (const auto& c : input.coeffs) prod = prod * c.abs();
  if (out.m % 2) prod = -prod;
  out.z_square_ok = ks.z_square == TowerScalar(prod) && ks.z_square == TowerScalar(-ks.d * ks.scale * ks.scale);

  const CliffordElement& j = ks.j;
  CliffordElement zn = ks.z * TowerScalar(ks.scale.inverse());
  SparseSpan span(alg);
  bool independent_ok = true;
  for (Blade b : ks.lattice) {
    CliffordElement g = alg.blade(b);
    if (span.contains(g)) continue;
    out.seeds.push_back(g);
    for (const auto& x : {g, j * g, zn * g, j * zn * g}) independent_ok = span.add(x) && independent_ok;
  }
  out.basis_size = span.size();
  out.basis_independent = independent_ok && out.basis_size == ks.lattice.size() && out.seeds.size() * 4 == out.basis_size;

  TowerScalar i = imag_unit();
  CliffordElement minus_d = alg.scalar(TowerScalar(-ks.d));
  out.j_blocks_ok = out.holomorphic_ok = out.z_blocks_ok = true;
  for (const auto& g : out.seeds) {
    CliffordElement jg = j * g, zg = zn * g, jzg = j * zg;
    out.j_blocks_ok = out.j_blocks_ok && j * jg == -g && zn * jg == jzg && j * jzg == -zg;
    CliffordElement h1 = g * i + jg, h2 = zg * i + jzg;
    out.holomorphic_ok = out.holomorphic_ok && j * h1 == h1 * i && j * h2 == h2 * i;
    out.z_blocks_ok = out.z_blocks_ok && zn * h1 == h2 && zn * h2 == minus_d * h1;
  }
  MatrixF block(2, 2);
  block(0, 1) = TowerScalar(-ks.d);
  block(1, 0) = TowerScalar(1);
  TowerScalar root = TowerScalar::sqrt(-ks.d);
  out.multiplicities = {eigenspace(block, root).size() * out.seeds.size(),
                        eigenspace(block, -root).size() * out.seeds.size()};
  if (n <= 6) out.dense_multiplicities = dense_weil_multiplicities(ks, j);

  // A-summand C^+ beta
  PrimitiveIdempotent pi = find_idempotent(alg, static_cast<int>(out.m) - 1);
  out.idempotent_factors = pi.factors;
  SparseSpan va(alg);
  std::vector<CliffordElement> basis;
  for (Blade b : ks.lattice) {
    CliffordElement x = alg.blade(b) * pi.beta;
    if (va.add(x)) basis.push_back(x);
  }
  out.summand_dim = basis.size();
  MatrixF e = pairing_matrix(ks.alpha, basis, basis);
  SymplecticBasis sb = symplectic_basis(BilinearSpace(e, FormKind::alternating, "E on the summand"));
  out.symplectic_blocks = sb.block_values;
  out.symplectic_ok = sb.block_values.size() * 2 == basis.size();
  for (const auto& a : sb.block_values) out.symplectic_ok = out.symplectic_ok && !a.is_zero();
  WeilHodgeData data =
      WeilHodgeData::from_phi_action(ks.d, mult_operator(zn, Side::left, basis), e,
                                     mult_operator(j, Side::left, basis))
          .normalized();
  const MatrixF& hg = data.h().gram();
  std::size_t plus = 0, minus = 0;
  out.normal_form_ok = true;
  for (std::size_t a = 0; a < hg.rows(); ++a) {
    BigRational v = hg(a, a).to_rational();
    out.normal_form.push_back(v);
    if (v == BigRational(1)) ++plus;
    else if (v == BigRational(-1)) ++minus;
    else out.normal_form_ok = false;
  }
  Vec diag;
  for (const auto& v : out.normal_form) diag.emplace_back(v);
  out.normal_form_ok = out.normal_form_ok && plus == minus && hg == MatrixF::diagonal(diag);
  out.discriminant = discriminant(data);
  out.summand_eigentype = weil_eigentype(data);

  // g_n-free blades
  const Blade gn = Blade{1} << (n - 1);
  std::vector<CliffordElement> free;
  for (Blade b : ks.lattice)
    if (!(b & gn)) free.push_back(alg.blade(b));
  CliffordElement perturbed = ks.alpha + alg.product_of({1, static_cast<int>(n)}) +
                              alg.product_of({3, static_cast<int>(n)}) * TowerScalar(BigRational(1, 2));
  out.alpha_term_independent = pairing_matrix(perturbed, free, free) == pairing_matrix(ks.alpha, free, free);
  out.z_pairing_vanishes = pairing_matrix(ks.alpha, left_multiply(ks.z, free), free).is_zero();
  return out;
}

}  // namespace weilks
