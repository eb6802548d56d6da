#include "weilks/weilhodge.hpp"

#include <algorithm>
#include <array>

#include "weilks/errors.hpp"

namespace weilks {

namespace {

TowerScalar rat(long n, long d = 1) { return TowerScalar(BigRational(mpz_class(n), mpz_class(d))); }

Vec unit(std::size_t n, std::size_t i) {
  Vec v(n);
  v[i] = TowerScalar(1);
  return v;
}

MatrixF gram_on(const MatrixF& g, const std::vector<Vec>& basis) {
  MatrixF b = MatrixF::from_columns(basis, g.rows());
  return b.transpose() * g * b;
}

bool is_symmetric(const MatrixF& m) { return m == m.transpose(); }

TowerScalar imag_unit() { return TowerScalar::sqrt(BigRational(-1)); }

// Sign of the permutation (p0, p1, p2, p3) of 0..3, or 0 on repeats.
int perm_sign(const std::array<std::size_t, 4>& p) {
  int inv = 0;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) {
      if (p[i] == p[j]) return 0;
      if (p[i] > p[j]) ++inv;
    }
  return inv % 2 ? -1 : 1;
}

MatrixF hermitian_from_e(const ImagQuadratic& k, const MatrixF& e) {
  std::size_t r = e.rows() / 2;
  MatrixF g(r, r);
  for (std::size_t p = 0; p < r; ++p)
    for (std::size_t q = 0; q < r; ++q)
      g(p, q) = e(2 * p + 1, 2 * q) + k.phi() * e(2 * p, 2 * q);
  return g;
}

}  // namespace

std::string HodgeType::to_string() const {
  return "(" + std::to_string(p20) + "," + std::to_string(p11) + "," + std::to_string(p02) + ")";
}

MatrixF standard_phi(std::size_t r, const BigRational& d) {
  MatrixF m(2 * r, 2 * r);
  for (std::size_t k = 0; k < r; ++k) {
    m(2 * k + 1, 2 * k) = TowerScalar(1);
    m(2 * k, 2 * k + 1) = TowerScalar(-d);
  }
  return m;
}

Vec to_k_coords(const ImagQuadratic& k, const Vec& x) {
  if (x.size() % 2) throw DomainError("frame vector of odd length");
  Vec out(x.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = k.make(x[2 * i].to_rational(), x[2 * i + 1].to_rational());
  return out;
}

Vec from_k_coords(const ImagQuadratic& k, const Vec& xk) {
  Vec out(2 * xk.size());
  for (std::size_t i = 0; i < xk.size(); ++i) {
    auto [p, q] = k.split(xk[i]);
    out[2 * i] = TowerScalar(p);
    out[2 * i + 1] = TowerScalar(q);
  }
  return out;
}

BilinearSpace e_from_h(const HermitianSpace& h) {
  const ImagQuadratic& k = h.field();
  const std::size_t r = h.dim(), n = 2 * r;
  MatrixF e(n, n);
  std::vector<Vec> kb;
  for (std::size_t a = 0; a < n; ++a) kb.push_back(to_k_coords(k, unit(n, a)));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) e(a, b) = TowerScalar(k.split(h.value(kb[a], kb[b])).second);
  BilinearSpace out(e, FormKind::alternating, "E");
  MatrixF phi = standard_phi(r, k.d());
  MatrixF e_phi = phi.transpose() * e;  // (a, b) -> E(phi e_a, e_b)
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (h.value(kb[a], kb[b]) != e_phi(a, b) + k.phi() * e(a, b))
        throw VerificationFailure("H(x, y) = E(phi x, y) + phi E(x, y) fails on basis pair (" + std::to_string(a) +
                                  ", " + std::to_string(b) + ")");
  return out;
}

// ---------------------------------------------------------------------------
// WeilHodgeData

WeilHodgeData::WeilHodgeData(ImagQuadratic k, MatrixF phi, HermitianSpace h, BilinearSpace e, std::optional<MatrixF> j,
                             MatrixF frame)
    : k_(std::move(k)), phi_(std::move(phi)), h_(std::move(h)), e_(std::move(e)), j_(std::move(j)),
      frame_(std::move(frame)) {}

WeilHodgeData WeilHodgeData::from_hermitian(const HermitianSpace& h) {
  BilinearSpace e = e_from_h(h);
  std::size_t r = h.dim();
  return WeilHodgeData(h.field(), standard_phi(r, h.field().d()), h, e, std::nullopt, MatrixF::identity(2 * r));
}

WeilHodgeData WeilHodgeData::from_phi_action(const BigRational& d, const MatrixF& phi, const MatrixF& e,
                                             const std::optional<MatrixF>& j) {
  const std::size_t n = phi.rows();
  if (!phi.is_square() || n % 2 || e.rows() != n || !e.is_square()) throw DomainError("phi and E must be square of even size");
  if (phi * phi != MatrixF::identity(n) * TowerScalar(-d)) throw DomainError("phi^2 is not -d");
  if (phi.transpose() * e * phi != e * TowerScalar(d)) throw DomainError("E(phi x, phi y) is not d E(x, y)");
  BilinearSpace check(e, FormKind::alternating);
  std::vector<Vec> cols;
  for (std::size_t i = 0; i < n && cols.size() < n; ++i) {
    Vec v = unit(n, i);
    if (span_contains(cols, v)) continue;
    cols.push_back(v);
    cols.push_back(phi * v);
  }
  MatrixF f = MatrixF::from_columns(cols, n);
  auto finv = inverse(f);
  if (!finv) throw VerificationFailure("greedy K-frame is not a basis");
  ImagQuadratic k{d};
  MatrixF phi_f = *finv * phi * f;
  if (phi_f != standard_phi(n / 2, d)) throw VerificationFailure("phi is not standard in the greedy frame");
  MatrixF e_f = f.transpose() * e * f;
  HermitianSpace h(hermitian_from_e(k, e_f), k);
  WeilHodgeData out(k, phi_f, h, BilinearSpace(e_f, FormKind::alternating, "E"), std::nullopt, f);
  if (j) return out.with_complex_structure(*finv * *j * f);
  return out;
}

WeilHodgeData WeilHodgeData::with_complex_structure(const MatrixF& j, bool require_positive) const {
  const std::size_t n = phi_.rows();
  if (j.rows() != n || j.cols() != n) throw DomainError("complex structure has the wrong size");
  if (j * j != -MatrixF::identity(n)) throw DomainError("J^2 is not -1");
  if (j * phi_ != phi_ * j) throw DomainError("J does not commute with phi");
  const MatrixF& e = e_.gram();
  if (j.transpose() * e * j != e) throw DomainError("E is not J-invariant");
  if (require_positive) {
    MatrixF g = e * j;
    if (!is_symmetric(g)) throw DomainError("E(x, Jy) is not symmetric");
    if (!certify_positive_definite(g).positive_definite) throw DomainError("E(x, Jx) is not positive definite");
  }
  WeilHodgeData out = *this;
  out.j_ = j;
  return out;
}

WeilHodgeData WeilHodgeData::with_standard_complex_structure() const {
  const std::size_t r = k_rank();
  const MatrixF& g = h_.gram();
  for (std::size_t p = 0; p < r; ++p)
    for (std::size_t q = 0; q < r; ++q)
      if (p != q && !g(p, q).is_zero()) throw DomainError("standard complex structure needs a diagonal H");
  TowerScalar sd = TowerScalar::sqrt(d());
  MatrixF j(2 * r, 2 * r);
  for (std::size_t k = 0; k < r; ++k) {
    TowerScalar s(g(k, k).to_rational().sign() > 0 ? -1 : 1);
    j(2 * k + 1, 2 * k) = s * sd.inverse();
    j(2 * k, 2 * k + 1) = -s * sd;
  }
  return with_complex_structure(j);
}

WeilHodgeData WeilHodgeData::in_frame(const MatrixF& p) const {
  const std::size_t r = k_rank(), n = 2 * r;
  if (p.rows() != r || p.cols() != r) throw DomainError("frame change has the wrong size");
  std::vector<Vec> cols;
  for (std::size_t k = 0; k < r; ++k) {
    Vec v = from_k_coords(k_, p.column(k));
    cols.push_back(v);
    cols.push_back(phi_ * v);
  }
  MatrixF f = MatrixF::from_columns(cols, n);
  auto finv = inverse(f);
  if (!finv) throw DomainError("frame change is singular");
  MatrixF e_f = f.transpose() * e_.gram() * f;
  MatrixF g = hermitian_from_e(k_, e_f);
  if (g != h_.transformed(p)) throw VerificationFailure("Hermitian form does not transform as P^T G conj(P)");
  std::optional<MatrixF> j;
  if (j_) j = *finv * *j_ * f;
  return WeilHodgeData(k_, *finv * phi_ * f, HermitianSpace(g, k_), BilinearSpace(e_f, FormKind::alternating, "E"), j,
                       frame_ * f);
}

WeilHodgeData WeilHodgeData::normalized() const {
  const std::size_t r = k_rank();
  HermitianDiagonalization hd = diagonalize_hermitian(h_);
  std::size_t pos = 0, neg = 0, nonunit = 0;
  for (std::size_t i = 0; i < r; ++i) {
    (hd.reduced[i].sign() > 0 ? pos : neg)++;
    if (!hd.unit[i]) {
      ++nonunit;
      if (i != 0 || hd.reduced[i].sign() < 0)
        throw DomainError("Hermitian form does not reduce to diag(a, 1, ..., -1, ...)");
    }
  }
  if (pos != neg || nonunit > 1) throw DomainError("Hermitian form does not reduce to diag(a, 1, ..., -1, ...)");
  return in_frame(hd.p);
}

std::pair<std::size_t, std::size_t> weil_eigentype(const WeilHodgeData& w) {
  if (!w.complex_structure()) throw DomainError("Weil eigentype needs a complex structure");
  const MatrixF& j = *w.complex_structure();
  const MatrixF& phi = w.phi_matrix();
  const std::size_t n = phi.rows();
  TowerScalar i = imag_unit();
  auto count = [&](const TowerScalar& lambda) {
    MatrixF m(2 * n, n);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        m(a, b) = phi(a, b) - (a == b ? lambda : TowerScalar());
        m(n + a, b) = j(a, b) - (a == b ? i : TowerScalar());
      }
    return kernel_basis(m).size();
  };
  return {count(w.field().phi()), count(-w.field().phi())};
}

// ---------------------------------------------------------------------------
// Exterior squares

std::vector<std::pair<std::size_t, std::size_t>> wedge_pairs(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) out.emplace_back(i, j);
  return out;
}

Vec wedge(const Vec& x, const Vec& y) {
  const std::size_t n = x.size();
  Vec out(n * (n - 1) / 2);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j, ++k) {
      TowerScalar v;
      if (!x[i].is_zero() && !y[j].is_zero()) v += x[i] * y[j];
      if (!x[j].is_zero() && !y[i].is_zero()) v -= x[j] * y[i];
      out[k] = v;
    }
  return out;
}

MatrixF wedge2_power(const MatrixF& a) {
  const std::size_t n = a.rows();
  std::vector<Vec> cols;
  std::vector<Vec> ac = a.columns();
  for (auto [i, j] : wedge_pairs(n)) cols.push_back(wedge(ac[i], ac[j]));
  return MatrixF::from_columns(cols, n * (n - 1) / 2);
}

MatrixF wedge2_derivation(const MatrixF& a) {
  const std::size_t n = a.rows();
  std::vector<Vec> cols;
  std::vector<Vec> ac = a.columns();
  for (auto [i, j] : wedge_pairs(n)) cols.push_back(add(wedge(ac[i], unit(n, j)), wedge(unit(n, i), ac[j])));
  return MatrixF::from_columns(cols, n * (n - 1) / 2);
}

MatrixF wedge2_form(const MatrixF& e) {
  const std::size_t n = e.rows();
  auto pairs = wedge_pairs(n);
  MatrixF out(pairs.size(), pairs.size());
  for (std::size_t r = 0; r < pairs.size(); ++r)
    for (std::size_t c = 0; c < pairs.size(); ++c) {
      auto [x, y] = pairs[r];
      auto [z, w] = pairs[c];
      out(r, c) = e(x, z) * e(y, w) - e(x, w) * e(y, z);
    }
  return out;
}

WedgeKSpace build_wedge(std::size_t k_rank, const BigRational& d) {
  if (k_rank < 2) throw DomainError("K-exterior square needs K-rank at least 2");
  WedgeKSpace w;
  w.k_rank = k_rank;
  w.d = d;
  if (k_rank == 4) {
    w.k_pairs = {{0, 1}, {0, 2}, {0, 3}, {2, 3}, {3, 1}, {1, 2}};
    w.labels = {"a1", "a2", "a3", "b1", "b2", "b3"};
  } else {
    for (auto [p, q] : wedge_pairs(k_rank)) {
      w.k_pairs.emplace_back(p, q);
      w.labels.push_back("u" + std::to_string(p + 1) + "^u" + std::to_string(q + 1));
    }
  }
  const std::size_t n = 2 * k_rank;
  MatrixF phi = standard_phi(k_rank, d);
  std::vector<Vec> cols;
  for (auto [p, q] : w.k_pairs) {
    Vec x = unit(n, 2 * p), y = unit(n, 2 * q);
    cols.push_back(embed_i(w, x, y));
    cols.push_back(embed_i(w, phi * x, y));
  }
  w.embedding = MatrixF::from_columns(cols, n * (n - 1) / 2);
  w.phi = standard_phi(w.k_dim(), d);
  return w;
}

Vec wedge_k(const WedgeKSpace& w, const Vec& x, const Vec& y) {
  ImagQuadratic k{w.d};
  Vec xk = to_k_coords(k, x), yk = to_k_coords(k, y);
  Vec out;
  for (auto [p, q] : w.k_pairs) {
    auto [re, im] = k.split(xk[p] * yk[q] - xk[q] * yk[p]);
    out.emplace_back(re);
    out.emplace_back(im);
  }
  return out;
}

Vec embed_i(const WedgeKSpace& w, const Vec& x, const Vec& y) {
  MatrixF phi = standard_phi(w.k_rank, w.d);
  TowerScalar half = rat(1, 2);
  TowerScalar c = -(TowerScalar(2) * TowerScalar(w.d)).inverse();
  return add(scale(wedge(x, y), half), scale(wedge(phi * x, phi * y), c));
}

Phi2Split phi2_eigenspaces(const WedgeKSpace& w) {
  Phi2Split s;
  s.phi2 = wedge2_power(standard_phi(w.k_rank, w.d));
  s.plus = eigenspace(s.phi2, TowerScalar(w.d));
  s.minus = eigenspace(s.phi2, TowerScalar(-w.d));
  s.image_rank = rank(w.embedding);
  const std::size_t r = w.k_rank;
  if (s.plus.size() != r * r || s.minus.size() != r * (r - 1) || s.image_rank != r * (r - 1))
    throw VerificationFailure("phi_2 eigenspace dimensions " + std::to_string(s.plus.size()) + "/" +
                              std::to_string(s.minus.size()) + " disagree with r^2 and r(r-1)");
  s.minus_equals_image = span_equal(s.minus, w.embedding.columns());
  return s;
}

MatrixF on_s(const WedgeKSpace& w, const MatrixF& derivation) {
  return restrict_to(wedge2_derivation(derivation), w.embedding.columns());
}

HodgeType weight2_type(const MatrixF& d) {
  TowerScalar two_i = TowerScalar(2) * imag_unit();
  return {eigenspace(d, two_i).size(), kernel_basis(d).size(), eigenspace(d, -two_i).size()};
}

HodgeType s_hodge_type(const WeilHodgeData& data, const WedgeKSpace& w) {
  if (!data.complex_structure()) throw DomainError("Hodge type needs a complex structure");
  return weight2_type(on_s(w, *data.complex_structure()));
}

// ---------------------------------------------------------------------------
// t

TOperator t_operator(const WeilHodgeData& data, const WedgeKSpace& w) {
  if (data.k_rank() != 4 || w.k_rank != 4) throw DomainError("t is defined for K-rank 4");
  const MatrixF& g = data.h().gram();
  for (std::size_t p = 0; p < 4; ++p)
    for (std::size_t q = 0; q < 4; ++q)
      if (p != q && !g(p, q).is_zero()) throw DomainError("H is not diagonal; normalize the frame first");
  if (!g(0, 0).is_rational() || g(0, 0).to_rational().sign() <= 0 || g(1, 1) != TowerScalar(1) ||
      g(2, 2) != TowerScalar(-1) || g(3, 3) != TowerScalar(-1))
    throw DomainError("H is not diag(a, 1, -1, -1); normalize the frame first");
  TOperator t;
  t.a = g(0, 0).to_rational();
  const std::size_t m = w.k_dim();
  t.h_tilde = MatrixF(m, m);
  t.gamma = MatrixF(m, m);
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t l = 0; l < m; ++l) {
      auto [p, q] = w.k_pairs[k];
      auto [r, s] = w.k_pairs[l];
      t.h_tilde(k, l) = g(p, r) * g(q, s) - g(p, s) * g(q, r);
      t.gamma(k, l) = TowerScalar(perm_sign({p, q, r, s}));
    }
  t.t_k = *inverse(t.gamma.transpose()) * t.h_tilde;
  const ImagQuadratic& kf = data.field();
  t.t = MatrixF(2 * m, 2 * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      auto [re, im] = kf.split(t.t_k(i, j));
      t.t(2 * i, 2 * j) = TowerScalar(re);
      t.t(2 * i, 2 * j + 1) = TowerScalar(kf.d() * im);
      t.t(2 * i + 1, 2 * j) = TowerScalar(im);
      t.t(2 * i + 1, 2 * j + 1) = TowerScalar(-re);
    }
  return t;
}

TowerScalar h_tilde_value(const WeilHodgeData& data, const TOperator& t, const Vec& v, const Vec& w) {
  Vec vk = to_k_coords(data.field(), v), wk = to_k_coords(data.field(), w);
  TowerScalar s;
  for (std::size_t k = 0; k < vk.size(); ++k) {
    if (vk[k].is_zero()) continue;
    for (std::size_t l = 0; l < wk.size(); ++l)
      if (!wk[l].is_zero() && !t.h_tilde(k, l).is_zero()) s += vk[k] * t.h_tilde(k, l) * wk[l].complex_conj();
  }
  return s;
}

TowerScalar gamma_value(const WeilHodgeData& data, const TOperator& t, const Vec& x, const Vec& y) {
  Vec xk = to_k_coords(data.field(), x), yk = to_k_coords(data.field(), y);
  TowerScalar s;
  for (std::size_t k = 0; k < xk.size(); ++k)
    for (std::size_t l = 0; l < yk.size(); ++l)
      if (!t.gamma(k, l).is_zero()) s += xk[k] * t.gamma(k, l) * yk[l];
  return s;
}

TChecks check_t(const WeilHodgeData& data, const WedgeKSpace& w, const TOperator& t) {
  TChecks c;
  const std::size_t m = w.k_dim(), n = 2 * m;
  c.h_tilde_hermitian = t.h_tilde.transpose() == t.h_tilde.conj();
  TowerScalar a(t.a);
  c.h_tilde_diagonal = t.h_tilde == MatrixF::diagonal({a, -a, -a, rat(1), rat(-1), rat(-1)});
  c.gamma_identity = true;
  for (std::size_t i = 0; i < n && c.gamma_identity; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (h_tilde_value(data, t, unit(n, i), unit(n, j)) != gamma_value(data, t, t.t * unit(n, j), unit(n, i))) {
        c.gamma_identity = false;
        break;
      }
  c.t_a1 = t.t * unit(n, 0) == scale(unit(n, 6), a);
  c.t_b1 = t.t * unit(n, 6) == unit(n, 0);
  c.t_squared = t.t * t.t == MatrixF::identity(n) * a;
  return c;
}

QuaternionRelations quaternion_relations(const WeilHodgeData& data, const WedgeKSpace& w, const TOperator& t) {
  QuaternionRelations q;
  const std::size_t n = w.phi.rows();
  q.phi_squared = w.phi * w.phi == MatrixF::identity(n) * TowerScalar(-w.d);
  q.t_squared = t.t * t.t == MatrixF::identity(n) * TowerScalar(t.a);
  q.anticommute = w.phi * t.t == -(t.t * w.phi);
  if (data.complex_structure()) {
    q.has_j = true;
    MatrixF j2 = restrict_to(wedge2_power(*data.complex_structure()), w.embedding.columns());
    MatrixF ds = on_s(w, *data.complex_structure());
    q.t_commutes_j2 = t.t * j2 == j2 * t.t;
    q.t_commutes_hodge = t.t * ds == ds * t.t;
    q.phi_commutes_j2 = w.phi * j2 == j2 * w.phi;
  }
  return q;
}

TSplit split_t(const WeilHodgeData& data, const WedgeKSpace& w, const TOperator& t) {
  if (!t.a.is_one()) throw DomainError("T-splitting needs discriminant representative a = 1");
  TSplit s;
  const std::size_t n = t.t.rows();
  s.plus = eigenspace(t.t, TowerScalar(1));
  s.minus = eigenspace(t.t, TowerScalar(-1));
  std::vector<Vec> image;
  for (const auto& v : s.plus) image.push_back(w.phi * v);
  s.phi_maps_plus_to_minus = s.plus.size() == n / 2 && s.minus.size() == n / 2 && span_equal(image, s.minus);

  const std::size_t k = s.plus.size();
  s.restricted = MatrixF(k, k);
  s.imaginary_part_vanishes = true;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      TowerScalar v = h_tilde_value(data, t, s.plus[i], s.plus[j]);
      if (!v.is_rational()) s.imaginary_part_vanishes = false;
      s.restricted(i, j) = v;
    }
  MatrixF wf = wedge2_form(data.e().gram());
  std::vector<Vec> lifted;
  for (const auto& v : s.plus) lifted.push_back(w.embedding * v);
  s.wedge_e = gram_on(wf, lifted);
  s.wedge_e_identity = s.wedge_e == s.restricted * (-(TowerScalar(2) * TowerScalar(w.d)).inverse());

  auto e = [n](std::size_t i) { return unit(n, i); };
  // a_k at 2(k-1), phi a_k at 2(k-1)+1, b_k at 6 + 2(k-1), phi b_k at 7 + 2(k-1).
  s.witness_basis = {add(e(0), e(6)),           add(e(2), scale(e(8), rat(-1))), add(e(1), scale(e(7), rat(-1))),
                     add(e(3), e(9)),           add(e(4), scale(e(10), rat(-1))), add(e(5), e(11))};
  s.witness_gram = MatrixF(6, 6);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j)
      s.witness_gram(i, j) = h_tilde_value(data, t, s.witness_basis[i], s.witness_basis[j]);
  TowerScalar dd(w.d);
  s.witness_in_plus = span_contains(s.plus, s.witness_basis);
  s.witness_diagonal = s.witness_gram == MatrixF::diagonal({rat(2), rat(-2), TowerScalar(2) * dd, TowerScalar(-2) * dd,
                                                            rat(-2), TowerScalar(-2) * dd});
  if (s.imaginary_part_vanishes && is_symmetric(s.restricted) && k == 6) {
    MatrixF target = block_diagonal({hyperbolic_plane(), hyperbolic_plane(), MatrixF::diagonal({rat(-2)}),
                                     MatrixF::diagonal({TowerScalar(-2) * dd})});
    s.equivalent_to_hyp_form = rationally_equivalent(BilinearSpace(s.restricted, FormKind::symmetric),
                                                     BilinearSpace(target, FormKind::symmetric));
  }
  return s;
}

HodgeType t_hodge_type(const WeilHodgeData& data, const WedgeKSpace& w, const TSplit& s) {
  if (!data.complex_structure()) throw DomainError("Hodge type needs a complex structure");
  MatrixF ds = on_s(w, *data.complex_structure());
  return weight2_type(restrict_to(ds, s.plus));
}

namespace {

struct SubspaceForms {
  MatrixF psi;  // wedge^2 E on the subspace basis
  MatrixF d;    // weight-2 derivation
  MatrixF h;    // J ^ J
};

SubspaceForms subspace_forms(const WeilHodgeData& data, const WedgeKSpace& w, std::vector<Vec> subspace) {
  if (!data.complex_structure()) throw DomainError("needs a complex structure");
  const MatrixF& j = *data.complex_structure();
  if (subspace.empty())
    for (std::size_t i = 0; i < w.embedding.cols(); ++i) subspace.push_back(unit(w.embedding.cols(), i));
  MatrixF ds = on_s(w, j);
  MatrixF j2 = restrict_to(wedge2_power(j), w.embedding.columns());
  std::vector<Vec> lifted;
  for (const auto& v : subspace) lifted.push_back(w.embedding * v);
  return {gram_on(wedge2_form(data.e().gram()), lifted), restrict_to(ds, subspace), restrict_to(j2, subspace)};
}

}  // namespace

SignLaw sign_law(const WeilHodgeData& data, const WedgeKSpace& w, const std::vector<Vec>& subspace) {
  SubspaceForms f = subspace_forms(data, w, subspace);
  SignLaw s;
  const std::size_t k = f.d.rows();
  std::vector<Vec> s11 = kernel_basis(f.d);
  std::vector<Vec> s2002 = kernel_basis(f.d * f.d + MatrixF::identity(k) * TowerScalar(4));
  s.dim_11 = s11.size();
  s.dim_20_02 = s2002.size();
  // Q = -psi positive on S^{2,0}+S^{0,2}, negative on S^{1,1}.
  s.positive_on_20_02 = s2002.empty() || certify_positive_definite(-gram_on(f.psi, s2002)).positive_definite;
  s.negative_on_11 = s11.empty() || certify_positive_definite(gram_on(f.psi, s11)).positive_definite;
  return s;
}

PolarizationAxioms polarization_axioms(const WeilHodgeData& data, const WedgeKSpace& w,
                                       const std::vector<Vec>& subspace) {
  SubspaceForms f = subspace_forms(data, w, subspace);
  PolarizationAxioms p;
  p.invariant = f.h.transpose() * f.psi * f.h == f.psi;
  MatrixF g = f.psi * f.h;
  p.symmetric = is_symmetric(g);
  p.positive = p.symmetric && certify_positive_definite(g).positive_definite;
  return p;
}

// ---------------------------------------------------------------------------
// Discriminant and comparison

std::string DiscriminantClass::to_string() const { return trivial ? "1" : square_class.to_string(); }

DiscriminantClass discriminant(const WeilHodgeData& data) {
  const std::size_t r = data.k_rank();
  TowerScalar det = determinant(data.h().gram());
  if (!det.is_rational() || det.is_zero()) throw DomainError("Hermitian determinant is not a nonzero rational");
  DiscriminantClass c;
  c.value = det.to_rational();
  if ((r / 2) % 2) c.value = -c.value;
  c.square_class = SquareClass(c.value);
  c.trivial = is_norm(c.value, data.d()).is_norm;
  return c;
}

std::string to_string(CompareSign s) {
  switch (s) {
    case CompareSign::plus: return "+1";
    case CompareSign::minus: return "-1";
    default: return "inconclusive";
  }
}

WeilComparison compare_weil_structures(const WeilHodgeData& a, const WeilHodgeData& x, const std::optional<MatrixF>& u) {
  if (a.d() != x.d() || a.k_rank() != x.k_rank()) throw DomainError("Weil structures over different fields or ranks");
  if (!discriminant(a).trivial || !discriminant(x).trivial) throw DomainError("comparison needs discriminant one");
  if (!a.complex_structure() || !x.complex_structure()) throw DomainError("comparison needs complex structures");
  const std::size_t n = a.phi_matrix().rows();
  auto try_u = [&](const WeilHodgeData& da, const WeilHodgeData& dx, const MatrixF& uu) -> std::optional<CompareSign> {
    auto uinv = inverse(uu);
    if (!uinv) return std::nullopt;
    if (uu * da.phi_matrix() != dx.phi_matrix() * uu) return std::nullopt;
    if (uu.transpose() * dx.e().gram() * uu != da.e().gram()) return std::nullopt;
    MatrixF conj = uu * *da.complex_structure() * *uinv;
    if (conj == *dx.complex_structure()) return CompareSign::plus;
    if (conj == -*dx.complex_structure()) return CompareSign::minus;
    return std::nullopt;
  };
  WeilComparison out;
  if (u) {
    if (auto s = try_u(a, x, *u)) {
      out.sign = *s;
      out.u = *u;
    }
    return out;
  }
  WeilHodgeData na = a.normalized(), nx = x.normalized();
  const std::size_t r = a.k_rank();
  std::vector<std::size_t> perm(r);
  for (std::size_t i = 0; i < r; ++i) perm[i] = i;
  // Permutations within the +1 block and within the -1 block of diag(1, .., -1, ..).
  std::vector<std::size_t> plus(perm.begin(), perm.begin() + static_cast<long>(r / 2));
  std::vector<std::size_t> minus(perm.begin() + static_cast<long>(r / 2), perm.end());
  do {
    std::vector<std::size_t> mperm = minus;
    do {
      MatrixF uu(n, n);
      for (std::size_t k = 0; k < r; ++k) {
        std::size_t to = k < r / 2 ? plus[k] : mperm[k - r / 2];
        uu(2 * to, 2 * k) = TowerScalar(1);
        uu(2 * to + 1, 2 * k + 1) = TowerScalar(1);
      }
      if (auto s = try_u(na, nx, uu)) {
        out.sign = *s;
        // Back to the callers' frames: x-frame^{-1} * U * a-frame in original coordinates.
        MatrixF fa = *inverse(a.frame()) * na.frame();
        MatrixF fx = *inverse(x.frame()) * nx.frame();
        out.u = fx * uu * *inverse(fa);
        return out;
      }
    } while (std::next_permutation(mperm.begin(), mperm.end()));
  } while (std::next_permutation(plus.begin(), plus.end()));
  return out;
}

}  // namespace weilks
