#include "weilks/report.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "weilks/errors.hpp"
#include "weilks/kugasatake.hpp"

namespace weilks {

namespace {

constexpr std::uint64_t kSpinSeed = 20240601;
constexpr std::size_t kSpinCount = 3;

Json js(const TowerScalar& x) { return x.to_string(); }
Json js(const BigRational& x) { return x.to_string(); }

Json js(const Vec& v) {
  Json a = Json::array();
  for (const auto& x : v) a.push_back(x.to_string());
  return a;
}

Json js(const std::vector<BigRational>& v) {
  Json a = Json::array();
  for (const auto& x : v) a.push_back(x.to_string());
  return a;
}

Json js(const MatrixF& m) {
  Json a = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) a.push_back(js(m.row(i)));
  return a;
}

Json js(const std::pair<std::size_t, std::size_t>& p) { return Json::array({p.first, p.second}); }
Json js(const HodgeType& h) { return Json::array({h.p20, h.p11, h.p02}); }

Json js(const FormInvariants& f) {
  Json h = Json::object();
  for (const auto& [p, c] : f.hasse) h[p] = c;
  return Json{{"rank", f.rank},
              {"signature", Json::array({f.positive, f.negative})},
              {"discriminant", f.discriminant.to_string()},
              {"hasse", h}};
}

// Collects assertions; the first failure becomes the counterexample.
class Recorder {
 public:
  explicit Recorder(VerificationReport& r) : r_(r) {}
  void check(const std::string& name, bool passed, Json witness = nullptr) {
    if (!passed && !r_.counterexample) r_.counterexample = Json{{"assertion", name}, {"witness", witness}};
    r_.assertions.push_back({name, passed, std::move(witness)});
  }
  void witness(const std::string& key, Json value) { r_.witnesses[key] = std::move(value); }
  void element(const std::string& key, Json value) { r_.elements[key] = std::move(value); }
  void convention(const std::string& key, const std::string& value) { r_.conventions[key] = value; }

 private:
  VerificationReport& r_;
};

// Parameter access with the completeness and format checks of each check id.
class Params {
 public:
  Params(const CheckRequest& req, std::vector<std::string> allowed) : req_(req) {
    for (const auto& [k, v] : req.params)
      if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
        throw DomainError("unknown parameter '" + k + "' for check " + req.check_id);
  }
  std::string text(const std::string& key) const {
    auto v = req_.find(key);
    if (!v) throw DomainError("missing parameter '" + key + "' for check " + req_.check_id);
    return *v;
  }
  BigRational rational(const std::string& key) const { return BigRational::parse(text(key)); }
  long integer(const std::string& key) const {
    BigRational q = rational(key);
    if (q.denominator() != 1 || !q.numerator().fits_slong_p())
      throw DomainError("parameter '" + key + "' must be an integer, got " + text(key));
    return q.numerator().get_si();
  }
  std::vector<BigRational> list(const std::string& key) const {
    std::vector<BigRational> out;
    std::stringstream ss(text(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item.erase(0, item.find_first_not_of(" \t"));
      item.erase(item.find_last_not_of(" \t") + 1);
      out.push_back(BigRational::parse(item));
    }
    return out;
  }

 private:
  const CheckRequest& req_;
};

void require_negative(const BigRational& x, const char* name) {
  if (x.sign() >= 0) throw DomainError(std::string(name) + " must be negative, got " + x.to_string());
}

void require_positive(const BigRational& x, const char* name) {
  if (x.sign() <= 0) throw DomainError(std::string(name) + " must be positive, got " + x.to_string());
}

MatrixF rational_diagonal(const std::vector<BigRational>& d) {
  Vec v(d.begin(), d.end());
  return MatrixF::diagonal(v);
}

std::vector<BigRational> ints(std::initializer_list<long> xs) {
  std::vector<BigRational> out;
  for (long x : xs) out.emplace_back(x);
  return out;
}

// ---------------------------------------------------------------------------

void check_prop31(const CheckRequest& req, Recorder& rec) {
  Params p(req, {"d", "rank"});
  BigRational d = p.rational("d");
  require_positive(d, "d");
  long r = p.integer("rank");
  if (r < 2 || r > 6) throw DomainError("rank must lie in [2, 6], got " + std::to_string(r));
  auto rank = static_cast<std::size_t>(r);
  rec.convention("embedding", "i(x ^K y) = (1/2) x^y - (1/2d) phi x ^ phi y");
  WedgeKSpace w = build_wedge(rank, d);
  Phi2Split s = phi2_eigenspaces(w);
  std::size_t qdim = 2 * rank;
  rec.witness("ambient_dim", qdim * (qdim - 1) / 2);
  rec.witness("image_dim", s.image_rank);
  rec.witness("minus_d_eigenspace_dim", s.minus.size());
  rec.witness("plus_d_eigenspace_dim", s.plus.size());
  rec.check("image_dim", s.image_rank == rank * (rank - 1), s.image_rank);
  rec.check("minus_d_eigenspace_dim", s.minus.size() == rank * (rank - 1), s.minus.size());
  rec.check("plus_d_eigenspace_dim", s.plus.size() == rank * rank, s.plus.size());
  rec.check("image_equals_minus_d_eigenspace", s.minus_equals_image);
}

void weil_suite(const WeilHodgeData& data, Recorder& rec) {
  WedgeKSpace w = build_wedge(4, data.d());
  TOperator t = t_operator(data, w);
  TChecks tc = check_t(data, w, t);
  rec.witness("a", js(t.a));
  rec.witness("h_tilde", js(t.h_tilde));
  rec.check("h_tilde_diagonal", tc.h_tilde_diagonal, js(t.h_tilde));
  rec.check("t_a1_equals_a_b1", tc.t_a1);
  rec.check("t_squared_equals_a", tc.t_squared);
  QuaternionRelations q = quaternion_relations(data, w, t);
  rec.check("phi_squared_equals_minus_d", q.phi_squared);
  rec.check("phi_t_anticommute", q.anticommute);
  rec.check("t_commutes_with_j", q.t_commutes_j2);
  TSplit s = split_t(data, w, t);
  rec.witness("t_plus_dim", s.plus.size());
  rec.witness("t_witness_gram", js(s.witness_gram));
  rec.witness("t_form", js(s.restricted));
  rec.check("t_witness_gram_diagonal", s.witness_in_plus && s.witness_diagonal, js(s.witness_gram));
  rec.check("t_form_hyp_hyp_m2_m2d", s.equivalent_to_hyp_form, js(s.restricted));
  rec.check("wedge_e_equals_minus_h_tilde_over_2d", s.wedge_e_identity, js(s.wedge_e));
  HodgeType st = s_hodge_type(data, w);
  HodgeType tt = t_hodge_type(data, w, s);
  rec.witness("s_hodge_type", js(st));
  rec.witness("t_hodge_type", js(tt));
  rec.check("s_type_2_8_2", st == HodgeType{2, 8, 2}, js(st));
  rec.check("t_type_1_4_1", tt == HodgeType{1, 4, 1}, js(tt));
}

void check_fourfold(const CheckRequest& req, Recorder& rec) {
  Params p(req, {"l", "m"});
  BigRational l = p.rational("l"), m = p.rational("m");
  require_negative(l, "l");
  require_negative(m, "m");
  rec.convention("quadratic_form", "Hyp + Hyp + [l] + [m] on f1..f6");
  rec.convention("pairing", "E(v, w) = Tr(alpha iota(v) w), Tr of right multiplication on C+");
  rec.convention("hermitian", "H(x, y) = E(phi x, y) + phi E(x, y), phi = z/4, linear in x");
  KSInput in = KSInput::fourfold(l, m);
  KSVariety ks = build_ks(in);
  rec.element("alpha", ks.alpha.to_string());
  rec.element("j", ks.j.to_string());
  rec.element("z", ks.z.to_string());
  rec.witness("z_square", js(ks.z_square));
  rec.witness("d", js(ks.d));
  rec.check("positivity", ks.positivity.positive_definite, js(ks.positivity.pivots));

  SubfoldModel sub = beta_split(ks);
  rec.element("beta", sub.beta.to_string());
  Json basis = Json::object();
  for (std::size_t k = 0; k < sub.basis.size(); ++k) basis[sub.labels[k]] = sub.basis[k].to_string();
  rec.element("basis", basis);
  rec.witness("kernel_dim", sub.kernel_dim);
  rec.witness("image_dim", sub.image_dim);
  rec.check("kernel_dim_24", sub.kernel_dim == 24, sub.kernel_dim);
  rec.check("image_basis", sub.image_dim == 8 && sub.basis_in_image && sub.basis_spans_image, sub.image_dim);

  ActionTables at = action_tables(ks, sub);
  rec.witness("j_table", js(sub.j));
  rec.witness("z_table", js(sub.z));
  rec.witness("z_holomorphic", js(at.z_holomorphic));
  rec.witness("z_multiplicities", js(at.multiplicities));
  rec.check("j_table", at.j_matches, js(sub.j));
  rec.check("z_table", at.z_matches, js(sub.z));
  rec.check("holomorphic_basis", at.holomorphic_is_i_eigenspace);
  rec.check("z_holomorphic", at.z_holomorphic_matches, js(at.z_holomorphic));
  rec.check("z_multiplicities_2_2", at.multiplicities == std::make_pair(std::size_t{2}, std::size_t{2}),
            js(at.multiplicities));

  SubfoldPolarization sp = subfold_polarization(ks, sub);
  rec.witness("M", js(sp.m_block));
  rec.witness("polarization", js(sp.e));
  rec.witness("H", js(sp.h));
  rec.witness("H_normal", js(sp.normal_form));
  rec.witness("discriminant", sp.discriminant.to_string());
  rec.witness("weil_eigentype", js(sp.eigentype));
  rec.check("polarization_matrix", sp.e_matches, js(sp.e));
  rec.check("hermitian_matrix", sp.h_matches, js(sp.h));
  rec.check("H_normal_form", sp.normal_form_ok, js(sp.normal_form));
  rec.check("discriminant_one", sp.discriminant.trivial, sp.discriminant.to_string());
  rec.check("weil_eigentype_2_2", sp.eigentype == std::make_pair(std::size_t{2}, std::size_t{2}), js(sp.eigentype));

  MatrixAlgebraCheck mc = verify_matrix_algebra(ks, sub);
  Json center = Json::array();
  for (const auto& c : mc.center) center.push_back(c.to_string());
  rec.element("center", center);
  rec.witness("center_dim", mc.center.size());
  rec.witness("regular_rank", mc.regular_rank);
  rec.witness("commutant_dim", mc.commutant_dim);
  rec.witness("summand_dims", mc.summand_dims);
  rec.check("center_is_1_z", mc.center_is_one_z, mc.center.size());
  rec.check("z_square_minus_16lm", mc.z_square_ok, js(mc.z_square));
  rec.check("regular_action_injective", mc.injective, mc.regular_rank);
  rec.check("regular_action_k_linear", mc.k_linear);
  rec.check("dimension_32", mc.dimension_match, mc.commutant_dim);
  rec.check("four_isomorphic_summands", mc.summands_direct && mc.summands_isomorphic, mc.summand_dims);

  weil_suite(sp.data, rec);

  std::vector<SpinConjugate> cs = sample_spin_conjugates(ks, kSpinCount, kSpinSeed, &sub);
  Json as = Json::array();
  for (const auto& c : cs) as.push_back(c.a->to_string());
  rec.element("spin_conjugators", as);
  rec.witness("spin_conjugates", cs.size());
  rec.check("spin_conjugates_found", cs.size() == kSpinCount, cs.size());
  for (std::size_t k = 0; k < cs.size(); ++k) {
    const SpinConjugate& c = cs[k];
    bool ok = c.norm_one && c.j_prime_squared && c.pairing_identity && c.positive && c.eigentype &&
              *c.eigentype == std::make_pair(std::size_t{2}, std::size_t{2});
    rec.check("spin_conjugate_" + std::to_string(k + 1) + "_weil_type", ok,
              c.eigentype ? js(*c.eigentype) : Json(nullptr));
  }
}

void check_highdim(const CheckRequest& req, Recorder& rec) {
  Params p(req, {"n", "coeffs"});
  long n = p.integer("n");
  std::vector<BigRational> c = p.list("coeffs");
  if (n <= 0 || static_cast<std::size_t>(n) != c.size())
    throw DomainError("n = " + std::to_string(n) + " does not match " + std::to_string(c.size()) + " coefficients");
  if (n % 4 != 2) throw DomainError("n = " + std::to_string(n) + " is not 2 mod 4");
  if (n > 10) throw DomainError("n = " + std::to_string(n) + " exceeds the resource cap 10");
  rec.convention("quadratic_form", "c1 X1^2 + ... + cn Xn^2");
  rec.convention("pairing", "E(v, w) = Tr(alpha iota(v) w), Tr of right multiplication on C+");
  HighdimCheck h = highdim_weil_check(KSInput::diagonal(c));
  rec.witness("m", h.m);
  rec.witness("t", h.t);
  rec.witness("z_square", js(h.z_square));
  rec.witness("d", js(h.d));
  rec.witness("scale", js(h.scale));
  rec.witness("basis_size", h.basis_size);
  rec.witness("weil_eigentype", js(h.multiplicities));
  rec.witness("summand_dim", h.summand_dim);
  rec.witness("symplectic_blocks", js(h.symplectic_blocks));
  rec.witness("H_normal", js(h.normal_form));
  rec.witness("discriminant", h.discriminant.to_string());
  rec.witness("summand_eigentype", js(h.summand_eigentype));
  Json seeds = Json::array();
  for (const auto& s : h.seeds) seeds.push_back(s.to_string());
  rec.element("seeds", seeds);
  Json factors = Json::array();
  for (Blade b : h.idempotent_factors) factors.push_back(b);
  rec.element("idempotent_factor_masks", factors);
  rec.check("z_square", h.z_square_ok, js(h.z_square));
  rec.check("basis_independent", h.basis_independent && h.basis_size == (std::size_t{1} << (n - 1)), h.basis_size);
  rec.check("j_blocks", h.j_blocks_ok);
  rec.check("holomorphic_basis", h.holomorphic_ok);
  rec.check("z_blocks", h.z_blocks_ok);
  rec.check("weil_eigentype_t_t", h.multiplicities == std::make_pair(h.t, h.t), js(h.multiplicities));
  if (h.dense_multiplicities)
    rec.check("weil_eigentype_dense", *h.dense_multiplicities == h.multiplicities, js(*h.dense_multiplicities));
  rec.check("symplectic_basis", h.symplectic_ok, js(h.symplectic_blocks));
  rec.check("H_normal_form", h.normal_form_ok, js(h.normal_form));
  rec.check("discriminant_one", h.discriminant.trivial, h.discriminant.to_string());
  rec.check("summand_weil_type", h.summand_eigentype.first == h.summand_eigentype.second, js(h.summand_eigentype));
  rec.check("alpha_gn_terms_irrelevant", h.alpha_term_independent);
  rec.check("z_pairing_vanishes", h.z_pairing_vanishes);
}

void check_roundtrip(const CheckRequest& req, Recorder& rec) {
  Params p(req, {"l", "m"});
  BigRational l = p.rational("l"), m = p.rational("m");
  require_negative(l, "l");
  require_negative(m, "m");
  KSInput in = KSInput::fourfold(l, m);
  KSVariety ks = build_ks(in);
  SubfoldModel sub = beta_split(ks);
  SubfoldPolarization sp = subfold_polarization(ks, sub);
  rec.check("H_normal_form", sp.normal_form_ok, js(sp.normal_form));
  RoundTrip rt = roundtrip_form_identity(in, sp.data);
  rec.witness("d", js(sp.data.d()));
  rec.witness("t_form", js(rt.t_form));
  rec.witness("doubled_input", js(rt.doubled_input));
  rec.witness("t_invariants", js(rt.t_invariants));
  rec.witness("input_invariants", js(rt.input_invariants));
  rec.check("t_form_equals_twice_input", rt.equivalent, js(rt.t_invariants));
}

void check_forms(const CheckRequest& req, Recorder& rec) {
  Params p(req, {"d"});
  BigRational d = p.rational("d");
  require_positive(d, "d");
  ImagQuadratic k(d);
  const TowerScalar& phi = k.phi();
  TowerScalar one(1), zero(0);

  // A unimodular diag(1, 1, -1, -1) in a skewed basis returns to its normal form.
  MatrixF skew = MatrixF::from_rows({{one, phi, zero, one},
                                     {zero, one, one + phi, zero},
                                     {zero, zero, TowerScalar(2), phi},
                                     {zero, zero, zero, one}});
  HermitianSpace unit(rational_diagonal(ints({1, 1, -1, -1})), k);
  HermitianSpace skewed(unit.transformed(skew), k);
  HermitianDiagonalization hd = diagonalize_hermitian(skewed);
  rec.witness("skewed_gram", js(skewed.gram()));
  rec.witness("skewed_normal", js(hd.reduced));
  rec.check("hermitian_normal_form", hd.reduced == ints({1, 1, -1, -1}), js(hd.reduced));
  rec.check("hermitian_congruence", skewed.transformed(hd.p) == rational_diagonal(hd.reduced));

  // Non-unit entries: congruence and determinant class are preserved.
  HermitianSpace rough(rational_diagonal(ints({2, 3, -5, -7})), k);
  HermitianDiagonalization rd = diagonalize_hermitian(rough);
  BigRational det(1);
  for (const auto& x : rd.reduced) det = det * x;
  rec.witness("rough_normal", js(rd.reduced));
  rec.check("rough_congruence", rough.transformed(rd.p) == rational_diagonal(rd.reduced));
  rec.check("rough_determinant_class", is_norm(det / BigRational(210), d).is_norm, js(det));

  // Frobenius basis of the polarization of a diagonal Hermitian form.
  BilinearSpace e = e_from_h(unit);
  SymplecticBasis sb = symplectic_basis(e);
  std::vector<MatrixF> blocks;
  for (const auto& a : sb.block_values) {
    MatrixF b(2, 2);
    b(0, 1) = a;
    b(1, 0) = -a;
    blocks.push_back(b);
  }
  rec.witness("symplectic_blocks", js(sb.block_values));
  rec.check("symplectic_basis", congruence(e.gram(), sb.p) == block_diagonal(blocks), js(sb.block_values));

  // The T-form witness diagonal against Hyp + Hyp + [-2] + [-2d].
  MatrixF hyp = hyperbolic_plane();
  MatrixF target = block_diagonal({hyp, hyp, rational_diagonal({BigRational(-2)}), rational_diagonal({BigRational(-2) * d})});
  MatrixF witness = rational_diagonal({BigRational(2), BigRational(-2), BigRational(2) * d, BigRational(-2) * d, BigRational(-2), BigRational(-2) * d});
  BilinearSpace tb(target, FormKind::symmetric), wb(witness, FormKind::symmetric);
  rec.witness("hyp_form_invariants", js(form_invariants(tb)));
  rec.check("witness_equivalent_to_hyp_form", rationally_equivalent(tb, wb), js(form_invariants(wb)));
  SymmetricDiagonalization sd = diagonalize_symmetric(tb);
  rec.check("symmetric_diagonalization", congruence(target, sd.p) == MatrixF::diagonal(sd.diagonal), js(sd.diagonal));

  // Norm preimages exist exactly for norms.
  Json norms = Json::object();
  bool ok = true;
  for (long a : {-1L, 2L, 3L, 5L, 7L, 11L}) {
    BigRational q(a);
    bool expected = is_norm(q, d).is_norm;
    std::optional<TowerScalar> pre = k.norm_preimage(q);
    ok = ok && pre.has_value() == expected && (!pre || k.norm(*pre) == q);
    norms[q.to_string()] = pre ? Json(pre->to_string()) : Json(nullptr);
  }
  rec.witness("norm_preimages", norms);
  rec.check("norm_preimages", ok, norms);
}

const std::map<std::string, std::function<void(const CheckRequest&, Recorder&)>>& registry() {
  static const std::map<std::string, std::function<void(const CheckRequest&, Recorder&)>> r{
      {"prop31", check_prop31}, {"fourfold", check_fourfold}, {"highdim", check_highdim},
      {"roundtrip", check_roundtrip}, {"forms", check_forms}};
  return r;
}

Status status_from_assertions(const std::vector<Assertion>& as) {
  for (const auto& a : as)
    if (!a.passed) return Status::fail;
  return Status::pass;
}

std::string config_context(std::size_t index, const CheckRequest& req) {
  std::string s = "check " + std::to_string(index + 1) + " (" + req.check_id;
  for (const auto& [k, v] : req.params) s += " " + k + "=" + v;
  return s + ")";
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string to_string(Status s) {
  switch (s) {
    case Status::pass:
      return "pass";
    case Status::fail:
      return "fail";
    case Status::error:
      return "error";
    case Status::inconclusive:
      return "inconclusive";
  }
  return "error";
}

int exit_code(Status s) {
  switch (s) {
    case Status::pass:
      return 0;
    case Status::fail:
      return 1;
    case Status::error:
      return 2;
    case Status::inconclusive:
      return 3;
  }
  return 2;
}

Status combine(Status a, Status b) {
  auto rank = [](Status s) {
    switch (s) {
      case Status::pass:
        return 0;
      case Status::inconclusive:
        return 1;
      case Status::fail:
        return 2;
      case Status::error:
        return 3;
    }
    return 3;
  };
  return rank(a) >= rank(b) ? a : b;
}

std::optional<std::string> CheckRequest::find(const std::string& key) const {
  std::optional<std::string> out;
  for (const auto& [k, v] : params)
    if (k == key) out = v;
  return out;
}

Json VerificationReport::to_json(bool timing) const {
  Json p = Json::object();
  for (const auto& [k, v] : params) p[k] = v;
  Json as = Json::array();
  for (const auto& a : assertions) as.push_back(Json{{"name", a.name}, {"passed", a.passed}, {"witness", a.witness}});
  Json out{{"check", check_id}, {"params", p}, {"status", to_string(status)}};
  if (!message.empty()) out["message"] = message;
  out["conventions"] = conventions;
  out["witnesses"] = witnesses;
  out["elements"] = elements;
  out["assertions"] = as;
  out["counterexample"] = counterexample ? *counterexample : Json(nullptr);
  if (timing) out["elapsed_ms"] = elapsed_ms;
  return out;
}

const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> ids{"prop31", "fourfold", "highdim", "roundtrip", "forms", "suite"};
  return ids;
}

VerificationReport run_check(const CheckRequest& req) {
  VerificationReport r;
  r.check_id = req.check_id;
  r.params = req.params;
  auto start = std::chrono::steady_clock::now();
  try {
    if (req.check_id == "suite") throw DomainError("suite is run through run_suite");
    auto it = registry().find(req.check_id);
    if (it == registry().end()) throw DomainError("unknown check id '" + req.check_id + "'");
    Recorder rec(r);
    it->second(req, rec);
    r.status = status_from_assertions(r.assertions);
  } catch (const SearchExhausted& e) {
    r.status = Status::inconclusive;
    r.message = e.what();
  } catch (const VerificationFailure& e) {
    r.status = Status::fail;
    r.message = e.what();
    if (!r.counterexample) r.counterexample = Json{{"assertion", "internal_identity"}, {"witness", e.what()}};
  } catch (const std::exception& e) {
    r.status = Status::error;
    r.message = e.what();
  }
  r.elapsed_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  return r;
}

SuiteConfig parse_config(std::istream& in) {
  SuiteConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto where = [&] { return "config line " + std::to_string(lineno) + ": "; };
    if (line.front() == '[') {
      bool dbl = line.rfind("[[", 0) == 0;
      std::size_t open = dbl ? 2 : 1;
      if (line.size() < 2 * open + 1 || line.substr(line.size() - open) != std::string(open, ']'))
        throw DomainError(where() + "malformed section header '" + line + "'");
      cfg.checks.push_back({trim(line.substr(open, line.size() - 2 * open)), {}});
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw DomainError(where() + "expected key = value");
    if (cfg.checks.empty()) throw DomainError(where() + "key outside a check section");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (key.empty()) throw DomainError(where() + "empty key");
    cfg.checks.back().params.emplace_back(key, value);
  }
  return cfg;
}

SuiteConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DomainError("cannot read config '" + path + "'");
  return parse_config(f);
}

std::vector<Json> SuiteResult::lines(bool timing) const {
  std::vector<Json> out;
  for (const auto& r : reports) out.push_back(r.to_json(timing));
  std::size_t counts[4] = {0, 0, 0, 0};
  for (const auto& r : reports) ++counts[exit_code(r.status)];
  Json summary{{"check", "suite"},
               {"status", to_string(status)},
               {"checks", reports.size()},
               {"passed", counts[0]},
               {"failed", counts[1]},
               {"errors", counts[2]},
               {"inconclusive", counts[3]},
               {"warnings", warnings}};
  if (!message.empty()) summary["message"] = message;
  out.push_back(summary);
  return out;
}

SuiteResult run_suite(const SuiteConfig& config) {
  SuiteResult res;
  if (config.checks.empty()) res.warnings.push_back("config declares no checks");
  for (std::size_t i = 0; i < config.checks.size(); ++i) {
    VerificationReport r = run_check(config.checks[i]);
    if (r.status == Status::error) {
      std::string ctx = config_context(i, config.checks[i]) + ": " + r.message;
      if (res.message.empty()) res.message = ctx;
    }
    res.status = combine(res.status, r.status);
    res.reports.push_back(std::move(r));
  }
  return res;
}

SuiteResult run_suite(const std::string& config_path) {
  try {
    return run_suite(load_config(config_path));
  } catch (const std::exception& e) {
    SuiteResult res;
    res.status = Status::error;
    res.message = e.what();
    return res;
  }
}

}  // namespace weilks
