#pragma once

// Kuga-Satake data for a weight-2 Hodge structure of type (1, n-2, 1): the
// even Clifford algebra with complex structure J (left multiplication) and
// polarization E(v, w) = Tr(alpha iota(v) w); the fourfold split off by the
// idempotent beta for n = 6; and the Weil-type and discriminant checks for
// n = 2 mod 4.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "weilks/clifford.hpp"
#include "weilks/weilhodge.hpp"

namespace weilks {

struct KSInput {
  enum class Kind { diagonal, hyperbolic };
  Kind kind = Kind::diagonal;
  // diagonal: Q = c_1 X_1^2 + ... + c_n X_n^2 with c_1, c_2 > 0 > c_3, ..., c_n.
  std::vector<BigRational> coeffs;
  // hyperbolic (n = 6): Q = Hyp + Hyp + [l] + [m] in the basis f_1..f_6.
  BigRational l, m;

  static KSInput diagonal(std::vector<BigRational> coeffs);
  static KSInput fourfold(const BigRational& l, const BigRational& m);

  std::size_t n() const { return kind == Kind::hyperbolic ? 6 : coeffs.size(); }
  MatrixF gram() const;
  // Columns: an orthogonal basis e_1..e_n (generator basis when diagonal;
  // e_1 = f_1 + f_2, e_2 = f_1 - f_2, e_3 = f_3 + f_4, e_4 = f_3 - f_4,
  // e_5 = f_5, e_6 = f_6 otherwise).
  MatrixF orthogonal_basis() const;
  std::string to_string() const;
};

struct KSVariety {
  KSInput input;
  CliffordAlgebra algebra;
  std::vector<Blade> lattice;  // even blades, the integral basis of C^+
  CliffordElement j;
  CliffordElement alpha;
  CliffordElement z;  // e_1 ... e_n
  TowerScalar z_square;
  BigRational d;      // z^2 = -d * scale^2 with d squarefree
  BigRational scale;
  MatrixF e;  // E on the lattice
  std::size_t e_rank = 0;
  // G(v, w) = E(v, J w) is certified on `positivity_basis`: the lattice for
  // diagonal input; C^+ beta, beta = f1 f2 f3 f4 / 4, for the fourfold, where
  // alpha = -f1 f3 makes E degenerate on the rest (f1 f3 is in its radical).
  std::vector<CliffordElement> positivity_basis;
  DefinitenessCertificate positivity;
  std::size_t alpha_candidates_tried = 0;
  std::size_t complex_dim() const { return lattice.size() / 2; }
};

// E(x, y) = Tr(alpha iota(x) y).
TowerScalar ks_pairing(const CliffordElement& alpha, const CliffordElement& x, const CliffordElement& y);

// Validates the signature, builds J and alpha (alpha = -f1 f3 for the
// fourfold; otherwise the first of +-g_i g_j, i < j < n, with E(v, Jv) > 0),
// certifies positivity of G and fills E. Throws DomainError for a wrong
// signature and VerificationFailure when no candidate alpha works.
KSVariety build_ks(const KSInput& input);

// ---------------------------------------------------------------------------
// The fourfold (n = 6, hyperbolic input).

struct SubfoldModel {
  CliffordElement beta;
  std::size_t kernel_dim = 0;
  std::size_t image_dim = 0;
  std::vector<CliffordElement> basis;  // eps_1..eps_4, delta_1..delta_4
  std::vector<std::string> labels;
  bool basis_in_image = false;
  bool basis_spans_image = false;
  std::vector<std::size_t> idempotent_dims;  // four-idempotent cross-check
  MatrixF j;    // left multiplication by J on the basis (columns)
  MatrixF z;    // left multiplication by z
  MatrixF phi;  // z / 4, phi^2 = -lm
  MatrixF e;    // E on the basis
  BigRational d;  // lm
};

SubfoldModel beta_split(const KSVariety& ks);

struct ActionTables {
  MatrixF j_expected, z_expected;
  bool j_matches = false;
  bool z_matches = false;
  // u_1 = -i eps_1 + eps_2, u_2 = -i delta_1 + delta_2, u_3 = -i eps_3 + eps_4,
  // u_4 = -i delta_3 + delta_4 in subfold coordinates.
  std::vector<Vec> holomorphic;
  bool holomorphic_is_i_eigenspace = false;
  MatrixF z_holomorphic, z_holomorphic_expected;
  bool z_holomorphic_matches = false;
  std::pair<std::size_t, std::size_t> multiplicities;  // of +4 sqrt(-lm), -4 sqrt(-lm)
};

ActionTables action_tables(const KSVariety& ks, const SubfoldModel& sub);

struct SubfoldPolarization {
  MatrixF m_block;  // [[0, -64], [64, 0]]
  MatrixF e, e_expected;  // blockdiag(M, -2l M, lm M, -2m M)
  bool e_matches = false;
  MatrixF h, h_expected;  // on eps_1..eps_4: blockdiag(phi M, -2l phi M)
  bool h_matches = false;
  WeilHodgeData data;       // normalized, with J
  std::vector<BigRational> normal_form;
  bool normal_form_ok = false;  // diag(1, 1, -1, -1)
  DiscriminantClass discriminant;
  std::pair<std::size_t, std::size_t> eigentype;
};

// Weil-type data of the fourfold: K = Q(phi), phi = z/4, E and J restricted.
WeilHodgeData subfold_weil_data(const SubfoldModel& sub);
SubfoldPolarization subfold_polarization(const KSVariety& ks, const SubfoldModel& sub);

// The form H~ restricted to T (the +1 eigenspace of t on the K-exterior
// square of the fourfold, a = 1) against 2 * (input form).
struct RoundTrip {
  MatrixF t_form;
  MatrixF doubled_input;
  FormInvariants t_invariants;
  FormInvariants input_invariants;
  bool equivalent = false;
};

// `data` must be the normalized fourfold data (H = diag(1, 1, -1, -1)).
RoundTrip roundtrip_form_identity(const KSInput& input, const WeilHodgeData& data);

struct MatrixAlgebraCheck {
  std::vector<CliffordElement> center;
  bool center_is_one_z = false;
  TowerScalar z_square;
  bool z_square_ok = false;  // -16 lm
  std::size_t regular_rank = 0;  // of x -> (left mult by x on Im beta)
  bool injective = false;
  bool k_linear = false;          // each left multiplication commutes with z
  std::size_t commutant_dim = 0;  // dim of K-linear endomorphisms of Im beta
  bool dimension_match = false;   // 32 = 4^2 * 2
  std::vector<std::size_t> summand_dims;
  bool summands_direct = false;
  bool summands_isomorphic = false;  // each summand is C^+ beta up to an isomorphism
};

MatrixAlgebraCheck verify_matrix_algebra(const KSVariety& ks, const SubfoldModel& sub);

// ---------------------------------------------------------------------------
// Spin conjugates J' = a J iota(a), a = v w / sqrt(Q(v) Q(w)).

struct SpinConjugate {
  bool accepted = false;
  std::string reason;  // why a candidate was rejected
  std::optional<CliffordElement> a;
  std::optional<CliffordElement> j_prime;
  bool norm_one = false;         // a iota(a) = 1
  bool j_prime_squared = false;  // J'^2 = -1
  bool pairing_identity = false; // E(x, J'x) = E(y, Jy), y = iota(a) x, on the lattice
  bool positive = false;         // E(v, J'w) positive definite on ks.positivity_basis
  std::optional<std::pair<std::size_t, std::size_t>> eigentype;
};

// v, w are coordinate vectors in the generator basis. With a subfold the
// eigentype is recomputed there; otherwise on all of C^+ when n <= 6.
SpinConjugate spin_conjugate(const KSVariety& ks, const Vec& v, const Vec& w,
                             const SubfoldModel* sub = nullptr);

// Deterministic sample of admissible pairs (small integer vectors drawn from
// a seeded generator) until `count` are accepted.
std::vector<SpinConjugate> sample_spin_conjugates(const KSVariety& ks, std::size_t count, std::uint64_t seed,
                                                  const SubfoldModel* sub = nullptr);

// Multiplicities of +sqrt(-d) and -sqrt(-d) for z_normalized on the
// i-eigenspace of left multiplication by j, computed on all of C^+.
std::pair<std::size_t, std::size_t> dense_weil_multiplicities(const KSVariety& ks, const CliffordElement& j);

// ---------------------------------------------------------------------------
// n = 2 mod 4.

struct HighdimCheck {
  std::size_t n = 0, m = 0, t = 0;
  TowerScalar z_square;
  BigRational d, scale;
  bool z_square_ok = false;  // z^2 = (-1)^{n(n-1)/2} prod c_i = -d scale^2
  std::vector<CliffordElement> seeds;  // g~_1 = 1, g~_2, ...
  std::size_t basis_size = 0;
  bool basis_independent = false;
  bool j_blocks_ok = false;  // J on (g, Jg, zg, Jzg) is the standard block
  bool z_blocks_ok = false;  // z' = z/scale on (i g + J g, i z'g + J z'g) is [[0, -d], [1, 0]]
  bool holomorphic_ok = false;
  std::pair<std::size_t, std::size_t> multiplicities;
  std::optional<std::pair<std::size_t, std::size_t>> dense_multiplicities;  // n <= 6
  // A-summand C^+ beta.
  std::vector<Blade> idempotent_factors;
  std::size_t summand_dim = 0;
  Vec symplectic_blocks;
  bool symplectic_ok = false;
  std::vector<BigRational> normal_form;
  bool normal_form_ok = false;  // diag(1, ..., 1, -1, ..., -1)
  DiscriminantClass discriminant;
  std::pair<std::size_t, std::size_t> summand_eigentype;
  bool alpha_term_independent = false;  // adding g_n-terms to alpha keeps E on g_n-free blades
  bool z_pairing_vanishes = false;      // E(z x, y) = 0 on g_n-free blades
};

// Throws DomainError when n is not 2 mod 4 or n > 10.
HighdimCheck highdim_weil_check(const KSInput& input);

}  // namespace weilks
