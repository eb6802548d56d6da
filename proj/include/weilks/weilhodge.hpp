#pragma once

// Weil-type linear algebra on H^1 = K^r, K = Q(phi), phi^2 = -d: the
// Hermitian form H and polarization E, the embedding of the K-exterior
// square into the Q-exterior square, the operator t with t^2 = a on the
// six-dimensional K-space (r = 4), the T+/T- splitting and Hodge types
// computed from a complex structure J.
//
// Coordinates. Data is kept in a frame: a K-basis u_1..u_r with Q-basis
// (u_1, phi u_1, ..., u_r, phi u_r). A K-vector sum (x_k + y_k phi) u_k has
// Q-coordinates (x_1, y_1, ..., x_r, y_r). Exterior squares use the basis
// e_i ^ e_j, i < j, in lexicographic order.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "weilks/exactlinalg.hpp"

namespace weilks {

struct HodgeType {
  std::size_t p20 = 0;
  std::size_t p11 = 0;
  std::size_t p02 = 0;
  std::size_t total() const { return p20 + p11 + p02; }
  std::string to_string() const;
  friend bool operator==(const HodgeType&, const HodgeType&) = default;
};

// Q-matrix of multiplication by phi in a standard frame of K-rank r.
MatrixF standard_phi(std::size_t r, const BigRational& d);

// K-coordinates of a frame Q-vector and back.
Vec to_k_coords(const ImagQuadratic& k, const Vec& x);
Vec from_k_coords(const ImagQuadratic& k, const Vec& xk);

// E(x, y) is the phi-coefficient of H(x, y); verifies
// H(x, y) = E(phi x, y) + phi E(x, y) on all basis pairs.
BilinearSpace e_from_h(const HermitianSpace& h);

class WeilHodgeData {
 public:
  static WeilHodgeData from_hermitian(const HermitianSpace& h);
  // Arbitrary Q-coordinates: phi acts by `phi` (phi^2 = -d) and E satisfies
  // E(phi x, phi y) = d E(x, y). A frame is chosen greedily from the
  // standard basis vectors.
  static WeilHodgeData from_phi_action(const BigRational& d, const MatrixF& phi, const MatrixF& e,
                                       const std::optional<MatrixF>& j = std::nullopt);

  // Validates J^2 = -1, J phi = phi J, E(Jx, Jy) = E(x, y) and, unless
  // switched off, positive definiteness of E(x, J y). J is given in frame
  // coordinates.
  WeilHodgeData with_complex_structure(const MatrixF& j, bool require_positive = true) const;
  // For diagonal H: J u_k = -sign(h_k) phi u_k / sqrt(d), which satisfies
  // the Riemann relations and has Weil eigentype when H has signature (r/2, r/2).
  WeilHodgeData with_standard_complex_structure() const;

  // Change to the frame whose K-basis has K-coordinates the columns of p.
  WeilHodgeData in_frame(const MatrixF& p) const;
  // Frame in which H = diag(a, 1, ..., 1, -1, ..., -1), a > 0.
  WeilHodgeData normalized() const;

  const ImagQuadratic& field() const { return k_; }
  const BigRational& d() const { return k_.d(); }
  std::size_t k_rank() const { return h_.dim(); }
  const MatrixF& phi_matrix() const { return phi_; }
  const HermitianSpace& h() const { return h_; }
  const BilinearSpace& e() const { return e_; }
  const std::optional<MatrixF>& complex_structure() const { return j_; }
  // Frame vectors (columns, interleaved u_k, phi u_k) in the coordinates the
  // data was created with.
  const MatrixF& frame() const { return frame_; }

 private:
  WeilHodgeData(ImagQuadratic k, MatrixF phi, HermitianSpace h, BilinearSpace e, std::optional<MatrixF> j,
                MatrixF frame);
  ImagQuadratic k_;
  MatrixF phi_;
  HermitianSpace h_;
  BilinearSpace e_;
  std::optional<MatrixF> j_;
  MatrixF frame_;
};

// dim of the i-eigenspace of J inside the +phi and -phi eigenspaces
// (sigma(phi) = phi with positive imaginary part). Weil type (r/2, r/2).
std::pair<std::size_t, std::size_t> weil_eigentype(const WeilHodgeData& w);

// ---------------------------------------------------------------------------
// Exterior squares.

std::vector<std::pair<std::size_t, std::size_t>> wedge_pairs(std::size_t n);
Vec wedge(const Vec& x, const Vec& y);
MatrixF wedge2_power(const MatrixF& a);       // x ^ y -> Ax ^ Ay
MatrixF wedge2_derivation(const MatrixF& a);  // x ^ y -> Ax ^ y + x ^ Ay
MatrixF wedge2_form(const MatrixF& e);        // (x^y, z^w) -> E(x,z)E(y,w) - E(x,w)E(y,z)

struct WedgeKSpace {
  std::size_t k_rank = 0;
  BigRational d;
  // K-basis c_k = u_p ^_K u_q. For r = 4 the order is a1, a2, a3, b1, b2, b3
  // with frame (v1, w1, v2, w2) = (u1, u2, u3, u4).
  std::vector<std::pair<std::size_t, std::size_t>> k_pairs;
  std::vector<std::string> labels;
  // Columns: i(c_1), i(phi c_1), i(c_2), ... in exterior-square coordinates.
  MatrixF embedding;
  MatrixF phi;  // phi on the K-exterior square (standard, interleaved)
  std::size_t k_dim() const { return k_pairs.size(); }
};

WedgeKSpace build_wedge(std::size_t k_rank, const BigRational& d);
// Coordinates of x ^_K y on the interleaved Q-basis of the K-exterior square,
// for frame Q-vectors x, y.
Vec wedge_k(const WedgeKSpace& w, const Vec& x, const Vec& y);
// (1/2) x ^ y - (1/2d) phi x ^ phi y, straight from the definition.
Vec embed_i(const WedgeKSpace& w, const Vec& x, const Vec& y);

struct Phi2Split {
  MatrixF phi2;  // phi acting on the Q-exterior square
  std::vector<Vec> plus;
  std::vector<Vec> minus;
  bool minus_equals_image = false;
  std::size_t image_rank = 0;
};

// Throws VerificationFailure when the dimensions disagree with r^2 and r(r-1).
Phi2Split phi2_eigenspaces(const WedgeKSpace& w);

// Operator induced on S = Im(i) by a derivation of H^1, in K-exterior-square
// coordinates.
MatrixF on_s(const WedgeKSpace& w, const MatrixF& derivation);
// Dimensions of the 2i, 0, -2i eigenspaces of a weight-2 derivation.
HodgeType weight2_type(const MatrixF& d);
HodgeType s_hodge_type(const WeilHodgeData& data, const WedgeKSpace& w);

// ---------------------------------------------------------------------------
// The operator t (r = 4, H = diag(a, 1, -1, -1)).

struct TOperator {
  BigRational a;
  MatrixF h_tilde;  // Hermitian Gram matrix on c_1..c_6 over K
  MatrixF gamma;    // gamma(c_m ^ c_k), with gamma(a1 ^ b1) = 1
  MatrixF t_k;      // t(c_l) = sum_m t_k(m, l) c_m
  MatrixF t;        // 12 x 12 rational matrix of the antilinear map
};

TOperator t_operator(const WeilHodgeData& data, const WedgeKSpace& w);
// H~(v, w) for Q-coordinate vectors of the K-exterior square.
TowerScalar h_tilde_value(const WeilHodgeData& data, const TOperator& t, const Vec& v, const Vec& w);
// gamma(x ^_K y) for Q-coordinate vectors.
TowerScalar gamma_value(const WeilHodgeData& data, const TOperator& t, const Vec& x, const Vec& y);

struct TChecks {
  bool h_tilde_hermitian = false;
  bool h_tilde_diagonal = false;  // diag(a, -a, -a, 1, -1, -1)
  bool gamma_identity = false;    // H~(v, w) = gamma(t(w) ^ v) on basis pairs
  bool t_a1 = false;              // t(a1) = a b1
  bool t_b1 = false;              // t(b1) = a1
  bool t_squared = false;         // t^2 = a
};

TChecks check_t(const WeilHodgeData& data, const WedgeKSpace& w, const TOperator& t);

struct QuaternionRelations {
  bool phi_squared = false;      // phi^2 = -d
  bool t_squared = false;        // t^2 = a
  bool anticommute = false;      // phi t = -t phi
  bool t_commutes_j2 = false;    // with J ^ J on S (needs J)
  bool t_commutes_hodge = false; // with the weight-2 derivation on S (needs J)
  bool phi_commutes_j2 = false;
  bool has_j = false;
};

QuaternionRelations quaternion_relations(const WeilHodgeData& data, const WedgeKSpace& w, const TOperator& t);

struct TSplit {
  std::vector<Vec> plus;   // Ker(t - 1)
  std::vector<Vec> minus;  // Ker(t + 1)
  bool phi_maps_plus_to_minus = false;
  bool imaginary_part_vanishes = false;
  MatrixF restricted;       // H~ on the basis of T+, rational symmetric
  MatrixF wedge_e;          // wedge^2 E on the same basis
  bool wedge_e_identity = false;  // wedge^2 E = -(1/2d) H~ on T x T
  std::vector<Vec> witness_basis;  // a1+b1, a2-b2, phi(a1-b1), phi(a2+b2), a3-b3, phi(a3+b3)
  MatrixF witness_gram;            // diag(2, -2, 2d, -2d, -2, -2d)
  bool witness_in_plus = false;
  bool witness_diagonal = false;
  bool equivalent_to_hyp_form = false;  // Hyp + Hyp + [-2] + [-2d]
};

// Needs a = 1; throws DomainError otherwise.
TSplit split_t(const WeilHodgeData& data, const WedgeKSpace& w, const TOperator& t);
HodgeType t_hodge_type(const WeilHodgeData& data, const WedgeKSpace& w, const TSplit& s);

// Q = -wedge^2 E on S: positive definite on the real points of
// S^{2,0} + S^{0,2}, negative definite on those of S^{1,1}.
struct SignLaw {
  std::size_t dim_20_02 = 0;
  std::size_t dim_11 = 0;
  bool positive_on_20_02 = false;
  bool negative_on_11 = false;
};

SignLaw sign_law(const WeilHodgeData& data, const WedgeKSpace& w, const std::vector<Vec>& subspace = {});

// psi = wedge^2 E with h(i) = J ^ J on S (or on a J-stable subspace):
// invariance, psi(v, h(i) w) = psi(w, h(i) v), psi(v, h(i) v) > 0.
struct PolarizationAxioms {
  bool invariant = false;
  bool symmetric = false;
  bool positive = false;
};

PolarizationAxioms polarization_axioms(const WeilHodgeData& data, const WedgeKSpace& w,
                                       const std::vector<Vec>& subspace = {});

// ---------------------------------------------------------------------------
// Discriminant and comparison.

struct DiscriminantClass {
  BigRational value;  // (-1)^{r/2} det H
  SquareClass square_class{BigRational(1)};
  bool trivial = false;  // value is a norm from K
  std::string to_string() const;  // "1" when trivial, else the square class
};

DiscriminantClass discriminant(const WeilHodgeData& data);

enum class CompareSign { plus, minus, inconclusive };

struct WeilComparison {
  CompareSign sign = CompareSign::inconclusive;
  std::optional<MatrixF> u;  // intertwiner used, frame coordinates
};

// U maps frame coordinates of `a` to those of `x`. Without U the normalized
// frames are matched, also trying the permutations inside the +1 and -1
// blocks. Requires equal d, discriminant one and complex structures on both.
WeilComparison compare_weil_structures(const WeilHodgeData& a, const WeilHodgeData& x,
                                       const std::optional<MatrixF>& u = std::nullopt);

std::string to_string(CompareSign s);

}  // namespace weilks
