#include "weilks/clifford.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <mutex>
#include <unordered_map>

namespace weilks {

int grade(Blade b) { return std::popcount(b); }

namespace detail {

struct CliffordImpl {
  int n = 0;
  MatrixF gram;
  bool diagonal = true;
  std::string prefix;
  std::vector<BigRational> norms;     // diagonal of the Gram matrix
  std::vector<std::vector<BigRational>> b;  // full Gram matrix

  std::once_flag ortho_once;
  std::unique_ptr<SymmetricDiagonalization> ortho;

  mutable std::mutex mu;
  std::unordered_map<std::uint64_t, std::vector<std::pair<Blade, BigRational>>> products;
  std::unordered_map<Blade, std::vector<std::pair<Blade, BigRational>>> reverses;
  std::unordered_map<Blade, BigRational> traces;
  std::unordered_map<std::uint64_t, std::vector<std::pair<Blade, BigRational>>> gen_products;
};

}  // namespace detail

namespace {

using Terms = std::vector<std::pair<Blade, BigRational>>;

// Sign of reordering g_a g_b into increasing order: (-1)^{#(i in a, j in b, i > j)}.
int reorder_sign(Blade a, Blade b) {
  int s = 0;
  a >>= 1;
  while (a) {
    s += std::popcount(a & b);
    a >>= 1;
  }
  return (s & 1) ? -1 : 1;
}

BigRational norm_product(const detail::CliffordImpl& im, Blade common) {
  BigRational p(1);
  while (common) {
    int i = std::countr_zero(common);
    p *= im.norms[static_cast<std::size_t>(i)];
    common &= common - 1;
  }
  return p;
}

void accumulate(Terms& acc, Blade b, const BigRational& c) {
  if (c.is_zero()) return;
  for (auto& [bb, cc] : acc)
    if (bb == b) {
      cc += c;
      return;
    }
  acc.emplace_back(b, c);
}

void prune(Terms& t) {
  t.erase(std::remove_if(t.begin(), t.end(), [](const auto& p) { return p.second.is_zero(); }), t.end());
  std::sort(t.begin(), t.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
}

// g_i * m for a general Gram matrix (i 0-based), caller holds the lock.
const Terms& gen_mul(detail::CliffordImpl& im, int i, Blade m) {
  std::uint64_t key = (static_cast<std::uint64_t>(i) << 32) | m;
  auto it = im.gen_products.find(key);
  if (it != im.gen_products.end()) return it->second;
  Terms out;
  if (m == 0) {
    out.emplace_back(Blade{1} << i, BigRational(1));
  } else {
    int j = std::countr_zero(m);
    Blade rest = m & (m - 1);
    if (i < j) {
      out.emplace_back(m | (Blade{1} << i), BigRational(1));
    } else if (i == j) {
      out.emplace_back(rest, im.b[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)]);
    } else {
      // g_i g_j rest = -g_j (g_i rest) + 2 B_ij rest; g_i rest has indices > j.
      Terms inner = gen_mul(im, i, rest);
      for (const auto& [bb, c] : inner) accumulate(out, bb | (Blade{1} << j), -c);
      const BigRational& bij = im.b[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (!bij.is_zero()) accumulate(out, rest, BigRational(2) * bij);
    }
  }
  prune(out);
  return im.gen_products.emplace(key, std::move(out)).first->second;
}

Terms general_product(detail::CliffordImpl& im, Blade a, Blade b) {
  // a = g_{i1} ... g_{ik}; multiply from the right end.
  Terms cur{{b, BigRational(1)}};
  for (int i = im.n - 1; i >= 0; --i) {
    if (!(a & (Blade{1} << i))) continue;
    Terms next;
    for (const auto& [bb, c] : cur)
      for (const auto& [rb, rc] : gen_mul(im, i, bb)) accumulate(next, rb, c * rc);
    prune(next);
    cur = std::move(next);
  }
  return cur;
}

}  // namespace

// ---------------------------------------------------------------------------
// CliffordAlgebra

CliffordAlgebra CliffordAlgebra::from_gram(const MatrixF& gram, std::string prefix) {
  if (!gram.is_square() || !gram.is_rational()) throw DomainError("Clifford Gram matrix must be square and rational");
  int n = static_cast<int>(gram.rows());
  if (n < 1 || n > kMaxGenerators) throw DomainError("Clifford algebra needs 1 <= n <= 20 generators");
  BilinearSpace check(gram, FormKind::symmetric);
  auto im = std::make_shared<detail::CliffordImpl>();
  im->n = n;
  im->gram = gram;
  im->prefix = std::move(prefix);
  im->b.assign(static_cast<std::size_t>(n), std::vector<BigRational>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      im->b[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          gram(static_cast<std::size_t>(i), static_cast<std::size_t>(j)).to_rational();
      if (i != j && !im->b[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].is_zero()) im->diagonal = false;
    }
  for (int i = 0; i < n; ++i) im->norms.push_back(im->b[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)]);
  if (im->diagonal)
    for (int i = 0; i < n; ++i)
      if (im->norms[static_cast<std::size_t>(i)].is_zero())
        throw DegenerateForm("diagonal Clifford norms must be nonzero", static_cast<std::size_t>(i));
  CliffordAlgebra alg(im);
  alg.orthogonal_basis();  // rejects degenerate forms
  return alg;
}

CliffordAlgebra CliffordAlgebra::diagonal(const std::vector<BigRational>& norms, std::string prefix) {
  Vec d;
  for (const auto& x : norms) d.emplace_back(x);
  return from_gram(MatrixF::diagonal(d), std::move(prefix));
}

int CliffordAlgebra::n() const { return impl_->n; }
const MatrixF& CliffordAlgebra::gram() const { return impl_->gram; }
bool CliffordAlgebra::is_diagonal() const { return impl_->diagonal; }
const std::string& CliffordAlgebra::prefix() const { return impl_->prefix; }

std::vector<Blade> CliffordAlgebra::all_blades() const {
  std::vector<Blade> out(dim());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<Blade>(i);
  return out;
}

std::vector<Blade> CliffordAlgebra::even_blades() const {
  std::vector<Blade> out;
  for (Blade b = 0; b < dim(); ++b)
    if (grade(b) % 2 == 0) out.push_back(b);
  return out;
}

CliffordElement CliffordAlgebra::one() const { return scalar(TowerScalar(1)); }
CliffordElement CliffordAlgebra::scalar(const TowerScalar& s) const { return blade(0, s); }

CliffordElement CliffordAlgebra::generator(int i) const {
  if (i < 1 || i > n()) throw DomainError("generator index out of range");
  return blade(Blade{1} << (i - 1));
}

CliffordElement CliffordAlgebra::blade(Blade b, const TowerScalar& c) const {
  if (b >= dim()) throw DomainError("blade outside the algebra");
  CliffordElement::Terms t;
  if (!c.is_zero()) t.emplace(b, c);
  return CliffordElement(*this, std::move(t));
}

CliffordElement CliffordAlgebra::vector(const Vec& coeffs) const {
  if (coeffs.size() != static_cast<std::size_t>(n())) throw DomainError("vector length must equal n");
  CliffordElement::Terms t;
  for (int i = 0; i < n(); ++i)
    if (!coeffs[static_cast<std::size_t>(i)].is_zero()) t.emplace(Blade{1} << i, coeffs[static_cast<std::size_t>(i)]);
  return CliffordElement(*this, std::move(t));
}

CliffordElement CliffordAlgebra::product_of(const std::vector<int>& gens) const {
  CliffordElement x = one();
  for (int g : gens) x = x * generator(g);
  return x;
}

const SymmetricDiagonalization& CliffordAlgebra::orthogonal_basis() const {
  std::call_once(impl_->ortho_once, [this] {
    impl_->ortho = std::make_unique<SymmetricDiagonalization>(
        diagonalize_symmetric(BilinearSpace(impl_->gram, FormKind::symmetric)));
  });
  return *impl_->ortho;
}

CliffordElement CliffordAlgebra::pseudoscalar() const {
  if (is_diagonal()) return blade(static_cast<Blade>(dim() - 1));
  const auto& ob = orthogonal_basis();
  CliffordElement z = one();
  for (int k = 0; k < n(); ++k) z = z * vector(ob.p.column(static_cast<std::size_t>(k)));
  return z;
}

TowerScalar CliffordAlgebra::pseudoscalar_square() const {
  CliffordElement z = pseudoscalar();
  CliffordElement z2 = z * z;
  if (!z2.is_scalar()) throw VerificationFailure("pseudoscalar square is not a scalar");
  const auto& ob = orthogonal_basis();
  TowerScalar closed((n() * (n() - 1) / 2) % 2 ? -1 : 1);
  for (const auto& d : ob.diagonal) closed = closed * d;
  if (z2.scalar_part() != closed)
    throw VerificationFailure("pseudoscalar square " + z2.scalar_part().to_string() + " differs from closed form " +
                              closed.to_string());
  return closed;
}

const std::vector<std::pair<Blade, BigRational>>& CliffordAlgebra::blade_product(Blade a, Blade b) const {
  auto& im = *impl_;
  std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | b;
  std::lock_guard<std::mutex> lock(im.mu);
  auto it = im.products.find(key);
  if (it != im.products.end()) return it->second;
  Terms t;
  if (im.diagonal) {
    BigRational c = norm_product(im, a & b);
    if (reorder_sign(a, b) < 0) c = -c;
    t.emplace_back(a ^ b, c);
  } else {
    t = general_product(im, a, b);
  }
  return im.products.emplace(key, std::move(t)).first->second;
}

const std::vector<std::pair<Blade, BigRational>>& CliffordAlgebra::blade_reverse(Blade a) const {
  auto& im = *impl_;
  {
    std::lock_guard<std::mutex> lock(im.mu);
    auto it = im.reverses.find(a);
    if (it != im.reverses.end()) return it->second;
  }
  Terms t;
  if (im.diagonal) {
    int k = grade(a);
    t.emplace_back(a, BigRational((k * (k - 1) / 2) % 2 ? -1 : 1));
  } else {
    // g_{ik} ... g_{i1}, multiplied left to right.
    Terms cur{{0, BigRational(1)}};
    for (int i = im.n - 1; i >= 0; --i) {
      if (!(a & (Blade{1} << i))) continue;
      Terms next;
      for (const auto& [bb, c] : cur)
        for (const auto& [rb, rc] : blade_product(bb, Blade{1} << i)) accumulate(next, rb, c * rc);
      prune(next);
      cur = std::move(next);
    }
    t = std::move(cur);
  }
  std::lock_guard<std::mutex> lock(im.mu);
  return im.reverses.emplace(a, std::move(t)).first->second;
}

const BigRational& CliffordAlgebra::blade_trace(Blade b) const {
  auto& im = *impl_;
  if (grade(b) % 2) throw DomainError("trace of an odd blade");
  {
    std::lock_guard<std::mutex> lock(im.mu);
    auto it = im.traces.find(b);
    if (it != im.traces.end()) return it->second;
  }
  BigRational tr;
  if (im.diagonal) {
    if (b == 0) tr = BigRational(static_cast<long long>(even_dim()));
  } else {
    for (Blade c : even_blades())
      for (const auto& [rb, rc] : blade_product(c, b))
        if (rb == c) tr += rc;
  }
  std::lock_guard<std::mutex> lock(im.mu);
  return im.traces.emplace(b, tr).first->second;
}

// ---------------------------------------------------------------------------
// CliffordElement

CliffordElement::CliffordElement(CliffordAlgebra alg, Terms terms) : alg_(std::move(alg)), terms_(std::move(terms)) {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (it->first >= alg_.dim()) throw DomainError("blade outside the algebra");
    if (it->second.is_zero()) it = terms_.erase(it);
    else ++it;
  }
}

void CliffordElement::add_term(Blade b, const TowerScalar& c) {
  if (c.is_zero()) return;
  auto it = terms_.find(b);
  if (it == terms_.end()) {
    terms_.emplace(b, c);
  } else {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

TowerScalar CliffordElement::coefficient(Blade b) const {
  auto it = terms_.find(b);
  return it == terms_.end() ? TowerScalar() : it->second;
}

bool CliffordElement::is_even() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return grade(t.first) % 2 == 0; });
}

bool CliffordElement::is_scalar() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == 0); }

CliffordElement CliffordElement::operator+(const CliffordElement& o) const {
  if (alg_ != o.alg_) throw DomainError("elements of different Clifford algebras");
  CliffordElement r = *this;
  for (const auto& [b, c] : o.terms_) r.add_term(b, c);
  return r;
}

CliffordElement CliffordElement::operator-() const { return *this * TowerScalar(-1); }
CliffordElement CliffordElement::operator-(const CliffordElement& o) const { return *this + (-o); }

CliffordElement CliffordElement::operator*(const TowerScalar& s) const {
  CliffordElement r(alg_);
  if (s.is_zero()) return r;
  for (const auto& [b, c] : terms_) r.terms_.emplace_hint(r.terms_.end(), b, c * s);
  return r;
}

CliffordElement CliffordElement::operator*(const CliffordElement& o) const {
  if (alg_ != o.alg_) throw DomainError("elements of different Clifford algebras");
  CliffordElement r(alg_);
  const auto& im = *alg_.impl_;
  for (const auto& [a, ca] : terms_)
    for (const auto& [b, cb] : o.terms_) {
      TowerScalar cab = ca * cb;
      if (im.diagonal) {
        BigRational s = norm_product(im, a & b);
        if (reorder_sign(a, b) < 0) s = -s;
        r.add_term(a ^ b, cab * TowerScalar(s));
      } else {
        for (const auto& [pb, pc] : alg_.blade_product(a, b)) r.add_term(pb, cab * TowerScalar(pc));
      }
    }
  return r;
}

bool operator==(const CliffordElement& a, const CliffordElement& b) { return a.alg_ == b.alg_ && a.terms_ == b.terms_; }

CliffordElement CliffordElement::involution() const {
  CliffordElement r(alg_);
  for (const auto& [b, c] : terms_)
    for (const auto& [rb, rc] : alg_.blade_reverse(b)) r.add_term(rb, c * TowerScalar(rc));
  return r;
}

CliffordElement CliffordElement::grade_part(int k) const {
  CliffordElement r(alg_);
  for (const auto& [b, c] : terms_)
    if (grade(b) == k) r.terms_.emplace(b, c);
  return r;
}

CliffordElement CliffordElement::even_part() const {
  CliffordElement r(alg_);
  for (const auto& [b, c] : terms_)
    if (grade(b) % 2 == 0) r.terms_.emplace(b, c);
  return r;
}

Vec CliffordElement::coordinates(const std::vector<Blade>& basis) const {
  Vec v(basis.size());
  std::size_t found = 0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    auto it = terms_.find(basis[i]);
    if (it != terms_.end()) {
      v[i] = it->second;
      ++found;
    }
  }
  if (found != terms_.size()) throw DomainError("element has terms outside the given blade basis");
  return v;
}

std::string CliffordElement::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& [b, c] : terms_) {
    std::string name;
    for (int i = 0; i < alg_.n(); ++i)
      if (b & (Blade{1} << i)) name += alg_.prefix() + std::to_string(i + 1);
    bool neg = false;
    std::string coef;
    if (c.is_rational()) {
      neg = c.coord(0).sign() < 0;
      coef = c.coord(0).abs().to_string();
    } else {
      coef = "(" + c.to_string() + ")";
    }
    std::string term;
    if (name.empty()) term = coef;
    else if (coef == "1") term = name;
    else term = coef + "*" + name;
    if (out.empty()) out = (neg ? "-" : "") + term;
    else out += (neg ? " - " : " + ") + term;
  }
  return out;
}

CliffordElement commutator(const CliffordElement& a, const CliffordElement& b) { return a * b - b * a; }

TowerScalar trace(const CliffordElement& x) {
  TowerScalar t;
  for (const auto& [b, c] : x.terms()) {
    if (grade(b) % 2) throw DomainError("trace is defined on the even subalgebra only");
    const BigRational& bt = x.algebra().blade_trace(b);
    if (!bt.is_zero()) t += c * TowerScalar(bt);
  }
  return t;
}

MatrixF mult_operator(const CliffordElement& x, Side side, const std::vector<Blade>& domain) {
  std::unordered_map<Blade, std::size_t> index;
  for (std::size_t i = 0; i < domain.size(); ++i) index.emplace(domain[i], i);
  MatrixF m(domain.size(), domain.size());
  const CliffordAlgebra& alg = x.algebra();
  for (std::size_t j = 0; j < domain.size(); ++j) {
    CliffordElement b = alg.blade(domain[j]);
    CliffordElement img = side == Side::left ? x * b : b * x;
    for (const auto& [bb, c] : img.terms()) {
      auto it = index.find(bb);
      if (it == index.end()) throw DomainError("domain is not invariant under multiplication");
      m(it->second, j) = c;
    }
  }
  return m;
}

std::vector<Vec> element_coordinates(const std::vector<CliffordElement>& xs, const std::vector<Blade>& basis) {
  std::vector<Vec> out;
  for (const auto& x : xs) out.push_back(x.coordinates(basis));
  return out;
}

CliffordElement element_from(const CliffordAlgebra& alg, const std::vector<Blade>& basis, const Vec& coords) {
  CliffordElement::Terms t;
  for (std::size_t i = 0; i < basis.size(); ++i)
    if (!coords[i].is_zero()) t.emplace(basis[i], coords[i]);
  return CliffordElement(alg, std::move(t));
}

MatrixF mult_operator(const CliffordElement& x, Side side, const std::vector<CliffordElement>& domain) {
  if (domain.empty()) return MatrixF();
  std::vector<Blade> blades = x.algebra().all_blades();
  std::vector<Vec> basis = element_coordinates(domain, blades);
  std::vector<Vec> images;
  for (const auto& d : domain) images.push_back((side == Side::left ? x * d : d * x).coordinates(blades));
  MatrixF r(domain.size(), domain.size());
  for (std::size_t j = 0; j < images.size(); ++j) {
    Vec c = weilks::coordinates(basis, images[j]);  // throws if not invariant
    for (std::size_t i = 0; i < c.size(); ++i) r(i, j) = c[i];
  }
  return r;
}

std::vector<CliffordElement> center_basis(const CliffordAlgebra& alg, bool even_only) {
  std::vector<Blade> domain = even_only ? alg.even_blades() : alg.all_blades();
  std::vector<CliffordElement> gens;
  if (even_only) {
    for (int i = 1; i <= alg.n(); ++i)
      for (int j = i + 1; j <= alg.n(); ++j) gens.push_back(alg.generator(i) * alg.generator(j));
  } else {
    for (int i = 1; i <= alg.n(); ++i) gens.push_back(alg.generator(i));
  }
  // Progressive intersection of centralizers.
  std::vector<CliffordElement> current;
  for (Blade b : domain) current.push_back(alg.blade(b));
  std::vector<Blade> all = alg.all_blades();
  for (const auto& g : gens) {
    if (current.empty()) break;
    std::vector<Vec> cols;
    for (const auto& c : current) cols.push_back(commutator(g, c).coordinates(all));
    MatrixF m = MatrixF::from_columns(cols, all.size());
    std::vector<CliffordElement> next;
    for (const auto& k : kernel_basis(m)) {
      CliffordElement e(alg);
      for (std::size_t i = 0; i < k.size(); ++i)
        if (!k[i].is_zero()) e = e + current[i] * k[i];
      next.push_back(e);
    }
    current = std::move(next);
  }
  return current;
}

IdempotentSplit idempotent_split(const CliffordAlgebra& alg) {
  if (alg.n() < 4) throw DomainError("idempotent_split needs two hyperbolic pairs");
  const MatrixF& g = alg.gram();
  auto zero = [&](std::size_t i, std::size_t j) { return g(i, j).is_zero(); };
  if (!zero(0, 0) || !zero(1, 1) || zero(0, 1) || !zero(2, 2) || !zero(3, 3) || zero(2, 3))
    throw DomainError("generators 1,2 and 3,4 must form hyperbolic pairs");
  for (std::size_t i : {0, 1})
    for (std::size_t j : {2, 3})
      if (!zero(i, j)) throw DomainError("the two hyperbolic pairs must be orthogonal");
  CliffordElement e = alg.generator(1) * alg.generator(2) * (TowerScalar(2) * g(0, 1)).inverse();
  CliffordElement ep = alg.generator(3) * alg.generator(4) * (TowerScalar(2) * g(2, 3)).inverse();
  CliffordElement one = alg.one();
  IdempotentSplit out{e, ep, {e * ep, e * (one - ep), (one - e) * ep, (one - e) * (one - ep)}, {}};
  CliffordElement sum(alg);
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& p = out.idempotents[i];
    if (p * p != p) throw VerificationFailure("idempotent_split: element " + std::to_string(i) + " is not idempotent");
    for (std::size_t j = 0; j < 4; ++j)
      if (i != j && !(p * out.idempotents[j]).is_zero())
        throw VerificationFailure("idempotent_split: idempotents are not orthogonal");
    sum = sum + p;
    out.image_dims.push_back(rank(mult_operator(p, Side::right, alg.even_blades())));
  }
  if (sum != one) throw VerificationFailure("idempotent_split: idempotents do not sum to 1");
  return out;
}

PrimitiveIdempotent find_idempotent(const CliffordAlgebra& alg, int count) {
  if (!alg.is_diagonal()) throw DomainError("find_idempotent needs a diagonal algebra");
  const Blade full = static_cast<Blade>(alg.dim() - 1);
  struct Cand {
    Blade b;
    BigRational s;
  };
  std::vector<Cand> cands;
  for (Blade b : alg.even_blades()) {
    if (b == 0 || b == full) continue;
    CliffordElement x = alg.blade(b);
    TowerScalar sq = (x * x).scalar_part();
    if (auto r = rational_sqrt(sq.to_rational()); r && sq.to_rational().sign() > 0) cands.push_back({b, *r});
  }
  auto index_key = [&](Blade b) {
    std::vector<int> idx;
    for (int i = 0; i < alg.n(); ++i)
      if (b & (Blade{1} << i)) idx.push_back(i);
    return idx;
  };
  std::stable_sort(cands.begin(), cands.end(), [&](const Cand& x, const Cand& y) {
    if (grade(x.b) != grade(y.b)) return grade(x.b) < grade(y.b);
    return index_key(x.b) < index_key(y.b);
  });
  std::vector<std::size_t> chosen;
  std::vector<Blade> group{0};
  auto in_group = [](const std::vector<Blade>& g, Blade b) { return std::find(g.begin(), g.end(), b) != g.end(); };
  std::function<bool(std::size_t)> search = [&](std::size_t start) -> bool {
    if (static_cast<int>(chosen.size()) == count) return true;
    for (std::size_t k = start; k < cands.size(); ++k) {
      Blade b = cands[k].b;
      bool ok = !in_group(group, b) && !in_group(group, b ^ full) && !in_group(group, full);
      for (std::size_t c : chosen) ok = ok && grade(b & cands[c].b) % 2 == 0;
      if (!ok) continue;
      std::vector<Blade> saved = group;
      for (Blade gb : saved) group.push_back(gb ^ b);
      chosen.push_back(k);
      if (search(k + 1)) return true;
      chosen.pop_back();
      group = saved;
    }
    return false;
  };
  if (!search(0)) throw SearchExhausted("no idempotent with " + std::to_string(count) + " commuting blade factors");
  PrimitiveIdempotent out{alg.one(), {}, 0};
  for (std::size_t c : chosen) {
    const Cand& cd = cands[c];
    out.factors.push_back(cd.b);
    out.beta = out.beta * ((alg.one() + alg.blade(cd.b, TowerScalar(cd.s.inverse()))) *
                           TowerScalar(BigRational(mpz_class(1), mpz_class(2))));
  }
  if (out.beta * out.beta != out.beta) throw VerificationFailure("find_idempotent: product is not idempotent");
  out.image_dim = rank(mult_operator(out.beta, Side::right, alg.even_blades()));
  return out;
}

CliffordElement map_generators(const CliffordElement& x, const CliffordAlgebra& target, const MatrixF& images) {
  const CliffordAlgebra& src = x.algebra();
  if (images.cols() != static_cast<std::size_t>(src.n()) || images.rows() != static_cast<std::size_t>(target.n()))
    throw DomainError("generator image matrix has the wrong shape");
  std::vector<CliffordElement> gen_images;
  for (int i = 0; i < src.n(); ++i) gen_images.push_back(target.vector(images.column(static_cast<std::size_t>(i))));
  CliffordElement out(target);
  for (const auto& [b, c] : x.terms()) {
    CliffordElement p = target.one();
    for (int i = 0; i < src.n(); ++i)
      if (b & (Blade{1} << i)) p = p * gen_images[static_cast<std::size_t>(i)];
    out = out + p * c;
  }
  return out;
}

}  // namespace weilks
