#include "stringtop/lie.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <map>
#include <string>

namespace stringtop {

SuperMatrix::SuperMatrix(int n, int generators) : n_(n), gens_(generators) {
  if (n < 1)
    throw ConfigError("matrix dimension must be >= 1");
  if (generators < 0 || generators > kMaxGenerators)
    throw ConfigError("generator count out of range");
}

SuperMatrix SuperMatrix::identity(int n, int generators) {
  return constant(Matrix::Identity(n, n), generators);
}

SuperMatrix SuperMatrix::constant(const Matrix &m, int generators) {
  return monomial(0, m, generators);
}

SuperMatrix SuperMatrix::monomial(Mask mask, const Matrix &m, int generators) {
  if (m.rows() != m.cols())
    throw ConfigError("super matrix must be square");
  SuperMatrix out(static_cast<int>(m.rows()), generators);
  if (generators < 64 && (mask >> generators) != 0)
    throw ConfigError("monomial uses generators beyond N");
  out.add_block(mask, m);
  return out;
}

SuperMatrix SuperMatrix::from_entries(
    const std::vector<std::vector<GradedCoefficient>> &rows, int generators) {
  const int n = static_cast<int>(rows.size());
  SuperMatrix out(n, generators);
  std::map<Mask, Matrix> acc;
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[i].size()) != n)
      throw ConfigError("super matrix rows must have length n");
    for (int j = 0; j < n; ++j) {
      if (rows[i][j].generators() != generators)
        throw ConfigError("entry generator count mismatch");
      for (const auto &t : rows[i][j].terms()) {
        auto [it, fresh] = acc.try_emplace(t.mask, Matrix::Zero(n, n));
        it->second(i, j) += t.value;
      }
    }
  }
  for (auto &[m, b] : acc)
    out.add_block(m, b);
  return out;
}

void SuperMatrix::check_same(const SuperMatrix &o) const {
  if (n_ != o.n_)
    throw ConfigError("matrix dimension mismatch: " + std::to_string(n_) +
                      " vs " + std::to_string(o.n_));
  if (gens_ != o.gens_)
    throw ConfigError("generator count mismatch: " + std::to_string(gens_) +
                      " vs " + std::to_string(o.gens_));
}

void SuperMatrix::add_block(Mask mask, const Matrix &m, Complex scale) {
  auto it = std::lower_bound(
      blocks_.begin(), blocks_.end(), mask,
      [](const Block &b, Mask x) { return b.first < x; });
  if (it != blocks_.end() && it->first == mask) {
    it->second += scale * m;
    if (it->second.isZero(0.0))
      blocks_.erase(it);
  } else if (!m.isZero(0.0)) {
    blocks_.insert(it, {mask, scale * m});
  }
}

Matrix SuperMatrix::block(Mask mask) const {
  auto it = std::lower_bound(
      blocks_.begin(), blocks_.end(), mask,
      [](const Block &b, Mask x) { return b.first < x; });
  if (it != blocks_.end() && it->first == mask)
    return it->second;
  return Matrix::Zero(n_, n_);
}

GradedCoefficient SuperMatrix::entry(int row, int col) const {
  std::vector<GradedCoefficient::Term> terms;
  for (const auto &[m, b] : blocks_)
    terms.push_back({m, b(row, col)});
  return GradedCoefficient::from_terms(gens_, std::move(terms));
}

GradedCoefficient SuperMatrix::trace() const {
  std::vector<GradedCoefficient::Term> terms;
  for (const auto &[m, b] : blocks_)
    terms.push_back({m, b.trace()});
  return GradedCoefficient::from_terms(gens_, std::move(terms));
}

double SuperMatrix::norm() const {
  double s = 0;
  for (const auto &[m, b] : blocks_)
    s += b.norm();
  return s;
}

std::optional<int> SuperMatrix::parity() const {
  if (blocks_.empty())
    return 0;
  const int p = mask_parity(blocks_.front().first);
  for (const auto &[m, b] : blocks_)
    if (mask_parity(m) != p)
      return std::nullopt;
  return p;
}

SuperMatrix SuperMatrix::widened(int generators) const {
  if (generators < gens_)
    throw ConfigError("cannot narrow a super matrix");
  SuperMatrix out = *this;
  out.gens_ = generators;
  return out;
}

SuperMatrix SuperMatrix::shifted(int shift, int generators) const {
  SuperMatrix out(n_, generators);
  for (const auto &[m, b] : blocks_) {
    const Mask nm = m << shift;
    if (generators < 64 && (nm >> generators) != 0)
      throw ConfigError("shifted monomial exceeds generator count");
    out.blocks_.push_back({nm, b});
  }
  return out;
}

SuperMatrix SuperMatrix::coefficient_of(Mask low, int width,
                                        int generators) const {
  const Mask lowmask = width >= 64 ? ~Mask{0} : ((Mask{1} << width) - 1);
  SuperMatrix out(n_, generators);
  for (const auto &[m, b] : blocks_)
    if ((m & lowmask) == low)
      out.blocks_.push_back({m >> width, b});
  return out;
}

SuperMatrix SuperMatrix::operator-() const {
  SuperMatrix out = *this;
  for (auto &[m, b] : out.blocks_)
    b = -b;
  return out;
}

SuperMatrix &SuperMatrix::operator+=(const SuperMatrix &o) {
  check_same(o);
  for (const auto &[m, b] : o.blocks_)
    add_block(m, b);
  return *this;
}

SuperMatrix &SuperMatrix::operator-=(const SuperMatrix &o) {
  check_same(o);
  for (const auto &[m, b] : o.blocks_)
    add_block(m, b, -1.0);
  return *this;
}

SuperMatrix &SuperMatrix::operator*=(Complex s) {
  if (s == Complex(0)) {
    blocks_.clear();
    return *this;
  }
  for (auto &[m, b] : blocks_)
    b *= s;
  return *this;
}

SuperMatrix operator*(const SuperMatrix &a, const SuperMatrix &b) {
  a.check_same(b);
  SuperMatrix out(a.n_, a.gens_);
  if (a.blocks_.size() == 1 && b.blocks_.size() == 1 &&
      a.blocks_[0].first == 0 && b.blocks_[0].first == 0) {
    out.blocks_.push_back({0, a.blocks_[0].second * b.blocks_[0].second});
    return out;
  }
  std::vector<std::pair<Mask, Matrix>> raw;
  raw.reserve(a.blocks_.size() * b.blocks_.size());
  for (const auto &[ma, xa] : a.blocks_)
    for (const auto &[mb, xb] : b.blocks_) {
      const int s = reorder_sign(ma, mb);
      if (s == 0)
        continue;
      raw.push_back({ma | mb, s > 0 ? Matrix(xa * xb) : Matrix(-(xa * xb))});
    }
  std::stable_sort(raw.begin(), raw.end(),
                   [](const auto &x, const auto &y) { return x.first < y.first; });
  for (auto &r : raw) {
    if (!out.blocks_.empty() && out.blocks_.back().first == r.first)
      out.blocks_.back().second += r.second;
    else
      out.blocks_.push_back(std::move(r));
  }
  std::erase_if(out.blocks_,
                [](const SuperMatrix::Block &x) { return x.second.isZero(0.0); });
  return out;
}

SuperMatrix operator*(const GradedCoefficient &c, const SuperMatrix &m) {
  if (c.generators() != m.gens_)
    throw ConfigError("generator count mismatch");
  SuperMatrix cm(m.n_, m.gens_);
  for (const auto &t : c.terms())
    cm.add_block(t.mask, Matrix::Identity(m.n_, m.n_), t.value);
  return cm * m;
}

SuperMatrix SuperMatrix::inverse() const {
  const Matrix b = body();
  Eigen::FullPivLU<Matrix> lu(b);
  if (!lu.isInvertible())
    throw ConfigError("super matrix body is singular");
  const SuperMatrix binv = constant(lu.inverse(), gens_);
  SuperMatrix nil = *this - constant(b, gens_);
  // (B + R)^-1 = sum_k (-B^-1 R)^k B^-1; R nilpotent of order <= N+1.
  const SuperMatrix x = -(binv * nil);
  SuperMatrix term = identity(n_, gens_);
  SuperMatrix acc = identity(n_, gens_);
  for (int k = 0; k < gens_; ++k) {
    term = term * x;
    if (term.is_zero())
      break;
    acc += term;
  }
  return acc * binv;
}

SuperMatrix SuperMatrix::conjugated(const Matrix &g) const {
  const Matrix gi = g.inverse();
  SuperMatrix out = *this;
  for (auto &[m, b] : out.blocks_)
    b = g * b * gi;
  return out;
}

LieBasis::LieBasis(int n) : n_(n) {
  if (n < 1)
    throw ConfigError("gl(n) needs n >= 1");
}

double LieBasis::kappa(int a, int b) const { return dual(a) == b ? 1.0 : 0.0; }

double LieBasis::kappa_inv(int a, int b) const {
  return dual(a) == b ? 1.0 : 0.0;
}

Matrix LieBasis::kappa_matrix() const {
  Matrix k = Matrix::Zero(size(), size());
  for (int a = 0; a < size(); ++a)
    k(a, dual(a)) = 1.0;
  return k;
}

Matrix LieBasis::kappa_inv_matrix() const { return kappa_matrix(); }

Matrix LieBasis::element(int a) const {
  auto [i, j] = pair(a);
  Matrix e = Matrix::Zero(n_, n_);
  e(i, j) = 1.0;
  return e;
}

Representation LieBasis::standard() const {
  Representation r;
  r.dim = n_;
  r.standard = true;
  for (int a = 0; a < size(); ++a)
    r.images.push_back(element(a));
  return r;
}

Representation LieBasis::dual_rep() const {
  Representation r;
  r.dim = n_;
  r.standard = false;
  for (int a = 0; a < size(); ++a)
    r.images.push_back(-element(a).transpose());
  return r;
}

Representation LieBasis::twisted_rep() const {
  Representation r;
  r.dim = n_;
  r.standard = false;
  for (int a = 0; a < size(); ++a) {
    Matrix e = element(a);
    r.images.push_back(e + e.trace() * Matrix::Identity(n_, n_));
  }
  return r;
}

Matrix casimir_operator(const LieBasis &basis) {
  const int n = basis.n();
  Matrix out = Matrix::Zero(n * n, n * n);
  for (int a = 0; a < basis.size(); ++a)
    for (int b = 0; b < basis.size(); ++b) {
      const double k = basis.kappa_inv(a, b);
      if (k == 0.0)
        continue;
      out += k * Eigen::kroneckerProduct(basis.element(a), basis.element(b))
                     .eval();
    }
  return out;
}

Matrix swap_operator(int n) {
  Matrix p = Matrix::Zero(n * n, n * n);
  for (int r = 0; r < n; ++r)
    for (int s = 0; s < n; ++s)
      p(s * n + r, r * n + s) = 1.0;
  return p;
}

Matrix swap_via_casimir(const Vector &v, const Vector &w,
                        const LieBasis &basis) {
  const int n = basis.n();
  if (v.size() != n || w.size() != n)
    throw ConfigError("vector length must equal n");
  Matrix out = Matrix::Zero(n, n);
  // Every pair (a,b) is visited; kappa^{ab} selects the nonzero ones.
  for (int a = 0; a < basis.size(); ++a)
    for (int b = 0; b < basis.size(); ++b) {
      const double k = basis.kappa_inv(a, b);
      if (k == 0.0)
        continue;
      const Vector x = basis.element(a) * v;
      const Vector y = basis.element(b) * w;
      out += k * x * y.transpose();
    }
  return out;
}

GradedCoefficient fuse_traces(const SuperMatrix &a1, const SuperMatrix &a2,
                              const SuperMatrix &b1, const SuperMatrix &b2,
                              const LieBasis &basis,
                              const Representation &rep) {
  const int n = a1.n();
  const int gens = a1.generators();
  for (const auto *m : {&a2, &b1, &b2})
    if (m->n() != n || m->generators() != gens)
      throw ConfigError("fuse_traces: inconsistent matrix shapes");
  if (rep.dim != n)
    throw ConfigError("fuse_traces: representation dimension mismatch");
  GradedCoefficient acc(gens);
  for (int a = 0; a < basis.size(); ++a) {
    const SuperMatrix ta = SuperMatrix::constant(rep(a), gens);
    const GradedCoefficient left = (a1 * ta * a2).trace();
    if (left.is_zero())
      continue;
    for (int b = 0; b < basis.size(); ++b) {
      const double k = basis.kappa_inv(a, b);
      if (k == 0.0)
        continue;
      const SuperMatrix tb = SuperMatrix::constant(rep(b), gens);
      acc += (left * (b1 * tb * b2).trace()) * Complex(k);
    }
  }
  return acc;
}

GradedCoefficient fuse_traces(const SuperMatrix &a1, const SuperMatrix &a2,
                              const SuperMatrix &b1, const SuperMatrix &b2,
                              const LieBasis &basis) {
  if (basis.n() != a1.n())
    throw ConfigError("fuse_traces: basis dimension mismatch");
  return fuse_traces(a1, a2, b1, b2, basis, basis.standard());
}

GradedCoefficient fused_trace(const SuperMatrix &a1, const SuperMatrix &a2,
                              const SuperMatrix &b1, const SuperMatrix &b2) {
  return (a1 * b2 * b1 * a2).trace();
}

Complex kappa_form(const Matrix &x, const Matrix &y) { return (x * y).trace(); }

} // namespace stringtop
