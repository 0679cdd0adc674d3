#include "stringtop/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace stringtop {

namespace {

Rational floor_rational(const Rational &x) {
  using boost::multiprecision::cpp_int;
  cpp_int num = boost::multiprecision::numerator(x);
  cpp_int den = boost::multiprecision::denominator(x);
  cpp_int q = num / den;
  if (num < 0 && q * den != num)
    q -= 1;
  return Rational(q);
}

Mask dims_mask(const std::vector<int> &dims) {
  Mask m = 0;
  for (int d : dims)
    m |= Mask{1} << d;
  return m;
}

std::vector<int> mask_dims(Mask m) {
  std::vector<int> out;
  for (int i = 0; m; ++i, m >>= 1)
    if (m & 1)
      out.push_back(i);
  return out;
}

} // namespace

Space Space::chart(int d) {
  if (d < 2)
    throw ConfigError("space dimension must be >= 2");
  return {Kind::Chart, d};
}

Space Space::torus(int d) {
  if (d < 2)
    throw ConfigError("space dimension must be >= 2");
  return {Kind::Torus, d};
}

std::string to_string(Space::Kind k) {
  return k == Space::Kind::Torus ? "torus" : "chart";
}

DVec to_double(const RVec &v) {
  DVec out(static_cast<Eigen::Index>(v.size()));
  for (size_t i = 0; i < v.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = static_cast<double>(v[i]);
  return out;
}

Rational exact_rational(double x) {
  if (!std::isfinite(x))
    throw ConfigError("non-finite value cannot be made exact");
  if (x == 0)
    return Rational(0);
  int e = 0;
  const double m = std::frexp(x, &e); // x = m 2^e, 0.5 <= |m| < 1
  const auto mant = static_cast<long long>(std::ldexp(m, 53));
  Rational r(mant);
  const int shift = e - 53;
  using boost::multiprecision::cpp_int;
  if (shift >= 0)
    r *= Rational(cpp_int(1) << shift);
  else
    r /= Rational(cpp_int(1) << (-shift));
  return r;
}

PLLoop::PLLoop(Space space, std::vector<RVec> vertices, IVec closure)
    : space_(space), vertices_(std::move(vertices)),
      closure_(std::move(closure)) {
  if (space_.d < 2)
    throw ValidationError("loop space dimension must be >= 2");
  if (vertices_.size() < 3)
    throw ValidationError("a loop needs at least 3 vertices");
  if (static_cast<int>(closure_.size()) != space_.d)
    throw ValidationError("closure vector has wrong dimension");
  for (const auto &v : vertices_)
    if (static_cast<int>(v.size()) != space_.d)
      throw ValidationError("vertex has wrong dimension");
  if (!space_.is_torus())
    for (long c : closure_)
      if (c != 0)
        throw ValidationError("chart loops must close exactly");
  for (int i = 0; i < size(); ++i)
    if (vertex(i) == vertex(i + 1))
      throw ValidationError("consecutive vertices " + std::to_string(i) +
                            " and " + std::to_string(i + 1) +
                            " coincide");
}

RVec PLLoop::vertex(long i) const {
  const long k = size();
  long q = i / k;
  long r = i % k;
  if (r < 0) {
    r += k;
    q -= 1;
  }
  RVec v = vertices_[static_cast<size_t>(r)];
  if (q != 0)
    for (int mu = 0; mu < dim(); ++mu)
      v[mu] += Rational(q * closure_[mu]);
  return v;
}

std::pair<RVec, RVec> PLLoop::segment(int i) const {
  return {vertex(i), vertex(i + 1)};
}

RVec PLLoop::point_exact(const Rational &t) const {
  const Rational kt = t * size();
  Rational seg = floor_rational(kt);
  if (seg >= size())
    seg = size() - 1;
  if (seg < 0)
    seg = 0;
  const long i = static_cast<long>(seg);
  const Rational local = kt - seg;
  const RVec a = vertex(i), b = vertex(i + 1);
  RVec out(a.size());
  for (size_t mu = 0; mu < a.size(); ++mu)
    out[mu] = a[mu] + local * (b[mu] - a[mu]);
  return out;
}

DVec PLLoop::point(double t) const {
  const double kt = t * size();
  int seg = static_cast<int>(std::floor(kt));
  seg = std::clamp(seg, 0, size() - 1);
  const double local = kt - seg;
  const DVec a = to_double(vertex(seg)), b = to_double(vertex(seg + 1));
  return a + local * (b - a);
}

RVec PLLoop::velocity_exact(int segment) const {
  const RVec a = vertex(segment), b = vertex(segment + 1);
  RVec out(a.size());
  for (size_t mu = 0; mu < a.size(); ++mu)
    out[mu] = (b[mu] - a[mu]) * size();
  return out;
}

DVec PLLoop::velocity(int segment) const {
  return to_double(velocity_exact(segment));
}

PLLoop PLLoop::rotated(int k) const {
  k = ((k % size()) + size()) % size();
  std::vector<RVec> v;
  v.reserve(vertices_.size());
  for (int i = 0; i < size(); ++i)
    v.push_back(vertex(k + i));
  return PLLoop(space_, std::move(v), closure_);
}

PLLoop PLLoop::normal_form() const {
  std::optional<PLLoop> best;
  for (int k = 0; k < size(); ++k) {
    PLLoop r = rotated(k);
    if (space_.is_torus()) {
      RVec shift(dim());
      for (int mu = 0; mu < dim(); ++mu)
        shift[mu] = -floor_rational(r.vertices_[0][mu]);
      r = r.translated(shift);
    }
    if (!best || r.vertices_ < best->vertices_)
      best = std::move(r);
  }
  return *best;
}

PLLoop PLLoop::subdivided(int segment, const Rational &f) const {
  if (segment < 0 || segment >= size())
    throw ValidationError("segment index out of range");
  if (f <= 0 || f >= 1)
    throw ValidationError("subdivision fraction must lie in (0,1)");
  auto [a, b] = this->segment(segment);
  RVec p(a.size());
  for (size_t mu = 0; mu < a.size(); ++mu)
    p[mu] = a[mu] + f * (b[mu] - a[mu]);
  std::vector<RVec> v = vertices_;
  v.insert(v.begin() + segment + 1, p);
  return PLLoop(space_, std::move(v), closure_);
}

PLLoop PLLoop::translated(const RVec &shift) const {
  if (static_cast<int>(shift.size()) != dim())
    throw ValidationError("shift has wrong dimension");
  std::vector<RVec> v = vertices_;
  for (auto &x : v)
    for (int mu = 0; mu < dim(); ++mu)
      x[mu] += shift[mu];
  return PLLoop(space_, std::move(v), closure_);
}

PLLoop PLLoop::displaced(const std::vector<RVec> &disp,
                         const Rational &eps) const {
  if (static_cast<int>(disp.size()) != size())
    throw ValidationError("displacement count must equal vertex count");
  std::vector<RVec> v = vertices_;
  for (int i = 0; i < size(); ++i) {
    if (static_cast<int>(disp[i].size()) != dim())
      throw ValidationError("displacement has wrong dimension");
    for (int mu = 0; mu < dim(); ++mu)
      v[i][mu] += eps * disp[i][mu];
  }
  return PLLoop(space_, std::move(v), closure_);
}

bool PLLoop::operator==(const PLLoop &o) const {
  return space_ == o.space_ && closure_ == o.closure_ &&
         vertices_ == o.vertices_;
}

bool PLLoop::operator<(const PLLoop &o) const {
  if (space_.kind != o.space_.kind)
    return space_.kind < o.space_.kind;
  if (space_.d != o.space_.d)
    return space_.d < o.space_.d;
  if (closure_ != o.closure_)
    return closure_ < o.closure_;
  return vertices_ < o.vertices_;
}

IVec loop_class_torus(const PLLoop &loop) {
  if (!loop.space().is_torus())
    throw ConfigError("homotopy class requested for a chart loop");
  return loop.closure();
}

VariationField::VariationField(std::vector<DVec> start, std::vector<DVec> end)
    : start_(std::move(start)), end_(std::move(end)) {
  if (start_.size() != end_.size() || start_.empty())
    throw ValidationError("variation field needs matching segment data");
}

VariationField VariationField::from_vertices(const PLLoop &loop,
                                             const std::vector<RVec> &disp) {
  if (static_cast<int>(disp.size()) != loop.size())
    throw ValidationError("variation length must match vertex count");
  std::vector<DVec> s, e;
  for (int i = 0; i < loop.size(); ++i) {
    if (static_cast<int>(disp[i].size()) != loop.dim())
      throw ValidationError("variation vector has wrong dimension");
    s.push_back(to_double(disp[i]));
    e.push_back(to_double(disp[(i + 1) % loop.size()]));
  }
  VariationField v(std::move(s), std::move(e));
  v.disp_ = disp;
  return v;
}

VariationField VariationField::tangent(const PLLoop &loop) {
  std::vector<DVec> s;
  for (int i = 0; i < loop.size(); ++i)
    s.push_back(loop.velocity(i));
  return VariationField(s, s);
}

DVec VariationField::at(int segment, double local) const {
  return (1 - local) * start_[segment] + local * end_[segment];
}

CRational CRational::from(Complex z) {
  return {exact_rational(z.real()), exact_rational(z.imag())};
}

Complex CRational::value() const {
  return {static_cast<double>(re), static_cast<double>(im)};
}

ScalarField::ScalarField(Kind kind, int d) : kind_(kind), d_(d) {}

ScalarField ScalarField::constant(Kind kind, int d, const CRational &c) {
  ScalarField f(kind, d);
  f.add({std::vector<int>(d, 0), 0}, c);
  return f;
}

ScalarField ScalarField::term(Kind kind, std::vector<int> key,
                              const CRational &c) {
  ScalarField f(kind, static_cast<int>(key.size()));
  f.add({std::move(key), 0}, c);
  return f;
}

void ScalarField::add(const Key &key, const CRational &c) {
  if (static_cast<int>(key.k.size()) != d_)
    throw ConfigError("field key has wrong dimension");
  if (kind_ == Kind::Polynomial) {
    if (key.twopi != 0)
      throw ConfigError("polynomial terms carry no 2 pi i factor");
    for (int e : key.k)
      if (e < 0)
        throw ConfigError("negative polynomial exponent");
  }
  if (c.is_zero())
    return;
  auto [it, fresh] = terms_.try_emplace(key, c);
  if (!fresh) {
    it->second = it->second + c;
    if (it->second.is_zero())
      terms_.erase(it);
  }
  rebuild();
}

void ScalarField::rebuild() {
  cache_.clear();
  const Complex twopi_i(0, 2 * std::numbers::pi);
  for (const auto &[key, c] : terms_) {
    Complex v = c.value();
    for (int p = 0; p < key.twopi; ++p)
      v *= twopi_i;
    cache_.push_back({key.k, v});
  }
}

Complex ScalarField::operator()(const DVec &x) const {
  Complex acc = 0;
  if (kind_ == Kind::Polynomial) {
    for (const auto &t : cache_) {
      double m = 1;
      for (int mu = 0; mu < d_; ++mu)
        for (int e = 0; e < t.k[mu]; ++e)
          m *= x[mu];
      acc += t.c * m;
    }
  } else {
    for (const auto &t : cache_) {
      double phase = 0;
      for (int mu = 0; mu < d_; ++mu)
        phase += t.k[mu] * x[mu];
      phase *= 2 * std::numbers::pi;
      acc += t.c * Complex(std::cos(phase), std::sin(phase));
    }
  }
  return acc;
}

ScalarField ScalarField::derivative(int mu) const {
  if (mu < 0 || mu >= d_)
    throw ConfigError("derivative index out of range");
  ScalarField out(kind_, d_);
  for (const auto &[key, c] : terms_) {
    const int k = key.k[mu];
    if (k == 0)
      continue;
    Key nk = key;
    if (kind_ == Kind::Polynomial)
      nk.k[mu] -= 1;
    else
      nk.twopi += 1;
    out.terms_[nk] = c * CRational(Rational(k));
  }
  out.rebuild();
  return out;
}

ScalarField ScalarField::operator-() const {
  ScalarField out = *this;
  for (auto &[k, c] : out.terms_)
    c = -c;
  out.rebuild();
  return out;
}

ScalarField operator+(const ScalarField &a, const ScalarField &b) {
  if (a.kind_ != b.kind_ || a.d_ != b.d_)
    throw ConfigError("adding fields of different kinds");
  ScalarField out = a;
  for (const auto &[k, c] : b.terms_) {
    auto [it, fresh] = out.terms_.try_emplace(k, c);
    if (!fresh) {
      it->second = it->second + c;
      if (it->second.is_zero())
        out.terms_.erase(it);
    }
  }
  out.rebuild();
  return out;
}

ScalarField operator*(const ScalarField &a, const ScalarField &b) {
  if (a.kind_ != b.kind_ || a.d_ != b.d_)
    throw ConfigError("multiplying fields of different kinds");
  ScalarField out(a.kind_, a.d_);
  for (const auto &[ka, ca] : a.terms_)
    for (const auto &[kb, cb] : b.terms_) {
      ScalarField::Key k = ka;
      for (int mu = 0; mu < a.d_; ++mu)
        k.k[mu] += kb.k[mu];
      k.twopi += kb.twopi;
      const CRational v = ca * cb;
      auto [it, fresh] = out.terms_.try_emplace(k, v);
      if (!fresh) {
        it->second = it->second + v;
        if (it->second.is_zero())
          out.terms_.erase(it);
      }
    }
  out.rebuild();
  return out;
}

ScalarField operator*(const CRational &c, const ScalarField &f) {
  ScalarField out(f.kind_, f.d_);
  if (c.is_zero())
    return out;
  for (const auto &[k, v] : f.terms_)
    out.terms_[k] = c * v;
  out.rebuild();
  return out;
}

FieldConfig::FieldConfig(Space space, int n, int generators, int parity)
    : space_(space), n_(n), gens_(generators), parity_(parity & 1) {
  if (n < 1)
    throw ConfigError("field needs n >= 1");
  if (generators < 0 || generators > kMaxGenerators)
    throw ConfigError("generator count out of range");
}

void FieldConfig::add(std::vector<int> dims, ScalarField field, int lie,
                      Mask eps) {
  for (size_t i = 0; i < dims.size(); ++i) {
    if (dims[i] < 0 || dims[i] >= space_.d)
      throw ValidationError("form index out of range");
    if (i > 0 && dims[i] <= dims[i - 1])
      throw ValidationError("form indices must be strictly increasing");
  }
  const auto want = space_.is_torus() ? ScalarField::Kind::Fourier
                                      : ScalarField::Kind::Polynomial;
  if (field.kind() != want)
    throw ValidationError(space_.is_torus()
                              ? "torus fields must be Fourier sums"
                              : "chart fields must be polynomials");
  if (field.dim() != space_.d)
    throw ValidationError("field dimension mismatch");
  if (lie < 0 || lie >= n_ * n_)
    throw ValidationError("Lie index out of range");
  if (gens_ < 64 && (eps >> gens_) != 0)
    throw ConfigError("Grassmann monomial exceeds generator count " +
                      std::to_string(gens_));
  if ((static_cast<int>(dims.size()) + std::popcount(eps)) % 2 != parity_)
    throw ValidationError("term violates the total degree constraint");
  if (field.is_zero())
    return;
  for (auto it = terms_.begin(); it != terms_.end(); ++it)
    if (it->dims == dims && it->lie == lie && it->eps == eps) {
      it->field = it->field + field;
      if (it->field.is_zero())
        terms_.erase(it);
      return;
    }
  terms_.push_back({std::move(dims), std::move(field), lie, eps});
}

int FieldConfig::max_degree() const {
  int m = -1;
  for (const auto &t : terms_)
    m = std::max(m, t.degree());
  return m;
}

int FieldConfig::required_generators() const {
  int need = 0;
  for (const auto &t : terms_)
    if (t.eps)
      need = std::max(need, 64 - std::countl_zero(t.eps));
  return need;
}

FieldConfig FieldConfig::operator-() const { return scaled(CRational(-1)); }

FieldConfig operator+(const FieldConfig &a, const FieldConfig &b) {
  if (a.n_ != b.n_ || a.gens_ != b.gens_ || !(a.space_ == b.space_) ||
      a.parity_ != b.parity_)
    throw ConfigError("adding incompatible fields");
  FieldConfig out = a;
  for (const auto &t : b.terms_)
    out.add(t);
  return out;
}

FieldConfig FieldConfig::scaled(const CRational &c) const {
  FieldConfig out(space_, n_, gens_, parity_);
  for (const auto &t : terms_)
    out.add(t.dims, c * t.field, t.lie, t.eps);
  return out;
}

FieldConfig FieldConfig::conjugated(const Matrix &g) const {
  const Matrix gi = g.inverse();
  const LieBasis basis(n_);
  FieldConfig out(space_, n_, gens_, parity_);
  for (const auto &t : terms_) {
    const Matrix m = g * basis.element(t.lie) * gi;
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        if (m(i, j) != Complex(0))
          out.add(t.dims, CRational::from(m(i, j)) * t.field,
                  basis.index(i, j), t.eps);
  }
  return out;
}

FieldConfig FieldConfig::widened(int generators) const {
  if (generators < required_generators())
    throw ConfigError("generator count too small for field");
  FieldConfig out(space_, n_, generators, parity_);
  out.terms_ = terms_;
  return out;
}

FlatConnection FlatConnection::zero(int n, int d) {
  FlatConnection c;
  c.kind_ = Kind::Zero;
  c.n_ = n;
  c.d_ = d;
  c.a_.assign(static_cast<size_t>(d), Matrix::Zero(n, n));
  return c;
}

FlatConnection FlatConnection::constant(std::vector<Matrix> a) {
  if (a.size() < 2)
    throw ConfigError("connection needs one matrix per dimension (d >= 2)");
  const auto n = a.front().rows();
  for (const auto &m : a)
    if (m.rows() != n || m.cols() != n)
      throw ConfigError("connection matrices must be n x n");
  FlatConnection c;
  c.kind_ = Kind::ConstantCommuting;
  c.n_ = static_cast<int>(n);
  c.d_ = static_cast<int>(a.size());
  c.a_ = std::move(a);
  const double r = c.flatness_residual();
  if (r > 1e-12)
    throw ValidationError("connection is not flat: commutator norm " +
                          std::to_string(r));
  return c;
}

Matrix FlatConnection::along(const DVec &v) const {
  Matrix out = Matrix::Zero(n_, n_);
  for (int mu = 0; mu < d_; ++mu)
    if (v[mu] != 0)
      out += v[mu] * a_[mu];
  return out;
}

double FlatConnection::flatness_residual() const {
  double r = 0;
  for (int mu = 0; mu < d_; ++mu)
    for (int nu = mu + 1; nu < d_; ++nu) {
      const double scale =
          std::max(1.0, a_[mu].norm() * a_[nu].norm());
      r = std::max(r, (a_[mu] * a_[nu] - a_[nu] * a_[mu]).norm() / scale);
    }
  return r;
}

FlatConnection FlatConnection::conjugated(const Matrix &g) const {
  FlatConnection c = *this;
  const Matrix gi = g.inverse();
  for (auto &m : c.a_)
    m = g * m * gi;
  return c;
}

bool TwoPatch::Box::contains(const DVec &x, double slack) const {
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x[i] < lo[i] - slack || x[i] > hi[i] + slack)
      return false;
  return true;
}

void TwoPatch::validate(double tol) const {
  const auto n = t12.rows();
  if (t21.rows() != n || conn[0].n() != n || conn[1].n() != n)
    throw ValidationError("transition data has inconsistent dimensions");
  if ((t12 * t21 - Matrix::Identity(n, n)).norm() > tol)
    throw ValidationError("cocycle condition t12 t21 = 1 violated");
  for (int mu = 0; mu < conn[0].dim(); ++mu) {
    const Matrix lhs = conn[0].components()[mu];
    const Matrix rhs = t12 * conn[1].components()[mu] * t21;
    if ((lhs - rhs).norm() > tol * std::max(1.0, lhs.norm()))
      throw ValidationError("connections disagree on the overlap");
  }
}

FieldConfig exterior_derivative(const FieldConfig &c) {
  FieldConfig out(c.space(), c.n(), c.generators(), 1 - c.parity());
  for (const auto &t : c.terms()) {
    const Mask dm = dims_mask(t.dims);
    for (int mu = 0; mu < c.space().d; ++mu) {
      const int s = reorder_sign(Mask{1} << mu, dm);
      if (s == 0)
        continue;
      ScalarField df = t.field.derivative(mu);
      if (df.is_zero())
        continue;
      if (s < 0)
        df = -df;
      out.add(mask_dims(dm | (Mask{1} << mu)), std::move(df), t.lie, t.eps);
    }
  }
  return out;
}

FieldConfig wedge(const FieldConfig &a, const FieldConfig &b, int parity) {
  if (a.n() != b.n() || a.generators() != b.generators() ||
      !(a.space() == b.space()))
    throw ConfigError("wedge of incompatible fields");
  const LieBasis basis(a.n());
  FieldConfig out(a.space(), a.n(), a.generators(), parity);
  for (const auto &x : a.terms())
    for (const auto &y : b.terms()) {
      auto [i, j] = basis.pair(x.lie);
      auto [k, l] = basis.pair(y.lie);
      if (j != k)
        continue;
      const int sf = reorder_sign(dims_mask(x.dims), dims_mask(y.dims));
      if (sf == 0)
        continue;
      const int se = reorder_sign(x.eps, y.eps);
      if (se == 0)
        continue;
      // theta_x passes the form legs of y.
      const int cross =
          (std::popcount(x.eps) * static_cast<int>(y.dims.size())) & 1;
      const int sign = sf * se * (cross ? -1 : 1);
      ScalarField f = x.field * y.field;
      if (sign < 0)
        f = -f;
      out.add(mask_dims(dims_mask(x.dims) | dims_mask(y.dims)), std::move(f),
              basis.index(i, l), x.eps | y.eps);
    }
  return out;
}

FieldConfig connection_field(const FlatConnection &a, const Space &space,
                             int generators) {
  if (a.dim() != space.d)
    throw ConfigError("connection dimension does not match space");
  const auto kind = space.is_torus() ? ScalarField::Kind::Fourier
                                     : ScalarField::Kind::Polynomial;
  const LieBasis basis(a.n());
  FieldConfig out(space, a.n(), generators, 1);
  for (int mu = 0; mu < a.dim(); ++mu)
    for (int i = 0; i < a.n(); ++i)
      for (int j = 0; j < a.n(); ++j) {
        const Complex v = a.components()[mu](i, j);
        if (v != Complex(0))
          out.add({mu}, ScalarField::constant(kind, space.d, CRational::from(v)),
                  basis.index(i, j), 0);
      }
  return out;
}

FieldConfig field_obstruction(const FieldConfig &c, const FlatConnection &a) {
  if (c.parity() != 1)
    throw ValidationError("obstruction expects a degree-1 field");
  const FieldConfig af = connection_field(a, c.space(), c.generators());
  FieldConfig out = exterior_derivative(c);
  out = out + wedge(af, c, 0);
  out = out + wedge(c, af, 0);
  out = out + wedge(c, c, 0);
  return out;
}

SuperMatrix eval_field(const FieldConfig &c, const DVec &x,
                       const std::vector<DVec> &vectors) {
  const int k = static_cast<int>(vectors.size());
  const int n = c.n();
  SuperMatrix out(n, c.generators());
  std::map<Mask, Matrix> acc;
  for (const auto &t : c.terms()) {
    if (t.degree() != k)
      continue;
    double det = 1;
    if (k == 1) {
      det = vectors[0][t.dims[0]];
    } else if (k == 2) {
      det = vectors[0][t.dims[0]] * vectors[1][t.dims[1]] -
            vectors[1][t.dims[0]] * vectors[0][t.dims[1]];
    } else if (k > 2) {
      Eigen::MatrixXd m(k, k);
      for (int r = 0; r < k; ++r)
        for (int s = 0; s < k; ++s)
          m(r, s) = vectors[s][t.dims[r]];
      det = m.determinant();
    }
    if (det == 0)
      continue;
    const Complex v = t.field(x) * det;
    auto [it, fresh] = acc.try_emplace(t.eps, Matrix::Zero(n, n));
    it->second(t.lie / n, t.lie % n) += v;
  }
  for (const auto &[m, b] : acc)
    out += SuperMatrix::monomial(m, b, c.generators());
  return out;
}

} // namespace stringtop
