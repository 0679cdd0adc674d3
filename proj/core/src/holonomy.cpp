#include "stringtop/holonomy.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <map>

namespace stringtop {

void TransportPlan::validate() const {
  if (steps < 1)
    throw ConfigError("transport plan needs at least one step");
  if (!(tol > 0))
    throw ConfigError("transport tolerance must be positive");
  if (max_steps < steps)
    throw ConfigError("step cap below the initial step count");
}

namespace {

struct Piece {
  int segment;
  double a, b;
};

std::vector<Piece> pieces(const PLLoop &loop, double s, double t) {
  if (s > t)
    throw ConfigError("transport requires s <= t");
  if (s < 0 || t > 1)
    throw ConfigError("transport times must lie in [0,1]");
  const int k = loop.size();
  std::vector<Piece> out;
  for (int i = 0; i < k; ++i) {
    const double lo = static_cast<double>(i) / k;
    const double hi = static_cast<double>(i + 1) / k;
    const double a = std::max(s, lo), b = std::min(t, hi);
    if (b > a)
      out.push_back({i, a, b});
  }
  return out;
}

double total_norm(const std::vector<SuperMatrix> &v) {
  double s = 0;
  for (const auto &m : v)
    s += m.norm();
  return s;
}

using RawFn = std::function<std::vector<SuperMatrix>(int steps)>;

/// Step doubling with a Richardson tableau of orders 2, 3, 4, ...
std::vector<SuperMatrix> refine(const RawFn &raw, const TransportPlan &plan) {
  if (!plan.richardson)
    return raw(plan.steps);
  std::vector<std::vector<std::vector<SuperMatrix>>> tab;
  double diff = std::numeric_limits<double>::infinity();
  for (int k = 0, steps = plan.steps;; ++k, steps *= 2) {
    if (steps > plan.max_steps)
      throw ConvergenceError("transport did not reach tolerance " +
                                 std::to_string(plan.tol) + " within " +
                                 std::to_string(plan.max_steps) +
                                 " steps per piece",
                             diff);
    std::vector<std::vector<SuperMatrix>> row;
    row.push_back(raw(steps));
    for (int j = 1; j <= k; ++j) {
      const double factor = std::ldexp(1.0, j + 1) - 1.0;
      std::vector<SuperMatrix> next;
      for (size_t q = 0; q < row[j - 1].size(); ++q)
        next.push_back(row[j - 1][q] +
                       (row[j - 1][q] - tab[k - 1][j - 1][q]) *
                           Complex(1.0 / factor));
      row.push_back(std::move(next));
    }
    if (k >= 1) {
      std::vector<SuperMatrix> delta;
      for (size_t q = 0; q < row[k].size(); ++q)
        delta.push_back(row[k][q] - tab[k - 1][k - 1][q]);
      diff = total_norm(delta);
      if (diff <= plan.tol * std::max(1.0, total_norm(row[k])))
        return row[k];
    }
    tab.push_back(std::move(row));
  }
}

SuperMatrix step_exponential(const SuperMatrix &x, double h, int n,
                             int gens) {
  SuperMatrix e = SuperMatrix::identity(n, gens);
  e += x * Complex(h);
  e += (x * x) * Complex(0.5 * h * h);
  return e;
}

/// Builds X(t) = A(gamma') + sum_k sum_{|S| = k-1} xi_S C_k(gamma', v_S),
/// with the xi's occupying the lowest m generator slots.
class FieldGenerator {
public:
  FieldGenerator(const FlatConnection *a, const FieldConfig &c,
                 const PLLoop &loop,
                 const std::vector<VariationField> &variations)
      : a_(a), c_(c), loop_(loop), vars_(variations),
        m_(static_cast<int>(variations.size())), n_(c.n()),
        gens_(c.generators() + m_) {
    if (gens_ > kMaxGenerators)
      throw ConfigError("too many Grassmann generators for the requested "
                        "loop-space degree");
    for (const auto &v : vars_)
      if (v.segments() != loop.size())
        throw ValidationError("variation field does not match loop");
    if (a_ && a_->n() != n_)
      throw ConfigError("connection and field dimensions differ");
    for (int i = 0; i < loop.size(); ++i) {
      vel_.push_back(loop.velocity(i));
      start_.push_back(to_double(loop.vertex(i)));
      end_.push_back(to_double(loop.vertex(i + 1)));
      body_.push_back(a_ ? a_->along(vel_.back())
                         : Matrix::Zero(n_, n_).eval());
    }
    for (Mask s = 0; s < (Mask{1} << m_); ++s)
      subsets_.push_back(s);
  }

  int generators() const { return gens_; }

  SuperMatrix operator()(int seg, double t) const {
    const double local = t * loop_.size() - seg;
    const DVec x = start_[seg] + local * (end_[seg] - start_[seg]);
    std::map<Mask, Matrix> acc;
    if (!body_[seg].isZero(0.0))
      acc.emplace(0, body_[seg]);
    std::vector<DVec> legs;
    for (const auto &v : vars_)
      legs.push_back(v.at(seg, local));
    std::vector<DVec> vectors;
    for (const auto &term : c_.terms()) {
      const int k = term.degree();
      if (k == 0 || k - 1 > m_)
        continue;
      const Complex f = term.field(x);
      for (Mask s : subsets_) {
        if (std::popcount(s) != k - 1)
          continue;
        vectors.assign(1, vel_[seg]);
        for (int j = 0; j < m_; ++j)
          if (s & (Mask{1} << j))
            vectors.push_back(legs[j]);
        double det;
        if (k == 1) {
          det = vectors[0][term.dims[0]];
        } else if (k == 2) {
          det = vectors[0][term.dims[0]] * vectors[1][term.dims[1]] -
                vectors[1][term.dims[0]] * vectors[0][term.dims[1]];
        } else {
          Eigen::MatrixXd mm(k, k);
          for (int r = 0; r < k; ++r)
            for (int q = 0; q < k; ++q)
              mm(r, q) = vectors[q][term.dims[r]];
          det = mm.determinant();
        }
        if (det == 0)
          continue;
        const Mask mask = s | (term.eps << m_);
        auto [it, fresh] = acc.try_emplace(mask, Matrix::Zero(n_, n_));
        it->second(term.lie / n_, term.lie % n_) += f * det;
      }
    }
    SuperMatrix out(n_, gens_);
    for (const auto &[mask, b] : acc)
      out += SuperMatrix::monomial(mask, b, gens_);
    return out;
  }

private:
  const FlatConnection *a_;
  const FieldConfig &c_;
  const PLLoop &loop_;
  const std::vector<VariationField> &vars_;
  int m_, n_, gens_;
  std::vector<DVec> vel_, start_, end_;
  std::vector<Matrix> body_;
  std::vector<Mask> subsets_;
};

void check_field(const FieldConfig &c, const PLLoop &loop) {
  if (!(c.space() == loop.space()))
    throw ConfigError("field and loop live on different spaces");
  if (c.generators() < c.required_generators())
    throw ConfigError("Grassmann generator count " +
                      std::to_string(c.generators()) +
                      " below the field's requirement " +
                      std::to_string(c.required_generators()));
}

} // namespace

SuperMatrix ordered_exponential(const Generator &x, const PLLoop &loop,
                                double s, double t, const TransportPlan &plan,
                                int n, int generators) {
  plan.validate();
  SuperMatrix total = SuperMatrix::identity(n, generators);
  for (const Piece &p : pieces(loop, s, t)) {
    auto raw = [&](int steps) {
      const double h = (p.b - p.a) / steps;
      SuperMatrix u = SuperMatrix::identity(n, generators);
      for (int k = 0; k < steps; ++k) {
        const SuperMatrix xk = x(p.segment, p.a + (k + 0.5) * h);
        u = u * step_exponential(xk, h, n, generators);
      }
      return std::vector<SuperMatrix>{u};
    };
    total = total * refine(raw, plan)[0];
  }
  return total;
}

std::pair<SuperMatrix, SuperMatrix>
ordered_exponential_pair(const Generator &x, const Generator &y,
                         const PLLoop &loop, double s, double t,
                         const TransportPlan &plan, int n, int generators) {
  plan.validate();
  SuperMatrix u = SuperMatrix::identity(n, generators);
  SuperMatrix w(n, generators);
  for (const Piece &p : pieces(loop, s, t)) {
    auto raw = [&](int steps) {
      const double h = (p.b - p.a) / steps;
      SuperMatrix pu = SuperMatrix::identity(n, generators);
      SuperMatrix pw(n, generators);
      for (int k = 0; k < steps; ++k) {
        const double tm = p.a + (k + 0.5) * h;
        const SuperMatrix xk = x(p.segment, tm);
        const SuperMatrix yk = y(p.segment, tm);
        const SuperMatrix e0 = step_exponential(xk, h, n, generators);
        SuperMatrix e1 = yk * Complex(h);
        e1 += (xk * yk + yk * xk) * Complex(0.5 * h * h);
        pw = pw * e0 + pu * e1;
        pu = pu * e0;
      }
      return std::vector<SuperMatrix>{pu, pw};
    };
    const auto r = refine(raw, plan);
    w = w * r[0] + u * r[1];
    u = u * r[0];
  }
  return {u, w};
}

SuperMatrix transport(const FlatConnection &a, const PLLoop &loop, double s,
                      double t, const TransportPlan &plan, int generators) {
  if (a.dim() != loop.dim())
    throw ConfigError("connection dimension does not match loop");
  std::vector<SuperMatrix> per_segment;
  for (int i = 0; i < loop.size(); ++i)
    per_segment.push_back(
        SuperMatrix::constant(a.along(loop.velocity(i)), generators));
  Generator x = [&](int seg, double) { return per_segment[seg]; };
  return ordered_exponential(x, loop, s, t, plan, a.n(), generators);
}

SuperMatrix gen_transport(const FlatConnection &a, const FieldConfig &c,
                          const PLLoop &loop, double s, double t,
                          const std::vector<VariationField> &variations,
                          const TransportPlan &plan) {
  check_field(c, loop);
  const FieldGenerator gen(&a, c, loop, variations);
  const int m = static_cast<int>(variations.size());
  const SuperMatrix u =
      ordered_exponential(std::cref(gen), loop, s, t, plan, c.n(),
                          gen.generators());
  return u.coefficient_of((Mask{1} << m) - 1, m, c.generators());
}

GradedCoefficient wilson(const FlatConnection &a, const FieldConfig &c,
                         const PLLoop &loop,
                         const std::vector<VariationField> &variations,
                         const TransportPlan &plan) {
  return gen_transport(a, c, loop, 0.0, 1.0, variations, plan).trace();
}

SuperMatrix insertion_integral(const FlatConnection &a, const FieldConfig &c,
                               const FieldConfig &eta, const PLLoop &loop,
                               const std::vector<VariationField> &variations,
                               const TransportPlan &plan) {
  check_field(c, loop);
  check_field(eta, loop);
  if (eta.n() != c.n() || eta.generators() != c.generators())
    throw ConfigError("inserted field must match the background field");
  const FieldGenerator gx(&a, c, loop, variations);
  const FieldGenerator gy(nullptr, eta, loop, variations);
  const int m = static_cast<int>(variations.size());
  const auto [u, w] = ordered_exponential_pair(
      std::cref(gx), std::cref(gy), loop, 0.0, 1.0, plan, c.n(),
      gx.generators());
  return w.coefficient_of((Mask{1} << m) - 1, m, c.generators());
}

GradedCoefficient
insertion_derivative(const FlatConnection &a, const FieldConfig &c,
                     const PLLoop &loop, const FieldConfig &eta,
                     const std::vector<VariationField> &variations,
                     const TransportPlan &plan) {
  if (eta.parity() != 1)
    throw ValidationError("direction field must have total degree 1");
  return insertion_integral(a, c, eta, loop, variations, plan).trace();
}

namespace {

void check_field_agreement(const TwoPatch &p, const FieldConfig &c1,
                           const FieldConfig &c2, const DVec &x) {
  const int d = c1.space().d;
  for (Mask legs = 1; legs < (Mask{1} << d); ++legs) {
    std::vector<DVec> vectors;
    for (int mu = 0; mu < d; ++mu)
      if (legs & (Mask{1} << mu))
        vectors.push_back(DVec::Unit(d, mu));
    const SuperMatrix lhs = eval_field(c1, x, vectors);
    const SuperMatrix rhs = eval_field(c2, x, vectors).conjugated(p.t12);
    if ((lhs - rhs).norm() > 1e-9 * std::max(1.0, lhs.norm()))
      throw ValidationError("fields disagree on the patch overlap");
  }
}

} // namespace

GradedCoefficient glued_wilson(const TwoPatch &patches,
                               const FieldConfig &c1, const FieldConfig &c2,
                               const PLLoop &loop,
                               const PatchSchedule &schedule,
                               const TransportPlan &plan) {
  patches.validate();
  if (loop.space().is_torus())
    throw ConfigError("two-patch gluing is defined for chart loops");
  if (schedule.start_patch != 0 && schedule.start_patch != 1)
    throw ConfigError("patch index must be 0 or 1");
  if (schedule.crossings.size() % 2 != 0)
    throw ValidationError("a closed loop must cross the patch boundary an "
                          "even number of times");
  const FieldConfig *fields[2] = {&c1, &c2};
  std::vector<double> times{0.0};
  for (double c : schedule.crossings) {
    if (c <= times.back() || c >= 1.0)
      throw ValidationError("crossing times must increase inside (0,1)");
    times.push_back(c);
  }
  times.push_back(1.0);
  const int n = c1.n();
  const int gens = c1.generators();
  if (c2.n() != n || c2.generators() != gens)
    throw ConfigError("patch fields must have equal shapes");
  SuperMatrix hol = SuperMatrix::identity(n, gens);
  int patch = schedule.start_patch;
  for (size_t k = 0; k + 1 < times.size(); ++k) {
    const double a = times[k], b = times[k + 1];
    const auto &box = patches.box[patch];
    auto inside = [&](double t) { return box.contains(loop.point(t), 1e-12); };
    if (!inside(a) || !inside(b))
      throw ValidationError("loop leaves its patch");
    for (int i = 0; i < loop.size(); ++i) {
      const double ti = static_cast<double>(i) / loop.size();
      if (ti > a && ti < b && !inside(ti))
        throw ValidationError("loop leaves its patch");
    }
    hol = hol * gen_transport(patches.conn[patch], *fields[patch], loop, a, b,
                              {}, plan);
    if (k + 2 < times.size()) {
      const DVec x = loop.point(b);
      if (!patches.box[0].contains(x, 1e-12) ||
          !patches.box[1].contains(x, 1e-12))
        throw ValidationError("crossing point outside the overlap");
      check_field_agreement(patches, c1, c2, x);
      const Matrix &tr = patch == 0 ? patches.t12 : patches.t21;
      hol = hol * SuperMatrix::constant(tr, gens);
      patch = 1 - patch;
    }
  }
  return hol.trace();
}

Matrix constant_connection_holonomy(const FlatConnection &a,
                                    const PLLoop &loop) {
  Matrix u = Matrix::Identity(a.n(), a.n());
  for (int i = 0; i < loop.size(); ++i) {
    const Matrix x = a.along(loop.velocity(i)) / static_cast<double>(loop.size());
    u = u * x.exp();
  }
  return u;
}

double measured_transport_order(const FlatConnection &a, const PLLoop &loop,
                                int steps) {
  const Matrix exact = constant_connection_holonomy(a, loop);
  TransportPlan raw;
  raw.richardson = false;
  raw.steps = steps;
  const double e1 = (transport(a, loop, 0, 1, raw).body() - exact).norm();
  raw.steps = 2 * steps;
  const double e2 = (transport(a, loop, 0, 1, raw).body() - exact).norm();
  return std::log2(e1 / e2);
}

} // namespace stringtop
