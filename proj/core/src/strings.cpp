#include "stringtop/strings.hpp"

#include "stringtop/signs.hpp"

#include <algorithm>

namespace stringtop {

namespace {

using boost::multiprecision::cpp_int;

Rational cross(const Rational &ax, const Rational &ay, const Rational &bx,
               const Rational &by) {
  return ax * by - ay * bx;
}

long floor_long(const Rational &x) {
  cpp_int num = boost::multiprecision::numerator(x);
  cpp_int den = boost::multiprecision::denominator(x);
  cpp_int q = num / den;
  if (num < 0 && q * den != num)
    q -= 1;
  return static_cast<long>(q);
}

long ceil_long(const Rational &x) { return -floor_long(-x); }

void require_plane(const PLLoop &a, const PLLoop &b) {
  if (a.dim() != 2 || b.dim() != 2)
    throw ConfigError("string operations are implemented for d = 2");
  if (!(a.space() == b.space()))
    throw ConfigError("loops live on different spaces");
}

} // namespace

std::vector<IntersectionPoint> intersections(const PLLoop &gamma,
                                             const PLLoop &gammabar) {
  require_plane(gamma, gammabar);
  const bool torus = gamma.space().is_torus();
  std::vector<IntersectionPoint> out;
  for (int i = 0; i < gamma.size(); ++i) {
    const auto [p0, p1] = gamma.segment(i);
    const Rational dpx = p1[0] - p0[0], dpy = p1[1] - p0[1];
    for (int j = 0; j < gammabar.size(); ++j) {
      const auto [q0, q1] = gammabar.segment(j);
      const Rational dqx = q1[0] - q0[0], dqy = q1[1] - q0[1];
      long wlo[2] = {0, 0}, whi[2] = {0, 0};
      if (torus)
        for (int mu = 0; mu < 2; ++mu) {
          const Rational pmin = std::min(p0[mu], p1[mu]);
          const Rational pmax = std::max(p0[mu], p1[mu]);
          const Rational qmin = std::min(q0[mu], q1[mu]);
          const Rational qmax = std::max(q0[mu], q1[mu]);
          wlo[mu] = ceil_long(pmin - qmax);
          whi[mu] = floor_long(pmax - qmin);
        }
      const Rational den = cross(dpx, dpy, dqx, dqy);
      for (long wx = wlo[0]; wx <= whi[0]; ++wx)
        for (long wy = wlo[1]; wy <= whi[1]; ++wy) {
          const Rational rx = q0[0] + wx - p0[0];
          const Rational ry = q0[1] + wy - p0[1];
          if (den == 0) {
            if (cross(rx, ry, dpx, dpy) != 0)
              continue; // parallel, disjoint lines
            const Rational len2 = dpx * dpx + dpy * dpy;
            const Rational t0 = (rx * dpx + ry * dpy) / len2;
            const Rational t1 = ((rx + dqx) * dpx + (ry + dqy) * dpy) / len2;
            if (std::max(t0, t1) >= 0 && std::min(t0, t1) <= 1)
              throw TransversalityError(
                  "collinear overlapping segments " + std::to_string(i) +
                      " and " + std::to_string(j),
                  i, j);
            continue;
          }
          const Rational s = cross(rx, ry, dqx, dqy) / den;
          const Rational u = cross(rx, ry, dpx, dpy) / den;
          if (s < 0 || s > 1 || u < 0 || u > 1)
            continue;
          if (s == 0 || s == 1 || u == 0 || u == 1)
            throw TransversalityError("segments " + std::to_string(i) +
                                          " and " + std::to_string(j) +
                                          " meet at a vertex",
                                      i, j);
          IntersectionPoint ip;
          ip.segment = i;
          ip.other_segment = j;
          ip.local = s;
          ip.other_local = u;
          ip.s = (Rational(i) + s) / gamma.size();
          ip.sbar = (Rational(j) + u) / gammabar.size();
          ip.point = {p0[0] + s * dpx, p0[1] + s * dpy};
          ip.shift = {wx, wy};
          ip.sign = den > 0 ? 1 : -1;
          out.push_back(std::move(ip));
        }
    }
  }
  return out;
}

PLLoop concatenate(const PLLoop &gamma, const PLLoop &gammabar,
                   const IntersectionPoint &p) {
  require_plane(gamma, gammabar);
  auto stale = [] {
    return ValidationError("intersection point does not lie on both loops");
  };
  if (p.segment < 0 || p.segment >= gamma.size() || p.other_segment < 0 ||
      p.other_segment >= gammabar.size() || p.local <= 0 || p.local >= 1 ||
      p.other_local <= 0 || p.other_local >= 1 || p.shift.size() != 2 ||
      p.point.size() != 2)
    throw stale();
  const auto [a0, a1] = gamma.segment(p.segment);
  const auto [b0, b1] = gammabar.segment(p.other_segment);
  for (int mu = 0; mu < 2; ++mu) {
    if (a0[mu] + p.local * (a1[mu] - a0[mu]) != p.point[mu])
      throw stale();
    if (b0[mu] + p.shift[mu] + p.other_local * (b1[mu] - b0[mu]) !=
        p.point[mu])
      throw stale();
  }
  const IVec &l = gamma.closure();
  const IVec &lb = gammabar.closure();
  std::vector<RVec> v;
  v.push_back(p.point);
  for (int k = 1; k <= gamma.size(); ++k)
    v.push_back(gamma.vertex(p.segment + k));
  RVec pl = p.point;
  for (int mu = 0; mu < 2; ++mu)
    pl[mu] += l[mu];
  v.push_back(pl);
  for (int k = 1; k <= gammabar.size(); ++k) {
    RVec q = gammabar.vertex(p.other_segment + k);
    for (int mu = 0; mu < 2; ++mu)
      q[mu] += p.shift[mu] + l[mu];
    v.push_back(std::move(q));
  }
  return PLLoop(gamma.space(), std::move(v), {l[0] + lb[0], l[1] + lb[1]});
}

StringCycle StringCycle::single(const PLLoop &loop, long coeff) {
  StringCycle c;
  c.add(loop, coeff);
  return c;
}

void StringCycle::add(const PLLoop &loop, long coeff) {
  if (coeff == 0)
    return;
  PLLoop nf = loop.normal_form();
  auto it = terms_.find(nf);
  if (it == terms_.end()) {
    terms_.emplace(std::move(nf), coeff);
  } else {
    it->second += coeff;
    if (it->second == 0)
      terms_.erase(it);
  }
}

std::map<IVec, long> StringCycle::reduced() const {
  std::map<IVec, long> out;
  for (const auto &[loop, c] : terms_)
    out[loop_class_torus(loop)] += c;
  std::erase_if(out, [](const auto &kv) { return kv.second == 0; });
  return out;
}

StringCycle StringCycle::operator-() const { return -1 * *this; }

StringCycle operator+(const StringCycle &a, const StringCycle &b) {
  StringCycle out = a;
  for (const auto &[loop, c] : b.terms_)
    out.add(loop, c);
  return out;
}

StringCycle operator*(long c, const StringCycle &a) {
  StringCycle out;
  if (c == 0)
    return out;
  out.terms_ = a.terms_;
  for (auto &[loop, v] : out.terms_)
    v *= c;
  return out;
}

std::map<IVec, long> add_classes(const std::map<IVec, long> &a,
                                 const std::map<IVec, long> &b, long scale) {
  std::map<IVec, long> out = a;
  for (const auto &[k, v] : b)
    out[k] += scale * v;
  std::erase_if(out, [](const auto &kv) { return kv.second == 0; });
  return out;
}

StringCycle string_bracket(const StringCycle &a, const StringCycle &abar) {
  StringCycle out;
  const int pre =
      string_bracket_prefactor(a.degree(), abar.degree(), /*d=*/2);
  for (const auto &[g, cg] : a.terms())
    for (const auto &[gb, cgb] : abar.terms())
      for (const auto &p : intersections(g, gb))
        out.add(concatenate(g, gb, p), pre * cg * cgb * p.sign);
  return out;
}

PLLoop straight_loop(const IVec &cls, const RVec &base, int pieces) {
  if (cls.size() != base.size())
    throw ConfigError("class and base point dimensions differ");
  if (pieces < 3)
    throw ConfigError("a loop needs at least 3 pieces");
  std::vector<RVec> v;
  for (int k = 0; k < pieces; ++k) {
    RVec x = base;
    for (size_t mu = 0; mu < x.size(); ++mu)
      x[mu] += Rational(cls[mu]) * Rational(k, pieces);
    v.push_back(std::move(x));
  }
  return PLLoop(Space::torus(static_cast<int>(cls.size())), std::move(v),
                cls);
}

GoldmanTerm goldman_torus(const IVec &c1, const IVec &c2) {
  if (c1.size() != 2 || c2.size() != 2)
    throw ConfigError("the torus oracle works with d = 2 classes");
  // Base points with large prime denominators keep every lattice translate
  // of one lift off the other lift's line and off its endpoints.
  const Rational ox(1, 1009), oy(1, 1013);
  const Rational a1(c1[0]), b1(c1[1]), a2(c2[0]), b2(c2[1]);
  const Rational den = cross(a1, b1, a2, b2);
  GoldmanTerm out;
  out.cls = {c1[0] + c2[0], c1[1] + c2[1]};
  if (den == 0)
    return out;
  const int sign = den > 0 ? 1 : -1;
  const long rx = std::abs(c1[0]) + std::abs(c2[0]) + 1;
  const long ry = std::abs(c1[1]) + std::abs(c2[1]) + 1;
  // x1 + s c1 = x2 + u c2 + w  with  x2 - x1 = (ox, oy).
  for (long wx = -rx; wx <= rx; ++wx)
    for (long wy = -ry; wy <= ry; ++wy) {
      const Rational qx = ox + wx, qy = oy + wy;
      const Rational s = cross(qx, qy, a2, b2) / den;
      const Rational u = cross(qx, qy, a1, b1) / den;
      if (s >= 0 && s < 1 && u >= 0 && u < 1)
        out.coefficient += sign;
    }
  return out;
}

JacobiResidual jacobi_residual(const StringCycle &a, const StringCycle &b,
                               const StringCycle &c) {
  const int d = 2;
  JacobiResidual r;
  r.raw = jacobi_sign(a.degree(), c.degree(), d) *
              string_bracket(string_bracket(a, b), c) +
          jacobi_sign(b.degree(), a.degree(), d) *
              string_bracket(string_bracket(b, c), a) +
          jacobi_sign(c.degree(), b.degree(), d) *
              string_bracket(string_bracket(c, a), b);
  bool torus = true;
  for (const auto *x : {&a, &b, &c})
    for (const auto &[loop, v] : x->terms())
      torus = torus && loop.space().is_torus();
  if (torus)
    r.reduced = r.raw.reduced();
  return r;
}

} // namespace stringtop
