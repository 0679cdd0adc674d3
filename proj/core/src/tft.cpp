#include "stringtop/tft.hpp"

#include "stringtop/signs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace stringtop {

GradedPhaseModel::GradedPhaseModel(std::vector<Variable> vars,
                                   std::vector<std::vector<Rational>> omega,
                                   int d, int coefficient_generators)
    : vars_(std::move(vars)), omega_(std::move(omega)), d_(d),
      gens_(coefficient_generators) {
  const int v = size();
  if (static_cast<int>(omega_.size()) != v)
    throw ValidationError("pairing table must be square in the variables");
  for (const auto &row : omega_)
    if (static_cast<int>(row.size()) != v)
      throw ValidationError("pairing table must be square in the variables");
  for (const auto &x : vars_) {
    if (x.parity != 0 && x.parity != 1)
      throw ValidationError("variable parity must be 0 or 1");
    parities_.push_back(x.parity);
  }
  for (int i = 0; i < v; ++i)
    for (int j = 0; j < v; ++j) {
      const Rational &w = omega_[i][j];
      if (w == 0) {
        if (omega_[j][i] != 0)
          throw ValidationError("pairing table is not graded antisymmetric");
        continue;
      }
      if ((parities_[i] + parities_[j] + d_) % 2 != 0)
        throw ValidationError("pairing of " + vars_[i].name + " and " +
                              vars_[j].name +
                              " has the wrong parity for this bracket");
      const int s = antisymmetry_sign(parities_[i], parities_[j], d_);
      if (omega_[j][i] != -Rational(s) * w)
        throw ValidationError("pairing table is not graded antisymmetric");
    }
}

namespace {

std::vector<std::vector<Rational>> zeros(int v) {
  return std::vector<std::vector<Rational>>(v, std::vector<Rational>(v, 0));
}

void pair_up(std::vector<std::vector<Rational>> &w, int i, int j,
             const std::vector<int> &par, int d) {
  w[i][j] = 1;
  w[j][i] = -Rational(antisymmetry_sign(par[i], par[j], d));
}

} // namespace

GradedPhaseModel GradedPhaseModel::odd_darboux(int gens) {
  auto w = zeros(2);
  pair_up(w, 0, 1, {0, 1}, 1);
  return GradedPhaseModel({{"phi", 0}, {"phi+", 1}}, w, 1, gens);
}

GradedPhaseModel GradedPhaseModel::odd_two_fields(int gens) {
  const std::vector<int> par{0, 1, 1, 0};
  auto w = zeros(4);
  pair_up(w, 0, 1, par, 1);
  pair_up(w, 2, 3, par, 1);
  return GradedPhaseModel({{"phi", 0}, {"phi+", 1}, {"c", 1}, {"c+", 0}}, w,
                          1, gens);
}

GradedPhaseModel GradedPhaseModel::even_canonical(int gens) {
  auto w = zeros(2);
  pair_up(w, 0, 1, {0, 0}, 0);
  return GradedPhaseModel({{"q", 0}, {"p", 0}}, w, 0, gens);
}

GradedPhaseModel GradedPhaseModel::even_with_ghosts(int gens) {
  const std::vector<int> par{0, 0, 1, 1};
  auto w = zeros(4);
  pair_up(w, 0, 1, par, 0);
  pair_up(w, 2, 3, par, 0);
  return GradedPhaseModel({{"q", 0}, {"p", 0}, {"c", 1}, {"b", 1}}, w, 0,
                          gens);
}

int GradedPhaseModel::index(const std::string &name) const {
  for (int i = 0; i < size(); ++i)
    if (vars_[i].name == name)
      return i;
  throw ConfigError("variable '" + name + "' not in model");
}

GradedPolynomial::GradedPolynomial(const GradedPhaseModel &model)
    : parities_(model.parities()), gens_(model.coefficient_generators()) {}

GradedPolynomial GradedPolynomial::constant(const GradedPhaseModel &model,
                                            const ExactGraded &c) {
  GradedPolynomial p(model);
  if (c.generators() != p.gens_)
    throw ConfigError("coefficient generator count mismatch");
  p.add_term({}, c);
  return p;
}

GradedPolynomial GradedPolynomial::variable(const GradedPhaseModel &model,
                                            int i) {
  return monomial(model, ExactGraded(model.coefficient_generators(), 1), {i});
}

GradedPolynomial GradedPolynomial::monomial(const GradedPhaseModel &model,
                                            const ExactGraded &c,
                                            const std::vector<int> &vars) {
  GradedPolynomial p(model);
  if (c.generators() != p.gens_)
    throw ConfigError("coefficient generator count mismatch");
  std::vector<int> m = vars;
  for (int x : m)
    if (x < 0 || x >= model.size())
      throw ConfigError("variable index out of range");
  int sign = 1;
  // Insertion sort; odd variables anticommute.
  for (size_t i = 1; i < m.size(); ++i)
    for (size_t j = i; j > 0 && m[j - 1] > m[j]; --j) {
      if (p.parities_[m[j - 1]] && p.parities_[m[j]])
        sign = -sign;
      std::swap(m[j - 1], m[j]);
    }
  for (size_t i = 1; i < m.size(); ++i)
    if (m[i] == m[i - 1] && p.parities_[m[i]])
      return p;
  p.add_term(std::move(m), sign > 0 ? c : -c);
  return p;
}

void GradedPolynomial::add_term(Monomial m, ExactGraded c) {
  if (c.is_zero())
    return;
  auto [it, fresh] = terms_.try_emplace(std::move(m), c);
  if (!fresh) {
    it->second += c;
    if (it->second.is_zero())
      terms_.erase(it);
  }
}

std::optional<int> GradedPolynomial::parity() const {
  std::optional<int> par;
  for (const auto &[m, c] : terms_) {
    int pm = 0;
    for (int x : m)
      pm += parities_[x];
    for (const auto &t : c.terms()) {
      const int p = (pm + mask_parity(t.mask)) & 1;
      if (par && *par != p)
        return std::nullopt;
      par = p;
    }
  }
  return par.value_or(0);
}

double GradedPolynomial::norm() const {
  double s = 0;
  for (const auto &[m, c] : terms_)
    s += c.norm();
  return s;
}

GradedPolynomial GradedPolynomial::left_derivative(int j) const {
  GradedPolynomial out = *this;
  out.terms_.clear();
  const int pj = parities_.at(j);
  for (const auto &[m, c] : terms_) {
    int before = 0;
    for (size_t pos = 0; pos < m.size(); ++pos) {
      if (m[pos] == j) {
        Monomial rest = m;
        rest.erase(rest.begin() + static_cast<long>(pos));
        // d/dz_j passes the coefficient and the variables in front.
        ExactGraded cc = pj ? c.part(0) - c.part(1) : c;
        if (pj && (before & 1))
          cc = -cc;
        out.add_term(std::move(rest), std::move(cc));
      }
      before += parities_[m[pos]];
    }
  }
  return out;
}

GradedPolynomial GradedPolynomial::right_derivative(int i) const {
  GradedPolynomial out = *this;
  out.terms_.clear();
  const int pi = parities_.at(i);
  for (const auto &[m, c] : terms_) {
    for (size_t pos = 0; pos < m.size(); ++pos) {
      if (m[pos] != i)
        continue;
      int after = 0;
      for (size_t q = pos + 1; q < m.size(); ++q)
        after += parities_[m[q]];
      Monomial rest = m;
      rest.erase(rest.begin() + static_cast<long>(pos));
      out.add_term(std::move(rest), (pi && (after & 1)) ? -c : c);
    }
  }
  return out;
}

GradedPolynomial GradedPolynomial::operator-() const {
  GradedPolynomial out = *this;
  for (auto &[m, c] : out.terms_)
    c = -c;
  return out;
}

GradedPolynomial operator+(const GradedPolynomial &a,
                           const GradedPolynomial &b) {
  if (a.parities_ != b.parities_ || a.gens_ != b.gens_)
    throw ConfigError("polynomials from different models");
  GradedPolynomial out = a;
  for (const auto &[m, c] : b.terms_)
    out.add_term(m, c);
  return out;
}

GradedPolynomial operator-(const GradedPolynomial &a,
                           const GradedPolynomial &b) {
  return a + (-b);
}

GradedPolynomial operator*(const GradedPolynomial &a,
                           const GradedPolynomial &b) {
  if (a.parities_ != b.parities_ || a.gens_ != b.gens_)
    throw ConfigError("polynomials from different models");
  GradedPolynomial out = a;
  out.terms_.clear();
  const auto &par = a.parities_;
  for (const auto &[m1, c1] : a.terms_) {
    int p1 = 0;
    for (int x : m1)
      p1 += par[x];
    for (const auto &[m2, c2] : b.terms_) {
      // Merge two sorted monomials, counting odd-odd transpositions.
      GradedPolynomial::Monomial m;
      m.reserve(m1.size() + m2.size());
      int swaps = 0;
      bool dead = false;
      size_t i = 0, j = 0;
      int odd_left = 0; // odd variables of m1 not yet emitted
      for (int x : m1)
        odd_left += par[x];
      while (i < m1.size() || j < m2.size()) {
        if (j == m2.size() || (i < m1.size() && m1[i] <= m2[j])) {
          if (j < m2.size() && m1[i] == m2[j] && par[m1[i]])
            dead = true;
          odd_left -= par[m1[i]];
          m.push_back(m1[i++]);
        } else {
          if (par[m2[j]])
            swaps += odd_left;
          m.push_back(m2[j++]);
        }
      }
      if (dead)
        continue;
      // c1 m1 c2 m2 = (-1)^{|m1||c2|} c1 c2 m1 m2
      const ExactGraded c2s = (p1 & 1) ? c2.part(0) - c2.part(1) : c2;
      ExactGraded c = c1 * c2s;
      if (swaps & 1)
        c = -c;
      out.add_term(std::move(m), std::move(c));
    }
  }
  return out;
}

GradedPolynomial operator*(const Rational &c, const GradedPolynomial &a) {
  GradedPolynomial out = a;
  out.terms_.clear();
  for (const auto &[m, v] : a.terms_)
    out.add_term(m, v * c);
  return out;
}

std::string GradedPolynomial::to_string(const GradedPhaseModel &model) const {
  if (terms_.empty())
    return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto &[m, c] : terms_) {
    if (!first)
      os << " + ";
    first = false;
    os << "(";
    bool f2 = true;
    for (const auto &t : c.terms()) {
      if (!f2)
        os << " + ";
      f2 = false;
      os << t.value;
      for (int b = 0; b < 64; ++b)
        if (t.mask & (Mask{1} << b))
          os << "*t" << (b + 1);
    }
    os << ")";
    for (int x : m)
      os << "*" << model.variable(x).name;
  }
  return os.str();
}

GradedPolynomial graded_bracket(const GradedPolynomial &p,
                                const GradedPolynomial &q,
                                const GradedPhaseModel &model) {
  if (p.generators() != model.coefficient_generators() ||
      q.generators() != model.coefficient_generators())
    throw ConfigError("polynomial does not belong to this model");
  GradedPolynomial out(model);
  for (int i = 0; i < model.size(); ++i) {
    GradedPolynomial pi(model);
    bool have = false;
    for (int j = 0; j < model.size(); ++j) {
      const Rational &w = model.omega(i, j);
      if (w == 0)
        continue;
      if (!have) {
        pi = p.right_derivative(i);
        have = true;
      }
      if (pi.is_zero())
        break;
      out = out + pi * (w * q.left_derivative(j));
    }
  }
  return out;
}

DeltaResult delta_and_nilpotency(const GradedPolynomial &s,
                                 const GradedPolynomial &p,
                                 const GradedPhaseModel &model) {
  const GradedPolynomial ss = graded_bracket(s, s, model);
  if (!ss.is_zero())
    throw MasterEquationError("{S;S} != 0", ss.norm());
  DeltaResult r{graded_bracket(s, p, model), GradedPolynomial(model)};
  r.delta_square = graded_bracket(s, r.delta, model);
  return r;
}

std::vector<GradedPolynomial>
master_equation_search(const GradedPhaseModel &model,
                       const std::vector<std::vector<int>> &candidates,
                       int range) {
  const int want = (model.d() + 1) & 1;
  const ExactGraded one(model.coefficient_generators(), 1);
  std::vector<GradedPolynomial> basis;
  for (const auto &c : candidates) {
    GradedPolynomial m = GradedPolynomial::monomial(model, one, c);
    if (!m.is_zero() && m.parity() == want)
      basis.push_back(std::move(m));
  }
  if (basis.size() > 10)
    throw ConfigError("master equation search limited to 10 monomials");
  std::vector<GradedPolynomial> found;
  const int base = 2 * range + 1;
  long total = 1;
  for (size_t i = 0; i < basis.size(); ++i)
    total *= base;
  for (long code = 1; code < total; ++code) {
    GradedPolynomial s(model);
    long rest = code;
    for (const auto &b : basis) {
      const int k = static_cast<int>(rest % base) - range;
      rest /= base;
      if (k != 0)
        s = s + Rational(k) * b;
    }
    if (s.is_zero() || !graded_bracket(s, s, model).is_zero())
      continue;
    bool acts = false;
    for (int v = 0; v < model.size() && !acts; ++v)
      acts = !graded_bracket(s, GradedPolynomial::variable(model, v), model)
                  .is_zero();
    if (acts)
      found.push_back(std::move(s));
  }
  return found;
}

WilsonBracket wilson_field_bracket(const PLLoop &gamma, const PLLoop &gammabar,
                                   const FlatConnection &a,
                                   const TransportPlan &plan) {
  const int d = gamma.dim();
  if (d != 2)
    throw ConfigError("the localized Wilson bracket is implemented for d = 2");
  if (a.flatness_residual() > 1e-12)
    throw ValidationError("background connection is not flat");
  const LieBasis basis(a.n());
  WilsonBracket out{GradedCoefficient(0), GradedCoefficient(0), 0};
  for (const auto &p : intersections(gamma, gammabar)) {
    const double s = static_cast<double>(p.s);
    const double sb = static_cast<double>(p.sbar);
    const SuperMatrix u1 = transport(a, gamma, 0, s, plan);
    const SuperMatrix u2 = transport(a, gamma, s, 1, plan);
    const SuperMatrix v1 = transport(a, gammabar, 0, sb, plan);
    const SuperMatrix v2 = transport(a, gammabar, sb, 1, plan);
    const Complex w(wilson_bracket_sign(d) * p.sign);
    out.kappa_path += fuse_traces(u1, u2, v1, v2, basis) * w;
    out.fused_path += fused_trace(u1, u2, v1, v2) * w;
    ++out.intersections;
  }
  return out;
}

MainTheoremResult main_theorem_check(const StringCycle &a,
                                     const StringCycle &abar,
                                     const FlatConnection &conn,
                                     const TransportPlan &plan) {
  const int d = 2;
  MainTheoremResult r{GradedCoefficient(0), GradedCoefficient(0), 0, 1};
  for (const auto &[g, cg] : a.terms())
    for (const auto &[gb, cgb] : abar.terms()) {
      const WilsonBracket w = wilson_field_bracket(g, gb, conn, plan);
      r.lhs += w.kappa_path *
               Complex(homomorphism_sign(a.degree(), abar.degree(), d) *
                       cg * cgb);
    }
  const StringCycle bracket = string_bracket(a, abar);
  for (const auto &[loop, c] : bracket.terms()) {
    const FieldConfig zero(loop.space(), conn.n(), 0, 1);
    r.rhs += wilson(conn, zero, loop, {}, plan) *
             Complex(intersection_current_sign(d) * c);
  }
  r.residual = (r.lhs - r.rhs).norm();
  r.scale = std::max({1.0, r.lhs.norm(), r.rhs.norm()});
  return r;
}

FundamentalResult fundamental_identity_check(const FlatConnection &a,
                                             const FieldConfig &c,
                                             const PLLoop &loop,
                                             const std::vector<RVec> &disp,
                                             const TransportPlan &plan) {
  const std::vector<VariationField> v{VariationField::from_vertices(loop, disp)};
  const FieldConfig f = field_obstruction(c, a);
  const GradedCoefficient algebraic =
      insertion_integral(a, c, f, loop, v, plan).trace();
  auto diff = [&](const Rational &eps) {
    const GradedCoefficient hp =
        wilson(a, c, loop.displaced(disp, eps), {}, plan);
    const GradedCoefficient hm =
        wilson(a, c, loop.displaced(disp, -eps), {}, plan);
    return (hp - hm) * Complex(0.5 / static_cast<double>(eps));
  };
  FundamentalResult r{GradedCoefficient(c.generators()),
                      algebraic,
                      GradedCoefficient(c.generators()),
                      0,
                      0,
                      0,
                      0,
                      0,
                      1};
  r.geometric = diff(Rational(1, 1000));
  const GradedCoefficient half = diff(Rational(1, 2000));
  r.residual = (r.geometric + algebraic).norm();
  r.residual_half = (half + algebraic).norm();
  const GradedCoefficient d1 = diff(Rational(1, 100));
  const GradedCoefficient d2 = diff(Rational(1, 200));
  const GradedCoefficient d3 = diff(Rational(1, 400));
  // Order from the coarse pair, where the O(eps^2) error is well above the
  // transport noise amplified by 1/eps.
  r.coarse_residual = (d1 + algebraic).norm();
  r.order = std::log2(r.coarse_residual / (d2 + algebraic).norm());
  const GradedCoefficient r1 = (d2 * Complex(4) - d1) * Complex(1.0 / 3);
  const GradedCoefficient r2 = (d3 * Complex(4) - d2) * Complex(1.0 / 3);
  r.extrapolated = (r2 * Complex(16) - r1) * Complex(1.0 / 15);
  r.extrapolated_residual = (r.extrapolated + algebraic).norm();
  r.scale = std::max({1.0, algebraic.norm(), r.geometric.norm()});
  return r;
}

} // namespace stringtop
