#include "stringtop/harness.hpp"

#include "stringtop/signs.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <set>
#include <sstream>
#include <thread>

namespace stringtop {

// Configuration ----------------------------------------------------------

namespace {

struct CheckInfo {
  const char *name;
  const char *description;
  int instances;
  double tolerance;
};

// Residuals are relative (divided by max(1, |value|)) unless the check is
// exact, where the tolerance is 0.
const std::vector<CheckInfo> &registry() {
  static const std::vector<CheckInfo> r = {
      {"gln", "gl(n) trace fusion: kappa contraction of two open traces "
              "equals the fused single trace",
       4000, 1e-10},
      {"swap", "Casimir of the standard representation is the swap operator",
       20, 1e-12},
      {"holonomy", "transport composition, closed form, torus oracle, "
                   "reparametrization, rotation, horizontality, order",
       40, 1e-8},
      {"gauge", "Wilson values invariant under constant gauge transformations",
       100, 1e-9},
      {"fundamental", "fundamental identity: loop-space derivative of the "
                      "Wilson loop cancels the insertion of d_A C + C^2",
       50, 1e-4},
      {"goldman", "string bracket agrees with the torus Goldman oracle", 200,
       0},
      {"main-theorem", "Wilson bracket of two cycles equals the Wilson loop "
                       "of their string bracket",
       120, 1e-9},
      {"jacobi", "signed cyclic Jacobi sum of the string bracket vanishes "
                 "after class reduction",
       50, 0},
      {"bracket-axioms", "graded antisymmetry, Leibniz and Jacobi of the "
                         "Darboux bracket; delta squared is zero",
       80, 0},
      {"chord-4t", "4T combinations evaluate to zero", 60, 1e-10},
      {"chord-ideal", "GL(n) ideal elements evaluate to zero in the standard "
                      "representation",
       60, 1e-10},
      {"chord-bracket", "evaluation maps the degree-0 chord bracket to the "
                        "bracket of Wilson loops",
       40, 1e-9},
  };
  return r;
}

const CheckInfo &info(const std::string &check) {
  for (const auto &c : registry())
    if (check == c.name)
      return c;
  throw ConfigError("unknown check '" + check + "'");
}

std::uint64_t fnv1a(const std::string &s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

} // namespace

std::uint64_t SuiteConfig::default_seed() {
  if (const char *s = std::getenv("STRINGTOP_SEED")) {
    try {
      size_t pos = 0;
      const unsigned long long v = std::stoull(s, &pos);
      if (pos == std::string(s).size())
        return v;
    } catch (const std::exception &) {
    }
    throw ConfigError(std::string("STRINGTOP_SEED is not an integer: ") + s);
  }
  return SuiteConfig{}.seed;
}

void SuiteConfig::validate() const {
  if (n_list.empty())
    throw ConfigError("n_list is empty");
  for (int n : n_list)
    if (n < 1 || n > 6)
      throw ConfigError("representation dimensions must lie in 1..6");
  for (const auto &[k, v] : instances) {
    info(k);
    if (v < 1)
      throw ConfigError("instance count for " + k + " must be >= 1");
  }
  for (const auto &[k, v] : tolerances) {
    info(k);
    if (!(v > 0))
      throw ConfigError("tolerance for " + k + " must be > 0");
  }
  if (grassmann_n < 0 || grassmann_n > kMaxGenerators)
    throw ConfigError("Grassmann generator count out of range");
  if (retry_cap < 0)
    throw ConfigError("retry cap must be >= 0");
  plan.validate();
}

int SuiteConfig::instances_for(const std::string &check) const {
  auto it = instances.find(check);
  return it != instances.end() ? it->second : info(check).instances;
}

double SuiteConfig::tolerance_for(const std::string &check) const {
  auto it = tolerances.find(check);
  return it != tolerances.end() ? it->second : info(check).tolerance;
}

bool Report::pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckRecord &c) { return c.pass; });
}

const std::vector<std::string> &check_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto &c : registry())
      v.push_back(c.name);
    return v;
  }();
  return names;
}

std::string check_description(const std::string &check) {
  return info(check).description;
}
int default_instances(const std::string &check) {
  return info(check).instances;
}
double default_tolerance(const std::string &check) {
  return info(check).tolerance;
}

// Random instances -------------------------------------------------------

long uniform_int(Rng &rng, long lo, long hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<long>(rng() % span);
}

double uniform_real(Rng &rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

Rational random_rational(Rng &rng, double bound) {
  static const long primes[] = {97, 101, 103, 107, 109, 113, 127, 131};
  const long q = primes[uniform_int(rng, 0, 7)];
  const long p = static_cast<long>(std::floor(bound * q));
  return Rational(uniform_int(rng, -p, p), q);
}

namespace {

Complex random_complex(Rng &rng, double scale) {
  return {uniform_real(rng, -scale, scale), uniform_real(rng, -scale, scale)};
}

Matrix random_matrix(int n, Rng &rng, double scale) {
  Matrix m(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      m(r, c) = random_complex(rng, scale);
  return m;
}

/// Well-conditioned invertible matrix.
Matrix random_invertible(int n, Rng &rng) {
  return Matrix::Identity(n, n) + random_matrix(n, rng, 0.3);
}

IVec random_class(Rng &rng, long range) {
  IVec c{0, 0};
  while (c[0] == 0 && c[1] == 0)
    c = {uniform_int(rng, -range, range), uniform_int(rng, -range, range)};
  return c;
}

} // namespace

PLLoop gen_random_loop(const Space &space, const std::optional<IVec> &cls,
                       int vertex_count, Rng &rng) {
  if (vertex_count < 3)
    throw ConfigError("a loop needs at least 3 vertices");
  IVec closure(space.d, 0);
  if (cls) {
    if (!space.is_torus())
      throw ConfigError("a class can only be prescribed on the torus");
    if (static_cast<int>(cls->size()) != space.d)
      throw ConfigError("class has the wrong dimension");
    closure = *cls;
  }
  for (;;) {
    std::vector<RVec> verts;
    for (int k = 0; k < vertex_count; ++k) {
      RVec v(space.d);
      for (int mu = 0; mu < space.d; ++mu) {
        if (space.is_torus()) {
          v[mu] = Rational(closure[mu] * k, vertex_count) +
                  random_rational(rng, 0.2);
        } else {
          // Rough star-shaped polygon around the origin.
          const double angle = 2 * M_PI * (k + uniform_real(rng, -0.3, 0.3)) /
                               vertex_count;
          const double radius = uniform_real(rng, 0.5, 1.0);
          v[mu] = random_rational(rng, 0.05) +
                  exact_rational(std::round(
                      (mu == 0 ? std::cos(angle) : std::sin(angle)) * radius *
                      64) /
                                 64);
        }
      }
      verts.push_back(std::move(v));
    }
    try {
      return PLLoop(space, std::move(verts), closure);
    } catch (const ValidationError &) {
      // degenerate segment; resample
    }
  }
}

PLLoop gen_random_loop(const Space &space, const std::optional<IVec> &cls,
                       int vertex_count, std::uint64_t seed) {
  Rng rng(seed);
  return gen_random_loop(space, cls, vertex_count, rng);
}

PLLoop perturb_loop(const PLLoop &loop, std::uint64_t seed) {
  Rng rng(mix(seed));
  for (;;) {
    std::vector<RVec> verts = loop.vertices();
    for (auto &v : verts)
      for (auto &x : v)
        x += Rational(uniform_int(rng, -50, 50), 10007 * 64);
    try {
      return PLLoop(loop.space(), std::move(verts), loop.closure());
    } catch (const ValidationError &) {
    }
  }
}

FlatConnection random_commuting_connection(int n, int d, Rng &rng,
                                           double scale) {
  const Matrix p = random_invertible(n, rng);
  const Matrix pinv = p.inverse();
  std::vector<Matrix> a;
  for (int mu = 0; mu < d; ++mu) {
    Matrix diag = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
      diag(i, i) = random_complex(rng, scale);
    a.push_back(p * diag * pinv);
  }
  // Conjugation leaves tiny commutators; project them away by rebuilding
  // from the exact diagonal form when they exceed the flatness threshold.
  FlatConnection c = FlatConnection::zero(n, d);
  try {
    c = FlatConnection::constant(a);
  } catch (const ValidationError &) {
    std::vector<Matrix> diag;
    for (int mu = 0; mu < d; ++mu)
      diag.push_back(pinv * a[mu] * p);
    c = FlatConnection::constant(diag);
  }
  return c;
}

namespace {

ScalarField random_scalar(const Space &space, Rng &rng) {
  const auto kind = space.is_torus() ? ScalarField::Kind::Fourier
                                     : ScalarField::Kind::Polynomial;
  ScalarField f(kind, space.d);
  const int terms = static_cast<int>(uniform_int(rng, 1, 3));
  for (int t = 0; t < terms; ++t) {
    std::vector<int> key(space.d);
    for (int mu = 0; mu < space.d; ++mu)
      key[mu] = space.is_torus() ? static_cast<int>(uniform_int(rng, -1, 1))
                                 : static_cast<int>(uniform_int(rng, 0, 2));
    f.add({key, 0},
          CRational(random_rational(rng, 1.0), random_rational(rng, 1.0)));
  }
  return f;
}

} // namespace

FieldConfig random_field(const Space &space, int n, int generators, Rng &rng) {
  if (generators < 4)
    throw ConfigError("random fields use 4 Grassmann generators; N = " +
                      std::to_string(generators) + " is too small");
  FieldConfig c(space, n, generators, 1);
  const LieBasis basis(n);
  auto lie = [&] { return static_cast<int>(uniform_int(rng, 0, n * n - 1)); };
  // 1-forms with even labels, 2-forms and 0-forms with odd labels.
  const Mask even[] = {0b0011, 0b0101, 0b1100};
  const Mask odd[] = {0b0001, 0b0100, 0b1000, 0b0111};
  for (int k = 0; k < 2; ++k)
    c.add({static_cast<int>(uniform_int(rng, 0, space.d - 1))},
          random_scalar(space, rng), lie(), even[uniform_int(rng, 0, 2)]);
  c.add({0, 1}, random_scalar(space, rng), lie(), odd[uniform_int(rng, 0, 3)]);
  c.add({}, random_scalar(space, rng), lie(), odd[uniform_int(rng, 0, 3)]);
  return c;
}

// Check machinery ----------------------------------------------------------

namespace {

struct Ctx {
  const SuiteConfig &config;
  std::string check;
  std::uint64_t subseed;
  int instances;
  double tol;
  double max_residual = 0;
  long retries = 0;
  bool ok = true;
  Json details = Json::object();

  int n_cap = 1 << 20;

  /// Dimensions cycle through n_list, skipping those above n_cap.
  int n_for(int i) const {
    std::vector<int> ns;
    for (int n : config.n_list)
      if (n <= n_cap)
        ns.push_back(n);
    if (ns.empty())
      ns = config.n_list;
    return ns[i % ns.size()];
  }

  /// Runs f(i, rng, n) for every instance; TransversalityError triggers a
  /// regeneration with the next retry seed.
  template <class F> void each(F &&f) {
    for (int i = 0; i < instances; ++i) {
      for (int attempt = 0;; ++attempt) {
        Rng rng(mix(subseed ^ mix(static_cast<std::uint64_t>(i) * 1000003 +
                                  static_cast<std::uint64_t>(attempt))));
        try {
          const double r = f(i, rng, n_for(i));
          if (!(r <= max_residual) || std::isnan(r))
            max_residual = std::isnan(r) ? INFINITY : std::max(max_residual, r);
          break;
        } catch (const TransversalityError &e) {
          ++retries;
          if (attempt >= config.retry_cap)
            throw ConfigError("instance " + std::to_string(i) +
                              " stayed non-transversal after " +
                              std::to_string(attempt + 1) + " attempts: " +
                              e.what());
        }
      }
    }
  }

  double rel(double diff, double scale) const {
    return diff / std::max(1.0, scale);
  }
};

double matrix_rel(const Matrix &a, const Matrix &b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

SuperMatrix random_even_super(int n, int gens, Rng &rng) {
  SuperMatrix m = SuperMatrix::constant(random_matrix(n, rng, 1.0), gens);
  const int blocks = static_cast<int>(uniform_int(rng, 1, 3));
  for (int b = 0; b < blocks; ++b) {
    const int i = static_cast<int>(uniform_int(rng, 0, gens - 1));
    int j = static_cast<int>(uniform_int(rng, 0, gens - 2));
    if (j >= i)
      ++j;
    const Mask mask = (Mask{1} << i) | (Mask{1} << j);
    m += SuperMatrix::monomial(mask, random_matrix(n, rng, 1.0), gens);
  }
  return m;
}

void check_gln(Ctx &ctx) {
  const int gens = ctx.config.grassmann_n;
  if (gens < 2)
    throw ConfigError("graded fusion instances need N >= 2");
  double adinv = 0, kappa = 0, twisted = 0;
  ctx.each([&](int, Rng &rng, int n) {
    const LieBasis basis(n);
    SuperMatrix m[4];
    for (auto &x : m)
      x = random_even_super(n, gens, rng);
    const GradedCoefficient k = fuse_traces(m[0], m[1], m[2], m[3], basis);
    const GradedCoefficient f = fused_trace(m[0], m[1], m[2], m[3]);
    const Matrix g = random_invertible(n, rng);
    const Matrix x = random_matrix(n, rng, 1.0), y = random_matrix(n, rng, 1.0);
    const Matrix gi = g.inverse();
    const Complex k0 = kappa_form(x, y);
    adinv = std::max(adinv, std::abs(kappa_form(g * x * gi, g * y * gi) - k0) /
                                std::max(1.0, std::abs(k0)));
    kappa = std::max(kappa, (basis.kappa_matrix() * basis.kappa_inv_matrix() -
                             Matrix::Identity(n * n, n * n))
                                .norm());
    const GradedCoefficient tw =
        fuse_traces(m[0], m[1], m[2], m[3], basis, basis.twisted_rep());
    twisted = std::max(twisted, ctx.rel((tw - f).norm(), f.norm()));
    return ctx.rel((k - f).norm(), f.norm());
  });
  ctx.details["ad_invariance_max"] = adinv;
  ctx.details["kappa_inverse_max"] = kappa;
  ctx.details["twisted_rep_max_deviation"] = twisted;
  ctx.ok = adinv <= 1e-9 && kappa == 0.0;
}

void check_swap(Ctx &ctx) {
  double op = 0;
  ctx.each([&](int, Rng &rng, int n) {
    const LieBasis basis(n);
    op = std::max(op,
                  (casimir_operator(basis) - swap_operator(n)).cwiseAbs().maxCoeff());
    Vector v(n), w(n);
    for (int i = 0; i < n; ++i) {
      v(i) = random_complex(rng, 1.0);
      w(i) = random_complex(rng, 1.0);
    }
    const Matrix out = swap_via_casimir(v, w, basis);
    const Matrix expect = w * v.transpose();
    return (out - expect).cwiseAbs().maxCoeff();
  });
  ctx.details["operator_max_abs_diff"] = op;
  ctx.max_residual = std::max(ctx.max_residual, op);
}

void check_holonomy(Ctx &ctx) {
  const int gens = ctx.config.grassmann_n;
  const TransportPlan &plan = ctx.config.plan;
  double order = INFINITY;
  Json parts = {{"composition", 0.0}, {"closed_form", 0.0},
                {"torus_oracle", 0.0}, {"reparametrization", 0.0},
                {"rotation", 0.0},     {"horizontality", 0.0}};
  auto bump = [&](const char *k, double v) {
    parts[k] = std::max(parts[k].get<double>(), v);
    return v;
  };
  ctx.each([&](int, Rng &rng, int n) {
    const Space torus = Space::torus(2);
    const IVec cls = random_class(rng, 2);
    const PLLoop loop = gen_random_loop(
        torus, cls, static_cast<int>(uniform_int(rng, 3, 5)), rng);
    const FlatConnection a = random_commuting_connection(n, 2, rng);
    const FieldConfig c = random_field(torus, n, gens, rng);
    double r = 0;
    const double u = uniform_real(rng, 0.1, 0.9);
    const Matrix full = transport(a, loop, 0, 1, plan).body();
    const Matrix split = (transport(a, loop, 0, u, plan) *
                          transport(a, loop, u, 1, plan))
                             .body();
    r = std::max(r, bump("composition", matrix_rel(split, full)));
    r = std::max(r, bump("closed_form",
                         matrix_rel(full, constant_connection_holonomy(a, loop))));
    const Matrix oracle =
        (static_cast<double>(cls[0]) * a.components()[0] +
         static_cast<double>(cls[1]) * a.components()[1])
            .exp();
    r = std::max(r, bump("torus_oracle", matrix_rel(full, oracle)));
    const GradedCoefficient w = wilson(a, c, loop, {}, plan);
    const double scale = w.norm();
    const int seg = static_cast<int>(uniform_int(rng, 0, loop.size() - 1));
    const PLLoop finer =
        loop.subdivided(seg, Rational(uniform_int(rng, 1, 6), 7));
    r = std::max(r, bump("reparametrization",
                         ctx.rel((wilson(a, c, finer, {}, plan) - w).norm(),
                                 scale)));
    const int k = static_cast<int>(uniform_int(rng, 1, loop.size() - 1));
    r = std::max(r, bump("rotation",
                         ctx.rel((wilson(a, c, loop.rotated(k), {}, plan) - w)
                                     .norm(),
                                 scale)));
    const GradedCoefficient h =
        wilson(a, c, loop, {VariationField::tangent(loop)}, plan);
    r = std::max(r, bump("horizontality", ctx.rel(h.norm(), scale)));
    if (n > 1 || a.components()[0].norm() > 0)
      order = std::min(order, measured_transport_order(a, loop, 8));
    return r;
  });
  ctx.details["parts"] = parts;
  ctx.details["min_transport_order"] = order;
  ctx.ok = order >= 1.9;
}

void check_gauge(Ctx &ctx) {
  const int gens = ctx.config.grassmann_n;
  ctx.each([&](int, Rng &rng, int n) {
    const Space torus = Space::torus(2);
    const PLLoop loop = gen_random_loop(torus, random_class(rng, 2),
                                        static_cast<int>(uniform_int(rng, 3, 5)),
                                        rng);
    const FlatConnection a = random_commuting_connection(n, 2, rng);
    const FieldConfig c = random_field(torus, n, gens, rng);
    std::vector<VariationField> vars;
    if (uniform_int(rng, 0, 1)) {
      std::vector<RVec> disp;
      for (int k = 0; k < loop.size(); ++k)
        disp.push_back({random_rational(rng, 0.5), random_rational(rng, 0.5)});
      vars.push_back(VariationField::from_vertices(loop, disp));
    }
    const Matrix g = random_invertible(n, rng);
    const GradedCoefficient w = wilson(a, c, loop, vars, ctx.config.plan);
    const GradedCoefficient wg = wilson(a.conjugated(g), c.conjugated(g), loop,
                                        vars, ctx.config.plan);
    return ctx.rel((w - wg).norm(), w.norm());
  });
}

void check_fundamental(Ctx &ctx) {
  const int gens = ctx.config.grassmann_n;
  double order = INFINITY, extrap = 0, worst_abs = 0;
  long flat = 0;
  ctx.each([&](int, Rng &rng, int n) {
    const Space chart = Space::chart(2);
    const PLLoop loop =
        gen_random_loop(chart, std::nullopt,
                        static_cast<int>(uniform_int(rng, 4, 6)), rng);
    const FlatConnection a = random_commuting_connection(n, 2, rng, 0.4);
    const FieldConfig c = random_field(chart, n, gens, rng);
    std::vector<RVec> disp;
    for (int k = 0; k < loop.size(); ++k)
      disp.push_back({random_rational(rng, 0.5), random_rational(rng, 0.5)});
    const FundamentalResult r =
        fundamental_identity_check(a, c, loop, disp, ctx.config.plan);
    // An instance whose coarse residual sits at round-off has no
    // measurable order.
    if (r.coarse_residual > 1e-8 * r.scale)
      order = std::min(order, r.order);
    else
      ++flat;
    extrap = std::max(extrap, r.extrapolated_residual / r.scale);
    worst_abs = std::max(worst_abs, r.residual);
    return r.residual / r.scale;
  });
  ctx.details["min_order"] = order;
  ctx.details["max_extrapolated_residual"] = extrap;
  ctx.details["max_absolute_residual"] = worst_abs;
  ctx.details["instances_without_order"] = flat;
  ctx.ok = order >= 1.9;
}

std::map<IVec, long> oracle_classes(const IVec &c1, const IVec &c2) {
  const GoldmanTerm g = goldman_torus(c1, c2);
  std::map<IVec, long> out;
  if (g.coefficient != 0)
    out[g.cls] = g.coefficient;
  return out;
}

void check_goldman(Ctx &ctx) {
  long antisym = 0;
  ctx.each([&](int, Rng &rng, int) {
    const Space torus = Space::torus(2);
    const IVec c1 = random_class(rng, 3), c2 = random_class(rng, 3);
    const PLLoop g1 = gen_random_loop(
        torus, c1, static_cast<int>(uniform_int(rng, 3, 5)), rng);
    const PLLoop g2 = gen_random_loop(
        torus, c2, static_cast<int>(uniform_int(rng, 3, 5)), rng);
    const StringCycle a = StringCycle::single(g1), b = StringCycle::single(g2);
    const auto ab = string_bracket(a, b).reduced();
    const auto ba = string_bracket(b, a).reduced();
    if (!add_classes(ab, ba, antisymmetry_sign(0, 0, 2)).empty())
      ++antisym;
    return ab == oracle_classes(c1, c2) ? 0.0 : 1.0;
  });
  ctx.details["antisymmetry_failures"] = antisym;
  ctx.ok = antisym == 0;
}

void check_main_theorem(Ctx &ctx) {
  long cancel = 0;
  ctx.each([&](int i, Rng &rng, int n) {
    const Space torus = Space::torus(2);
    const FlatConnection a = random_commuting_connection(n, 2, rng);
    auto loop = [&](const IVec &c) {
      return gen_random_loop(torus, c, static_cast<int>(uniform_int(rng, 3, 4)),
                             rng);
    };
    StringCycle x, y;
    if (i % 5 == 4) {
      // Parallel classes: signed intersections cancel.
      const IVec c = random_class(rng, 1);
      x = StringCycle::single(loop(c));
      y = StringCycle::single(loop({2 * c[0], 2 * c[1]}));
      ++cancel;
    } else {
      x = StringCycle::single(loop(random_class(rng, 2)));
      if (i % 3 == 0)
        x = x + (-1) * StringCycle::single(loop(random_class(rng, 1)));
      y = StringCycle::single(loop(random_class(rng, 2)));
    }
    const MainTheoremResult r = main_theorem_check(x, y, a, ctx.config.plan);
    if (i % 5 == 4)
      return std::max({r.residual, r.lhs.norm(), r.rhs.norm()});
    return r.residual / r.scale;
  });
  ctx.details["cancellation_instances"] = cancel;
}

void check_jacobi(Ctx &ctx) {
  long raw_nonzero = 0;
  size_t raw_terms = 0;
  ctx.each([&](int, Rng &rng, int) {
    const Space torus = Space::torus(2);
    StringCycle c[3];
    for (auto &x : c)
      x = StringCycle::single(
          gen_random_loop(torus, random_class(rng, 2), 3, rng));
    const JacobiResidual r = jacobi_residual(c[0], c[1], c[2]);
    if (!r.raw.is_zero())
      ++raw_nonzero;
    raw_terms = std::max(raw_terms, r.raw.terms().size());
    double total = 0;
    for (const auto &[cls, v] : r.reduced)
      total += std::abs(static_cast<double>(v));
    return total;
  });
  ctx.details["raw_nonzero_instances"] = raw_nonzero;
  ctx.details["raw_max_terms"] = raw_terms;
}

GradedPolynomial random_poly(const GradedPhaseModel &m, int parity, Rng &rng) {
  GradedPolynomial p(m);
  const int gens = m.coefficient_generators();
  const int terms = static_cast<int>(uniform_int(rng, 1, 3));
  for (int t = 0; t < terms; ++t) {
    std::vector<int> vars;
    const int deg = static_cast<int>(uniform_int(rng, 0, 3));
    int par = 0;
    for (int k = 0; k < deg; ++k) {
      const int v = static_cast<int>(uniform_int(rng, 0, m.size() - 1));
      vars.push_back(v);
      par ^= m.variable(v).parity;
    }
    Rational coeff(uniform_int(rng, -5, 5), uniform_int(rng, 1, 4));
    if (coeff == 0)
      coeff = 1;
    ExactGraded c(gens, coeff);
    if (par != parity) {
      if (gens == 0)
        continue;
      c = ExactGraded::monomial(
          gens, Mask{1} << uniform_int(rng, 0, gens - 1), coeff);
    } else if (gens >= 2 && uniform_int(rng, 0, 2) == 0) {
      c = ExactGraded::monomial(gens, 0b11, coeff);
    }
    p = p + GradedPolynomial::monomial(m, c, vars);
  }
  return p;
}

void check_bracket_axioms(Ctx &ctx) {
  const int gens = 2;
  const std::vector<GradedPhaseModel> models = {
      GradedPhaseModel::odd_darboux(gens),
      GradedPhaseModel::odd_two_fields(gens),
      GradedPhaseModel::even_canonical(gens),
      GradedPhaseModel::even_with_ghosts(gens)};
  // Solutions of the master equation per model (none for even_canonical:
  // it has no odd variables, so no S of parity d + 1).
  std::vector<std::vector<GradedPolynomial>> actions(models.size());
  Json found = Json::array();
  for (size_t k = 0; k < models.size(); ++k) {
    const auto &m = models[k];
    std::vector<std::vector<int>> cands;
    for (int i = 0; i < m.size(); ++i) {
      cands.push_back({i});
      for (int j = i; j < m.size(); ++j)
        cands.push_back({i, j});
    }
    std::erase_if(cands, [&](const std::vector<int> &mono) {
      int par = 0;
      for (int v : mono)
        par ^= m.variable(v).parity;
      return par != ((m.d() + 1) & 1);
    });
    auto sols = master_equation_search(m, cands, 1);
    if (sols.size() > 6)
      sols.erase(sols.begin() + 6, sols.end());
    found.push_back(static_cast<long>(sols.size()));
    actions[k] = std::move(sols);
  }
  ctx.details["master_solutions_used"] = found;
  long delta_checks = 0;
  ctx.each([&](int i, Rng &rng, int) {
    const size_t k = static_cast<size_t>(i) % models.size();
    const GradedPhaseModel &m = models[k];
    const int d = m.d();
    const int pp = static_cast<int>(uniform_int(rng, 0, 1));
    const int pq = static_cast<int>(uniform_int(rng, 0, 1));
    const int pr = static_cast<int>(uniform_int(rng, 0, 1));
    const GradedPolynomial p = random_poly(m, pp, rng);
    const GradedPolynomial q = random_poly(m, pq, rng);
    const GradedPolynomial r = random_poly(m, pr, rng);
    auto br = [&](const GradedPolynomial &a, const GradedPolynomial &b) {
      return graded_bracket(a, b, m);
    };
    auto sgn = [](int s) { return Rational(s); };
    double res = 0;
    // Antisymmetry.
    res += (br(p, q) + sgn(antisymmetry_sign(pp, pq, d)) * br(q, p)).norm();
    // Leibniz: {P;QR} = {P;Q}R + (-1)^{|Q|(|P|+d)} Q{P;R}.
    res += (br(p, q * r) - br(p, q) * r -
            sgn(minus_one_pow(pq * (pp + d))) * (q * br(p, r)))
               .norm();
    // Jacobi: {P;{Q;R}} = {{P;Q};R} + (-1)^{(|P|+d)(|Q|+d)} {Q;{P;R}}.
    res += (br(p, br(q, r)) - br(br(p, q), r) -
            sgn(minus_one_pow((pp + d) * (pq + d))) * br(q, br(p, r)))
               .norm();
    for (const auto &s : actions[k]) {
      res += delta_and_nilpotency(s, p, m).delta_square.norm();
      ++delta_checks;
    }
    return res;
  });
  ctx.details["delta_square_checks"] = delta_checks;
}

// Chords -----------------------------------------------------------------

struct ChordInstance {
  ChordDiagram diagram;
  DiagramRealization realization;
};

/// Two circles on random torus loops, `arcs` arcs with endpoints spread at
/// random parameters.
ChordInstance random_chord_instance(Rng &rng, int n, int arcs, bool twisted) {
  const Space torus = Space::torus(2);
  std::vector<PLLoop> loops;
  for (int c = 0; c < 2; ++c)
    loops.push_back(gen_random_loop(torus, random_class(rng, 2),
                                    static_cast<int>(uniform_int(rng, 3, 4)),
                                    rng));
  std::vector<std::vector<std::pair<Rational, int>>> placed(2);
  std::map<int, DiagramRealization::Placement> at;
  std::set<Rational> used;
  auto param = [&] {
    for (;;) {
      Rational t(uniform_int(rng, 1, 996), 997);
      if (used.insert(t).second)
        return t;
    }
  };
  std::vector<std::pair<int, int>> arc_list;
  int label = 0;
  for (int a = 0; a < arcs; ++a) {
    const int x = label++, y = label++;
    arc_list.emplace_back(x, y);
    for (int l : {x, y}) {
      const int c = static_cast<int>(uniform_int(rng, 0, 1));
      const Rational t = param();
      placed[c].emplace_back(t, l);
      at[l] = {t, 0};
    }
  }
  std::vector<ChordCircle> circles;
  for (int c = 0; c < 2; ++c) {
    std::sort(placed[c].begin(), placed[c].end());
    ChordCircle circle;
    circle.rep = twisted && uniform_int(rng, 0, 1) ? RepKind::Twisted
                                                   : RepKind::Standard;
    circle.dim = n;
    for (const auto &[t, l] : placed[c])
      circle.endpoints.push_back(l);
    circles.push_back(std::move(circle));
  }
  ChordDiagram d(std::move(circles), std::move(arc_list));
  DiagramRealization r = DiagramRealization::from_loops(d, loops, at);
  return {std::move(d), std::move(r)};
}

void check_chord_4t(Ctx &ctx) {
  long combinatorial_mismatch = 0;
  double canon = 0;
  ctx.each([&](int, Rng &rng, int n) {
    const FlatConnection a = random_commuting_connection(n, 2, rng);
    const int arcs = static_cast<int>(uniform_int(rng, 1, 2));
    const ChordInstance inst = random_chord_instance(rng, n, arcs, true);
    const int arc = static_cast<int>(uniform_int(rng, 0, arcs - 1));
    const int circle = static_cast<int>(uniform_int(rng, 0, 1));
    Rational slot(uniform_int(rng, 1, 996), 997);
    slot += Rational(1, 997 * 2); // never on an existing endpoint
    const auto terms =
        realize_four_t(inst.diagram, inst.realization, arc, circle, slot);
    double scale = 0;
    Complex sum = 0;
    for (const auto &t : terms) {
      const Complex v =
          evaluate_diagram(t.diagram, t.realization, a, ctx.config.plan).body();
      scale = std::max(scale, std::abs(v));
      sum += static_cast<double>(t.coeff) * v;
    }
    // The same four diagrams from the combinatorial rule.
    const int fixed = inst.diagram.max_label() + 1, moving = fixed + 1;
    std::vector<int> seq = terms[0].diagram.circles()[circle].endpoints;
    std::erase(seq, moving);
    // Rotate so the sequence matches the original circle's order.
    const auto &orig = inst.diagram.circles()[circle].endpoints;
    int pos = 0;
    if (!orig.empty()) {
      auto it = std::find(seq.begin(), seq.end(), orig.front());
      std::rotate(seq.begin(), it, seq.end());
    }
    pos = static_cast<int>(std::find(seq.begin(), seq.end(), fixed) -
                           seq.begin());
    const auto comb =
        four_t_combination(inst.diagram, FourTSite{arc, circle, pos});
    for (size_t k = 0; k < 4; ++k)
      if (!(comb[k].diagram == terms[k].diagram) ||
          comb[k].coeff != terms[k].coeff)
        ++combinatorial_mismatch;
    const Complex v0 =
        evaluate_diagram(inst.diagram, inst.realization, a, ctx.config.plan)
            .body();
    const Complex v1 = evaluate_diagram(inst.diagram.canonical(),
                                        inst.realization, a, ctx.config.plan)
                           .body();
    canon = std::max(canon, std::abs(v0 - v1) / std::max(1.0, std::abs(v0)));
    return std::abs(sum) / std::max(1.0, scale);
  });
  ctx.details["combinatorial_mismatches"] = combinatorial_mismatch;
  ctx.details["canonicalization_max"] = canon;
  ctx.ok = combinatorial_mismatch == 0 && canon <= 1e-10;
}

/// Diagram with arcs at crossings of two loops (cross-circle case) or a
/// self-chord on their concatenation.
ChordInstance ideal_instance(Rng &rng, int n, bool self, RepKind rep) {
  const Space torus = Space::torus(2);
  PLLoop g1 = gen_random_loop(torus, random_class(rng, 2), 3, rng);
  PLLoop g2 = gen_random_loop(torus, random_class(rng, 2), 3, rng);
  const auto pts = intersections(g1, g2);
  if (pts.empty())
    throw TransversalityError("loops do not cross", -1, -1);
  const auto &p = pts[uniform_int(rng, 0, static_cast<long>(pts.size()) - 1)];
  if (self) {
    const PLLoop c = concatenate(g1, g2, p);
    const Rational back(g1.size() + 1, c.size());
    ChordDiagram d({ChordCircle{rep, {0, 1}, n}}, {{0, 1}});
    auto r = DiagramRealization::from_loops(d, {c}, {{0, {0, 0}}, {1, {back, 0}}});
    return {std::move(d), std::move(r)};
  }
  std::map<int, DiagramRealization::Placement> at{{0, {p.s, 0}},
                                                  {1, {p.sbar, 0}}};
  std::vector<ChordCircle> circles{{rep, {0}, n}, {rep, {1}, n}};
  std::vector<std::pair<int, int>> arcs{{0, 1}};
  if (pts.size() >= 2 && uniform_int(rng, 0, 1)) {
    const auto &q = pts[(&p - pts.data() + 1) % pts.size()];
    at[2] = {q.s, 0};
    at[3] = {q.sbar, 0};
    arcs.emplace_back(2, 3);
    auto place = [&](ChordCircle &c, int l) {
      c.endpoints.push_back(l);
      std::sort(c.endpoints.begin(), c.endpoints.end(), [&](int u, int v) {
        return at[u].param < at[v].param;
      });
    };
    place(circles[0], 2);
    place(circles[1], 3);
  }
  ChordDiagram d(std::move(circles), std::move(arcs));
  auto r = DiagramRealization::from_loops(d, {g1, g2}, at);
  return {std::move(d), std::move(r)};
}

void check_chord_ideal(Ctx &ctx) {
  long mismatch = 0, twisted_nonzero = 0, total = 0;
  double quotient = 0;
  ctx.each([&](int i, Rng &rng, int n) {
    const FlatConnection a = random_commuting_connection(n, 2, rng);
    const bool self = i % 3 == 2;
    const ChordInstance inst = ideal_instance(rng, n, self, RepKind::Standard);
    const auto &plan = ctx.config.plan;
    const Complex v =
        evaluate_diagram(inst.diagram, inst.realization, a, plan).body();
    const RealizedDiagram s = smooth_arc(inst.diagram, inst.realization, 0);
    const Complex vs = evaluate_diagram(s.diagram, s.realization, a, plan).body();
    const auto comb = gln_ideal_element(inst.diagram, 0);
    if (!(comb[1].diagram == s.diagram))
      ++mismatch;
    const Complex vq = evaluate_combination(
        gln_quotient(RealizedDiagram{1, inst.diagram, inst.realization}), a,
        plan);
    quotient = std::max(quotient, std::abs(v - vq) / std::max(1.0, std::abs(v)));
    // Same geometry with the twisted representation on every circle.
    std::vector<ChordCircle> tc = inst.diagram.circles();
    for (auto &c : tc)
      c.rep = RepKind::Twisted;
    const ChordDiagram td(tc, inst.diagram.arcs());
    const RealizedDiagram ts = smooth_arc(td, inst.realization, 0, true);
    const Complex tv = evaluate_diagram(td, inst.realization, a, plan).body();
    const Complex tvs =
        evaluate_diagram(ts.diagram, ts.realization, a, plan).body();
    ++total;
    if (std::abs(tv - tvs) > 1e-6 * std::max(1.0, std::abs(tv)))
      ++twisted_nonzero;
    return std::abs(v - vs) / std::max(1.0, std::abs(v));
  });
  ctx.details["combinatorial_mismatches"] = mismatch;
  ctx.details["quotient_max"] = quotient;
  ctx.details["twisted_nonzero_instances"] = twisted_nonzero;
  ctx.details["twisted_instances"] = total;
  ctx.ok = mismatch == 0 && quotient <= ctx.tol && 2 * twisted_nonzero >= total;
}

void check_chord_bracket(Ctx &ctx) {
  double cross = 0;
  ctx.each([&](int i, Rng &rng, int n) {
    const FlatConnection a = random_commuting_connection(n, 2, rng);
    const Space torus = Space::torus(2);
    auto single = [&](bool chord) {
      const PLLoop loop = gen_random_loop(torus, random_class(rng, 2), 3, rng);
      if (!chord) {
        ChordDiagram d({ChordCircle{RepKind::Standard, {}, n}}, {});
        auto r = DiagramRealization::from_loops(d, {loop}, {});
        return RealizedDiagram{1, d, r};
      }
      ChordDiagram d({ChordCircle{RepKind::Standard, {0, 1}, n}}, {{0, 1}});
      auto r = DiagramRealization::from_loops(
          d, {loop}, {{0, {Rational(1, 5), 0}}, {1, {Rational(3, 5), 0}}});
      return RealizedDiagram{1, d, r};
    };
    const bool plain = i % 2 == 0;
    std::vector<RealizedDiagram> x{single(!plain)}, y{single(false)};
    if (i % 4 == 3) {
      RealizedDiagram extra = single(false);
      extra.coeff = -1;
      y.push_back(std::move(extra));
    }
    const Complex chord =
        static_cast<double>(intersection_current_sign(2)) *
        evaluate_combination(chord_bracket_degree0(x, y), a, ctx.config.plan);
    const Complex field = evaluation_bracket(x, y, a, ctx.config.plan);
    if (plain && y.size() == 1) {
      const WilsonBracket w = wilson_field_bracket(
          x[0].realization.loops[0], y[0].realization.loops[0], a,
          ctx.config.plan);
      cross = std::max(cross, std::abs(w.kappa_path.body() - field) /
                                  std::max(1.0, std::abs(field)));
    }
    return std::abs(chord - field) /
           std::max({1.0, std::abs(chord), std::abs(field)});
  });
  ctx.details["wilson_bracket_crosscheck_max"] = cross;
  ctx.ok = cross <= ctx.tol;
}

using CheckFn = void (*)(Ctx &);

CheckFn check_fn(const std::string &name) {
  static const std::map<std::string, CheckFn> fns = {
      {"gln", check_gln},
      {"swap", check_swap},
      {"holonomy", check_holonomy},
      {"gauge", check_gauge},
      {"fundamental", check_fundamental},
      {"goldman", check_goldman},
      {"main-theorem", check_main_theorem},
      {"jacobi", check_jacobi},
      {"bracket-axioms", check_bracket_axioms},
      {"chord-4t", check_chord_4t},
      {"chord-ideal", check_chord_ideal},
      {"chord-bracket", check_chord_bracket},
  };
  return fns.at(name);
}

} // namespace

CheckRecord run_check(const SuiteConfig &config, const std::string &check) {
  const CheckInfo &ci = info(check);
  CheckRecord rec;
  rec.check = check;
  rec.paper_ref = ci.description;
  rec.instances = config.instances_for(check);
  rec.tolerance = config.tolerance_for(check);
  const auto t0 = std::chrono::steady_clock::now();
  Ctx ctx{config, check, mix(config.seed ^ fnv1a(check)), rec.instances,
          rec.tolerance};
  // Commuting-torus and chord checks target n <= 3.
  if (check == "main-theorem" || check.rfind("chord-", 0) == 0)
    ctx.n_cap = 3;
  try {
    check_fn(check)(ctx);
    rec.max_residual = ctx.max_residual;
    rec.pass = ctx.ok && ctx.max_residual <= rec.tolerance;
  } catch (const std::exception &e) {
    rec.max_residual = ctx.max_residual;
    rec.pass = false;
    ctx.details["error"] = e.what();
  }
  ctx.details["retries"] = ctx.retries;
  rec.details = std::move(ctx.details);
  rec.runtime_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  return rec;
}

Report run_suite(const SuiteConfig &config,
                 const std::vector<std::string> &selection) {
  config.validate();
  std::vector<std::string> todo;
  std::set<std::string> seen;
  for (const auto &s : selection) {
    info(s);
    if (seen.insert(s).second)
      todo.push_back(s);
  }
  Report report;
  report.config = config;
  report.checks.resize(todo.size());
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = std::min<unsigned>(
      config.threads > 0 ? config.threads : hw,
      static_cast<unsigned>(std::max<size_t>(todo.size(), 1)));
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t k = next++; k < todo.size(); k = next++)
      report.checks[k] = run_check(config, todo[k]);
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back(work);
    for (auto &t : pool)
      t.join();
  }
  return report;
}

// Report -------------------------------------------------------------------

namespace {

Json number(double x) {
  if (std::isfinite(x))
    return x;
  return x > 0 ? "inf" : (x < 0 ? "-inf" : "nan");
}

Json sanitize(Json j) {
  if (j.is_number_float())
    return number(j.get<double>());
  if (j.is_object() || j.is_array())
    for (auto &v : j)
      v = sanitize(v);
  return j;
}

} // namespace

Json to_json(const Report &r) {
  Json checks = Json::array();
  for (const auto &c : r.checks)
    checks.push_back({{"check", c.check},
                      {"paper_ref", c.paper_ref},
                      {"instances", c.instances},
                      {"max_residual", number(c.max_residual)},
                      {"tolerance", c.tolerance},
                      {"pass", c.pass},
                      {"runtime_ms", c.runtime_ms},
                      {"details", sanitize(c.details)}});
  const auto &cfg = r.config;
  return {{"version", r.version},
          {"config",
           {{"seed", cfg.seed},
            {"n_list", cfg.n_list},
            {"instances", cfg.instances},
            {"tolerances", cfg.tolerances},
            {"grassmann_n", cfg.grassmann_n},
            {"retry_cap", cfg.retry_cap},
            {"plan",
             {{"steps", cfg.plan.steps},
              {"tol", cfg.plan.tol},
              {"max_steps", cfg.plan.max_steps},
              {"richardson", cfg.plan.richardson}}}}},
          {"checks", checks},
          {"pass", r.pass()}};
}

Json strip_timing(Json report) {
  if (report.contains("checks"))
    for (auto &c : report["checks"])
      c.erase("runtime_ms");
  return report;
}

std::string to_text(const Report &r) {
  std::ostringstream os;
  os << "stringtop " << r.version << "  seed " << r.config.seed << "\n";
  os << std::left << std::setw(16) << "check" << std::setw(10) << "instances"
     << std::setw(14) << "max_residual" << std::setw(12) << "tolerance"
     << std::setw(8) << "result" << "time_ms\n";
  for (const auto &c : r.checks) {
    std::ostringstream res, tol;
    res << std::setprecision(3) << std::scientific << c.max_residual;
    tol << std::setprecision(1) << std::scientific << c.tolerance;
    os << std::left << std::setw(16) << c.check << std::setw(10)
       << c.instances << std::setw(14) << res.str() << std::setw(12)
       << tol.str() << std::setw(8) << (c.pass ? "pass" : "FAIL")
       << std::fixed << std::setprecision(0) << c.runtime_ms << "\n";
    if (c.details.contains("error"))
      os << "    error: " << c.details["error"].get<std::string>() << "\n";
  }
  os << (r.pass() ? "all checks passed" : "some checks FAILED") << "\n";
  return os.str();
}

} // namespace stringtop
