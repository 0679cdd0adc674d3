#include "test_util.hpp"

#include <unsupported/Eigen/MatrixFunctions>

using namespace stringtop;

namespace {

const Space torus = Space::torus(2);

ScalarField constant(long c, ScalarField::Kind k = ScalarField::Kind::Fourier) {
  return ScalarField::constant(k, 2, CRational(c));
}

std::vector<RVec> uniform_disp(const PLLoop &l, const RVec &v) {
  return std::vector<RVec>(l.size(), v);
}

} // namespace

TEST_CASE("zero connection transports trivially") {
  const PLLoop l = torus_line({1, 2}, {q(1, 5), q(1, 3)});
  const SuperMatrix u = transport(FlatConnection::zero(3, 2), l, 0, 1);
  CHECK((u.body() - Matrix::Identity(3, 3)).norm() <= 1e-15);
}

TEST_CASE("constant diagonal connection along x1") {
  const FlatConnection a =
      FlatConnection::constant({diag2(0.3, -0.7), diag2(0, 0)});
  const PLLoop l = torus_line({1, 0}, {q(0), q(1, 2)});
  const Matrix u = transport(a, l, 0, 1).body();
  CHECK((u - diag2(std::exp(0.3), std::exp(-0.7))).norm() <= 1e-12);
}

TEST_CASE("torus holonomy is U^m V^n") {
  Rng rng(2);
  const FlatConnection a = random_commuting_connection(2, 2, rng);
  const Matrix u = a.components()[0].exp(), v = a.components()[1].exp();
  for (const IVec &c : {IVec{1, 0}, IVec{2, -1}, IVec{-1, 3}}) {
    const PLLoop l = gen_random_loop(torus, c, 4, rng);
    Matrix expect = Matrix::Identity(2, 2);
    for (long k = 0; k < std::abs(c[0]); ++k)
      expect *= c[0] > 0 ? u : u.inverse();
    for (long k = 0; k < std::abs(c[1]); ++k)
      expect *= c[1] > 0 ? v : v.inverse();
    CHECK((transport(a, l, 0, 1).body() - expect).norm() <= 1e-9);
    const FieldConfig zero(torus, 2, 0);
    CHECK(std::abs(wilson(a, zero, l).body() - expect.trace()) <= 1e-9);
  }
}

TEST_CASE("generalized transport without a field is plain transport") {
  Rng rng(4);
  const FlatConnection a = random_commuting_connection(3, 2, rng);
  const PLLoop l = gen_random_loop(torus, IVec{1, 1}, 4, rng);
  const FieldConfig zero(torus, 3, 4);
  CHECK((gen_transport(a, zero, l, 0.2, 0.9, {}) -
         transport(a, l, 0.2, 0.9, {}, 4))
            .norm() <= 1e-12);
}

TEST_CASE("nilpotent 1-form truncates at first order") {
  FieldConfig c(torus, 2, 4);
  c.add({0}, constant(1), 0, 0b11);
  const PLLoop l = torus_line({2, 1}, {q(1, 7), q(1, 5)});
  const SuperMatrix u =
      gen_transport(FlatConnection::zero(2, 2), c, l, 0, 1, {});
  const Matrix e11 = LieBasis(2).element(0);
  // integral of dgamma^1 over the loop is the class component 2
  const SuperMatrix expect = SuperMatrix::identity(2, 4) +
                             SuperMatrix::monomial(0b11, 2.0 * e11, 4);
  CHECK((u - expect).norm() <= 1e-12);
}

TEST_CASE("one insertion of a 2-form") {
  FieldConfig c(torus, 2, 4);
  c.add({0, 1}, constant(3), 1, 0b1);
  const PLLoop l = torus_line({1, 0}, {q(0), q(1, 3)});
  const VariationField v =
      VariationField::from_vertices(l, uniform_disp(l, {q(0), q(1)}));
  const SuperMatrix u =
      gen_transport(FlatConnection::zero(2, 2), c, l, 0, 1, {v});
  // gamma' = (1,0), v = (0,1): C_12 = 3 theta_1 E_12 over unit time
  const Matrix e12 = LieBasis(2).element(1);
  CHECK((u - SuperMatrix::monomial(0b1, 3.0 * e12, 4)).norm() <= 1e-12);
}

TEST_CASE("Wilson loop along the tangent direction vanishes") {
  Rng rng(8);
  const FlatConnection a = random_commuting_connection(2, 2, rng);
  const PLLoop l = gen_random_loop(torus, IVec{1, 2}, 4, rng);
  const FieldConfig c = random_field(torus, 2, 6, rng);
  const GradedCoefficient h = wilson(a, c, l, {VariationField::tangent(l)});
  CHECK(h.norm() <= 1e-12);
  CHECK(wilson(a, c, l).norm() > 0.1);
}

TEST_CASE("Wilson loop is reparametrization and rotation invariant") {
  Rng rng(12);
  const FlatConnection a = random_commuting_connection(3, 2, rng);
  const PLLoop l = gen_random_loop(torus, IVec{-1, 1}, 4, rng);
  const FieldConfig c = random_field(torus, 3, 6, rng);
  const GradedCoefficient h = wilson(a, c, l);
  CHECK(close_rel(wilson(a, c, l.subdivided(1, q(1, 3))), h) <= 1e-8);
  CHECK(close_rel(wilson(a, c, l.rotated(2)), h) <= 1e-8);
}

TEST_CASE("composition law") {
  Rng rng(13);
  const FlatConnection a = random_commuting_connection(2, 2, rng);
  const PLLoop l = gen_random_loop(torus, IVec{1, -2}, 5, rng);
  const FieldConfig c = random_field(torus, 2, 6, rng);
  const SuperMatrix whole = gen_transport(a, c, l, 0, 1, {});
  const SuperMatrix parts =
      gen_transport(a, c, l, 0, 0.37, {}) * gen_transport(a, c, l, 0.37, 1, {});
  CHECK((whole - parts).norm() <= 1e-9 * whole.norm());
}

TEST_CASE("second-order quadrature") {
  Rng rng(14);
  const FlatConnection a = random_commuting_connection(3, 2, rng);
  const PLLoop l = gen_random_loop(torus, IVec{1, 1}, 4, rng);
  CHECK(measured_transport_order(a, l, 8) >= 1.9);
}

TEST_CASE("plan validation") {
  TransportPlan p;
  p.steps = 0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.tol = -1;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("non-convergence is reported") {
  Rng rng(15);
  const FlatConnection a = random_commuting_connection(2, 2, rng, 3.0);
  const PLLoop l = gen_random_loop(torus, IVec{3, 2}, 4, rng);
  TransportPlan p;
  p.steps = 1;
  p.max_steps = 2;
  p.tol = 1e-15;
  CHECK_THROWS_AS(transport(a, l, 0, 1, p), ConvergenceError);
}

TEST_CASE("insertion derivative") {
  Rng rng(16);
  const FlatConnection a = random_commuting_connection(2, 2, rng);
  const PLLoop l = gen_random_loop(torus, IVec{1, 0}, 4, rng);
  const FieldConfig c = random_field(torus, 2, 6, rng);
  const FieldConfig zero(torus, 2, 6);
  CHECK(insertion_derivative(a, c, l, zero, {}).norm() == 0.0);

  // eta = C: derivative of h(tC) at t = 1
  const double eps = 1e-4;
  const GradedCoefficient fd =
      (wilson(a, c.scaled(CRational(exact_rational(1 + eps))), l) -
       wilson(a, c.scaled(CRational(exact_rational(1 - eps))), l)) *
      Complex(0.5 / eps);
  CHECK(close_rel(insertion_derivative(a, c, l, c, {}), fd) <= 1e-6);

  // C = 0 and a nilpotent eta: the first-order term of the expansion
  FieldConfig eta(torus, 2, 6);
  eta.add({1}, constant(2), 3, 0b110);
  const GradedCoefficient first =
      wilson(a, eta, l) - wilson(a, zero, l);
  CHECK(close_rel(insertion_derivative(a, zero, l, eta, {}), first) <= 1e-10);
}

TEST_CASE("two-patch gluing") {
  TwoPatch p;
  p.box[0] = {DVec::Constant(2, -2), DVec::Constant(2, 2)};
  p.box[1] = p.box[0];
  p.box[0].hi(0) = 0.5;
  p.box[1].lo(0) = -0.5;
  const PLLoop l =
      chart_polygon({rv({-1, -1}), rv({1, -1}), rv({1, 1}), rv({-1, 1})});
  const PatchSchedule sched{0, {0.125, 0.625}};
  const FieldConfig zero(Space::chart(2), 2, 0);

  SUBCASE("transition functions alone") {
    p.conn[0] = p.conn[1] = FlatConnection::zero(2, 2);
    p.t12 = diag2(3, 1.0 / 3);
    p.t21 = diag2(1.0 / 3, 3);
    CHECK(std::abs(glued_wilson(p, zero, zero, l, sched).body() - 2.0) <=
          1e-12);
  }
  SUBCASE("trivial transitions reduce to a single chart") {
    Rng rng(6);
    const FlatConnection a = random_commuting_connection(2, 2, rng);
    p.conn[0] = p.conn[1] = a;
    p.t12 = p.t21 = Matrix::Identity(2, 2);
    CHECK(std::abs(glued_wilson(p, zero, zero, l, sched).body() -
                   wilson(a, zero, l).body()) <= 1e-10);
  }
  SUBCASE("constant gauge transformation of all data") {
    const FlatConnection a2 =
        FlatConnection::constant({diag2(0.2, -0.1), diag2(0.3, 0.5)});
    const Matrix t = diag2(2, 0.5);
    p.conn[1] = a2;
    p.conn[0] = a2.conjugated(t);
    p.t12 = t;
    p.t21 = t.inverse();
    const GradedCoefficient h = glued_wilson(p, zero, zero, l, sched);
    Matrix g(2, 2);
    g << 1, 0.3, Complex(0, 0.2), 1;
    TwoPatch pg = p;
    pg.conn[0] = p.conn[0].conjugated(g);
    pg.conn[1] = p.conn[1].conjugated(g);
    pg.t12 = g * p.t12 * g.inverse();
    pg.t21 = g * p.t21 * g.inverse();
    CHECK(close_rel(glued_wilson(pg, zero, zero, l, sched), h) <= 1e-10);
  }
  SUBCASE("odd crossing count is rejected") {
    p.conn[0] = p.conn[1] = FlatConnection::zero(2, 2);
    p.t12 = p.t21 = Matrix::Identity(2, 2);
    CHECK_THROWS_AS(glued_wilson(p, zero, zero, l, {0, {0.125}}),
                    ValidationError);
  }
}

TEST_CASE("results do not depend on the Grassmann generator count") {
  Rng rng(17);
  const FlatConnection a = random_commuting_connection(2, 2, rng);
  const PLLoop l = gen_random_loop(torus, IVec{1, 1}, 4, rng);
  const FieldConfig c = random_field(torus, 2, 6, rng);
  const VariationField v = VariationField::from_vertices(
      l, std::vector<RVec>(l.size(), RVec{q(1, 3), q(-1, 5)}));
  for (const auto &vars : {std::vector<VariationField>{},
                           std::vector<VariationField>{v}}) {
    const GradedCoefficient h6 = wilson(a, c, l, vars);
    const GradedCoefficient h7 = wilson(a, c.widened(7), l, vars);
    CHECK(close_rel(h7, h6.widened(7)) <= 1e-12);
  }
  CHECK_THROWS_AS(c.widened(3), ConfigError);
}
