#include "test_util.hpp"

using namespace stringtop;

namespace {

const Space chart2 = Space::chart(2);

ScalarField poly(std::vector<int> k, long c = 1) {
  return ScalarField::term(ScalarField::Kind::Polynomial, std::move(k),
                           CRational(c));
}

DVec dv(double x, double y) {
  DVec v(2);
  v << x, y;
  return v;
}

Matrix e(int n, int i, int j) { return LieBasis(n).element(i * n + j); }

} // namespace

TEST_CASE("obstruction of a zero field vanishes") {
  const FieldConfig c(chart2, 2, 4);
  CHECK(field_obstruction(c, FlatConnection::zero(2, 2)).is_zero());
}

TEST_CASE("obstruction of a 0-form is its differential") {
  FieldConfig c(chart2, 2, 4);
  // theta_1 E_11 (x^1)^2 x^2
  c.add({}, poly({2, 1}), 0, 0b1);
  const FieldConfig f = field_obstruction(c, FlatConnection::zero(2, 2));
  CHECK(f.parity() == 0);
  const DVec x = dv(1.5, -2);
  const SuperMatrix e1 = eval_field(f, x, {dv(1, 0)});
  const SuperMatrix e2 = eval_field(f, x, {dv(0, 1)});
  CHECK((e1.block(0b1) - 2 * 1.5 * -2 * e(2, 0, 0)).norm() <= 1e-14);
  CHECK((e2.block(0b1) - 1.5 * 1.5 * e(2, 0, 0)).norm() <= 1e-14);
}

TEST_CASE("constant nilpotent 1-form has no obstruction") {
  FieldConfig c(chart2, 2, 4);
  c.add({0}, poly({0, 0}, 3), LieBasis(2).index(0, 1), 0b11);
  CHECK(field_obstruction(c, FlatConnection::zero(2, 2)).is_zero());
}

TEST_CASE("field evaluation") {
  FieldConfig one(chart2, 2, 4);
  one.add({0}, poly({0, 0}), 0, 0);
  CHECK((eval_field(one, dv(0.3, 0.1), {dv(1, 0)}).body() - e(2, 0, 0))
            .norm() == 0.0);

  FieldConfig two(chart2, 2, 4);
  two.add({0, 1}, poly({0, 0}), 0, 0b1);
  const Matrix a = eval_field(two, dv(0, 0), {dv(1, 0), dv(0, 1)}).block(0b1);
  const Matrix b = eval_field(two, dv(0, 0), {dv(0, 1), dv(1, 0)}).block(0b1);
  CHECK((a - e(2, 0, 0)).norm() == 0.0);
  CHECK((a + b).norm() == 0.0);

  FieldConfig lin(chart2, 2, 4);
  lin.add({1}, poly({1, 0}), 1, 0);
  CHECK((eval_field(lin, dv(2, 0), {dv(0, 1)}).body() - 2.0 * e(2, 0, 1))
            .norm() == 0.0);
}

TEST_CASE("d squared is zero") {
  Rng rng(17);
  for (const Space s : {Space::chart(2), Space::torus(2)}) {
    const FieldConfig c = random_field(s, 2, 6, rng);
    CHECK(exterior_derivative(exterior_derivative(c)).is_zero());
  }
}

TEST_CASE("obstruction is gauge covariant") {
  Rng rng(23);
  for (int n = 1; n <= 3; ++n) {
    const FieldConfig c = random_field(chart2, n, 6, rng);
    const FlatConnection a = random_commuting_connection(n, 2, rng);
    Matrix g = Matrix::Identity(n, n);
    g(0, n - 1) += 0.4;
    g(n - 1, 0) += Complex(0, 0.2);
    const FieldConfig lhs = field_obstruction(c.conjugated(g), a.conjugated(g));
    const FieldConfig rhs = field_obstruction(c, a).conjugated(g);
    for (const DVec &x : {dv(0.1, 0.7), dv(-1.2, 0.4)}) {
      const SuperMatrix l = eval_field(lhs, x, {dv(1, 0.5), dv(-0.3, 1)});
      const SuperMatrix r = eval_field(rhs, x, {dv(1, 0.5), dv(-0.3, 1)});
      CHECK((l - r).norm() <= 1e-10 * std::max(1.0, r.norm()));
    }
  }
}

TEST_CASE("torus loop classes") {
  const PLLoop a = torus_line({1, 0}, {q(1, 10), q(1, 7)});
  CHECK(loop_class_torus(a) == IVec{1, 0});
  CHECK(loop_class_torus(torus_line({2, 0}, {q(1, 10), q(1, 7)})) ==
        IVec{2, 0});
  const PLLoop b = torus_line({0, 1}, {q(1, 3), q(1, 9)});
  const auto pts = intersections(a, b);
  REQUIRE(pts.size() == 1);
  CHECK(loop_class_torus(concatenate(a, b, pts[0])) == IVec{1, 1});
}

TEST_CASE("rotation normal form") {
  const PLLoop l = gen_random_loop(Space::torus(2), IVec{2, -1}, 5,
                                   std::uint64_t{9});
  const PLLoop nf = l.normal_form();
  CHECK(nf.normal_form() == nf);
  CHECK(l.rotated(3).normal_form() == nf);
  CHECK(loop_class_torus(nf) == loop_class_torus(l));
}

TEST_CASE("loop validation") {
  CHECK_THROWS_AS(chart_polygon({rv({0, 0}), rv({0, 0}), rv({0, 0})}),
                  ValidationError);
  CHECK_THROWS_AS(chart_polygon({rv({0, 0}), rv({1, 0}), rv({1, 0})}),
                  ValidationError);
  CHECK_THROWS(PLLoop(Space::chart(2), {rv({0, 0}), rv({1, 0}), rv({0, 1})},
                      {1, 0}));
  CHECK_NOTHROW(chart_polygon({rv({0, 0}), rv({1, 0}), rv({0, 1})}));
}

TEST_CASE("subdivision keeps the point set") {
  const PLLoop l = chart_polygon({rv({0, 0}), rv({2, 0}), rv({0, 2})});
  const PLLoop f = l.subdivided(0, q(1, 2));
  CHECK(f.size() == 4);
  CHECK(f.vertex(1) == rv({1, 0}));
}

TEST_CASE("flat connections") {
  Matrix a(2, 2), b(2, 2);
  a << 0, 1, 0, 0;
  b << 0, 0, 1, 0;
  CHECK_THROWS_AS(FlatConnection::constant({a, b}), ValidationError);
  const FlatConnection c = FlatConnection::constant({diag2(1, 2), diag2(3, 4)});
  CHECK(c.flatness_residual() == 0.0);
  CHECK((c.along(dv(1, 1)) - diag2(4, 6)).norm() == 0.0);
}

TEST_CASE("two-patch cocycle validation") {
  TwoPatch p;
  p.box[0] = {dv(-2, -2), dv(0.5, 2)};
  p.box[1] = {dv(-0.5, -2), dv(2, 2)};
  p.conn[0] = p.conn[1] = FlatConnection::zero(2, 2);
  p.t12 = diag2(2, 0.5);
  p.t21 = diag2(0.5, 2);
  CHECK_NOTHROW(p.validate());
  p.t21 = diag2(0.5, 1);
  CHECK_THROWS_AS(p.validate(), ValidationError);
}
