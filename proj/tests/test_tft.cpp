#include "test_util.hpp"

#include "stringtop/signs.hpp"

#include <unsupported/Eigen/MatrixFunctions>

using namespace stringtop;

namespace {

GradedPolynomial var(const GradedPhaseModel &m, const std::string &name) {
  return GradedPolynomial::variable(m, m.index(name));
}

GradedPolynomial num(const GradedPhaseModel &m, long c) {
  return GradedPolynomial::constant(m, ExactGraded(m.coefficient_generators(), c));
}

} // namespace

TEST_CASE("even canonical bracket") {
  const auto m = GradedPhaseModel::even_canonical();
  const auto qv = var(m, "q"), pv = var(m, "p");
  CHECK(graded_bracket(qv * qv, pv, m) == Rational(2) * qv);
  CHECK(graded_bracket(qv, pv, m) == num(m, 1));
  CHECK(graded_bracket(qv * pv, num(m, 7), m).is_zero());
}

TEST_CASE("odd Darboux bracket") {
  const auto m = GradedPhaseModel::odd_darboux();
  REQUIRE(m.d() == 1);
  const auto phi = GradedPolynomial::variable(m, 0);
  const auto dag = GradedPolynomial::variable(m, 1);
  CHECK(graded_bracket(phi, dag, m) == num(m, 1));
  const auto r = graded_bracket(phi * dag, phi, m);
  CHECK((r == phi || r == -phi));
  CHECK(graded_bracket(dag * dag, phi, m).is_zero()); // dag^2 = 0
}

TEST_CASE("graded antisymmetry in both parities of d") {
  for (const auto &m : {GradedPhaseModel::odd_two_fields(2),
                        GradedPhaseModel::even_with_ghosts(2)}) {
    for (int i = 0; i < m.size(); ++i)
      for (int j = 0; j < m.size(); ++j) {
        const auto zi = GradedPolynomial::variable(m, i);
        const auto zj = GradedPolynomial::variable(m, j);
        const int s = antisymmetry_sign(m.variable(i).parity,
                                        m.variable(j).parity, m.d());
        CHECK((graded_bracket(zi, zj, m) +
               Rational(s) * graded_bracket(zj, zi, m))
                  .is_zero());
      }
  }
}

TEST_CASE("differential") {
  const auto m = GradedPhaseModel::even_canonical();
  const auto qv = var(m, "q"), pv = var(m, "p");
  const auto zero = GradedPolynomial(m);
  CHECK(delta_and_nilpotency(zero, qv * pv, m).delta.is_zero());
  // S = p acts as -d/dq
  const DeltaResult r = delta_and_nilpotency(pv, qv * qv * pv, m);
  CHECK(r.delta == Rational(-2) * (qv * pv));
  CHECK(r.delta_square == Rational(2) * (pv));
}

TEST_CASE("master equation solutions square to zero") {
  const auto m = GradedPhaseModel::odd_two_fields();
  std::vector<std::vector<int>> cands;
  for (int i = 0; i < m.size(); ++i)
    for (int j = i; j < m.size(); ++j) {
      const int par = m.variable(i).parity ^ m.variable(j).parity;
      if (par == ((m.d() + 1) & 1))
        cands.push_back({i, j});
    }
  const auto sols = master_equation_search(m, cands, 1);
  REQUIRE_FALSE(sols.empty());
  Rng rng(41);
  for (const auto &s : sols) {
    CHECK(graded_bracket(s, s, m).is_zero());
    for (int k = 0; k < 100 / static_cast<int>(sols.size()) + 1; ++k) {
      GradedPolynomial p(m);
      for (int t = 0; t < 3; ++t) {
        std::vector<int> mono;
        for (int u = 0; u < uniform_int(rng, 0, 3); ++u)
          mono.push_back(static_cast<int>(uniform_int(rng, 0, m.size() - 1)));
        p = p + GradedPolynomial::monomial(
                    m, ExactGraded(0, uniform_int(rng, -3, 3)), mono);
      }
      CHECK(delta_and_nilpotency(s, p, m).delta_square.is_zero());
    }
  }
}

TEST_CASE("non-solutions of the master equation are rejected") {
  const auto m = GradedPhaseModel::odd_darboux();
  const auto phi = GradedPolynomial::variable(m, 0);
  const auto dag = GradedPolynomial::variable(m, 1);
  const auto s = phi * dag + dag; // {S;S} != 0
  if (!graded_bracket(s, s, m).is_zero())
    CHECK_THROWS_AS(delta_and_nilpotency(s, phi, m), MasterEquationError);
}

TEST_CASE("Wilson bracket of crossing torus loops") {
  Rng rng(51);
  const FlatConnection a = random_commuting_connection(2, 2, rng);
  const PLLoop x = torus_line({1, 0}, {q(1, 10), q(1, 7)});
  const PLLoop y = torus_line({0, 1}, {q(1, 3), q(1, 9)});
  const WilsonBracket w = wilson_field_bracket(x, y, a);
  CHECK(w.intersections == 1);
  CHECK(close_rel(w.kappa_path, w.fused_path) <= 1e-10);
  const Complex uv =
      (a.components()[0].exp() * a.components()[1].exp()).trace();
  CHECK(std::min(std::abs(w.kappa_path.body() - uv),
                 std::abs(w.kappa_path.body() + uv)) <= 1e-9);
}

TEST_CASE("abelian Wilson bracket counts signed crossings") {
  const FlatConnection a = FlatConnection::constant(
      {Matrix::Constant(1, 1, Complex(0.2, 0.1)),
       Matrix::Constant(1, 1, Complex(-0.3, 0.4))});
  const PLLoop x = torus_line({2, 1}, {q(1, 10), q(1, 7)});
  const PLLoop y = torus_line({1, 3}, {q(1, 3), q(1, 9)}, 4);
  const WilsonBracket w = wilson_field_bracket(x, y, a);
  long signed_count = 0;
  for (const auto &p : intersections(x, y))
    signed_count += p.sign;
  const FieldConfig zero(Space::torus(2), 1, 0);
  const Complex expect = static_cast<double>(wilson_bracket_sign(2) *
                                             signed_count) *
                         wilson(a, zero, x).body() * wilson(a, zero, y).body();
  CHECK(std::abs(w.kappa_path.body() - expect) <= 1e-10);
}

TEST_CASE("disjoint loops have zero Wilson bracket") {
  const PLLoop x = chart_polygon({rv({0, 0}), rv({1, 0}), rv({0, 1})});
  const PLLoop y = chart_polygon({rv({5, 5}), rv({6, 5}), rv({5, 6})});
  Rng rng(3);
  const WilsonBracket w =
      wilson_field_bracket(x, y, random_commuting_connection(2, 2, rng));
  CHECK(w.kappa_path.is_zero());
  CHECK(w.intersections == 0);
}

TEST_CASE("main theorem examples") {
  Rng rng(52);
  const FlatConnection a = random_commuting_connection(2, 2, rng);
  const StringCycle x = StringCycle::single(torus_line({1, 0}, {q(1, 10), q(1, 7)}));
  const StringCycle y = StringCycle::single(torus_line({0, 1}, {q(1, 3), q(1, 9)}));
  MainTheoremResult r = main_theorem_check(x, y, a);
  CHECK(r.residual <= 1e-9 * r.scale);
  const Complex uv =
      (a.components()[0].exp() * a.components()[1].exp()).trace();
  CHECK(std::abs(std::abs(r.lhs.body()) - std::abs(uv)) <= 1e-9);

  r = main_theorem_check(x, StringCycle(), a);
  CHECK(r.residual == 0.0);

  const StringCycle z =
      StringCycle::single(torus_line({2, 0}, {q(1, 5), q(1, 3)}, 4));
  r = main_theorem_check(x, z, a);
  CHECK(r.lhs.norm() <= 1e-9);
  CHECK(r.rhs.norm() <= 1e-9);
}

TEST_CASE("fundamental identity") {
  const Space chart = Space::chart(2);
  const PLLoop l = chart_polygon({rv({0, 0}), rv({2, 0}), rv({1, 2})});
  const std::vector<RVec> disp{{q(1, 2), q(0)}, {q(0), q(1, 3)},
                               {q(-1, 4), q(1, 5)}};
  SUBCASE("zero field") {
    const FundamentalResult r = fundamental_identity_check(
        FlatConnection::zero(2, 2), FieldConfig(chart, 2, 4), l, disp);
    CHECK(r.geometric.norm() <= 1e-12);
    CHECK(r.algebraic.norm() == 0.0);
  }
  SUBCASE("constant nilpotent 2-form") {
    FieldConfig c(chart, 2, 4);
    c.add({0, 1},
          ScalarField::constant(ScalarField::Kind::Polynomial, 2, CRational(2)),
          1, 0b1);
    const FundamentalResult r =
        fundamental_identity_check(FlatConnection::zero(2, 2), c, l, disp);
    CHECK(r.residual <= 1e-4 * r.scale);
  }
  SUBCASE("random polynomial field") {
    Rng rng(61);
    const FlatConnection a = random_commuting_connection(2, 2, rng, 0.4);
    const FieldConfig c = random_field(chart, 2, 6, rng);
    const FundamentalResult r = fundamental_identity_check(a, c, l, disp);
    CHECK(r.residual <= 1e-4 * r.scale);
    CHECK(r.extrapolated_residual <= 1e-7 * r.scale);
    if (r.coarse_residual > 1e-8 * r.scale)
      CHECK(r.order >= 1.9);
  }
  SUBCASE("tangent variation") {
    Rng rng(62);
    const FlatConnection a = random_commuting_connection(2, 2, rng, 0.4);
    const FieldConfig c = random_field(chart, 2, 6, rng);
    const std::vector<VariationField> v{VariationField::tangent(l)};
    CHECK(wilson(a, c, l, v).norm() <= 1e-12);
    CHECK(insertion_integral(a, c, field_obstruction(c, a), l, v)
              .trace()
              .norm() <= 1e-9);
  }
}
