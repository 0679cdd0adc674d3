#include "test_util.hpp"

#include "stringtop/signs.hpp"

using namespace stringtop;

namespace {

const Space torus = Space::torus(2);

PLLoop a10() { return torus_line({1, 0}, {q(1, 10), q(1, 7)}); }
PLLoop a01() { return torus_line({0, 1}, {q(1, 3), q(1, 9)}); }

ChordCircle circle(std::vector<int> ends, int n,
                   RepKind rep = RepKind::Standard) {
  return ChordCircle{rep, std::move(ends), n};
}

/// Two circles on the (1,0) and (0,1) lifts joined by one arc at their
/// crossing.
RealizedDiagram crossing_arc(int n, RepKind rep = RepKind::Standard) {
  const PLLoop x = a10(), y = a01();
  const auto p = intersections(x, y).at(0);
  ChordDiagram d({circle({0}, n, rep), circle({1}, n, rep)}, {{0, 1}});
  auto r = DiagramRealization::from_loops(d, {x, y},
                                          {{0, {p.s, 0}}, {1, {p.sbar, 0}}});
  return {1, d, r};
}

RealizedDiagram plain(const PLLoop &l, int n) {
  ChordDiagram d({circle({}, n)}, {});
  return {1, d, DiagramRealization::from_loops(d, {l}, {})};
}

} // namespace

TEST_CASE("diagram invariants") {
  CHECK_THROWS_AS(ChordDiagram({circle({0, 1}, 2)}, {}), ValidationError);
  CHECK_THROWS_AS(ChordDiagram({circle({0, 0}, 2)}, {{0, 0}}),
                  ValidationError);
  CHECK_NOTHROW(ChordDiagram({circle({0}, 2)}, {}, true));
  const ChordDiagram d({circle({3, 1, 2, 0}, 2)}, {{0, 1}, {2, 3}});
  CHECK(d.partner(3) == 2);
  CHECK(d.locate(2) == std::pair<int, int>{0, 2});
  CHECK(d.canonical().circles()[0].endpoints == std::vector<int>{0, 3, 1, 2});
  CHECK(d == ChordDiagram({circle({1, 2, 0, 3}, 2)}, {{3, 2}, {1, 0}}));
  CHECK_FALSE(d == ChordDiagram({circle({1, 2, 0, 3}, 2, RepKind::Twisted)},
                                {{3, 2}, {1, 0}}));
}

TEST_CASE("4T combination shape") {
  const ChordDiagram d({circle({0, 2}, 2), circle({1, 3}, 2)},
                       {{0, 1}, {2, 3}});
  const auto terms = four_t_combination(d, {0, 1, 1});
  REQUIRE(terms.size() == 4);
  CHECK(terms[0].coeff == 1);
  CHECK(terms[1].coeff == -1);
  CHECK(terms[2].coeff == 1);
  CHECK(terms[3].coeff == -1);
  for (const auto &t : terms)
    CHECK(t.diagram.arcs().size() == 3);
  // moving endpoint just before / after P = label 0 on circle 0
  CHECK(terms[0].diagram.circles()[0].endpoints ==
        std::vector<int>{5, 0, 2});
  CHECK(terms[1].diagram.circles()[0].endpoints ==
        std::vector<int>{0, 5, 2});
  CHECK_THROWS_AS(four_t_combination(d, {2, 0, 0}), ConfigError);
}

TEST_CASE("realized 4T relation") {
  for (int n = 1; n <= 3; ++n) {
    Rng rng(70 + n);
    const FlatConnection a = random_commuting_connection(n, 2, rng);
    const RealizedDiagram base = crossing_arc(n);
    for (int c = 0; c < 2; ++c) {
      const auto terms = realize_four_t(base.diagram, base.realization, 0, c,
                                        q(5, 7));
      REQUIRE(terms.size() == 4);
      Complex sum = 0;
      double scale = 0;
      for (const auto &t : terms) {
        const Complex v =
            evaluate_diagram(t.diagram, t.realization, a).body();
        scale = std::max(scale, std::abs(v));
        sum += static_cast<double>(t.coeff) * v;
      }
      CHECK(std::abs(sum) <= 1e-10 * std::max(1.0, scale));
      if (n == 1) {
        // abelian: every term has the same value
        for (const auto &t : terms)
          CHECK(std::abs(evaluate_diagram(t.diagram, t.realization, a).body() -
                         evaluate_diagram(terms[0].diagram,
                                          terms[0].realization, a)
                             .body()) <= 1e-12);
      }
    }
  }
}

TEST_CASE("4T slot must be inside a transport step") {
  const RealizedDiagram base = crossing_arc(2);
  const Rational at = base.realization.circles[0][1].kind ==
                              CircleEvent::Kind::Insert
                          ? base.realization.circles[0][0].to
                          : q(1, 2);
  CHECK_THROWS_AS(realize_four_t(base.diagram, base.realization, 0, 0, at),
                  ValidationError);
}

TEST_CASE("GL(n) ideal with trivial holonomy") {
  const RealizedDiagram x = crossing_arc(2);
  const FlatConnection a = FlatConnection::zero(2, 2);
  CHECK(std::abs(evaluate_diagram(x.diagram, x.realization, a).body() - 2.0) <=
        1e-14);
  const RealizedDiagram s = smooth_arc(x.diagram, x.realization, 0);
  CHECK(s.diagram.circles().size() == 1);
  CHECK(std::abs(evaluate_diagram(s.diagram, s.realization, a).body() - 2.0) <=
        1e-14);
  const auto ideal = gln_ideal_element(x.diagram, 0);
  REQUIRE(ideal.size() == 2);
  CHECK(ideal[1].diagram == s.diagram);
  CHECK(ideal[1].coeff == -1);
}

TEST_CASE("GL(n) ideal vanishes for the standard representation only") {
  for (int n = 1; n <= 3; ++n) {
    Rng rng(80 + n);
    const FlatConnection a = random_commuting_connection(n, 2, rng);
    const RealizedDiagram x = crossing_arc(n);
    const RealizedDiagram s = smooth_arc(x.diagram, x.realization, 0);
    const Complex v = evaluate_diagram(x.diagram, x.realization, a).body();
    CHECK(std::abs(v - evaluate_diagram(s.diagram, s.realization, a).body()) <=
          1e-10 * std::max(1.0, std::abs(v)));

    const RealizedDiagram t = crossing_arc(n, RepKind::Twisted);
    CHECK_THROWS_AS(gln_ideal_element(t.diagram, 0), ConfigError);
    CHECK_THROWS_AS(smooth_arc(t.diagram, t.realization, 0), ConfigError);
    const RealizedDiagram ts = smooth_arc(t.diagram, t.realization, 0, true);
    const Complex tv = evaluate_diagram(t.diagram, t.realization, a).body();
    const Complex tvs = evaluate_diagram(ts.diagram, ts.realization, a).body();
    if (n > 1)
      CHECK(std::abs(tv - tvs) > 1e-6);
  }
}

TEST_CASE("self-chord smoothing splits the circle") {
  Rng rng(90);
  const FlatConnection a = random_commuting_connection(2, 2, rng);
  const PLLoop x = a10(), y = a01();
  const auto p = intersections(x, y).at(0);
  const PLLoop c = concatenate(x, y, p);
  const Rational back(x.size() + 1, c.size());
  REQUIRE(c.point_exact(back) != c.point_exact(0));
  ChordDiagram d({circle({0, 1}, 2)}, {{0, 1}});
  auto r = DiagramRealization::from_loops(d, {c}, {{0, {q(0), 0}},
                                                  {1, {back, 0}}});
  const RealizedDiagram s = smooth_arc(d, r, 0);
  CHECK(s.diagram.circles().size() == 2);
  const Complex v = evaluate_diagram(d, r, a).body();
  CHECK(std::abs(v - evaluate_diagram(s.diagram, s.realization, a).body()) <=
        1e-10 * std::max(1.0, std::abs(v)));
}

TEST_CASE("smoothing needs coincident endpoints") {
  ChordDiagram d({circle({0}, 2), circle({1}, 2)}, {{0, 1}});
  auto r = DiagramRealization::from_loops(
      d, {a10(), a01()}, {{0, {q(1, 5), 0}}, {1, {q(1, 5), 0}}});
  CHECK_THROWS_AS(smooth_arc(d, r, 0), ValidationError);
}

TEST_CASE("evaluation basics") {
  Rng rng(91);
  const FlatConnection a = random_commuting_connection(2, 2, rng);
  const FieldConfig zero(torus, 2, 0);
  const PLLoop x = a10(), y = a01();
  ChordDiagram d({circle({}, 2), circle({}, 2)}, {});
  auto r = DiagramRealization::from_loops(d, {x, y}, {});
  CHECK(std::abs(evaluate_diagram(d, r, a).body() -
                 wilson(a, zero, x).body() * wilson(a, zero, y).body()) <=
        1e-10);

  // one arc at the crossing is the Wilson bracket summand
  const RealizedDiagram arc = crossing_arc(2);
  const auto p = intersections(x, y).at(0);
  const WilsonBracket w = wilson_field_bracket(x, y, a);
  CHECK(std::abs(static_cast<double>(wilson_bracket_sign(2) * p.sign) *
                     evaluate_diagram(arc.diagram, arc.realization, a).body() -
                 w.kappa_path.body()) <= 1e-10);

  // abelian self-chord: kappa contraction is 1
  const FlatConnection a1 = random_commuting_connection(1, 2, rng);
  const FieldConfig zero1(torus, 1, 0);
  ChordDiagram s({circle({0, 1}, 1)}, {{0, 1}});
  auto rs = DiagramRealization::from_loops(
      s, {x}, {{0, {q(1, 4), 0}}, {1, {q(2, 3), 0}}});
  CHECK(std::abs(evaluate_diagram(s, rs, a1).body() -
                 wilson(a1, zero1, x).body()) <= 1e-12);
}

TEST_CASE("evaluation is invariant under canonicalization") {
  Rng rng(92);
  const FlatConnection a = random_commuting_connection(3, 2, rng);
  const PLLoop x = a10();
  ChordDiagram d({circle({2, 0, 3, 1}, 3)}, {{0, 1}, {2, 3}});
  auto r = DiagramRealization::from_loops(
      d, {x}, {{2, {q(1, 9), 0}}, {0, {q(1, 3), 0}},
               {3, {q(1, 2), 0}}, {1, {q(4, 5), 0}}});
  CHECK(std::abs(evaluate_diagram(d, r, a).body() -
                 evaluate_diagram(d.canonical(), r, a).body()) <= 1e-12);
}

TEST_CASE("realization must match the diagram") {
  ChordDiagram d({circle({0, 1}, 2)}, {{0, 1}});
  auto r = DiagramRealization::from_loops(
      d, {a10()}, {{0, {q(1, 4), 0}}, {1, {q(2, 3), 0}}});
  ChordDiagram other({circle({0}, 2), circle({1}, 2)}, {{0, 1}});
  CHECK_THROWS_AS(validate_realization(other, r), ValidationError);
  CHECK_THROWS_AS(evaluate_diagram(d, r, FlatConnection::zero(3, 2)),
                  ConfigError);
}

TEST_CASE("degree-0 chord bracket") {
  Rng rng(93);
  const FlatConnection a = random_commuting_connection(2, 2, rng);
  const std::vector<RealizedDiagram> x{plain(a10(), 2)};
  const std::vector<RealizedDiagram> y{plain(a01(), 2)};
  const auto br = chord_bracket_degree0(x, y);
  REQUIRE(br.size() == 1);
  CHECK(std::abs(br[0].coeff) == 1);
  CHECK(br[0].diagram.circles().size() == 2);
  CHECK(br[0].diagram.arcs().size() == 1);

  const PLLoop far1 = chart_polygon({rv({0, 0}), rv({1, 0}), rv({0, 1})});
  const PLLoop far2 = chart_polygon({rv({5, 5}), rv({6, 5}), rv({5, 6})});
  CHECK(chord_bracket_degree0({plain(far1, 2)}, {plain(far2, 2)}).empty());

  const Complex lhs = evaluation_bracket(x, y, a);
  const Complex rhs = static_cast<double>(intersection_current_sign(2)) *
                      evaluate_combination(br, a);
  CHECK(std::abs(lhs - rhs) <= 1e-9 * std::max(1.0, std::abs(lhs)));
}

TEST_CASE("quotient by the ideal preserves evaluation") {
  Rng rng(94);
  const FlatConnection a = random_commuting_connection(3, 2, rng);
  const RealizedDiagram x = crossing_arc(3);
  const auto quot = gln_quotient(x);
  for (const auto &t : quot)
    CHECK(t.diagram.arcs().empty());
  CHECK(std::abs(evaluate_combination(quot, a) -
                 evaluate_diagram(x.diagram, x.realization, a).body()) <=
        1e-10);
}
