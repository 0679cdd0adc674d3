#include "test_util.hpp"

#include <filesystem>
#include <fstream>

using namespace stringtop;

TEST_CASE("rationals") {
  CHECK(rational_from_json("3/4") == q(3, 4));
  CHECK(rational_from_json("-2") == q(-2));
  CHECK(rational_from_json(Json(5)) == q(5));
  CHECK(rational_to_string(q(-6, 8)) == "-3/4");
  CHECK_THROWS_AS(rational_from_json("x/2"), ConfigError);
  CHECK_THROWS_AS(rational_from_json("1/0"), ConfigError);
  CHECK_THROWS_AS(rational_from_json(Json(0.5)), ConfigError);
}

TEST_CASE("graded coefficients and super matrices round-trip") {
  const GradedCoefficient a =
      GradedCoefficient(6, Complex(1, -2)) +
      GradedCoefficient::monomial(6, 0b101, Complex(0.5, 0));
  const Json j = to_json(a);
  CHECK(j[1]["indices"] == Json::array({1, 3}));
  CHECK(graded_from_json(j) == a);
  CHECK_THROWS_AS(graded_from_json(Json::parse(R"([{"indices":[7],"re":1,"im":0}])")),
                  ConfigError);

  Matrix m(2, 2);
  m << 1, Complex(0, 2), 3, 4;
  const SuperMatrix s = SuperMatrix::constant(m, 6) +
                        SuperMatrix::monomial(0b11, m.transpose(), 6);
  CHECK((super_matrix_from_json(to_json(s)) - s).norm() == 0.0);
}

TEST_CASE("loops round-trip") {
  const PLLoop l =
      gen_random_loop(Space::torus(2), IVec{2, -1}, 5, std::uint64_t{3});
  CHECK(loop_from_json(to_json(l)) == l);
  const Json bad = Json::parse(
      R"({"space":{"type":"torus","d":2},"vertices":[["0","0"],["1/2","0"]],"closure":[1,0]})");
  CHECK_THROWS(loop_from_json(bad)); // fewer than 3 vertices
  CHECK_THROWS_AS(loop_from_json(Json::parse(R"({"space":{"type":"moon","d":2}})")),
                  ConfigError);
}

TEST_CASE("cycles, fields and connections round-trip") {
  Rng rng(5);
  const Space t = Space::torus(2);
  const StringCycle c =
      StringCycle::single(gen_random_loop(t, IVec{1, 0}, 3, rng), 2) +
      StringCycle::single(gen_random_loop(t, IVec{0, 1}, 4, rng), -1);
  CHECK(cycle_from_json(to_json(c)).terms() == c.terms());

  const FieldConfig f = random_field(t, 2, 6, rng);
  const FieldConfig g = field_from_json(to_json(f));
  DVec x(2);
  x << 0.3, 0.8;
  DVec v(2), w(2);
  v << 1, 0.5;
  w << -0.2, 1;
  CHECK((eval_field(f, x, {v}) - eval_field(g, x, {v})).norm() == 0.0);
  CHECK((eval_field(f, x, {v, w}) - eval_field(g, x, {v, w})).norm() == 0.0);

  const FlatConnection a = random_commuting_connection(3, 2, rng);
  const FlatConnection b = connection_from_json(to_json(a));
  for (int mu = 0; mu < 2; ++mu)
    CHECK((a.components()[mu] - b.components()[mu]).norm() == 0.0);
}

TEST_CASE("diagrams and realizations round-trip, loops by path") {
  const PLLoop x = torus_line({1, 0}, {q(1, 10), q(1, 7)});
  ChordDiagram d({ChordCircle{RepKind::Twisted, {0, 1}, 2}}, {{0, 1}});
  auto r = DiagramRealization::from_loops(
      d, {x}, {{0, {q(1, 4), 0}}, {1, {q(2, 3), 0}}});
  CHECK(diagram_from_json(to_json(d)) == d);

  const auto dir = std::filesystem::temp_directory_path() / "stringtop_io_test";
  std::filesystem::create_directories(dir);
  write_json_file(dir / "loop.json", to_json(x));
  Json rj = to_json(r);
  rj["loops"] = Json::array({"loop.json"});
  const DiagramRealization back = realization_from_json(rj, dir);
  CHECK(back.loops.at(0) == x);
  CHECK_NOTHROW(validate_realization(d, back));
  CHECK_THROWS_AS(realization_from_json(rj, dir / "missing"), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("unreadable files") {
  CHECK_THROWS_AS(read_json_file("/nonexistent/stringtop.json"), ConfigError);
  const auto p = std::filesystem::temp_directory_path() / "stringtop_bad.json";
  std::ofstream(p) << "{ not json";
  CHECK_THROWS_AS(read_json_file(p), ConfigError);
  std::filesystem::remove(p);
}
