#include "test_util.hpp"

#include <cstdlib>

using namespace stringtop;

TEST_CASE("gln with ten instances at n = 2") {
  SuiteConfig cfg;
  cfg.n_list = {2};
  cfg.instances["gln"] = 10;
  const Report r = run_suite(cfg, {"gln"});
  REQUIRE(r.checks.size() == 1);
  CHECK(r.checks[0].instances == 10);
  CHECK(r.checks[0].max_residual <= 1e-10);
  CHECK(r.checks[0].pass);
  CHECK(r.pass());
}

TEST_CASE("empty selection") {
  const Report r = run_suite(SuiteConfig{}, {});
  CHECK(r.checks.empty());
  CHECK(r.pass());
  CHECK(to_json(r)["pass"] == true);
}

TEST_CASE("same seed gives the same report") {
  SuiteConfig cfg;
  for (const auto &c : check_names())
    cfg.instances[c] = 2;
  const std::vector<std::string> sel{"gln", "goldman", "chord-4t", "jacobi"};
  const Json a = strip_timing(to_json(run_suite(cfg, sel)));
  const Json b = strip_timing(to_json(run_suite(cfg, sel)));
  CHECK(a.dump() == b.dump());
  cfg.seed += 1;
  CHECK(strip_timing(to_json(run_suite(cfg, sel))).dump() != a.dump());
}

TEST_CASE("configuration errors") {
  SuiteConfig cfg;
  CHECK_THROWS_AS(run_suite(cfg, {"nope"}), ConfigError);
  cfg.instances["gln"] = 0;
  CHECK_THROWS_AS(run_suite(cfg, {"gln"}), ConfigError);
  cfg = {};
  cfg.tolerances["gln"] = 0;
  CHECK_THROWS_AS(run_suite(cfg, {"gln"}), ConfigError);
  cfg = {};
  cfg.n_list = {};
  CHECK_THROWS_AS(run_suite(cfg, {"gln"}), ConfigError);
}

TEST_CASE("too few Grassmann generators is reported per check") {
  SuiteConfig cfg;
  cfg.grassmann_n = 1;
  cfg.instances["gln"] = 3;
  cfg.instances["swap"] = 3;
  const Report r = run_suite(cfg, {"gln", "swap"});
  CHECK_FALSE(r.checks[0].pass);
  CHECK(r.checks[0].details.contains("error"));
  CHECK(r.checks[1].pass);
  CHECK_FALSE(r.pass());
}

TEST_CASE("seed from the environment") {
  setenv("STRINGTOP_SEED", "12345", 1);
  CHECK(SuiteConfig::default_seed() == 12345u);
  setenv("STRINGTOP_SEED", "12x", 1);
  CHECK_THROWS_AS(SuiteConfig::default_seed(), ConfigError);
  unsetenv("STRINGTOP_SEED");
  CHECK(SuiteConfig::default_seed() == SuiteConfig{}.seed);
}

TEST_CASE("random loops") {
  const PLLoop t =
      gen_random_loop(Space::torus(2), IVec{1, 0}, 4, std::uint64_t{1});
  CHECK(t.closure() == IVec{1, 0});
  CHECK(t.size() == 4);
  const PLLoop c =
      gen_random_loop(Space::chart(2), std::nullopt, 5, std::uint64_t{2});
  CHECK(c.closure() == IVec{0, 0});
  CHECK(gen_random_loop(Space::torus(2), IVec{1, 0}, 4, std::uint64_t{1}) ==
        t);
  CHECK_THROWS_AS(
      gen_random_loop(Space::torus(2), IVec{1, 0}, 2, std::uint64_t{1}),
      ConfigError);
}

TEST_CASE("independent random loops are almost always transversal") {
  Rng rng(99);
  int bad = 0;
  for (int k = 0; k < 1000; ++k) {
    const PLLoop a = gen_random_loop(Space::torus(2), IVec{1, 2}, 4, rng);
    const PLLoop b = gen_random_loop(Space::torus(2), IVec{-1, 1}, 4, rng);
    try {
      intersections(a, b);
    } catch (const TransversalityError &) {
      ++bad;
    }
  }
  CHECK(bad < 50);
}

TEST_CASE("perturbation is deterministic and keeps the class") {
  const PLLoop l =
      gen_random_loop(Space::torus(2), IVec{2, 1}, 4, std::uint64_t{5});
  const PLLoop p = perturb_loop(l, 7);
  CHECK(p == perturb_loop(l, 7));
  CHECK_FALSE(p == l);
  CHECK(loop_class_torus(p) == IVec{2, 1});
}

TEST_CASE("text report") {
  SuiteConfig cfg;
  cfg.instances["swap"] = 2;
  const std::string s = to_text(run_suite(cfg, {"swap"}));
  CHECK(s.find("swap") != std::string::npos);
  CHECK(s.find("all checks passed") != std::string::npos);
}
