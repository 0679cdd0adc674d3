// Acceptance criteria, run at the default instance counts and tolerances.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "test_util.hpp"

#include <chrono>

using namespace stringtop;

namespace {

CheckRecord run(const std::string &check, SuiteConfig cfg = {}) {
  const Report r = run_suite(cfg, {check});
  REQUIRE(r.checks.size() == 1);
  const CheckRecord &c = r.checks[0];
  MESSAGE(check << ": max residual " << c.max_residual << " (tol "
                << c.tolerance << "), " << c.runtime_ms << " ms, details "
                << c.details.dump());
  return c;
}

} // namespace

TEST_CASE("1 gl(n) trace fusion over 1000 instances per n") {
  SuiteConfig cfg;
  cfg.n_list = {1, 2, 3, 4};
  const CheckRecord c = run("gln", cfg);
  CHECK(c.instances >= 4000);
  CHECK(c.tolerance <= 1e-10);
  CHECK(c.pass);
  CHECK(c.runtime_ms < 5000);
}

TEST_CASE("2 Casimir swap identity") {
  const CheckRecord c = run("swap");
  CHECK(c.tolerance <= 1e-12);
  CHECK(c.pass);
}

TEST_CASE("3 holonomy correctness") {
  const CheckRecord c = run("holonomy");
  CHECK(c.tolerance <= 1e-8);
  CHECK(c.details["min_transport_order"].get<double>() >= 1.9);
  CHECK(c.pass);
  CHECK(c.runtime_ms < 30000);
}

TEST_CASE("4 gauge covariance") {
  const CheckRecord c = run("gauge");
  CHECK(c.instances >= 100);
  CHECK(c.tolerance <= 1e-9);
  CHECK(c.pass);
}

TEST_CASE("5 fundamental identity") {
  const CheckRecord c = run("fundamental");
  CHECK(c.instances >= 50);
  CHECK(c.tolerance <= 1e-4);
  CHECK(c.details["min_order"].get<double>() >= 1.9);
  CHECK(c.pass);
  CHECK(c.runtime_ms < 120000);
}

TEST_CASE("6 Goldman oracle agreement") {
  const CheckRecord c = run("goldman");
  CHECK(c.instances >= 200);
  CHECK(c.max_residual == 0.0);
  CHECK(c.pass);
}

TEST_CASE("7 main theorem on the commuting torus family") {
  SuiteConfig cfg;
  cfg.n_list = {1, 2, 3};
  const CheckRecord c = run("main-theorem", cfg);
  CHECK(c.instances >= 100);
  CHECK(c.tolerance <= 1e-9);
  CHECK(c.details["cancellation_instances"].get<long>() > 0);
  CHECK(c.pass);
  CHECK(c.runtime_ms < 60000);
}

TEST_CASE("8 bracket axioms and delta squared") {
  const CheckRecord c = run("bracket-axioms");
  CHECK(c.max_residual == 0.0);
  CHECK(c.details["delta_square_checks"].get<long>() > 0);
  CHECK(c.pass);
}

TEST_CASE("9 string Jacobi after class reduction") {
  const CheckRecord c = run("jacobi");
  CHECK(c.instances >= 50);
  CHECK(c.max_residual == 0.0);
  CHECK(c.pass);
}

TEST_CASE("10 chord relations and the chord bracket") {
  SuiteConfig cfg;
  cfg.n_list = {1, 2, 3};
  for (const char *check : {"chord-4t", "chord-ideal"}) {
    const CheckRecord c = run(check, cfg);
    CHECK(c.tolerance <= 1e-10);
    CHECK(c.pass);
  }
  const CheckRecord b = run("chord-bracket", cfg);
  CHECK(b.tolerance <= 1e-9);
  CHECK(b.pass);
}

TEST_CASE("11 determinism and wall clock of the full suite") {
  const SuiteConfig cfg;
  const auto t0 = std::chrono::steady_clock::now();
  const Report first = run_suite(cfg, check_names());
  const double seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
  MESSAGE("full suite: " << seconds << " s");
  CHECK(first.pass());
  CHECK(seconds < 300);
  const Report second = run_suite(cfg, check_names());
  CHECK(strip_timing(to_json(first)).dump() ==
        strip_timing(to_json(second)).dump());
}
