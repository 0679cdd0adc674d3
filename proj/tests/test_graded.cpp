#include "test_util.hpp"

using namespace stringtop;

namespace {

GradedCoefficient th(int i, int n = 6) {
  return GradedCoefficient::generator(n, i);
}
GradedCoefficient c(Complex z, int n = 6) { return GradedCoefficient(n, z); }

ExactGraded random_sparse(Rng &rng, int n, std::optional<int> parity) {
  std::vector<ExactGraded::Term> terms;
  const int k = static_cast<int>(uniform_int(rng, 1, 4));
  for (int i = 0; i < k; ++i) {
    Mask m = static_cast<Mask>(uniform_int(rng, 0, (1L << n) - 1));
    if (parity && mask_parity(m) != *parity)
      m ^= 1;
    terms.push_back({m, Rational(uniform_int(rng, -9, 9), uniform_int(rng, 1, 5))});
  }
  return ExactGraded::from_terms(n, terms);
}

} // namespace

TEST_CASE("generator products anticommute") {
  CHECK(gc_mul(th(1), th(2)) == GradedCoefficient::monomial(6, 0b11, 1.0));
  CHECK(gc_mul(th(2), th(1)) == GradedCoefficient::monomial(6, 0b11, -1.0));
  CHECK(gc_mul(th(1), th(1)).is_zero());
}

TEST_CASE("product of even elements") {
  const GradedCoefficient t12 = th(1) * th(2);
  CHECK((c(2) + t12) * (c(3) + t12) == c(6) + Complex(5) * t12);
}

TEST_CASE("body extraction") {
  CHECK(gc_body(c(5) + Complex(2) * th(1) * th(3)) == Complex(5));
  CHECK(gc_body(th(2)) == Complex(0));
  CHECK(gc_body((c(1) + th(1)) * (c(1) - th(1))) == Complex(1));
}

TEST_CASE("rendering") {
  CHECK(to_string(c(2) + Complex(3) * th(1) * th(2)) == "2 + 3*t1t2");
  CHECK(to_string(GradedCoefficient(6)) == "0");
}

TEST_CASE("generator bounds and mismatched algebras are rejected") {
  CHECK_THROWS_AS(GradedCoefficient::generator(3, 4), ConfigError);
  CHECK_THROWS_AS(GradedCoefficient::generator(3, 0), ConfigError);
  CHECK_THROWS_AS(th(1, 3) * th(1, 4), ConfigError);
  CHECK_THROWS_AS(GradedCoefficient(kMaxGenerators + 1), ConfigError);
  CHECK_THROWS_AS(th(1, 4).widened(3), ConfigError);
}

TEST_CASE("parity") {
  CHECK(th(1).parity() == 1);
  CHECK((th(1) * th(2)).parity() == 0);
  CHECK_FALSE((c(1) + th(1)).is_homogeneous());
  CHECK((c(1) + th(1)).part(1) == th(1));
}

TEST_CASE("supercommutativity, associativity, nilpotency (exact)") {
  Rng rng(7);
  const int n = 5;
  for (int k = 0; k < 200; ++k) {
    const int pa = static_cast<int>(uniform_int(rng, 0, 1));
    const int pb = static_cast<int>(uniform_int(rng, 0, 1));
    const ExactGraded a = random_sparse(rng, n, pa);
    const ExactGraded b = random_sparse(rng, n, pb);
    const ExactGraded x = random_sparse(rng, n, std::nullopt);
    CHECK(a * b == Rational((pa & pb) ? -1 : 1) * (b * a));
    CHECK((a * b) * x == a * (b * x));
    ExactGraded nil = x - ExactGraded(n, x.body());
    CHECK(nil.pow(n + 1).is_zero());
  }
}
