#pragma once

// Every (-1) factor used by the string and field brackets, named once.
// Arguments are degrees of string cycles (deg) and the space dimension d.

namespace stringtop {

constexpr int minus_one_pow(int k) { return (k % 2 == 0) ? 1 : -1; }

/// Prefactor (-1)^{deg_b (d + deg_a)} of the string bracket {a; b}.
constexpr int string_bracket_prefactor(int deg_a, int deg_b, int d) {
  return minus_one_pow(deg_b * (d + deg_a));
}

/// Sign (-1)^{deg_b (d + deg_a)} relating {<a,h>; <b,h>} to the bracket of
/// the cycles; the same exponent as the string bracket prefactor.
constexpr int homomorphism_sign(int deg_a, int deg_b, int d) {
  return minus_one_pow(deg_b * (d + deg_a));
}

/// (-1)^{d+1} carried by the localized Wilson-loop bracket.
constexpr int wilson_bracket_sign(int d) { return minus_one_pow(d + 1); }

/// Global sign between the field-side bracket and the Wilson loop of the
/// string bracket. Fixed by the commuting-torus experiment: equal to the
/// intersection-current sign (-1)^{d+1}.
constexpr int intersection_current_sign(int d) { return minus_one_pow(d + 1); }

/// Graded antisymmetry exponent sign (-1)^{(deg_a + d)(deg_b + d)}.
constexpr int antisymmetry_sign(int deg_a, int deg_b, int d) {
  return minus_one_pow((deg_a + d) * (deg_b + d));
}

/// (-1)^{eta(abc)} with eta(abc) = (|a| + d)(|c| + d), weighting {{a;b};c}
/// in the cyclic Jacobi sum.
constexpr int jacobi_sign(int deg_a, int deg_c, int d) {
  return minus_one_pow((deg_a + d) * (deg_c + d));
}

} // namespace stringtop
