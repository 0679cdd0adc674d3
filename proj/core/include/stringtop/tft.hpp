#pragma once

// Finite-dimensional graded bracket engine and the field-theory side of the
// string bracket: the localized Wilson-loop bracket, the main-theorem
// comparison and the fundamental identity.

#include "stringtop/holonomy.hpp"
#include "stringtop/strings.hpp"

#include <map>
#include <string>
#include <vector>

namespace stringtop {

/// Variables z_i of fixed parity with a constant pairing
/// omega^{ij} = {z_i; z_j}. The bracket has parity d mod 2.
class GradedPhaseModel {
public:
  struct Variable {
    std::string name;
    int parity = 0;
  };

  GradedPhaseModel(std::vector<Variable> vars,
                   std::vector<std::vector<Rational>> omega, int d,
                   int coefficient_generators = 0);

  /// phi (even), phi^dagger (odd), {phi; phi^dagger} = 1, d = 1.
  static GradedPhaseModel odd_darboux(int coefficient_generators = 0);
  /// Fields phi, c with antifields; parities (0,1 | 1,0), d = 1.
  static GradedPhaseModel odd_two_fields(int coefficient_generators = 0);
  /// q, p even, {q; p} = 1, d = 0.
  static GradedPhaseModel even_canonical(int coefficient_generators = 0);
  /// q, p even and ghosts c, b odd with {c; b} = 1, d = 0.
  static GradedPhaseModel even_with_ghosts(int coefficient_generators = 0);

  int size() const { return static_cast<int>(vars_.size()); }
  int d() const { return d_; }
  int bracket_parity() const { return d_ & 1; }
  int coefficient_generators() const { return gens_; }
  const Variable &variable(int i) const { return vars_.at(i); }
  int index(const std::string &name) const;
  const Rational &omega(int i, int j) const { return omega_[i][j]; }
  const std::vector<int> &parities() const { return parities_; }

private:
  std::vector<Variable> vars_;
  std::vector<std::vector<Rational>> omega_;
  std::vector<int> parities_;
  int d_;
  int gens_;
};

/// Polynomial in the model variables with exact graded coefficients,
/// written coefficient-first in a fixed variable order; odd variables
/// square to zero.
class GradedPolynomial {
public:
  using Monomial = std::vector<int>; // sorted variable indices

  explicit GradedPolynomial(const GradedPhaseModel &model);

  static GradedPolynomial constant(const GradedPhaseModel &model,
                                   const ExactGraded &c);
  static GradedPolynomial variable(const GradedPhaseModel &model, int i);
  /// c * z_{vars[0]} z_{vars[1]} ... in the given (unsorted) order.
  static GradedPolynomial monomial(const GradedPhaseModel &model,
                                   const ExactGraded &c,
                                   const std::vector<int> &vars);

  const std::map<Monomial, ExactGraded> &terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int generators() const { return gens_; }
  /// Parity of a homogeneous polynomial; nullopt when mixed. Zero is even.
  std::optional<int> parity() const;
  double norm() const;

  /// Left derivative d/dz_j acting from the left.
  GradedPolynomial left_derivative(int j) const;
  /// Right derivative acting from the right.
  GradedPolynomial right_derivative(int i) const;

  GradedPolynomial operator-() const;
  friend GradedPolynomial operator+(const GradedPolynomial &a,
                                    const GradedPolynomial &b);
  friend GradedPolynomial operator-(const GradedPolynomial &a,
                                    const GradedPolynomial &b);
  friend GradedPolynomial operator*(const GradedPolynomial &a,
                                    const GradedPolynomial &b);
  friend GradedPolynomial operator*(const Rational &c,
                                    const GradedPolynomial &a);
  bool operator==(const GradedPolynomial &o) const {
    return terms_ == o.terms_;
  }

  std::string to_string(const GradedPhaseModel &model) const;

private:
  void add_term(Monomial m, ExactGraded c);
  std::vector<int> parities_;
  int gens_;
  std::map<Monomial, ExactGraded> terms_;
};

/// {P; Q} = sum_ij (P d<-_i) omega^{ij} (d->_j Q).
GradedPolynomial graded_bracket(const GradedPolynomial &p,
                                const GradedPolynomial &q,
                                const GradedPhaseModel &model);

struct DeltaResult {
  GradedPolynomial delta;        // {S; P}
  GradedPolynomial delta_square; // {S; {S; P}}
};

/// Requires {S;S} = 0 (throws MasterEquationError otherwise).
DeltaResult delta_and_nilpotency(const GradedPolynomial &s,
                                 const GradedPolynomial &p,
                                 const GradedPhaseModel &model);

/// Brute-force search over integer combinations (coefficients in
/// [-range, range]) of the candidate monomials for nonzero S of parity
/// d + 1 with {S;S} = 0 and a nonzero differential.
std::vector<GradedPolynomial>
master_equation_search(const GradedPhaseModel &model,
                       const std::vector<std::vector<int>> &candidates,
                       int range = 1);

struct WilsonBracket {
  GradedCoefficient kappa_path; // Casimir contraction of two open traces
  GradedCoefficient fused_path; // single fused trace per intersection
  int intersections = 0;
};

/// Bracket of the degree-0 Wilson loops of two transversal loops in d = 2,
/// localized on their intersections, computed on both routes.
WilsonBracket wilson_field_bracket(const PLLoop &gamma, const PLLoop &gammabar,
                                   const FlatConnection &a,
                                   const TransportPlan &plan = {});

struct MainTheoremResult {
  GradedCoefficient lhs, rhs;
  double residual = 0; // |lhs - rhs|
  double scale = 1;    // max(1, |lhs|, |rhs|) for relative tolerances
};

/// Compares {<a,h>;<abar,h>} with <{a;abar},h> for degree-0 cycles on a
/// surface.
MainTheoremResult main_theorem_check(const StringCycle &a,
                                     const StringCycle &abar,
                                     const FlatConnection &conn,
                                     const TransportPlan &plan = {});

struct FundamentalResult {
  GradedCoefficient geometric;     // finite-difference derivative, eps=1e-3
  GradedCoefficient algebraic;     // insertion of the obstruction
  GradedCoefficient extrapolated;  // Richardson over {1e-2, 5e-3, 2.5e-3}
  double residual = 0;             // |geometric + algebraic| at eps = 1e-3
  double residual_half = 0;        // same at eps = 5e-4
  double coarse_residual = 0;      // same at eps = 1e-2
  double order = 0;                // log2 of the eps = 1e-2 / 5e-3 ratio
  double extrapolated_residual = 0;
  double scale = 1;
};

/// Checks that the variation of the Wilson loop along v is cancelled by the
/// insertion of d_A C + C^2 contracted with v. `disp` are the per-vertex
/// displacements defining v.
FundamentalResult fundamental_identity_check(const FlatConnection &a,
                                             const FieldConfig &c,
                                             const PLLoop &loop,
                                             const std::vector<RVec> &disp,
                                             const TransportPlan &plan = {});

} // namespace stringtop
