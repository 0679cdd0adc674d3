#pragma once

// Path-ordered transport, Chen-series generalized transporters and Wilson
// loops, two-patch gluing and insertion derivatives.

#include "stringtop/geometry.hpp"

#include <functional>
#include <vector>

namespace stringtop {

/// Discretization policy. Each linear piece of the loop between the
/// requested times is integrated with `steps` midpoint steps of the
/// second-order exponential I + hX + h^2 X^2 / 2, then refined by step
/// doubling with Richardson extrapolation until two successive tableau
/// diagonals agree to `tol` (relative), or `max_steps` is exceeded.
struct TransportPlan {
  int steps = 64;
  double tol = 1e-12;
  int max_steps = 1 << 14;
  bool richardson = true;

  void validate() const;
};

/// Generator X(segment, t) of dU/dt = U X on one linear piece.
using Generator = std::function<SuperMatrix(int segment, double t)>;

/// Ordered product over [s,t] of the per-step exponentials of X.
SuperMatrix ordered_exponential(const Generator &x, const PLLoop &loop,
                                double s, double t, const TransportPlan &plan,
                                int n, int generators);

/// First-order variation of the ordered exponential of X + lambda Y at
/// lambda = 0: returns (U, W) with W = sum over one insertion of Y.
std::pair<SuperMatrix, SuperMatrix>
ordered_exponential_pair(const Generator &x, const Generator &y,
                         const PLLoop &loop, double s, double t,
                         const TransportPlan &plan, int n, int generators);

/// Plain transport hol_A from s to t (earlier times on the left).
SuperMatrix transport(const FlatConnection &a, const PLLoop &loop, double s,
                      double t, const TransportPlan &plan = {},
                      int generators = 0);

/// Component <v_1 ^ ... ^ v_m, hol_A(C)|_s^t> of the generalized transporter.
SuperMatrix gen_transport(const FlatConnection &a, const FieldConfig &c,
                          const PLLoop &loop, double s, double t,
                          const std::vector<VariationField> &variations,
                          const TransportPlan &plan = {});

/// Trace of gen_transport over the whole loop.
GradedCoefficient wilson(const FlatConnection &a, const FieldConfig &c,
                         const PLLoop &loop,
                         const std::vector<VariationField> &variations = {},
                         const TransportPlan &plan = {});

/// Integrated single insertion of the field `eta` (any parity) into the
/// generalized transporter of C: sum over s of hol|_0^s eta hol|_s^1, as
/// the v_1..v_m component. Its trace is the derivative of the Wilson loop
/// in the direction eta when eta has parity 1.
SuperMatrix insertion_integral(const FlatConnection &a, const FieldConfig &c,
                               const FieldConfig &eta, const PLLoop &loop,
                               const std::vector<VariationField> &variations,
                               const TransportPlan &plan = {});

GradedCoefficient
insertion_derivative(const FlatConnection &a, const FieldConfig &c,
                     const PLLoop &loop, const FieldConfig &eta,
                     const std::vector<VariationField> &variations,
                     const TransportPlan &plan = {});

/// Patch schedule for a loop in two charts: the loop starts in
/// `start_patch` and switches patch at each crossing time.
struct PatchSchedule {
  int start_patch = 0;
  std::vector<double> crossings; // increasing, in (0,1)
};

/// tr[hol_1 t_12 hol_2 t_21 ...] with each holonomy computed in its own
/// chart. Crossing times must lie in the overlap of the two boxes and the
/// fields must agree there up to the transition function.
GradedCoefficient glued_wilson(const TwoPatch &patches,
                               const FieldConfig &c1, const FieldConfig &c2,
                               const PLLoop &loop,
                               const PatchSchedule &schedule,
                               const TransportPlan &plan = {});

/// Closed form for constant A: product over segments of exp(A(gamma') / K).
Matrix constant_connection_holonomy(const FlatConnection &a,
                                    const PLLoop &loop);

/// Raw (non-extrapolated) transport error at `steps` and `2 steps` against
/// the closed form; returns log2 of their ratio.
double measured_transport_order(const FlatConnection &a, const PLLoop &loop,
                                int steps);

} // namespace stringtop
