#pragma once

// Chord diagrams on Wilson-loop circles: the 4T relation, the GL(n) ideal,
// realizations by loops, evaluation and the degree-0 chord bracket.

#include "stringtop/holonomy.hpp"
#include "stringtop/strings.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace stringtop {

/// Representation label of a circle. "std" is the standard representation
/// of gl(n); "twist" is X -> X + tr(X) 1, a non-standard n-dimensional
/// representation (group element g -> det(g) g).
enum class RepKind { Standard, Twisted };

std::string to_string(RepKind r);
RepKind rep_from_string(const std::string &s);

struct ChordCircle {
  RepKind rep = RepKind::Standard;
  std::vector<int> endpoints; // cyclic sequence of endpoint labels
  int dim = 0;                // representation dimension; 0 = any
};

class ChordDiagram {
public:
  ChordDiagram() = default;
  /// Every endpoint must belong to exactly one arc unless `allow_open`
  /// (open endpoints carry fixed basis indices during evaluation).
  ChordDiagram(std::vector<ChordCircle> circles,
               std::vector<std::pair<int, int>> arcs, bool allow_open = false);

  const std::vector<ChordCircle> &circles() const { return circles_; }
  const std::vector<std::pair<int, int>> &arcs() const { return arcs_; }
  /// (circle, position) of an endpoint label.
  std::pair<int, int> locate(int label) const;
  int partner(int label) const;
  int max_label() const;

  /// Each cyclic sequence rotated to its lexicographically least form and
  /// arcs sorted.
  ChordDiagram canonical() const;
  bool operator==(const ChordDiagram &o) const;
  bool is_closed() const { return closed_; }

private:
  std::vector<ChordCircle> circles_;
  std::vector<std::pair<int, int>> arcs_;
  bool closed_ = true;
};

struct DiagramTerm {
  long coeff = 0;
  ChordDiagram diagram;
};

/// New chord from a fixed endpoint inserted at `position` of circle
/// `circle` to a moving endpoint placed next to the endpoints of `arc`.
struct FourTSite {
  int arc = 0;
  int circle = 0;
  int position = 0;
};

/// D(P-) - D(P+) + D(Q-) - D(Q+) where the moving endpoint sits just before
/// or after P = arc.first, Q = arc.second.
std::vector<DiagramTerm> four_t_combination(const ChordDiagram &d,
                                            const FourTSite &site);

/// D - (D with the arc smoothed): two circles merge, or a self-chord splits
/// its circle in two.
std::vector<DiagramTerm> gln_ideal_element(const ChordDiagram &d, int arc);

/// One step of a realized circle: transport along a loop, or an insertion
/// of the Lie basis element attached to an endpoint.
struct CircleEvent {
  enum class Kind { Transport, Insert };
  Kind kind = Kind::Transport;
  int loop = 0;
  Rational from = 0, to = 0;
  int label = -1;
};

/// Geometric realization: a list of loops and, per circle, an ordered
/// closed route through them with insertions.
struct DiagramRealization {
  std::vector<PLLoop> loops;
  std::vector<std::vector<CircleEvent>> circles;

  struct Placement {
    Rational param;
    int tie = 0; // orders endpoints sharing a parameter
  };
  /// Circle i runs once around loops[i]; endpoints placed by parameter.
  static DiagramRealization from_loops(const ChordDiagram &d,
                                       std::vector<PLLoop> loops,
                                       const std::map<int, Placement> &at);

  /// Loop index when circle i runs exactly once around one loop from 0 to 1.
  std::optional<int> carrier(int circle) const;
  /// Cover point of an insertion (exact), and whether all arcs of d join
  /// coincident points.
  RVec insertion_point(int circle, int label) const;
};

/// Checks route continuity and that insertion order matches the diagram.
void validate_realization(const ChordDiagram &d, const DiagramRealization &r);

/// Diagram read off the insertion order of a realization.
ChordDiagram diagram_of(const DiagramRealization &r,
                        const std::vector<ChordCircle> &reps,
                        const std::vector<std::pair<int, int>> &arcs,
                        bool allow_open = false);

GradedCoefficient evaluate_diagram(const ChordDiagram &d,
                                   const DiagramRealization &r,
                                   const FlatConnection &a,
                                   const TransportPlan &plan = {});

/// Evaluation with unpaired endpoint labels held at given basis indices.
Complex evaluate_with_fixed(const ChordDiagram &d, const DiagramRealization &r,
                            const FlatConnection &a,
                            const std::map<int, int> &fixed,
                            const TransportPlan &plan = {});

struct RealizedDiagram {
  long coeff = 1;
  ChordDiagram diagram;
  DiagramRealization realization;
};

/// Realized 4T combination: the fixed endpoint is placed on `site.circle`
/// at parameter `slot`, the moving one next to P or Q.
std::vector<RealizedDiagram> realize_four_t(const ChordDiagram &d,
                                            const DiagramRealization &r,
                                            int arc, int circle,
                                            const Rational &slot);

/// Realized smoothing of `arc`; its endpoints must sit at the same point.
/// The relation only holds for standard circles; `any_rep` skips that check
/// so the failure for other representations can be exhibited.
RealizedDiagram smooth_arc(const ChordDiagram &d, const DiagramRealization &r,
                           int arc, bool any_rep = false);

/// Smooths every arc: the image in the quotient by the GL(n) ideal.
std::vector<RealizedDiagram> gln_quotient(const RealizedDiagram &x);

Complex evaluate_combination(const std::vector<RealizedDiagram> &terms,
                             const FlatConnection &a,
                             const TransportPlan &plan = {});

/// Degree-0 chord bracket: a new arc at each transversal crossing of a
/// circle of a with a circle of abar, weighted by the crossing sign.
std::vector<RealizedDiagram>
chord_bracket_degree0(const std::vector<RealizedDiagram> &a,
                      const std::vector<RealizedDiagram> &abar);

/// Field-side bracket of the evaluations, computed with open indices at each
/// crossing and contracted with kappa (includes (-1)^{d+1}).
Complex evaluation_bracket(const std::vector<RealizedDiagram> &a,
                           const std::vector<RealizedDiagram> &abar,
                           const FlatConnection &conn,
                           const TransportPlan &plan = {});

} // namespace stringtop
