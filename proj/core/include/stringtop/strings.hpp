#pragma once

// Transversal intersections of plane/torus loops, the concatenation map, the
// degree-0 string bracket, the torus Goldman oracle and Jacobi bookkeeping.

#include "stringtop/geometry.hpp"

#include <map>
#include <vector>

namespace stringtop {

/// A transversal crossing of gamma (parameter s) with gammabar (parameter
/// sbar). `point` is on gamma's lift; gammabar's lift translated by `shift`
/// passes through it. sign = sign det[gamma', gammabar'].
struct IntersectionPoint {
  Rational s, sbar;
  int segment = 0, other_segment = 0;
  Rational local, other_local; // fractions within the two segments
  RVec point;
  IVec shift;
  int sign = 0;
};

/// All crossings between two loops in d = 2, exact. Throws
/// TransversalityError on touching, vertex-on-segment or collinear overlap.
std::vector<IntersectionPoint> intersections(const PLLoop &gamma,
                                             const PLLoop &gammabar);

/// Loop running once around gamma from p, then once around gammabar from p;
/// marked at p.
PLLoop concatenate(const PLLoop &gamma, const PLLoop &gammabar,
                   const IntersectionPoint &p);

/// Formal integer combination of strings (loops in rotation normal form).
class StringCycle {
public:
  StringCycle() = default;
  static StringCycle single(const PLLoop &loop, long coeff = 1);

  void add(const PLLoop &loop, long coeff);
  const std::map<PLLoop, long> &terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const { return 0; }

  /// Free-homotopy reduction on the torus: coefficient per lattice class.
  std::map<IVec, long> reduced() const;

  StringCycle operator-() const;
  friend StringCycle operator+(const StringCycle &a, const StringCycle &b);
  friend StringCycle operator*(long c, const StringCycle &a);

private:
  std::map<PLLoop, long> terms_;
};

/// Class-level cycle sum; zero coefficients removed.
std::map<IVec, long> add_classes(const std::map<IVec, long> &a,
                                 const std::map<IVec, long> &b, long scale = 1);

StringCycle string_bracket(const StringCycle &a, const StringCycle &abar);

struct GoldmanTerm {
  long coefficient = 0;
  IVec cls;
};

/// Independent torus oracle: intersects straight lifts of two classes at
/// generic base points and sums the signs.
GoldmanTerm goldman_torus(const IVec &c1, const IVec &c2);

/// Straight lift of a class, subdivided into `pieces` segments, starting at
/// `base`.
PLLoop straight_loop(const IVec &cls, const RVec &base, int pieces = 3);

struct JacobiResidual {
  StringCycle raw;
  std::map<IVec, long> reduced; // empty unless all loops are torus loops
};

/// Signed cyclic sum of {{a;b};c}; reports the chain-level and the
/// class-reduced residual.
JacobiResidual jacobi_residual(const StringCycle &a, const StringCycle &b,
                               const StringCycle &c);

} // namespace stringtop
