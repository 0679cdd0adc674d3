#pragma once

// Charts and flat tori, piecewise-linear loops, loop-space tangent vectors,
// field configurations and flat connections.

#include "stringtop/graded.hpp"
#include "stringtop/lie.hpp"

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace stringtop {

using RVec = std::vector<Rational>;
using IVec = std::vector<long>;
using DVec = Eigen::VectorXd;

struct Space {
  enum class Kind { Chart, Torus };
  Kind kind = Kind::Chart;
  int d = 2;

  static Space chart(int d);
  static Space torus(int d);
  bool is_torus() const { return kind == Kind::Torus; }
  bool operator==(const Space &) const = default;
};

std::string to_string(Space::Kind k);
DVec to_double(const RVec &v);
/// Exact rational from a finite double (every double is dyadic).
Rational exact_rational(double x);

/// Piecewise-linear marked loop, uniformly parametrized: segment i covers
/// t in [i/K, (i+1)/K], running from vertex i to vertex i+1, where vertex K
/// means vertex 0 + closure.
class PLLoop {
public:
  PLLoop(Space space, std::vector<RVec> vertices, IVec closure);

  const Space &space() const noexcept { return space_; }
  int dim() const noexcept { return space_.d; }
  int size() const noexcept { return static_cast<int>(vertices_.size()); }
  const std::vector<RVec> &vertices() const noexcept { return vertices_; }
  const IVec &closure() const noexcept { return closure_; }

  /// Vertex i for any integer i, unrolled through the closure vector.
  RVec vertex(long i) const;
  /// Segment i as (start, end) in cover coordinates, i in [0, K).
  std::pair<RVec, RVec> segment(int i) const;
  /// Exact point at parameter t (unrolled, so t = 1 gives v0 + closure).
  RVec point_exact(const Rational &t) const;
  DVec point(double t) const;
  /// Velocity dgamma/dt on segment i (constant per segment).
  DVec velocity(int segment) const;
  RVec velocity_exact(int segment) const;

  /// Loop with the marked point moved to vertex k.
  PLLoop rotated(int k) const;
  /// Canonical representative of the string (loop mod rotation): on the
  /// torus the first vertex is also translated into [0,1)^d.
  PLLoop normal_form() const;
  /// Inserts a vertex at local fraction f in (0,1) of segment i.
  PLLoop subdivided(int segment, const Rational &f) const;
  /// Translate every vertex by a lattice vector (torus) or any vector.
  PLLoop translated(const RVec &shift) const;
  /// Vertices displaced by eps * disp[i].
  PLLoop displaced(const std::vector<RVec> &disp, const Rational &eps) const;

  bool operator==(const PLLoop &o) const;
  bool operator<(const PLLoop &o) const;

private:
  Space space_;
  std::vector<RVec> vertices_;
  IVec closure_;
};

/// Lattice closure vector of a torus loop.
IVec loop_class_torus(const PLLoop &loop);

/// Tangent vector to loop space along a PL loop: linear in t on each
/// segment, given by its values at the segment ends.
class VariationField {
public:
  VariationField(std::vector<DVec> start, std::vector<DVec> end);

  /// Continuous field interpolating per-vertex displacements.
  static VariationField from_vertices(const PLLoop &loop,
                                      const std::vector<RVec> &disp);
  /// v = dgamma/dt.
  static VariationField tangent(const PLLoop &loop);

  int segments() const { return static_cast<int>(start_.size()); }
  DVec at(int segment, double local) const;
  /// Per-vertex displacements, if built from them.
  const std::vector<RVec> &vertex_displacements() const { return disp_; }

private:
  std::vector<DVec> start_, end_;
  std::vector<RVec> disp_;
};

/// Complex rational number.
struct CRational {
  Rational re = 0, im = 0;
  CRational() = default;
  CRational(Rational r, Rational i = 0) : re(std::move(r)), im(std::move(i)) {}
  static CRational from(Complex z);
  Complex value() const;
  bool is_zero() const { return re == 0 && im == 0; }
  CRational operator-() const { return {-re, -im}; }
  friend CRational operator+(const CRational &a, const CRational &b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend CRational operator*(const CRational &a, const CRational &b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  bool operator==(const CRational &) const = default;
};

/// Scalar coefficient field: a polynomial in the chart coordinates, or a
/// finite Fourier sum c (2 pi i)^p exp(2 pi i k.x) on the torus.
class ScalarField {
public:
  enum class Kind { Polynomial, Fourier };
  struct Key {
    std::vector<int> k; // exponents or wave vector
    int twopi = 0;      // power of 2 pi i (Fourier only)
    auto operator<=>(const Key &) const = default;
  };

  ScalarField() = default;
  ScalarField(Kind kind, int d);

  static ScalarField constant(Kind kind, int d, const CRational &c);
  static ScalarField term(Kind kind, std::vector<int> key, const CRational &c);

  Kind kind() const { return kind_; }
  int dim() const { return d_; }
  bool is_zero() const { return terms_.empty(); }
  const std::map<Key, CRational> &terms() const { return terms_; }

  void add(const Key &key, const CRational &c);
  Complex operator()(const DVec &x) const;
  ScalarField derivative(int mu) const;

  ScalarField operator-() const;
  friend ScalarField operator+(const ScalarField &a, const ScalarField &b);
  friend ScalarField operator*(const ScalarField &a, const ScalarField &b);
  friend ScalarField operator*(const CRational &c, const ScalarField &f);
  bool operator==(const ScalarField &o) const { return terms_ == o.terms_; }

private:
  void rebuild();
  Kind kind_ = Kind::Polynomial;
  int d_ = 0;
  std::map<Key, CRational> terms_;
  struct Cached {
    std::vector<int> k;
    Complex c;
  };
  std::vector<Cached> cache_;
};

/// One component: f(x) dx^{dims} (x) theta_{eps} (x) E_{lie}.
struct FieldTerm {
  std::vector<int> dims; // strictly increasing, 0-based
  ScalarField field;
  int lie = 0; // LieBasis index
  Mask eps = 0;
  int degree() const { return static_cast<int>(dims.size()); }
};

/// A Lie-algebra and Grassmann valued differential form of fixed total
/// parity (1 for the field C, 0 for its curvature d_A C + C^2).
class FieldConfig {
public:
  FieldConfig(Space space, int n, int generators, int parity = 1);

  const Space &space() const { return space_; }
  int n() const { return n_; }
  int generators() const { return gens_; }
  int parity() const { return parity_; }
  const std::vector<FieldTerm> &terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// Adds a term after validating it; merges with an existing term with
  /// the same form, Lie and Grassmann labels.
  void add(std::vector<int> dims, ScalarField field, int lie, Mask eps);
  void add(const FieldTerm &t) { add(t.dims, t.field, t.lie, t.eps); }

  int max_degree() const;
  /// Smallest Grassmann generator count that holds every monomial.
  int required_generators() const;

  FieldConfig operator-() const;
  friend FieldConfig operator+(const FieldConfig &a, const FieldConfig &b);
  FieldConfig scaled(const CRational &c) const;
  /// g C g^-1 for a constant invertible g, re-expanded in the E_ij basis.
  FieldConfig conjugated(const Matrix &g) const;
  FieldConfig widened(int generators) const;

private:
  Space space_;
  int n_;
  int gens_;
  int parity_;
  std::vector<FieldTerm> terms_;
};

/// Flat background connection.
class FlatConnection {
public:
  enum class Kind { Zero, ConstantCommuting };

  static FlatConnection zero(int n, int d);
  /// Constant A_mu; rejects non-commuting data.
  static FlatConnection constant(std::vector<Matrix> a);

  Kind kind() const { return kind_; }
  int n() const { return n_; }
  int dim() const { return d_; }
  const std::vector<Matrix> &components() const { return a_; }
  /// A(v) = sum_mu v^mu A_mu.
  Matrix along(const DVec &v) const;
  double flatness_residual() const;
  FlatConnection conjugated(const Matrix &g) const;

private:
  Kind kind_ = Kind::Zero;
  int n_ = 1;
  int d_ = 2;
  std::vector<Matrix> a_;
};

/// Two box charts of R^d with constant connections and a constant
/// transition function t12 on the overlap (t21 = t12^-1).
struct TwoPatch {
  struct Box {
    DVec lo, hi;
    bool contains(const DVec &x, double slack = 0) const;
  };
  Box box[2];
  FlatConnection conn[2] = {FlatConnection::zero(1, 2),
                            FlatConnection::zero(1, 2)};
  Matrix t12, t21;

  /// Checks the cocycle t12 t21 = I and A_1 = t12 A_2 t12^-1.
  void validate(double tol = 1e-10) const;
};

/// d_A C + C^2 as a parity-0 field.
FieldConfig field_obstruction(const FieldConfig &c, const FlatConnection &a);
/// Exterior derivative only (A = 0, no square).
FieldConfig exterior_derivative(const FieldConfig &c);
/// Wedge product of two fields, with matrix product on Lie labels.
FieldConfig wedge(const FieldConfig &a, const FieldConfig &b, int parity);
/// A as a parity-1 field with constant components.
FieldConfig connection_field(const FlatConnection &a, const Space &space,
                             int generators);

/// Contraction of every degree-k term (k = vectors.size()) with the given
/// vectors, as a super matrix.
SuperMatrix eval_field(const FieldConfig &c, const DVec &x,
                       const std::vector<DVec> &vectors);

} // namespace stringtop
