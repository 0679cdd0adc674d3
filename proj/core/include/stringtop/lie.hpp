#pragma once

// gl(n,C) in its standard representation, the invariant form kappa, and
// matrices over the Grassmann algebra.

#include "stringtop/graded.hpp"

#include <Eigen/Dense>

#include <utility>
#include <vector>

namespace stringtop {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// n x n matrix with entries in E_N, stored as a sum over Grassmann
/// monomials of complex blocks: M = sum_I theta_I M_I.
class SuperMatrix {
public:
  using Block = std::pair<Mask, Matrix>;

  SuperMatrix() = default;
  SuperMatrix(int n, int generators);

  static SuperMatrix identity(int n, int generators);
  static SuperMatrix constant(const Matrix &m, int generators);
  static SuperMatrix monomial(Mask mask, const Matrix &m, int generators);
  static SuperMatrix from_entries(
      const std::vector<std::vector<GradedCoefficient>> &rows, int generators);

  int n() const noexcept { return n_; }
  int generators() const noexcept { return gens_; }
  const std::vector<Block> &blocks() const noexcept { return blocks_; }
  bool is_zero() const noexcept { return blocks_.empty(); }

  /// Coefficient matrix of theta_mask (zero if absent).
  Matrix block(Mask mask) const;
  Matrix body() const { return block(0); }
  GradedCoefficient entry(int row, int col) const;
  GradedCoefficient trace() const;

  /// Sum of Frobenius norms of all blocks.
  double norm() const;
  std::optional<int> parity() const;

  SuperMatrix widened(int generators) const;
  /// Inverse via body inverse and a terminating Neumann series; throws
  /// ConfigError if the body is singular.
  SuperMatrix inverse() const;
  /// g M g^-1 for a constant invertible g.
  SuperMatrix conjugated(const Matrix &g) const;
  /// theta_I M_I -> theta_(I << shift) M_I, embedding into more generators.
  SuperMatrix shifted(int shift, int generators) const;
  /// Keeps only blocks whose mask has all bits of `low` set within the low
  /// `width` bits; used to read off coefficients of auxiliary generators.
  SuperMatrix coefficient_of(Mask low, int width, int generators) const;

  SuperMatrix operator-() const;
  SuperMatrix &operator+=(const SuperMatrix &o);
  SuperMatrix &operator-=(const SuperMatrix &o);
  SuperMatrix &operator*=(Complex s);

  friend SuperMatrix operator+(SuperMatrix a, const SuperMatrix &b) {
    return a += b;
  }
  friend SuperMatrix operator-(SuperMatrix a, const SuperMatrix &b) {
    return a -= b;
  }
  friend SuperMatrix operator*(SuperMatrix a, Complex s) { return a *= s; }
  friend SuperMatrix operator*(Complex s, SuperMatrix a) { return a *= s; }
  friend SuperMatrix operator*(const SuperMatrix &a, const SuperMatrix &b);
  /// Entrywise left multiplication by a graded scalar: (c M)_ij = c M_ij.
  friend SuperMatrix operator*(const GradedCoefficient &c,
                               const SuperMatrix &m);

private:
  void check_same(const SuperMatrix &o) const;
  void add_block(Mask mask, const Matrix &m, Complex scale = 1.0);

  int n_ = 0;
  int gens_ = 0;
  std::vector<Block> blocks_; // sorted by mask, never an empty block
};

/// A matrix representation of gl(n): rho(E_ij) for each basis element.
struct Representation {
  int dim = 0;
  bool standard = false;
  std::vector<Matrix> images; // indexed like LieBasis
  const Matrix &operator()(int a) const { return images[a]; }
};

/// The E_ij basis of gl(n), a = i*n + j (0-based), with
/// kappa((i,j),(k,l)) = delta_il delta_jk.
class LieBasis {
public:
  explicit LieBasis(int n);

  int n() const noexcept { return n_; }
  int size() const noexcept { return n_ * n_; }
  int index(int i, int j) const { return i * n_ + j; }
  std::pair<int, int> pair(int a) const { return {a / n_, a % n_}; }

  /// kappa(a,b) and kappa^{ab}; both are the swap pairing, so the inverse
  /// is written down rather than computed.
  double kappa(int a, int b) const;
  double kappa_inv(int a, int b) const;
  /// The unique b with kappa^{ab} != 0.
  int dual(int a) const {
    auto [i, j] = pair(a);
    return index(j, i);
  }
  Matrix kappa_matrix() const;
  Matrix kappa_inv_matrix() const;

  Matrix element(int a) const;

  Representation standard() const;
  /// rho*(X) = -X^T; not the standard representation.
  Representation dual_rep() const;
  /// rho(X) = X + tr(X) 1; integrates to g -> det(g) g.
  Representation twisted_rep() const;

private:
  int n_;
};

/// sum_ab kappa^{ab} rho(T_a) (x) rho(T_b) as an n^2 x n^2 operator acting
/// on v (x) w with index r*n + s.
Matrix casimir_operator(const LieBasis &basis);
/// The flip v (x) w -> w (x) v on C^n (x) C^n.
Matrix swap_operator(int n);

/// Applies the Casimir sum to v (x) w term by term; returns the tensor as an
/// n x n matrix out(r,s).
Matrix swap_via_casimir(const Vector &v, const Vector &w,
                        const LieBasis &basis);

/// sum_ab tr[A1 T_a A2] kappa^{ab} tr[B1 T_b B2] by explicit summation.
GradedCoefficient fuse_traces(const SuperMatrix &a1, const SuperMatrix &a2,
                              const SuperMatrix &b1, const SuperMatrix &b2,
                              const LieBasis &basis);
/// Same contraction for an arbitrary representation.
GradedCoefficient fuse_traces(const SuperMatrix &a1, const SuperMatrix &a2,
                              const SuperMatrix &b1, const SuperMatrix &b2,
                              const LieBasis &basis,
                              const Representation &rep);
/// tr[A1 B2 B1 A2].
GradedCoefficient fused_trace(const SuperMatrix &a1, const SuperMatrix &a2,
                              const SuperMatrix &b1, const SuperMatrix &b2);

/// kappa(X, Y) = tr(XY) on gl(n).
Complex kappa_form(const Matrix &x, const Matrix &y);

} // namespace stringtop
