#pragma once

// Finite Grassmann algebra E_N over a scalar field: the coefficient ring for
// every "supernumber" in the workbench.

#include "stringtop/errors.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <bit>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace stringtop {

using Rational = boost::multiprecision::cpp_rational;
using Complex = std::complex<double>;

/// A sorted subset of generator indices, bit i standing for theta_{i+1}.
using Mask = std::uint64_t;

inline constexpr int kMaxGenerators = 62;

/// Sign of theta_a * theta_b relative to theta_{a|b} written in increasing
/// index order; 0 when the subsets overlap.
inline int reorder_sign(Mask a, Mask b) noexcept {
  if (a & b)
    return 0;
  int swaps = 0;
  for (Mask rest = b; rest; rest &= rest - 1) {
    const int j = std::countr_zero(rest);
    swaps += std::popcount(j + 1 >= 64 ? Mask{0} : (a >> (j + 1)));
  }
  return (swaps & 1) ? -1 : 1;
}

inline int mask_parity(Mask m) noexcept { return std::popcount(m) & 1; }

namespace detail {
template <class S> bool scalar_is_zero(const S &s) { return s == S(0); }
inline double scalar_abs(const Complex &s) { return std::abs(s); }
inline double scalar_abs(const Rational &s) {
  return static_cast<double>(boost::multiprecision::abs(s));
}
} // namespace detail

/// Element of the Grassmann algebra on `generators()` anticommuting
/// generators with coefficients in S. Terms are kept sorted by mask with no
/// zero coefficients.
template <class S> class BasicGraded {
public:
  struct Term {
    Mask mask;
    S value;
    bool operator==(const Term &) const = default;
  };

  BasicGraded() = default;

  explicit BasicGraded(int generators) : n_(generators) { check_n(n_); }

  BasicGraded(int generators, S body) : n_(generators) {
    check_n(n_);
    if (!detail::scalar_is_zero(body))
      terms_.push_back({0, std::move(body)});
  }

  /// theta_index, 1-based.
  static BasicGraded generator(int generators, int index) {
    if (index < 1 || index > generators)
      throw ConfigError("generator index " + std::to_string(index) +
                        " outside 1.." + std::to_string(generators));
    return monomial(generators, Mask{1} << (index - 1), S(1));
  }

  static BasicGraded monomial(int generators, Mask mask, S value) {
    BasicGraded out(generators);
    if (generators < 64 && (mask >> generators) != 0)
      throw ConfigError("monomial uses generators beyond N=" +
                        std::to_string(generators));
    if (!detail::scalar_is_zero(value))
      out.terms_.push_back({mask, std::move(value)});
    return out;
  }

  /// Builds from unsorted terms, merging duplicates.
  static BasicGraded from_terms(int generators, std::vector<Term> terms) {
    BasicGraded out(generators);
    for (const auto &t : terms)
      if (generators < 64 && (t.mask >> generators) != 0)
        throw ConfigError("term uses generators beyond N=" +
                          std::to_string(generators));
    out.terms_ = std::move(terms);
    out.normalize();
    return out;
  }

  int generators() const noexcept { return n_; }
  const std::vector<Term> &terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }

  S body() const {
    if (!terms_.empty() && terms_.front().mask == 0)
      return terms_.front().value;
    return S(0);
  }

  S coefficient(Mask mask) const {
    auto it = std::lower_bound(
        terms_.begin(), terms_.end(), mask,
        [](const Term &t, Mask m) { return t.mask < m; });
    return (it != terms_.end() && it->mask == mask) ? it->value : S(0);
  }

  /// Parity of a homogeneous element; nullopt when mixed. Zero is even.
  std::optional<int> parity() const {
    if (terms_.empty())
      return 0;
    const int p = mask_parity(terms_.front().mask);
    for (const auto &t : terms_)
      if (mask_parity(t.mask) != p)
        return std::nullopt;
    return p;
  }

  bool is_homogeneous() const { return parity().has_value(); }

  BasicGraded part(int parity) const {
    BasicGraded out(n_);
    for (const auto &t : terms_)
      if (mask_parity(t.mask) == parity)
        out.terms_.push_back(t);
    return out;
  }

  /// Same element viewed in E_M for M >= N.
  BasicGraded widened(int generators) const {
    if (generators < n_)
      throw ConfigError("cannot narrow a graded coefficient");
    BasicGraded out = *this;
    out.n_ = generators;
    return out;
  }

  double norm() const {
    double s = 0;
    for (const auto &t : terms_)
      s += detail::scalar_abs(t.value);
    return s;
  }

  BasicGraded operator-() const {
    BasicGraded out = *this;
    for (auto &t : out.terms_)
      t.value = -t.value;
    return out;
  }

  BasicGraded &operator+=(const BasicGraded &o) {
    same_n(o);
    std::vector<Term> merged;
    merged.reserve(terms_.size() + o.terms_.size());
    auto a = terms_.begin();
    auto b = o.terms_.begin();
    while (a != terms_.end() || b != o.terms_.end()) {
      if (b == o.terms_.end() || (a != terms_.end() && a->mask < b->mask)) {
        merged.push_back(*a++);
      } else if (a == terms_.end() || b->mask < a->mask) {
        merged.push_back(*b++);
      } else {
        S v = a->value + b->value;
        if (!detail::scalar_is_zero(v))
          merged.push_back({a->mask, std::move(v)});
        ++a;
        ++b;
      }
    }
    terms_ = std::move(merged);
    return *this;
  }

  BasicGraded &operator-=(const BasicGraded &o) { return *this += -o; }

  BasicGraded &operator*=(const S &s) {
    if (detail::scalar_is_zero(s)) {
      terms_.clear();
      return *this;
    }
    for (auto &t : terms_)
      t.value *= s;
    return *this;
  }

  friend BasicGraded operator+(BasicGraded a, const BasicGraded &b) {
    return a += b;
  }
  friend BasicGraded operator-(BasicGraded a, const BasicGraded &b) {
    return a -= b;
  }
  friend BasicGraded operator*(BasicGraded a, const S &s) { return a *= s; }
  friend BasicGraded operator*(const S &s, BasicGraded a) { return a *= s; }

  friend BasicGraded operator*(const BasicGraded &a, const BasicGraded &b) {
    a.same_n(b);
    std::vector<Term> out;
    out.reserve(a.terms_.size() * b.terms_.size());
    for (const auto &x : a.terms_)
      for (const auto &y : b.terms_) {
        const int sgn = reorder_sign(x.mask, y.mask);
        if (sgn == 0)
          continue;
        S v = x.value * y.value;
        if (sgn < 0)
          v = -v;
        out.push_back({x.mask | y.mask, std::move(v)});
      }
    BasicGraded r(a.n_);
    r.terms_ = std::move(out);
    r.normalize();
    return r;
  }

  bool operator==(const BasicGraded &o) const {
    return n_ == o.n_ && terms_ == o.terms_;
  }

  BasicGraded pow(unsigned k) const {
    BasicGraded r(n_, S(1));
    for (unsigned i = 0; i < k; ++i)
      r = r * *this;
    return r;
  }

private:
  static void check_n(int n) {
    if (n < 0 || n > kMaxGenerators)
      throw ConfigError("generator count " + std::to_string(n) +
                        " outside 0.." + std::to_string(kMaxGenerators));
  }

  void same_n(const BasicGraded &o) const {
    if (n_ != o.n_)
      throw ConfigError("generator count mismatch: " + std::to_string(n_) +
                        " vs " + std::to_string(o.n_));
  }

  void normalize() {
    std::sort(terms_.begin(), terms_.end(),
              [](const Term &x, const Term &y) { return x.mask < y.mask; });
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (auto &t : terms_) {
      if (!out.empty() && out.back().mask == t.mask)
        out.back().value += t.value;
      else
        out.push_back(std::move(t));
    }
    std::erase_if(out, [](const Term &t) {
      return detail::scalar_is_zero(t.value);
    });
    terms_ = std::move(out);
  }

  int n_ = 0;
  std::vector<Term> terms_;
};

using GradedCoefficient = BasicGraded<Complex>;
using ExactGraded = BasicGraded<Rational>;

inline GradedCoefficient gc_mul(const GradedCoefficient &a,
                                const GradedCoefficient &b) {
  return a * b;
}

inline Complex gc_body(const GradedCoefficient &a) { return a.body(); }

/// Human-readable form such as "2 + 3*t1t2"; used in diagnostics and the CLI.
std::string to_string(const GradedCoefficient &a);

} // namespace stringtop
