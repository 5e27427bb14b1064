#pragma once

// Floating-point expansion arithmetic: a value is held as a sum of
// non-overlapping doubles ordered by increasing magnitude, so sums and
// products of doubles are represented without rounding. Only the slow
// paths of the predicates go through here.

#include <cmath>
#include <span>
#include <vector>

namespace hullwrap::detail {

struct TwoTerm {
  double hi;
  double lo;
};

inline TwoTerm two_sum(double a, double b) {
  const double x = a + b;
  const double bv = x - a;
  const double av = x - bv;
  return {x, (a - av) + (b - bv)};
}

inline TwoTerm two_diff(double a, double b) {
  const double x = a - b;
  const double bv = a - x;
  const double av = x + bv;
  return {x, (a - av) + (bv - b)};
}

inline TwoTerm two_product(double a, double b) {
  const double x = a * b;
  return {x, std::fma(a, b, -x)};
}

class Expansion {
 public:
  Expansion() = default;
  explicit Expansion(double v) {
    if (v != 0.0) terms_.push_back(v);
  }
  static Expansion from_two(TwoTerm t) {
    Expansion e;
    if (t.lo != 0.0) e.terms_.push_back(t.lo);
    if (t.hi != 0.0) e.terms_.push_back(t.hi);
    return e;
  }

  std::span<const double> terms() const { return terms_; }

  // Adds one double (grow-expansion with zero elimination).
  void grow(double b) {
    std::vector<double> out;
    out.reserve(terms_.size() + 1);
    double q = b;
    for (double e : terms_) {
      const TwoTerm s = two_sum(q, e);
      if (s.lo != 0.0) out.push_back(s.lo);
      q = s.hi;
    }
    if (q != 0.0) out.push_back(q);
    terms_ = std::move(out);
  }

  Expansion operator+(const Expansion& other) const {
    Expansion r = *this;
    for (double t : other.terms_) r.grow(t);
    return r;
  }

  Expansion operator-() const {
    Expansion r = *this;
    for (double& t : r.terms_) t = -t;
    return r;
  }

  Expansion operator-(const Expansion& other) const { return *this + (-other); }

  Expansion scale(double b) const {
    Expansion r;
    if (terms_.empty() || b == 0.0) return r;
    TwoTerm p = two_product(terms_[0], b);
    if (p.lo != 0.0) r.terms_.push_back(p.lo);
    double q = p.hi;
    for (std::size_t i = 1; i < terms_.size(); ++i) {
      const TwoTerm t = two_product(terms_[i], b);
      const TwoTerm s = two_sum(q, t.lo);
      if (s.lo != 0.0) r.terms_.push_back(s.lo);
      const TwoTerm u = two_sum(t.hi, s.hi);
      if (u.lo != 0.0) r.terms_.push_back(u.lo);
      q = u.hi;
    }
    if (q != 0.0) r.terms_.push_back(q);
    return r;
  }

  Expansion operator*(const Expansion& other) const {
    Expansion r;
    for (double t : other.terms_) r = r + scale(t);
    return r;
  }

  int sign() const {
    if (terms_.empty()) return 0;
    return terms_.back() > 0.0 ? 1 : -1;
  }

  double estimate() const {
    double s = 0.0;
    for (double t : terms_) s += t;
    return s;
  }

 private:
  std::vector<double> terms_;
};

inline Expansion exact_diff(double a, double b) { return Expansion::from_two(two_diff(a, b)); }

// Sum of doubles accumulated exactly, then collapsed to a double.
inline double exact_sum(std::span<const double> values) {
  Expansion e;
  for (double v : values) e.grow(v);
  return e.estimate();
}

}  // namespace hullwrap::detail
