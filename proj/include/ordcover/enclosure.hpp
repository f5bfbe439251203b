#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>

#include "ordcover/errors.hpp"
#include "ordcover/rational.hpp"

namespace ordcover {

/// Certified closed interval [lo, hi] containing an exact quasimorphism value.
///
/// The double endpoints are always present and are outward-rounded. When the
/// value was produced by exact arithmetic the rational endpoints are kept as
/// well and take precedence in every comparison.
class Enclosure {
 public:
  Enclosure() = default;

  Enclosure(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!(lo <= hi)) throw argument_error("enclosure requires lo <= hi");
  }

  Enclosure(const Rational& lo, const Rational& hi)
      : lo_(to_double_down(lo)), hi_(to_double_up(hi)), exact_(std::make_pair(lo, hi)) {
    if (lo > hi) throw argument_error("enclosure requires lo <= hi");
  }

  static Enclosure point(const Rational& v) { return Enclosure(v, v); }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double mid() const { return exact_ ? to_double_nearest((exact_->first + exact_->second) / 2) : 0.5 * (lo_ + hi_); }
  double width() const { return exact_ ? to_double_up(exact_->second - exact_->first) : hi_ - lo_; }

  bool is_exact() const { return exact_.has_value(); }
  const Rational& exact_lo() const { return exact_.value().first; }
  const Rational& exact_hi() const { return exact_.value().second; }
  std::optional<Rational> exact_width() const {
    if (!exact_) return std::nullopt;
    return exact_->second - exact_->first;
  }

  bool contains(double x) const {
    if (exact_) {
      const Rational r = from_double(x);
      return exact_->first <= r && r <= exact_->second;
    }
    return lo_ <= x && x <= hi_;
  }

  bool contains(const Rational& r) const {
    if (exact_) return exact_->first <= r && r <= exact_->second;
    return lo_ <= to_double_up(r) && to_double_down(r) <= hi_;
  }

  bool strictly_above(double t) const {
    if (exact_) return exact_->first > from_double(t);
    return lo_ > t;
  }
  bool strictly_below(double t) const {
    if (exact_) return exact_->second < from_double(t);
    return hi_ < t;
  }
  bool at_least(double t) const {
    if (exact_) return exact_->first >= from_double(t);
    return lo_ >= t;
  }

  bool overlaps(const Enclosure& other) const {
    if (exact_ && other.exact_) {
      return exact_->first <= other.exact_->second && other.exact_->first <= exact_->second;
    }
    return lo_ <= other.hi_ && other.lo_ <= hi_;
  }

  /// Enlarge by a nonnegative absolute amount on both sides; drops exactness
  /// unless the amount is zero.
  Enclosure widened(double by) const {
    if (by == 0.0) return *this;
    return Enclosure(std::nextafter(lo_ - by, -HUGE_VAL), std::nextafter(hi_ + by, HUGE_VAL));
  }

  Enclosure scaled(long long n) const {
    if (exact_) {
      Rational a = exact_->first * n, b = exact_->second * n;
      if (a > b) std::swap(a, b);
      return Enclosure(a, b);
    }
    double a = lo_ * static_cast<double>(n), b = hi_ * static_cast<double>(n);
    if (a > b) std::swap(a, b);
    return Enclosure(std::nextafter(a, -HUGE_VAL), std::nextafter(b, HUGE_VAL));
  }

  friend Enclosure operator+(const Enclosure& x, const Enclosure& y) {
    if (x.exact_ && y.exact_) return Enclosure(x.exact_->first + y.exact_->first, x.exact_->second + y.exact_->second);
    return Enclosure(std::nextafter(x.lo_ + y.lo_, -HUGE_VAL), std::nextafter(x.hi_ + y.hi_, HUGE_VAL));
  }

  friend Enclosure operator-(const Enclosure& x) {
    if (x.exact_) return Enclosure(Rational(-x.exact_->second), Rational(-x.exact_->first));
    return Enclosure(-x.hi_, -x.lo_);
  }

  friend Enclosure operator-(const Enclosure& x, const Enclosure& y) { return x + (-y); }

  /// Interval image of |v| over the enclosure.
  Enclosure abs() const {
    if (exact_) {
      const Rational& a = exact_->first;
      const Rational& b = exact_->second;
      if (a >= 0) return *this;
      if (b <= 0) return -*this;
      return Enclosure(Rational(0), b > -a ? b : Rational(-a));
    }
    if (lo_ >= 0) return *this;
    if (hi_ <= 0) return -*this;
    return Enclosure(0.0, std::max(hi_, -lo_));
  }

  std::string str() const {
    if (exact_) return "[" + to_string(exact_->first) + ", " + to_string(exact_->second) + "]";
    char buf[96];
    std::snprintf(buf, sizeof buf, "[%.17g, %.17g]", lo_, hi_);
    return buf;
  }

 private:
  double lo_ = 0.0;
  double hi_ = 0.0;
  std::optional<std::pair<Rational, Rational>> exact_;
};

/// Pointwise maximum of two enclosures (encloses max(x, y)).
inline Enclosure max(const Enclosure& x, const Enclosure& y) {
  if (x.is_exact() && y.is_exact()) {
    return Enclosure(std::max(x.exact_lo(), y.exact_lo()), std::max(x.exact_hi(), y.exact_hi()));
  }
  return Enclosure(std::max(x.lo(), y.lo()), std::max(x.hi(), y.hi()));
}

enum class Truth { Yes, No, Unknown };

inline const char* to_string(Truth t) {
  switch (t) {
    case Truth::Yes: return "yes";
    case Truth::No: return "no";
    case Truth::Unknown: return "unknown";
  }
  return "unknown";
}

/// Tri-state certified predicate. Yes and No carry the certificate that
/// justified them; Unknown means the precision budget ran out.
struct Verdict {
  Truth state = Truth::Unknown;
  std::string certificate;

  static Verdict yes(std::string why = {}) { return {Truth::Yes, std::move(why)}; }
  static Verdict no(std::string why = {}) { return {Truth::No, std::move(why)}; }
  static Verdict unknown(std::string why = {}) { return {Truth::Unknown, std::move(why)}; }

  bool is_yes() const { return state == Truth::Yes; }
  bool is_no() const { return state == Truth::No; }
  bool is_unknown() const { return state == Truth::Unknown; }
};

inline Verdict from_bool(bool b, std::string why = {}) { return b ? Verdict::yes(std::move(why)) : Verdict::no(std::move(why)); }

}  // namespace ordcover
