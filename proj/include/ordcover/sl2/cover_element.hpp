#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

#include "json.hpp"

#include "ordcover/errors.hpp"
#include "ordcover/sl2/matrix.hpp"

namespace ordcover::sl2 {

namespace detail {

/// Angle of the direction (x, y) reduced to [0, pi), divided by pi.
inline double projective_angle_unit(double x, double y) {
  double ang = std::atan2(y, x);
  if (ang < 0.0) ang += std::numbers::pi;
  if (ang >= std::numbers::pi) ang -= std::numbers::pi;
  double u = ang / std::numbers::pi;
  if (u >= 1.0) u = std::nextafter(1.0, 0.0);
  return u < 0.0 ? 0.0 : u;
}

}  // namespace detail

/// Element of the universal cover of PSL2(R): a projective matrix plus an
/// integer winding.
///
/// The element acts on the real line by F(x) = F~(x) + winding, where F~ is
/// the lift of the projective boundary action with F~(0) in [0, 1) and x
/// parametrizes directions (cos pi x, sin pi x). F is strictly increasing
/// and F(x + 1) = F(x) + 1; the central generator (I, 1) acts by x -> x + 1.
class CoverElement {
 public:
  CoverElement() = default;
  CoverElement(ProjectiveMatrix mat, std::int64_t winding) : mat_(mat), winding_(winding) {}

  static CoverElement identity() { return {}; }
  /// z^k: the deck transformation x -> x + k.
  static CoverElement central(std::int64_t k) { return {ProjectiveMatrix::identity(), k}; }

  /// The lift of the rotation by theta whose displacement is theta/pi
  /// (any real theta).
  static CoverElement rotation_lift(double theta) {
    const double turns = theta / std::numbers::pi;
    const double whole = std::floor(turns);
    return {ProjectiveMatrix::rotation(std::numbers::pi * (turns - whole)), static_cast<std::int64_t>(whole)};
  }

  const ProjectiveMatrix& mat() const { return mat_; }
  std::int64_t winding() const { return winding_; }

  /// F~(0) in [0, 1).
  double canonical_at_zero() const { return detail::projective_angle_unit(mat_.a(), mat_.c()); }

  /// F~(x) for any real x.
  double canonical_lift(double x) const {
    const double k = std::floor(x);
    return canonical_at_zero() + k + sweep(x - k);
  }

  /// F(x) = F~(x) + winding.
  double lift(double x) const { return canonical_lift(x) + static_cast<double>(winding_); }

  /// Displacement F(x) - x, evaluated on the fractional part only so the
  /// result does not lose precision for large |x|.
  double displacement(double x) const {
    const double k = std::floor(x);
    const double r = x - k;
    return canonical_at_zero() + sweep(r) - r + static_cast<double>(winding_);
  }

  /// Per-evaluation absolute error bound for lift().
  double evaluation_error() const {
    return std::max(1e-12, 1e-14 * mat_.frobenius2());
  }

  /// Bound on F'(x) = 1/|M u(x)|^2 <= sigma_max^2 <= |M|_F^2.
  double derivative_bound() const { return mat_.frobenius2(); }

  /// Equality of boundary maps within tol relative to the entry scale:
  /// matrices agree up to sign and the lifts agree on a few points. Winding
  /// alone is not compared, since a matrix a rounding error away from the
  /// wrap of the canonical angle carries a compensating winding.
  bool near(const CoverElement& o, double tol = 1e-9) const {
    const double scale = std::max({1.0, mat_.frobenius2(), o.mat_.frobenius2()});
    if (!mat_.near_projective(o.mat_, tol * scale)) return false;
    for (double x : {0.0, 0.25, 0.5, 0.75}) {
      if (std::abs(lift(x) - o.lift(x)) > tol * scale) return false;
    }
    return true;
  }

 private:
  /// Angle swept by M u(s), s from 0 to r in [0, 1), over pi; in [0, 1).
  double sweep(double r) const {
    if (r == 0.0) return 0.0;
    const double t = std::numbers::pi * r;
    const auto v = mat_.apply(std::cos(t), std::sin(t));
    const double x0 = mat_.a(), y0 = mat_.c();
    const double cross = x0 * v[1] - y0 * v[0];
    const double dot = x0 * v[0] + y0 * v[1];
    double ang = std::atan2(cross, dot);
    // The true sweep lies in [0, pi); negative values are rounding.
    if (ang < 0.0) ang = ang < -std::numbers::pi / 2 ? ang + 2.0 * std::numbers::pi : 0.0;
    return ang / std::numbers::pi;
  }

  ProjectiveMatrix mat_;
  std::int64_t winding_ = 0;
};

/// Group law: matrix product, winding fixed by F_{gh}(0) = F_g(F_h(0)).
inline CoverElement mul(const CoverElement& g, const CoverElement& h) {
  const ProjectiveMatrix p = g.mat() * h.mat();
  const CoverElement base(p, 0);
  const double target = g.lift(h.lift(0.0));
  const double raw = target - base.canonical_at_zero();
  const double w = std::round(raw);
  if (std::abs(raw - w) > 0.25) {
    throw numeric_instability("winding correction " + std::to_string(raw) + " is not near an integer");
  }
  return {p, static_cast<std::int64_t>(w)};
}

inline CoverElement inv(const CoverElement& g) {
  const CoverElement base(g.mat().inverse(), 0);
  const double raw = -base.canonical_lift(g.lift(0.0));
  const double w = std::round(raw);
  if (std::abs(raw - w) > 0.25) {
    throw numeric_instability("inverse winding correction " + std::to_string(raw) + " is not near an integer");
  }
  return {base.mat(), static_cast<std::int64_t>(w)};
}

inline CoverElement power(const CoverElement& g, std::int64_t n) {
  CoverElement base = n < 0 ? inv(g) : g;
  CoverElement out;
  for (std::int64_t i = 0; i < (n < 0 ? -n : n); ++i) out = mul(base, out);
  return out;
}

inline CoverElement conjugate(const CoverElement& g, const CoverElement& h) { return mul(mul(h, g), inv(h)); }

/// exp(tX) in the cover. The winding follows F_{exp(sX)}(0) continuously in
/// s, with steps small enough that each moves the base point by < 1/4.
inline CoverElement exp_cover(const LieAlgebraElement& X, double t) {
  const double speed = X.max_speed();
  const auto steps = static_cast<std::int64_t>(std::ceil(4.0 * std::abs(t) * speed)) + 1;
  double previous = 0.0;
  CoverElement g;
  for (std::int64_t i = 1; i <= steps; ++i) {
    const double s = t * static_cast<double>(i) / static_cast<double>(steps);
    const CoverElement base(X.exp_matrix(s), 0);
    const double f = base.canonical_at_zero();
    const double w = std::round(previous - f);
    g = CoverElement(base.mat(), static_cast<std::int64_t>(w));
    previous = f + w;
  }
  return g;
}

/// K~-coordinate of the Iwasawa decomposition g = k a n, normalized so the
/// central generator has coordinate 1. The QR factor of the matrix is the
/// rotation taking e1 to the direction of the first column, so the
/// coordinate is that angle over pi (in [0, 1)) plus the winding.
inline double iwasawa_pi(const CoverElement& g) {
  const ProjectiveMatrix& m = g.mat();
  const double theta = std::atan2(m.c(), m.a());
  double unit = theta / std::numbers::pi;  // (-1, 1]
  unit -= std::floor(unit);                // projectivize to [0, 1)
  if (unit >= 1.0) unit = 0.0;
  return unit + static_cast<double>(g.winding());
}

inline nlohmann::json to_json(const CoverElement& g) {
  nlohmann::json j;
  j["type"] = "sl2cover";
  const auto e = g.mat().entries();
  j["mat"] = {e[0], e[1], e[2], e[3]};
  j["winding"] = g.winding();
  return j;
}

/// Parses {"type":"sl2cover","mat":[a,b,c,d],"winding":w}. The matrix is
/// re-normalized; |det - 1| > 1e-6 is rejected.
inline CoverElement cover_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("type") || j["type"] != "sl2cover") {
    throw parse_error("expected an object with type \"sl2cover\"");
  }
  if (!j.contains("mat") || !j["mat"].is_array() || j["mat"].size() != 4) {
    throw parse_error("sl2cover element needs 'mat' with four numbers");
  }
  if (!j.contains("winding") || !j["winding"].is_number_integer()) throw parse_error("sl2cover element needs integer 'winding'");
  double e[4];
  for (int i = 0; i < 4; ++i) {
    if (!j["mat"][i].is_number()) throw parse_error("matrix entries must be numbers");
    e[i] = j["mat"][i].get<double>();
  }
  const double det = e[0] * e[3] - e[1] * e[2];
  if (!(std::abs(det - 1.0) <= 1e-6)) throw invariant_error("determinant " + std::to_string(det) + " is not 1");
  return {ProjectiveMatrix(e[0], e[1], e[2], e[3]), j["winding"].get<std::int64_t>()};
}

}  // namespace ordcover::sl2
