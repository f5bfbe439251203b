#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "ordcover/enclosure.hpp"
#include "ordcover/errors.hpp"
#include "ordcover/random.hpp"
#include "ordcover/sl2/cover_element.hpp"
#include "ordcover/sl2/matrix.hpp"

namespace ordcover::sl2 {

// ---------------------------------------------------------------------------
// Quasimorphisms
// ---------------------------------------------------------------------------

/// Certified T-enclosure from the orbit of 0 under the boundary lift:
/// [(F^n(0) - 1)/n, (F^n(0) + 1)/n], widened by the per-evaluation error.
/// The integer part of the orbit is carried exactly.
inline Enclosure translation_number_enclosure(const CoverElement& g, std::uint64_t n) {
  if (n < 1) throw argument_error("translation_number_enclosure needs n >= 1");
  std::int64_t whole = 0;
  double frac = 0.0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const double y = g.lift(frac);
    const double m = std::floor(y);
    whole += static_cast<std::int64_t>(m);
    frac = y - m;
  }
  const double nn = static_cast<double>(n);
  const double pos = static_cast<double>(whole) + frac;
  // A pseudo-orbit with per-step error delta stays between the orbits of
  // F - delta and F + delta, whose translation numbers differ from T by delta.
  const double slack = g.evaluation_error() + 4.0 * std::numeric_limits<double>::epsilon() * (std::abs(pos) + 1.0) / nn;
  return Enclosure(std::nextafter((pos - 1.0) / nn - slack, -HUGE_VAL), std::nextafter((pos + 1.0) / nn + slack, HUGE_VAL));
}

/// Homogenized Iwasawa coordinate: pi(g^n)/n with |pi - mu| <= bound.
///
/// g^n is accumulated through the group law on K~-parts only: if
/// g^{j-1} = k a n then the K~-part of g^j is that of g k, which keeps the
/// matrices well conditioned for large n.
inline Enclosure gw_mu(const CoverElement& g, std::uint64_t n, double bound = 2.0) {
  if (n < 1) throw argument_error("gw_mu needs n >= 1");
  double coordinate = 0.0;
  CoverElement k;
  for (std::uint64_t i = 0; i < n; ++i) {
    coordinate = iwasawa_pi(mul(g, k));
    k = CoverElement::rotation_lift(std::numbers::pi * coordinate);
  }
  const double nn = static_cast<double>(n);
  const double slack = bound / nn + 4.0 * g.evaluation_error();
  return Enclosure(std::nextafter(coordinate / nn - slack, -HUGE_VAL), std::nextafter(coordinate / nn + slack, HUGE_VAL));
}

// ---------------------------------------------------------------------------
// Fixed-point structure
// ---------------------------------------------------------------------------

enum class TraceClass { Elliptic, Parabolic, Hyperbolic, Central };

inline const char* to_string(TraceClass c) {
  switch (c) {
    case TraceClass::Elliptic: return "elliptic";
    case TraceClass::Parabolic: return "parabolic";
    case TraceClass::Hyperbolic: return "hyperbolic";
    case TraceClass::Central: return "central";
  }
  return "?";
}

/// Fixed-point data of the boundary lift. The displacement d(x) = F(x) - x
/// has range of length < 1, so at every fixed direction x* it takes the same
/// integer value `level`. For elliptic matrices there is no fixed direction
/// and d stays strictly between `level` and `level` + 1.
struct FixedPointStructure {
  TraceClass trace_class = TraceClass::Elliptic;
  std::int64_t level = 0;
  /// Parabolic only: sign of d - level away from the fixed direction.
  int side = 0;
  std::vector<double> fixed_directions;
};

inline double discriminant_tolerance(const ProjectiveMatrix& m) { return std::max(1e-12, 1e-13 * m.frobenius2()); }

/// Classifies the trace and locates fixed directions. Empty when rounding
/// prevents a clean integer level.
inline std::optional<FixedPointStructure> fixed_point_structure(const CoverElement& g) {
  const ProjectiveMatrix& m = g.mat();
  const double tr = m.trace();
  const double disc = tr * tr - 4.0;
  const double tol = discriminant_tolerance(m);
  const double delta = g.evaluation_error();
  FixedPointStructure s;

  if (std::abs(m.b()) <= tol && std::abs(m.c()) <= tol && std::abs(m.a() - m.d()) <= tol) {
    s.trace_class = TraceClass::Central;
    s.level = static_cast<std::int64_t>(std::round(g.displacement(0.0)));
    return s;
  }
  if (disc < -tol) {
    s.trace_class = TraceClass::Elliptic;
    s.level = static_cast<std::int64_t>(std::floor(g.displacement(0.0)));
    return s;
  }

  s.trace_class = disc > tol ? TraceClass::Hyperbolic : TraceClass::Parabolic;
  const double root = s.trace_class == TraceClass::Hyperbolic ? std::sqrt(disc) : 0.0;
  const int count = s.trace_class == TraceClass::Hyperbolic ? 2 : 1;
  std::optional<std::int64_t> level;
  for (int i = 0; i < count; ++i) {
    const double lambda = (tr + (i == 0 ? root : -root)) / 2.0;
    const double v1x = m.b(), v1y = lambda - m.a();
    const double v2x = lambda - m.d(), v2y = m.c();
    const bool first = std::hypot(v1x, v1y) >= std::hypot(v2x, v2y);
    const double x = detail::projective_angle_unit(first ? v1x : v2x, first ? v1y : v2y);
    const double dv = g.displacement(x);
    const double k = std::round(dv);
    if (std::abs(dv - k) > 0.25) return std::nullopt;
    if (level && *level != static_cast<std::int64_t>(k)) return std::nullopt;
    level = static_cast<std::int64_t>(k);
    s.fixed_directions.push_back(x);
  }
  s.level = *level;
  if (s.trace_class == TraceClass::Parabolic) {
    const double away = g.displacement(s.fixed_directions.front() + 0.5) - static_cast<double>(s.level);
    if (std::abs(away) <= delta) return std::nullopt;
    s.side = away > 0 ? 1 : -1;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Certified minimization of the displacement
// ---------------------------------------------------------------------------

/// Grid bounds on d(x) = F(x) - x over a period, using the Lipschitz bound
/// L + 1 on d, L = |M|_F^2 >= max F'.
struct DisplacementBounds {
  double lower = 0.0;      ///< certified lower bound of min d
  double upper = 0.0;      ///< certified upper bound of max d
  double min_sample = 0.0; ///< smallest sampled value
  double min_at = 0.0;
  double max_sample = 0.0;
  double max_at = 0.0;
  std::size_t points = 0;
};

inline DisplacementBounds displacement_bounds(const CoverElement& g, std::size_t points) {
  DisplacementBounds out;
  out.points = points;
  out.min_sample = HUGE_VAL;
  out.max_sample = -HUGE_VAL;
  for (std::size_t j = 0; j < points; ++j) {
    const double x = static_cast<double>(j) / static_cast<double>(points);
    const double d = g.displacement(x);
    if (d < out.min_sample) {
      out.min_sample = d;
      out.min_at = x;
    }
    if (d > out.max_sample) {
      out.max_sample = d;
      out.max_at = x;
    }
  }
  const double lip = g.derivative_bound() + 1.0;
  const double slack = lip / (2.0 * static_cast<double>(points)) + g.evaluation_error();
  out.lower = out.min_sample - slack;
  out.upper = out.max_sample + slack;
  return out;
}

/// Default cap on grid points for certified minimization.
inline constexpr std::size_t kDefaultBudget = 1024;

namespace detail {

inline Verdict positive_from_structure(const FixedPointStructure& s, bool strict) {
  const std::string why = std::string("fixed-point structure: ") + to_string(s.trace_class) + ", level " + std::to_string(s.level);
  switch (s.trace_class) {
    case TraceClass::Elliptic:
      // d lies in (level, level + 1) and never vanishes.
      return from_bool(s.level >= 0, why);
    case TraceClass::Central:
      return from_bool(strict ? s.level >= 1 : s.level >= 0, why);
    case TraceClass::Hyperbolic:
      // d - level changes sign, so d dips below level.
      return from_bool(s.level >= 1, why);
    case TraceClass::Parabolic:
      if (s.side > 0) return from_bool(strict ? s.level >= 1 : s.level >= 0, why + ", touching from above");
      return from_bool(s.level >= 1, why + ", touching from below");
  }
  return Verdict::unknown(why);
}

}  // namespace detail

/// Certified decision of F(x) >= x (or > x when strict) for all x.
///
/// Refines a Lipschitz-certified grid up to `budget` points. Tangential
/// cases (a fixed point where d touches 0) cannot be separated by a grid;
/// those fall back to the fixed-point structure of the matrix.
inline Verdict geometric_positive(const CoverElement& g, bool strict, std::size_t budget = kDefaultBudget) {
  const double delta = g.evaluation_error();
  for (std::size_t points = 64; points <= std::max<std::size_t>(budget, 64); points *= 2) {
    const DisplacementBounds b = displacement_bounds(g, points);
    const std::string at = "grid " + std::to_string(points) + ": ";
    if (b.lower > 0.0) return Verdict::yes(at + "min d >= " + std::to_string(b.lower));
    if (b.min_sample + delta < 0.0) return Verdict::no(at + "d(" + std::to_string(b.min_at) + ") < 0");
    if (strict && b.min_sample + delta <= 0.0) return Verdict::no(at + "d(" + std::to_string(b.min_at) + ") <= 0");
  }
  if (const auto s = fixed_point_structure(g)) return detail::positive_from_structure(*s, strict);
  return Verdict::unknown("grid budget exhausted and fixed-point structure undecided");
}

/// Does F have a fixed point (d(x) = 0 somewhere)?
inline Verdict has_fixed_point(const CoverElement& g, std::size_t budget = kDefaultBudget) {
  const double delta = g.evaluation_error();
  for (std::size_t points = 64; points <= std::max<std::size_t>(budget, 64); points *= 2) {
    const DisplacementBounds b = displacement_bounds(g, points);
    if (b.min_sample + delta < 0.0 && b.max_sample - delta > 0.0) return Verdict::yes("sign change of F(x) - x");
    if (b.lower > 0.0 || b.upper < 0.0) return Verdict::no("F(x) - x bounded away from 0");
  }
  if (const auto s = fixed_point_structure(g)) {
    if (s->trace_class == TraceClass::Elliptic) return Verdict::no("elliptic: no fixed direction");
    return from_bool(s->level == 0, std::string(to_string(s->trace_class)) + " at level " + std::to_string(s->level));
  }
  return Verdict::unknown("fixed-point test undecided");
}

// ---------------------------------------------------------------------------
// Hilgert-Hofmann trichotomy
// ---------------------------------------------------------------------------

struct Classification {
  Verdict in_pos_interior;
  Verdict in_neg_interior;
  Verdict in_exp_image;

  bool covered() const { return in_pos_interior.is_yes() || in_neg_interior.is_yes() || in_exp_image.is_yes(); }
  bool undecided() const { return !covered(); }
};

inline Classification hilgert_hofmann_classify(const CoverElement& g, std::size_t budget = kDefaultBudget) {
  Classification out;
  out.in_pos_interior = geometric_positive(g, true, budget);
  out.in_neg_interior = geometric_positive(inv(g), true, budget);
  const ProjectiveMatrix& m = g.mat();
  if (m.trace() * m.trace() - 4.0 < -discriminant_tolerance(m)) {
    out.in_exp_image = Verdict::yes("elliptic matrix, |trace| < 2");
  } else {
    out.in_exp_image = has_fixed_point(g, budget);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Invariant cone and Lie wedge
// ---------------------------------------------------------------------------

/// X lies in the positive cone iff its boundary field is nonnegative:
/// c >= b and a^2 + bc <= 0. Within 1e-10 of the boundary the answer is
/// Unknown unless the boundary value is computed exactly.
inline Verdict cone_contains(const LieAlgebraElement& X) {
  const double scale = std::max(1.0, X.a * X.a + X.b * X.b + X.c * X.c);
  const double tol = 1e-10 * scale;
  const double gap = X.c - X.b;
  const double q = X.discriminant();
  const std::string why = "c - b = " + std::to_string(gap) + ", a^2 + bc = " + std::to_string(q);
  if (gap < -tol || q > tol) return Verdict::no(why);
  if (gap > tol && q < -tol) return Verdict::yes(why);
  if (gap >= 0.0 && q == 0.0) return Verdict::yes(why + " (exact boundary)");
  if (gap >= 0.0 && q <= 0.0 && X.field().minimum() >= 0.0) return Verdict::yes(why + " (boundary)");
  return Verdict::unknown(why + " within tolerance band");
}

struct WedgeResult {
  Verdict verdict;
  Verdict cone;
  /// False only when both are decided and differ.
  bool agrees = true;
};

/// exp(tX) >= e for every sampled t > 0, cross-checked against the cone.
inline WedgeResult wedge_member(const LieAlgebraElement& X, std::span<const double> t_samples,
                                std::size_t budget = kDefaultBudget) {
  if (t_samples.empty()) throw argument_error("wedge_member needs at least one t");
  WedgeResult out;
  bool unknown = false;
  for (double t : t_samples) {
    if (!(t > 0.0)) throw argument_error("wedge_member samples must be positive");
    const Verdict v = geometric_positive(exp_cover(X, t), false, budget);
    if (v.is_no()) {
      out.verdict = Verdict::no("exp(" + std::to_string(t) + " X) not positive: " + v.certificate);
      break;
    }
    if (v.is_unknown()) unknown = true;
  }
  if (!out.verdict.is_no()) out.verdict = unknown ? Verdict::unknown("some sample undecided") : Verdict::yes("all samples positive");
  out.cone = cone_contains(X);
  if (!out.verdict.is_unknown() && !out.cone.is_unknown()) out.agrees = out.verdict.state == out.cone.state;
  return out;
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

enum class ElementClass { Elliptic, Parabolic, Hyperbolic, Product };

inline std::optional<ElementClass> parse_element_class(const std::string& s) {
  if (s == "elliptic") return ElementClass::Elliptic;
  if (s == "parabolic") return ElementClass::Parabolic;
  if (s == "hyperbolic") return ElementClass::Hyperbolic;
  if (s == "product") return ElementClass::Product;
  return std::nullopt;
}

namespace detail {

inline ProjectiveMatrix random_conjugator(Rng& rng) {
  const double s = uniform(rng, -0.75, 0.75);
  return ProjectiveMatrix::rotation(uniform(rng, 0.0, std::numbers::pi)) * ProjectiveMatrix(std::exp(s), 0.0, 0.0, std::exp(-s)) *
         ProjectiveMatrix::rotation(uniform(rng, 0.0, std::numbers::pi));
}

inline ProjectiveMatrix random_representative(Rng& rng, ElementClass cls) {
  switch (cls) {
    case ElementClass::Elliptic:
      return ProjectiveMatrix::rotation(uniform(rng, 0.0, std::numbers::pi));
    case ElementClass::Parabolic: {
      const double s = uniform(rng, 0.25, 2.0) * (uniform_int(rng, 0, 1) ? 1.0 : -1.0);
      return {1.0, s, 0.0, 1.0};
    }
    default: {
      const double l = std::exp(uniform(rng, 0.1, 1.2));
      return {l, 0.0, 0.0, 1.0 / l};
    }
  }
}

}  // namespace detail

/// Random conjugate of a canonical representative with winding drawn from
/// [-winding_range, winding_range]; the product class multiplies two to four
/// such elements.
inline CoverElement random_cover_element(Rng& rng, ElementClass cls, std::int64_t winding_range = 2) {
  if (cls == ElementClass::Product) {
    const auto factors = uniform_int(rng, 2, 4);
    CoverElement g;
    for (long long i = 0; i < factors; ++i) {
      const auto c = static_cast<ElementClass>(uniform_int(rng, 0, 2));
      g = mul(g, random_cover_element(rng, c, std::min<std::int64_t>(winding_range, 1)));
    }
    return g;
  }
  const ProjectiveMatrix p = detail::random_conjugator(rng);
  const ProjectiveMatrix m = p * detail::random_representative(rng, cls) * p.inverse();
  return {m, uniform_int(rng, -winding_range, winding_range)};
}

inline CoverElement random_cover_element(std::uint64_t seed, ElementClass cls, std::int64_t winding_range = 2) {
  Rng rng = split_rng(seed, 0);
  return random_cover_element(rng, cls, winding_range);
}

inline LieAlgebraElement random_lie_element(Rng& rng, double range = 1.0) {
  return {uniform(rng, -range, range), uniform(rng, -range, range), uniform(rng, -range, range)};
}

/// Random X with min E >= margin (interior of the positive cone).
inline LieAlgebraElement random_cone_element(Rng& rng, double margin = 1e-3) {
  for (;;) {
    const LieAlgebraElement X = random_lie_element(rng);
    if (X.field().minimum() >= margin) return X;
  }
}

// ---------------------------------------------------------------------------
// Group oracle
// ---------------------------------------------------------------------------

/// The universal cover of SL2(R) with the translation number as
/// quasimorphism and certified float-backed order predicates.
class CoverGroup {
 public:
  using element_type = CoverElement;

  explicit CoverGroup(std::size_t budget = kDefaultBudget) : budget_(budget) {}

  static constexpr const char* name() { return "sl2"; }

  CoverElement identity() const { return {}; }
  CoverElement mul(const CoverElement& g, const CoverElement& h) const { return sl2::mul(g, h); }
  CoverElement inv(const CoverElement& g) const { return sl2::inv(g); }
  bool equal(const CoverElement& g, const CoverElement& h) const { return g.near(h); }
  bool is_identity(const CoverElement& g) const { return g.near(CoverElement{}); }

  Enclosure qm_enclosure(const CoverElement& g, std::uint64_t n) const { return translation_number_enclosure(g, n); }
  Verdict positive(const CoverElement& g) const { return geometric_positive(g, false, budget_); }
  Verdict strictly_positive(const CoverElement& g) const { return geometric_positive(g, true, budget_); }

  CoverElement sample(Rng& rng) const {
    return random_cover_element(rng, static_cast<ElementClass>(uniform_int(rng, 0, 3)), 2);
  }

  /// Product of up to three exponentials of cone elements, optionally
  /// shifted by the central generator.
  CoverElement sample_positive(Rng& rng) const {
    CoverElement g = CoverElement::central(uniform_int(rng, 0, 3) == 0 ? 1 : 0);
    const auto factors = uniform_int(rng, 1, 3);
    for (long long i = 0; i < factors; ++i) g = sl2::mul(g, exp_cover(random_cone_element(rng), uniform(rng, 0.05, 2.0)));
    return g;
  }

  nlohmann::json to_json(const CoverElement& g) const { return sl2::to_json(g); }

  std::size_t budget() const { return budget_; }

 private:
  std::size_t budget_;
};

}  // namespace ordcover::sl2
