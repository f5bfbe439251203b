#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ordcover/circle/pl_lift.hpp"
#include "ordcover/enclosure.hpp"
#include "ordcover/errors.hpp"
#include "ordcover/random.hpp"
#include "ordcover/rational.hpp"

namespace ordcover::circle {

/// Double-precision copy of a PL lift with a rigorous per-evaluation error
/// bound, used once exact iterates grow too large.
class FloatPL {
 public:
  explicit FloatPL(const PLLift& f) {
    const std::size_t k = f.size();
    double vmax = 0.0, smax = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      xs_.push_back(to_double_nearest(f.breakpoints()[i]));
      vs_.push_back(to_double_nearest(f.values()[i]));
      slopes_.push_back(to_double_nearest(f.slope(i)));
      vmax = std::max(vmax, std::abs(vs_.back()));
      smax = std::max(smax, slopes_.back());
    }
    vmax = std::max(vmax, std::abs(vs_.front() + 1.0));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    err_ = 16.0 * eps * (1.0 + vmax + 2.0 * smax);
  }

  /// Approximate f(r) for r in [0, 1]; |result - f(r)| <= error_bound().
  double evaluate_unit(double r) const {
    const std::size_t i = std::upper_bound(xs_.begin(), xs_.end(), r) - xs_.begin() - 1;
    return vs_[i] + slopes_[i] * (r - xs_[i]);
  }

  double error_bound() const { return err_; }

 private:
  std::vector<double> xs_, vs_, slopes_;
  double err_ = 0.0;
};

/// Point split as integer part plus a fraction in [0, 1).
struct SplitPoint {
  std::int64_t whole = 0;
  double fraction = 0.0;
};

/// Forward orbit of 0 under a PL lift.
///
/// Iterates exactly in rational arithmetic while the iterate stays small
/// (denominator at most `exact_bits` bits), then continues with a pair of
/// outward-rounded double orbits bracketing the true one. Monotonicity of f
/// keeps the bracket valid. Exact orbits that return to a point mod 1 are
/// periodic from then on and are advanced in closed form.
class Orbit {
 public:
  explicit Orbit(const PLLift& f, unsigned exact_bits = 64) : f_(f), exact_bits_(exact_bits), exact_(Rational(0)) {
    trail_.push_back(Rational(0));
    seen_.emplace(Rational(0), 0);
  }

  void advance(std::uint64_t steps) {
    for (std::uint64_t s = 0; s < steps; ++s) {
      if (cycle_) {
        count_ += steps - s;
        const std::uint64_t offset = count_ - cycle_->start;
        *exact_ = trail_[cycle_->start + offset % cycle_->period] +
                  cycle_->shift * Rational(static_cast<long long>(offset / cycle_->period));
        return;
      }
      if (exact_) {
        *exact_ = f_.evaluate(*exact_);
        ++count_;
        if (denominator_bits(*exact_) > exact_bits_ || numerator_bits(*exact_) > exact_bits_ + 32) {
          switch_to_float();
        } else {
          record();
        }
        continue;
      }
      step_down(lo_);
      step_up(hi_);
      ++count_;
    }
  }

  std::uint64_t steps() const { return count_; }
  bool exact() const { return exact_.has_value(); }
  bool periodic() const { return cycle_.has_value(); }
  const Rational& exact_point() const { return exact_.value(); }

  /// T-enclosure [(f^n(0) - 1)/n, (f^n(0) + 1)/n] at the current n >= 1.
  Enclosure enclosure() const {
    if (count_ == 0) throw argument_error("orbit has not advanced");
    const Rational n(static_cast<long long>(count_));
    if (exact_) return Enclosure((*exact_ - 1) / n, (*exact_ + 1) / n);
    const Rational lo = Rational(lo_.whole) + from_double(lo_.fraction);
    const Rational hi = Rational(hi_.whole) + from_double(hi_.fraction);
    return Enclosure(to_double_down((lo - 1) / n), to_double_up((hi + 1) / n));
  }

 private:
  struct Cycle {
    std::uint64_t start;
    std::uint64_t period;
    Rational shift;
  };

  static constexpr std::size_t kMaxTrail = 1u << 14;

  void record() {
    if (trail_.empty()) return;
    const Rational r = *exact_ - Rational(floor_int(*exact_));
    const auto it = seen_.find(r);
    if (it != seen_.end()) {
      cycle_ = Cycle{it->second, count_ - it->second, *exact_ - trail_[it->second]};
      seen_.clear();
      return;
    }
    if (trail_.size() >= kMaxTrail) {
      trail_.clear();
      seen_.clear();
      return;
    }
    trail_.push_back(*exact_);
    seen_.emplace(r, count_);
  }

  void switch_to_float() {
    float_.emplace(f_);
    const Integer k = floor_int(*exact_);
    const Rational r = *exact_ - Rational(k);
    lo_ = {k.convert_to<std::int64_t>(), to_double_down(r)};
    hi_ = {k.convert_to<std::int64_t>(), to_double_up(r)};
    normalize(hi_);
    exact_.reset();
    trail_.clear();
    seen_.clear();
  }

  static void normalize(SplitPoint& p) {
    const double m = std::floor(p.fraction);
    p.whole += static_cast<std::int64_t>(m);
    p.fraction -= m;
  }

  void step_down(SplitPoint& p) const {
    const double y = float_->evaluate_unit(p.fraction);
    p.fraction = std::nextafter(y - float_->error_bound(), -HUGE_VAL);
    normalize(p);
  }

  void step_up(SplitPoint& p) const {
    const double y = float_->evaluate_unit(p.fraction);
    p.fraction = std::nextafter(y + float_->error_bound(), HUGE_VAL);
    normalize(p);
  }

  PLLift f_;
  unsigned exact_bits_;
  std::optional<Rational> exact_;
  std::optional<FloatPL> float_;
  SplitPoint lo_, hi_;
  std::uint64_t count_ = 0;
  std::vector<Rational> trail_;
  std::map<Rational, std::uint64_t> seen_;
  std::optional<Cycle> cycle_;
};

/// Certified enclosure of the translation number from the orbit of 0.
/// Width is exactly 2/n when the orbit stays exact.
inline Enclosure translation_number_enclosure(const PLLift& f, std::uint64_t n) {
  if (n < 1) throw argument_error("translation_number_enclosure needs n >= 1");
  Orbit orbit(f);
  orbit.advance(n);
  return orbit.enclosure();
}

/// Exact decision of f(x) >= x (or > x when strict) for all x. A PL
/// function f(x) - x attains its extrema at breakpoints.
inline Verdict geometric_positive(const PLLift& f, bool strict) {
  const auto [m, at] = f.min_delta();
  const std::string why = "min(f(x)-x) = " + to_string(m) + " at x = " + to_string(at);
  return from_bool(strict ? m > 0 : m >= 0, why);
}

inline Verdict has_fixed_point(const PLLift& f) {
  const auto [lo, at_lo] = f.min_delta();
  const auto [hi, at_hi] = f.max_delta();
  return from_bool(lo <= 0 && 0 <= hi, "f(x)-x ranges over [" + to_string(lo) + ", " + to_string(hi) + "]");
}

struct NonmaximalWitness {
  PLLift h;   ///< g^{-1} tau_eps g, strictly positive
  PLLift gh;  ///< g h = tau_eps g, not strictly positive
};

/// For g with min(g(x) - x) = -delta < 0 and 0 < epsilon < delta, builds the
/// dominant element h = g^{-1} tau_eps g whose product gh fails strict
/// positivity, showing that left multiplication by g does not preserve the
/// dominant set.
inline NonmaximalWitness witness_nonmaximal(const PLLift& g, const Rational& epsilon) {
  const Rational delta = -g.min_delta().first;
  if (delta <= 0) throw argument_error("g is positive; no witness exists (delta = " + to_string(delta) + ")");
  if (epsilon <= 0 || epsilon >= delta) {
    throw argument_error("epsilon must lie in (0, delta) with delta = " + to_string(delta));
  }
  const PLLift tau = PLLift::translation(epsilon);
  PLLift h = compose(invert(g), compose(tau, g));
  PLLift gh = compose(g, h);
  return {std::move(h), std::move(gh)};
}

struct RandomPLOptions {
  int breakpoints = 3;
  long long denominator_bound = 16;
  /// v_0 is drawn from [-shift_range, shift_range].
  long long shift_range = 1;
};

namespace detail {

inline Rational random_unit_rational(Rng& rng, long long denominator_bound) {
  const long long q = uniform_int(rng, 2, std::max<long long>(2, denominator_bound));
  const long long p = uniform_int(rng, 1, q - 1);
  return make_rational(p, q);
}

inline std::vector<Rational> distinct_sorted(Rng& rng, std::size_t count, long long denominator_bound) {
  std::set<Rational> picked;
  // A denominator bound D admits at least D-1 distinct points in (0, 1).
  const std::size_t cap = static_cast<std::size_t>(std::max<long long>(1, denominator_bound - 1));
  count = std::min(count, cap);
  while (picked.size() < count) picked.insert(random_unit_rational(rng, denominator_bound));
  return {picked.begin(), picked.end()};
}

}  // namespace detail

/// Seeded random PL lift with `breakpoints` points (fewer after collinear
/// pruning). k = 1 gives a translation.
inline PLLift random_pl(Rng& rng, const RandomPLOptions& opt) {
  if (opt.breakpoints < 1) throw argument_error("random_pl needs at least one breakpoint");
  const std::size_t extra = static_cast<std::size_t>(opt.breakpoints - 1);
  const long long D = std::max<long long>(2, opt.denominator_bound);
  std::vector<Rational> xs = detail::distinct_sorted(rng, extra, D);
  std::vector<Rational> offs = detail::distinct_sorted(rng, xs.size(), D);
  const long long q = uniform_int(rng, 1, D);
  const Rational v0 = make_rational(uniform_int(rng, -opt.shift_range * q, opt.shift_range * q), q);
  xs.insert(xs.begin(), Rational(0));
  std::vector<Rational> vs{v0};
  for (const auto& o : offs) vs.push_back(v0 + o);
  return PLLift::from_points(std::move(xs), std::move(vs));
}

inline PLLift random_pl(std::uint64_t seed, int k, long long denominator_bound) {
  Rng rng = split_rng(seed, 0);
  return random_pl(rng, RandomPLOptions{k, denominator_bound, 1});
}

/// The group H of PL lifts with the translation number as quasimorphism.
class CircleGroup {
 public:
  using element_type = PLLift;

  explicit CircleGroup(RandomPLOptions sampling = {4, 12, 2}) : sampling_(sampling) {}

  static constexpr const char* name() { return "circle"; }

  PLLift identity() const { return PLLift::identity(); }
  PLLift mul(const PLLift& g, const PLLift& h) const { return compose(g, h); }
  PLLift inv(const PLLift& g) const { return invert(g); }
  bool equal(const PLLift& g, const PLLift& h) const { return g == h; }
  bool is_identity(const PLLift& g) const { return g.is_identity(); }

  Enclosure qm_enclosure(const PLLift& g, std::uint64_t n) const { return translation_number_enclosure(g, n); }
  Verdict positive(const PLLift& g) const { return geometric_positive(g, false); }
  Verdict strictly_positive(const PLLift& g) const { return geometric_positive(g, true); }

  PLLift sample(Rng& rng) const {
    RandomPLOptions opt = sampling_;
    opt.breakpoints = static_cast<int>(uniform_int(rng, 1, sampling_.breakpoints));
    return random_pl(rng, opt);
  }

  /// A random element of the positive semigroup: tau_c o f with c lifting
  /// the minimum displacement to a small nonnegative value.
  PLLift sample_positive(Rng& rng) const {
    PLLift f = sample(rng);
    const Rational shift = -f.min_delta().first + make_rational(uniform_int(rng, 0, 4), 8);
    return compose(PLLift::translation(shift), f);
  }

  nlohmann::json to_json(const PLLift& g) const { return circle::to_json(g); }

 private:
  RandomPLOptions sampling_;
};

}  // namespace ordcover::circle
