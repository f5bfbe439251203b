#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ordcover/errors.hpp"
#include "ordcover/rational.hpp"

namespace ordcover::circle {

/// Exact rational piecewise-linear lift of an orientation-preserving circle
/// homeomorphism: f(x + 1) = f(x) + 1, linear between consecutive
/// breakpoints of [0, 1).
///
/// Instances are always canonical: breakpoint 0 is present, breakpoints are
/// strictly increasing in [0, 1), values are strictly increasing with
/// v_last < v_0 + 1, and no breakpoint other than 0 is collinear with its
/// neighbours. Two lifts are equal iff their canonical data coincide.
class PLLift {
 public:
  /// The identity map, (0, 0).
  PLLift() : xs_{Rational(0)}, vs_{Rational(0)} {}

  /// Builds a lift through the given points. Breakpoints must be strictly
  /// increasing in [0, 1); 0 is inserted by interpolation when absent.
  static PLLift from_points(std::vector<Rational> xs, std::vector<Rational> vs) {
    if (xs.empty()) throw invariant_error("a PL lift needs at least one breakpoint");
    if (xs.size() != vs.size()) throw invariant_error("breakpoint and value lists differ in length");
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (xs[i] < 0 || xs[i] >= 1) throw invariant_error("breakpoint " + to_string(xs[i]) + " outside [0, 1)");
      if (i > 0 && !(xs[i - 1] < xs[i])) throw invariant_error("breakpoints must be strictly increasing");
      if (i > 0 && !(vs[i - 1] < vs[i])) throw invariant_error("values must be strictly increasing");
    }
    if (!(vs.back() < vs.front() + 1)) throw invariant_error("last value must be below first value + 1");
    if (xs.front() != 0) {
      // Interpolate on the wrap segment from (x_last - 1, v_last - 1) to (x_0, v_0).
      const Rational x_prev = xs.back() - 1;
      const Rational v_prev = vs.back() - 1;
      const Rational v0 = v_prev + (vs.front() - v_prev) * (Rational(0) - x_prev) / (xs.front() - x_prev);
      xs.insert(xs.begin(), Rational(0));
      vs.insert(vs.begin(), v0);
    }
    PLLift f;
    f.xs_ = std::move(xs);
    f.vs_ = std::move(vs);
    f.prune_collinear();
    return f;
  }

  /// tau_y(x) = x + y.
  static PLLift translation(const Rational& y) {
    PLLift f;
    f.vs_[0] = y;
    return f;
  }

  static PLLift identity() { return PLLift(); }

  const std::vector<Rational>& breakpoints() const { return xs_; }
  const std::vector<Rational>& values() const { return vs_; }
  std::size_t size() const { return xs_.size(); }

  bool is_translation() const { return xs_.size() == 1; }
  bool is_identity() const { return xs_.size() == 1 && vs_[0] == 0; }

  /// Value at a point of [0, 1]; 1 maps to v_0 + 1.
  Rational evaluate_unit(const Rational& r) const {
    const std::size_t i = segment_of(r);
    const auto [x1, v1] = right_end(i);
    return vs_[i] + (v1 - vs_[i]) * (r - xs_[i]) / (x1 - xs_[i]);
  }

  /// Exact f(x) via reduction of x to [0, 1).
  Rational evaluate(const Rational& x) const {
    const Rational k = floor_rational(x);
    return evaluate_unit(x - k) + k;
  }

  /// Exact f^{-1}(y).
  Rational evaluate_inverse(const Rational& y) const {
    const Rational m = floor_rational(y - vs_[0]);
    const Rational target = y - m;  // in [v_0, v_0 + 1)
    std::size_t i = std::upper_bound(vs_.begin(), vs_.end(), target) - vs_.begin() - 1;
    const auto [x1, v1] = right_end(i);
    return xs_[i] + (target - vs_[i]) * (x1 - xs_[i]) / (v1 - vs_[i]) + m;
  }

  /// Slope on segment i (the last segment wraps to (1, v_0 + 1)).
  Rational slope(std::size_t i) const {
    const auto [x1, v1] = right_end(i);
    return (v1 - vs_[i]) / (x1 - xs_[i]);
  }

  friend bool operator==(const PLLift& a, const PLLift& b) { return a.xs_ == b.xs_ && a.vs_ == b.vs_; }

  /// (f o g)(x) = f(g(x)).
  friend PLLift compose(const PLLift& f, const PLLift& g) {
    std::vector<Rational> cand = g.xs_;
    const Rational g0 = g.vs_[0];
    for (const Rational& y : f.xs_) {
      // The lift of y landing in [g(0), g(0) + 1) has a preimage in [0, 1).
      Rational lifted = y + Rational(-floor_int(y - g0));
      cand.push_back(g.evaluate_inverse(lifted));
    }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    std::vector<Rational> vals;
    vals.reserve(cand.size());
    for (const Rational& x : cand) vals.push_back(f.evaluate(g.evaluate_unit(x)));
    PLLift h;
    h.xs_ = std::move(cand);
    h.vs_ = std::move(vals);
    h.prune_collinear();
    return h;
  }

  friend PLLift invert(const PLLift& f) {
    std::vector<std::pair<Rational, Rational>> pts;
    pts.reserve(f.size() + 1);
    for (std::size_t i = 0; i < f.size(); ++i) {
      const Rational m = floor_rational(f.vs_[i]);
      pts.emplace_back(f.vs_[i] - m, f.xs_[i] - m);
    }
    if (std::none_of(pts.begin(), pts.end(), [](const auto& p) { return p.first == 0; })) {
      pts.emplace_back(Rational(0), f.evaluate_inverse(Rational(0)));
    }
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    PLLift h;
    h.xs_.clear();
    h.vs_.clear();
    for (auto& [y, x] : pts) {
      h.xs_.push_back(std::move(y));
      h.vs_.push_back(std::move(x));
    }
    h.prune_collinear();
    return h;
  }

  /// min over x of f(x) - x together with the breakpoint attaining it.
  std::pair<Rational, Rational> min_delta() const {
    std::size_t best = 0;
    Rational m = vs_[0] - xs_[0];
    for (std::size_t i = 1; i < size(); ++i) {
      Rational d = vs_[i] - xs_[i];
      if (d < m) {
        m = std::move(d);
        best = i;
      }
    }
    return {m, xs_[best]};
  }

  std::pair<Rational, Rational> max_delta() const {
    std::size_t best = 0;
    Rational m = vs_[0] - xs_[0];
    for (std::size_t i = 1; i < size(); ++i) {
      Rational d = vs_[i] - xs_[i];
      if (d > m) {
        m = std::move(d);
        best = i;
      }
    }
    return {m, xs_[best]};
  }

  /// Largest denominator bit length among the data; a complexity measure.
  unsigned max_denominator_bits() const {
    unsigned b = 0;
    for (const auto& x : xs_) b = std::max(b, denominator_bits(x));
    for (const auto& v : vs_) b = std::max(b, denominator_bits(v));
    return b;
  }

 private:
  std::size_t segment_of(const Rational& r) const {
    return std::upper_bound(xs_.begin(), xs_.end(), r) - xs_.begin() - 1;
  }

  std::pair<Rational, Rational> right_end(std::size_t i) const {
    if (i + 1 < size()) return {xs_[i + 1], vs_[i + 1]};
    return {Rational(1), vs_[0] + 1};
  }

  void prune_collinear() {
    if (size() <= 1) return;
    std::vector<Rational> xs{xs_[0]}, vs{vs_[0]};
    for (std::size_t i = 1; i < size(); ++i) {
      const auto [xn, vn] = right_end(i);
      const Rational in = (vs_[i] - vs.back()) / (xs_[i] - xs.back());
      const Rational out = (vn - vs_[i]) / (xn - xs_[i]);
      if (in != out) {
        xs.push_back(xs_[i]);
        vs.push_back(vs_[i]);
      }
    }
    xs_ = std::move(xs);
    vs_ = std::move(vs);
  }

  std::vector<Rational> xs_;
  std::vector<Rational> vs_;
};

inline nlohmann::json to_json(const PLLift& f) {
  nlohmann::json j;
  j["type"] = "pl";
  auto& bp = j["breakpoints"] = nlohmann::json::array();
  auto& vl = j["values"] = nlohmann::json::array();
  for (const auto& x : f.breakpoints()) bp.push_back(to_string(x));
  for (const auto& v : f.values()) vl.push_back(to_string(v));
  return j;
}

/// Parses {"type":"pl","breakpoints":[...],"values":[...]}; rationals are
/// strings "p/q". Structural problems raise parse_error, broken invariants
/// raise invariant_error.
inline PLLift pl_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("type") || j["type"] != "pl") throw parse_error("expected an object with type \"pl\"");
  if (!j.contains("breakpoints") || !j.contains("values") || !j["breakpoints"].is_array() || !j["values"].is_array()) {
    throw parse_error("pl element needs array fields 'breakpoints' and 'values'");
  }
  auto read = [](const nlohmann::json& arr) {
    std::vector<Rational> out;
    for (const auto& e : arr) {
      if (e.is_string()) {
        out.push_back(parse_rational(e.get<std::string>()));
      } else if (e.is_number_integer()) {
        out.emplace_back(Integer(e.get<long long>()));
      } else {
        throw parse_error("rationals must be strings \"p/q\" or integers");
      }
    }
    return out;
  };
  return PLLift::from_points(read(j["breakpoints"]), read(j["values"]));
}

}  // namespace ordcover::circle
