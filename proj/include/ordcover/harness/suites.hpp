#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ordcover/circle/circle_group.hpp"
#include "ordcover/errors.hpp"
#include "ordcover/qm_core.hpp"
#include "ordcover/sl2/sl2_cover.hpp"

namespace ordcover::harness {

struct SuiteConfig {
  std::string group = "circle";  ///< circle | sl2
  std::string suite = "axioms";  ///< axioms | dominants | coincidence | trichotomy | wedge | defect
  std::uint64_t sample_count = 100;
  std::uint64_t seed = 42;
  std::uint64_t precision = 1u << 12;
  std::size_t budget = sl2::kDefaultBudget;
  double unknown_ceiling = 0.01;
  double defect_bound = 1.0;
  std::string output;

  void validate() const {
    if (group != "circle" && group != "sl2") throw argument_error("unknown group '" + group + "'");
    static const std::array<const char*, 6> suites{"axioms", "dominants", "coincidence", "trichotomy", "wedge", "defect"};
    if (std::find(suites.begin(), suites.end(), suite) == suites.end()) throw argument_error("unknown suite '" + suite + "'");
    if (group == "circle" && (suite == "trichotomy" || suite == "wedge")) {
      throw argument_error("suite '" + suite + "' is only defined for sl2");
    }
    if (sample_count < 1) throw argument_error("sample_count must be >= 1");
    if (precision < 1) throw argument_error("precision must be >= 1");
    if (budget < 64) throw argument_error("budget must be >= 64");
    if (!(unknown_ceiling >= 0.0 && unknown_ceiling <= 1.0)) throw argument_error("unknown ceiling must lie in [0, 1]");
  }

  SuiteOptions options() const { return {seed, sample_count, precision, unknown_ceiling}; }
};

inline SuiteConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw parse_error("config must be a JSON object");
  SuiteConfig c;
  try {
    if (!j.contains("seed")) throw argument_error("config must set 'seed'");
    c.group = j.value("group", c.group);
    c.suite = j.value("suite", c.suite);
    c.sample_count = j.value("sample_count", c.sample_count);
    c.seed = j.at("seed").get<std::uint64_t>();
    c.precision = j.value("precision", c.precision);
    c.budget = j.value("budget", c.budget);
    c.unknown_ceiling = j.value("unknown_ceiling", c.unknown_ceiling);
    c.defect_bound = j.value("defect_bound", c.defect_bound);
    c.output = j.value("output", c.output);
  } catch (const nlohmann::json::exception& ex) {
    throw argument_error(std::string("invalid config: ") + ex.what());
  }
  return c;
}

// ---------------------------------------------------------------------------
// Circle suites
// ---------------------------------------------------------------------------

/// Sampling used by the circle dynamics suites: up to four breakpoints with
/// denominators at most 12, so nonzero minimum displacements are far from 0.
inline circle::PLLift circle_suite_sample(Rng& rng) {
  const int k = static_cast<int>(uniform_int(rng, 1, 4));
  return circle::random_pl(rng, {k, 12, 1});
}

/// Strict positivity against the sign of T, and fixed points against T = 0.
/// Enclosures are refined by doubling n up to `precision`.
inline Report circle_dominants_suite(const SuiteOptions& opt) {
  const std::vector<std::string> names{"strict_iff_T_positive", "fixed_point_forces_T_zero", "poincare_dichotomy"};
  const Rational cutoff = make_rational(-1, 1 << 20);
  return run_sampled_suite("dominants", "circle", names, opt, [&](std::size_t, Rng& rng, std::span<Check> c) {
    const circle::PLLift f = circle_suite_sample(rng);
    const Verdict strict = circle::geometric_positive(f, true);
    const Verdict fixed = circle::has_fixed_point(f);
    const Rational m = f.min_delta().first;
    bool above = false, excludes_zero = false, all_contain_zero = true;
    circle::Orbit orbit(f);
    for (std::uint64_t n = std::min<std::uint64_t>(16, opt.precision);; n = std::min(2 * n, opt.precision)) {
      orbit.advance(n - orbit.steps());
      const Enclosure e = orbit.enclosure();
      above = above || e.strictly_above(0.0);
      excludes_zero = excludes_zero || !e.contains(Rational(0));
      all_contain_zero = all_contain_zero && e.contains(Rational(0));
      if (above || n >= opt.precision) break;
      if (fixed.is_yes() && n >= 1024) break;
    }
    auto cex = [&] { return nlohmann::json{{"f", circle::to_json(f)}, {"strict", to_string(strict.state)}}; };
    if (m <= cutoff || m > 0) {
      if (strict.is_yes() == above) {
        c[0].pass();
      } else {
        c[0].fail(cex());
      }
    }
    if (fixed.is_yes()) {
      if (all_contain_zero) {
        c[1].pass();
      } else {
        c[1].fail(cex());
      }
    }
    if (fixed.is_yes() && excludes_zero) {
      c[2].fail(cex());
    } else if (fixed.is_yes() || excludes_zero) {
      c[2].pass();
    } else {
      c[2].unknown();
    }
  });
}

/// The constructive refutation: for g not positive, h = g^-1 tau_eps g is
/// dominant while gh is not. Also checks that positive g admit no
/// refutation among random trials.
inline Report circle_coincidence_suite(const SuiteOptions& opt) {
  const std::vector<std::string> names{"witness_h_dominant", "witness_gh_not_dominant", "positive_not_refuted"};
  const circle::CircleGroup group;
  return run_sampled_suite("coincidence", "circle", names, opt, [&](std::size_t, Rng& rng, std::span<Check> c) {
    circle::PLLift g = circle_suite_sample(rng);
    while (g.min_delta().first >= 0) g = circle_suite_sample(rng);
    const Rational eps = -g.min_delta().first / 2;
    const auto w = circle::witness_nonmaximal(g, eps);
    auto cex = [&] { return nlohmann::json{{"g", circle::to_json(g)}, {"epsilon", to_string(eps)}}; };
    if (circle::geometric_positive(w.h, true).is_yes()) {
      c[0].pass();
    } else {
      c[0].fail(cex());
    }
    if (circle::geometric_positive(w.gh, true).is_no()) {
      c[1].pass();
    } else {
      c[1].fail(cex());
    }
    const circle::PLLift p = group.sample_positive(rng);
    std::vector<circle::PLLift> trials{group.identity()};
    for (int i = 0; i < 4; ++i) trials.push_back(group.sample(rng));
    if (falsify_maximal_formula<circle::CircleGroup>(group, p, trials, opt.precision)) {
      c[2].fail(nlohmann::json{{"g", circle::to_json(p)}});
    } else {
      c[2].pass();
    }
  });
}

// ---------------------------------------------------------------------------
// Defect
// ---------------------------------------------------------------------------

/// Sampled defect of f. Every pair is evaluated at n = min(precision, 2^12)
/// and re-evaluated at `precision` when its upper end exceeds the bound.
/// Metrics record the largest midpoint and the largest certified lower end.
template <GroupOracle G>
Report defect_suite(const G& o, const SuiteOptions& opt, double defect_bound) {
  using E = typename G::element_type;
  const std::uint64_t coarse = std::min<std::uint64_t>(opt.precision, 1u << 12);
  std::vector<Enclosure> terms(opt.sample_count);
  std::vector<std::pair<E, E>> pairs(opt.sample_count);
  std::vector<char> unstable(opt.sample_count, 0);
  parallel_for(opt.sample_count, [&](std::size_t i) {
    Rng rng = split_rng(opt.seed, i);
    pairs[i] = {o.sample(rng), o.sample(rng)};
    try {
      terms[i] = coboundary(o, pairs[i].first, pairs[i].second, coarse).abs();
      if (terms[i].hi() > defect_bound && coarse < opt.precision) {
        terms[i] = coboundary(o, pairs[i].first, pairs[i].second, opt.precision).abs();
      }
    } catch (const numeric_instability&) {
      unstable[i] = 1;
    }
  });
  Report r{"defect", G::name(), opt.seed, opt.sample_count, opt.precision, {}, {}};
  Assertion a{"defect_within_bound"};
  double max_mid = 0.0, max_lo = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (unstable[i]) {
      ++a.unknown;
      continue;
    }
    ++a.checked;
    max_mid = std::max(max_mid, terms[i].mid());
    max_lo = std::max(max_lo, terms[i].lo());
    if (terms[i].lo() > defect_bound) {
      ++a.failed;
      if (!a.counterexample) {
        a.counterexample = nlohmann::json{{"sample", i},
                                          {"g", o.to_json(pairs[i].first)},
                                          {"h", o.to_json(pairs[i].second)},
                                          {"coboundary", terms[i].str()}};
      }
    }
  }
  a.status = a.failed > 0 ? Status::Fail : (a.unknown_fraction() > opt.unknown_ceiling ? Status::Unknown : Status::Pass);
  r.assertions.push_back(a);
  Assertion b{"observed_max_within_budget"};
  b.checked = 1;
  // Midpoints carry at most three half-widths of error.
  if (max_mid > defect_bound + 4.0 / static_cast<double>(opt.precision)) {
    b.failed = 1;
    b.status = Status::Fail;
    b.counterexample = nlohmann::json{{"observed_max", max_mid}};
  }
  r.assertions.push_back(b);
  r.metrics = {{"observed_max", max_mid}, {"observed_lower_bound", max_lo}, {"coarse_precision", coarse}};
  return r;
}

// ---------------------------------------------------------------------------
// SL2 suites
// ---------------------------------------------------------------------------

inline sl2::CoverElement sl2_suite_sample(Rng& rng) {
  return sl2::random_cover_element(rng, static_cast<sl2::ElementClass>(uniform_int(rng, 0, 3)), 2);
}

/// Some g^k (k <= 8) strictly positive iff the mu-enclosure lies above 0,
/// on samples where mu excludes 0 or a fixed point is certified.
inline Report sl2_dominants_suite(const SuiteOptions& opt, std::size_t budget) {
  const std::vector<std::string> names{"dominance_equivalence"};
  return run_sampled_suite("dominants", "sl2", names, opt, [&](std::size_t, Rng& rng, std::span<Check> c) {
    const sl2::CoverElement g = sl2_suite_sample(rng);
    const Enclosure mu = sl2::gw_mu(g, opt.precision);
    const Verdict fixed = sl2::has_fixed_point(g, budget);
    if (!(mu.strictly_above(0.0) || mu.strictly_below(0.0) || fixed.is_yes())) {
      c[0].unknown();
      return;
    }
    Verdict some_power = Verdict::no();
    sl2::CoverElement power;
    for (int k = 1; k <= 8 && !some_power.is_yes(); ++k) {
      power = sl2::mul(power, g);
      const Verdict v = sl2::geometric_positive(power, true, budget);
      if (v.is_yes()) some_power = v;
      if (v.is_unknown()) some_power = v;
    }
    if (some_power.is_unknown()) {
      c[0].unknown();
    } else if (some_power.is_yes() == mu.strictly_above(0.0)) {
      c[0].pass();
    } else {
      c[0].fail(nlohmann::json{{"g", sl2::to_json(g)}, {"mu", mu.str()}, {"power_positive", to_string(some_power.state)}});
    }
  });
}

/// Random product of one to six exponentials of cone-interior elements
/// with t in (0, 2].
inline sl2::CoverElement random_cone_product(Rng& rng) {
  const auto factors = uniform_int(rng, 1, 6);
  sl2::CoverElement g;
  for (long long i = 0; i < factors; ++i) {
    const double t = 2.0 - uniform(rng, 0.0, 2.0);  // (0, 2]
    g = sl2::mul(g, sl2::exp_cover(sl2::random_cone_element(rng), t));
  }
  return g;
}

/// Products of cone exponentials are positive; the homogenized Iwasawa
/// coordinate agrees with the translation number.
inline Report sl2_coincidence_suite(const SuiteOptions& opt, std::size_t budget) {
  const std::vector<std::string> names{"cone_products_positive", "mu_equals_T"};
  return run_sampled_suite("coincidence", "sl2", names, opt, [&](std::size_t, Rng& rng, std::span<Check> c) {
    const sl2::CoverElement p = random_cone_product(rng);
    c[0].expect(sl2::geometric_positive(p, false, budget), [&] { return nlohmann::json{{"g", sl2::to_json(p)}}; });
    const sl2::CoverElement g = sl2_suite_sample(rng);
    const Enclosure mu = sl2::gw_mu(g, opt.precision);
    const Enclosure t = sl2::translation_number_enclosure(g, opt.precision);
    if (std::abs(mu.mid() - t.mid()) <= 0x1p-10 + mu.width() + t.width()) {
      c[1].pass();
    } else {
      c[1].fail(nlohmann::json{{"g", sl2::to_json(g)}, {"mu", mu.str()}, {"T", t.str()}});
    }
  });
}

inline Report sl2_trichotomy_suite(const SuiteOptions& opt, std::size_t budget) {
  const std::vector<std::string> names{"some_flag_yes"};
  return run_sampled_suite("trichotomy", "sl2", names, opt, [&](std::size_t, Rng& rng, std::span<Check> c) {
    const sl2::CoverElement g = sl2_suite_sample(rng);
    const sl2::Classification cls = sl2::hilgert_hofmann_classify(g, budget);
    if (cls.covered()) {
      c[0].pass();
    } else if (cls.in_pos_interior.is_no() && cls.in_neg_interior.is_no() && cls.in_exp_image.is_no()) {
      c[0].fail(nlohmann::json{{"g", sl2::to_json(g)}});
    } else {
      c[0].unknown();
    }
  });
}

/// Random X with entries in [-1, 1] and |min E| > margin.
inline sl2::LieAlgebraElement random_decided_lie_element(Rng& rng, double margin = 1e-6) {
  for (;;) {
    const sl2::LieAlgebraElement X = sl2::random_lie_element(rng);
    if (std::abs(X.field().minimum()) > margin) return X;
  }
}

/// Cone membership against the sampled Lie wedge, and the boundary field
/// against finite differences of the flow.
inline Report sl2_wedge_suite(const SuiteOptions& opt, std::size_t budget) {
  const std::vector<std::string> names{"cone_equals_wedge", "field_matches_flow"};
  static constexpr std::array<double, 3> ts{0.1, 1.0, 3.0};
  return run_sampled_suite("wedge", "sl2", names, opt, [&](std::size_t, Rng& rng, std::span<Check> c) {
    const sl2::LieAlgebraElement X = random_decided_lie_element(rng);
    const sl2::WedgeResult w = sl2::wedge_member(X, ts, budget);
    auto cex = [&] {
      return nlohmann::json{{"X", {X.a, X.b, X.c}}, {"wedge", to_string(w.verdict.state)}, {"cone", to_string(w.cone.state)}};
    };
    if (w.verdict.is_unknown() || w.cone.is_unknown()) {
      c[0].unknown();
    } else if (w.agrees) {
      c[0].pass();
    } else {
      c[0].fail(cex());
    }
    constexpr double h = 1e-6;
    const sl2::CoverElement flow = sl2::exp_cover(X, h);
    const sl2::BoundaryVectorField field = X.field();
    double worst = 0.0;
    for (int j = 0; j < 100; ++j) {
      const double x = j / 100.0;
      worst = std::max(worst, std::abs(field.velocity(x) - flow.displacement(x) / h));
    }
    if (worst <= 1e-5) {
      c[1].pass();
    } else {
      c[1].fail(nlohmann::json{{"X", {X.a, X.b, X.c}}, {"max_error", worst}});
    }
  });
}

/// Runs the configured suite.
inline Report run_suite(const SuiteConfig& cfg) {
  cfg.validate();
  const SuiteOptions opt = cfg.options();
  if (cfg.group == "circle") {
    const circle::CircleGroup group;
    if (cfg.suite == "axioms") return axioms_suite(group, opt, cfg.defect_bound);
    if (cfg.suite == "dominants") return circle_dominants_suite(opt);
    if (cfg.suite == "coincidence") return circle_coincidence_suite(opt);
    return defect_suite(group, opt, cfg.defect_bound);
  }
  const sl2::CoverGroup group(cfg.budget);
  if (cfg.suite == "axioms") return axioms_suite(group, opt, cfg.defect_bound);
  if (cfg.suite == "dominants") return sl2_dominants_suite(opt, cfg.budget);
  if (cfg.suite == "coincidence") return sl2_coincidence_suite(opt, cfg.budget);
  if (cfg.suite == "trichotomy") return sl2_trichotomy_suite(opt, cfg.budget);
  if (cfg.suite == "wedge") return sl2_wedge_suite(opt, cfg.budget);
  return defect_suite(group, opt, cfg.defect_bound);
}

}  // namespace ordcover::harness
