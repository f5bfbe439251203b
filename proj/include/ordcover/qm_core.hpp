#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ordcover/enclosure.hpp"
#include "ordcover/errors.hpp"
#include "ordcover/parallel.hpp"
#include "ordcover/random.hpp"

namespace ordcover {

/// A group with a quasimorphism enclosure and certified order predicates.
template <class G>
concept GroupOracle = requires(const G& o, const typename G::element_type& g, Rng& rng, std::uint64_t n) {
  typename G::element_type;
  { o.identity() } -> std::convertible_to<typename G::element_type>;
  { o.mul(g, g) } -> std::convertible_to<typename G::element_type>;
  { o.inv(g) } -> std::convertible_to<typename G::element_type>;
  { o.equal(g, g) } -> std::convertible_to<bool>;
  { o.is_identity(g) } -> std::convertible_to<bool>;
  { o.qm_enclosure(g, n) } -> std::convertible_to<Enclosure>;
  { o.positive(g) } -> std::convertible_to<Verdict>;
  { o.strictly_positive(g) } -> std::convertible_to<Verdict>;
  { o.sample(rng) } -> std::convertible_to<typename G::element_type>;
  { o.sample_positive(rng) } -> std::convertible_to<typename G::element_type>;
  { o.to_json(g) } -> std::convertible_to<nlohmann::json>;
  { G::name() } -> std::convertible_to<std::string>;
};

/// Lower sandwich threshold; the upper one is 0.
struct SandwichConstants {
  double C1 = 1.01;
  double C2 = 0.0;

  static SandwichConstants from_defect_bound(double defect_bound, double margin = 0.01) {
    if (!(defect_bound + margin > 0.0)) throw argument_error("C1 must be positive");
    return {defect_bound + margin, 0.0};
  }
};

// ---------------------------------------------------------------------------
// Quasimorphism checks
// ---------------------------------------------------------------------------

/// Interval coboundary f(gh) - f(g) - f(h).
template <GroupOracle G>
Enclosure coboundary(const G& o, const typename G::element_type& g, const typename G::element_type& h, std::uint64_t n) {
  return o.qm_enclosure(o.mul(g, h), n) - o.qm_enclosure(g, n) - o.qm_enclosure(h, n);
}

/// Enclosure of max |f(gh) - f(g) - f(h)| over the sampled pairs; a lower
/// bound on the defect.
template <GroupOracle G>
Enclosure defect_estimate(const G& o, std::span<const std::pair<typename G::element_type, typename G::element_type>> samples,
                          std::uint64_t n) {
  if (samples.empty()) throw argument_error("defect_estimate needs at least one pair");
  if (n < 1) throw argument_error("precision must be >= 1");
  std::vector<Enclosure> terms(samples.size());
  parallel_for(samples.size(), [&](std::size_t i) { terms[i] = coboundary(o, samples[i].first, samples[i].second, n).abs(); });
  Enclosure out = terms.front();
  for (std::size_t i = 1; i < terms.size(); ++i) out = max(out, terms[i]);
  return out;
}

/// f(g^k) against k f(g) for k = 1..n_max.
template <GroupOracle G>
Verdict homogeneity_check(const G& o, const typename G::element_type& g, int n_max, std::uint64_t n) {
  if (n_max < 2) throw argument_error("homogeneity_check needs n_max >= 2");
  const Enclosure base = o.qm_enclosure(g, n);
  auto power = g;
  for (int k = 1; k <= n_max; ++k) {
    if (k > 1) power = o.mul(power, g);
    const Enclosure lhs = o.qm_enclosure(power, n);
    const Enclosure rhs = base.scaled(k);
    if (!lhs.overlaps(rhs)) return Verdict::no("k = " + std::to_string(k) + ": " + lhs.str() + " vs " + rhs.str());
  }
  return Verdict::yes("homogeneous up to " + std::to_string(n_max));
}

template <GroupOracle G>
Verdict conjugation_invariance_check(const G& o, const typename G::element_type& g, const typename G::element_type& h,
                                     std::uint64_t n) {
  const Enclosure a = o.qm_enclosure(o.mul(o.mul(h, g), o.inv(h)), n);
  const Enclosure b = o.qm_enclosure(g, n);
  return from_bool(a.overlaps(b), "f(hgh^-1) in " + a.str() + ", f(g) in " + b.str());
}

// ---------------------------------------------------------------------------
// Order semigroups
// ---------------------------------------------------------------------------

/// Membership in {f > D(f)} united with {e}.
template <GroupOracle G>
Verdict naive_positive_member(const G& o, const typename G::element_type& g, double defect_bound, std::uint64_t n) {
  if (o.is_identity(g)) return Verdict::yes("identity");
  const Enclosure e = o.qm_enclosure(g, n);
  if (e.strictly_above(defect_bound)) return Verdict::yes("f(g) in " + e.str());
  if (e.strictly_below(defect_bound)) return Verdict::no("f(g) in " + e.str());
  return Verdict::unknown("f(g) in " + e.str() + " straddles the bound");
}

/// Membership in the maximal order semigroup, decided by the geometric
/// criterion g.x >= x.
template <GroupOracle G>
Verdict maximal_member(const G& o, const typename G::element_type& g) {
  return o.positive(g);
}

/// Membership in the dominant set: strict geometric positivity, with the
/// sign of f as fallback and cross-check.
template <GroupOracle G>
Verdict dominant_member(const G& o, const typename G::element_type& g, std::uint64_t n) {
  const Verdict geo = o.strictly_positive(g);
  const Enclosure e = o.qm_enclosure(g, n);
  // Strict positivity forces f > 0; its failure forces f <= 0.
  if ((geo.is_yes() && e.hi() <= 0.0) || (geo.is_no() && e.strictly_above(0.0))) {
    throw invariant_error("geometric verdict '" + geo.certificate + "' contradicts f(g) in " + e.str());
  }
  if (!geo.is_unknown()) return geo;
  if (e.strictly_above(0.0)) return Verdict::yes("f(g) in " + e.str());
  if (e.strictly_below(0.0)) return Verdict::no("f(g) in " + e.str());
  return Verdict::unknown("geometric test undecided and f(g) in " + e.str());
}

/// First trial h with certified f(gh) < f(h), refuting g in the maximal
/// semigroup.
template <GroupOracle G>
std::optional<typename G::element_type> falsify_maximal_formula(const G& o, const typename G::element_type& g,
                                                                 std::span<const typename G::element_type> trials,
                                                                 std::uint64_t n) {
  for (const auto& h : trials) {
    if (o.qm_enclosure(o.mul(g, h), n).hi() < o.qm_enclosure(h, n).lo()) return h;
  }
  return std::nullopt;
}

/// g >= h in the geometric order, i.e. g h^{-1} >= e.
template <GroupOracle G>
Verdict order_geq(const G& o, const typename G::element_type& g, const typename G::element_type& h) {
  return o.positive(o.mul(g, o.inv(h)));
}

enum class Comparison { Geq, Leq, Equal, Incomparable, Unknown };

inline const char* to_string(Comparison c) {
  switch (c) {
    case Comparison::Geq: return "GEQ";
    case Comparison::Leq: return "LEQ";
    case Comparison::Equal: return "EQUAL";
    case Comparison::Incomparable: return "INCOMPARABLE";
    case Comparison::Unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

template <GroupOracle G>
Comparison compare(const G& o, const typename G::element_type& g, const typename G::element_type& h) {
  if (o.equal(g, h)) return Comparison::Equal;
  const Verdict up = order_geq(o, g, h);
  const Verdict down = order_geq(o, h, g);
  if (up.is_yes() && down.is_yes()) return Comparison::Equal;
  if (up.is_yes() && down.is_no()) return Comparison::Geq;
  if (up.is_no() && down.is_yes()) return Comparison::Leq;
  if (up.is_no() && down.is_no()) return Comparison::Incomparable;
  return Comparison::Unknown;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

enum class Status { Pass, Fail, Unknown };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::Unknown: return "unknown";
  }
  return "unknown";
}

inline Status parse_status(const std::string& s) {
  if (s == "pass") return Status::Pass;
  if (s == "fail") return Status::Fail;
  if (s == "unknown") return Status::Unknown;
  throw parse_error("unknown assertion status '" + s + "'");
}

struct Assertion {
  std::string name;
  Status status = Status::Pass;
  std::uint64_t checked = 0;  ///< decided instances
  std::uint64_t unknown = 0;  ///< instances left undecided
  std::uint64_t failed = 0;
  std::optional<nlohmann::json> counterexample;

  double unknown_fraction() const {
    const auto total = checked + unknown;
    return total == 0 ? 0.0 : static_cast<double>(unknown) / static_cast<double>(total);
  }

  bool operator==(const Assertion&) const = default;
};

struct Report {
  std::string suite;
  std::string group;
  std::uint64_t seed = 0;
  std::uint64_t sample_count = 0;
  std::uint64_t precision = 0;
  std::vector<Assertion> assertions;
  /// Suite-specific observations (e.g. observed defect); null when absent.
  nlohmann::json metrics;

  bool passed() const {
    return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.status == Status::Pass; });
  }
  std::uint64_t failures() const {
    std::uint64_t n = 0;
    for (const auto& a : assertions) n += a.failed;
    return n;
  }
  const Assertion* find(const std::string& name) const {
    for (const auto& a : assertions) {
      if (a.name == name) return &a;
    }
    return nullptr;
  }

  bool operator==(const Report&) const = default;
};

inline nlohmann::json to_json(const Report& r) {
  nlohmann::json j;
  j["suite"] = r.suite;
  j["group"] = r.group;
  j["seed"] = r.seed;
  j["sample_count"] = r.sample_count;
  j["precision"] = r.precision;
  j["assertions"] = nlohmann::json::array();
  for (const auto& a : r.assertions) {
    nlohmann::json e{{"name", a.name}, {"status", to_string(a.status)}, {"checked", a.checked}, {"unknown", a.unknown},
                     {"failed", a.failed}};
    if (a.counterexample) e["counterexample"] = *a.counterexample;
    j["assertions"].push_back(std::move(e));
  }
  if (!r.metrics.is_null()) j["metrics"] = r.metrics;
  return j;
}

inline Report report_from_json(const nlohmann::json& j) {
  try {
    Report r;
    r.suite = j.at("suite").get<std::string>();
    r.group = j.value("group", std::string{});
    r.seed = j.at("seed").get<std::uint64_t>();
    r.sample_count = j.at("sample_count").get<std::uint64_t>();
    r.precision = j.at("precision").get<std::uint64_t>();
    for (const auto& e : j.at("assertions")) {
      Assertion a;
      a.name = e.at("name").get<std::string>();
      a.status = parse_status(e.at("status").get<std::string>());
      a.checked = e.value("checked", std::uint64_t{0});
      a.unknown = e.value("unknown", std::uint64_t{0});
      a.failed = e.value("failed", std::uint64_t{0});
      if (e.contains("counterexample")) a.counterexample = e["counterexample"];
      r.assertions.push_back(std::move(a));
    }
    if (j.contains("metrics")) r.metrics = j["metrics"];
    return r;
  } catch (const nlohmann::json::exception& ex) {
    throw parse_error(std::string("malformed report: ") + ex.what());
  }
}

// ---------------------------------------------------------------------------
// Sampled suites
// ---------------------------------------------------------------------------

/// Outcome of one assertion on one sample.
struct Check {
  enum class State { Skipped, Pass, Fail, Unknown } state = State::Skipped;
  nlohmann::json counterexample;

  void pass() {
    if (state == State::Skipped) state = State::Pass;
  }
  void unknown() {
    if (state != State::Fail) state = State::Unknown;
  }
  void fail(nlohmann::json cex) {
    if (state != State::Fail) counterexample = std::move(cex);
    state = State::Fail;
  }
  /// Records a premise-conditional assertion: `holds` decides it.
  void expect(const Verdict& holds, const std::function<nlohmann::json()>& cex) {
    if (holds.is_yes()) {
      pass();
    } else if (holds.is_no()) {
      fail(cex());
    } else {
      unknown();
    }
  }
};

struct SuiteOptions {
  std::uint64_t seed = 42;
  std::uint64_t sample_count = 100;
  std::uint64_t precision = 1u << 12;
  double unknown_ceiling = 0.01;
};

/// Runs `body(index, rng, checks)` for each sample with an independent
/// stream and tallies the per-assertion outcomes in index order. An
/// exception inside one sample marks that sample Unknown for every
/// assertion it had not yet decided.
template <class Body>
Report run_sampled_suite(const std::string& suite, const std::string& group, const std::vector<std::string>& names,
                         const SuiteOptions& opt, Body&& body) {
  if (opt.sample_count < 1) throw argument_error("sample_count must be >= 1");
  if (opt.precision < 1) throw argument_error("precision must be >= 1");
  std::vector<std::vector<Check>> outcomes(opt.sample_count, std::vector<Check>(names.size()));
  parallel_for(opt.sample_count, [&](std::size_t i) {
    Rng rng = split_rng(opt.seed, i);
    auto& checks = outcomes[i];
    try {
      body(i, rng, std::span<Check>(checks));
    } catch (const numeric_instability& ex) {
      for (auto& c : checks) {
        if (c.state == Check::State::Skipped) c.state = Check::State::Unknown;
      }
    }
  });
  Report r{suite, group, opt.seed, opt.sample_count, opt.precision, {}, {}};
  for (std::size_t k = 0; k < names.size(); ++k) {
    Assertion a;
    a.name = names[k];
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      const Check& c = outcomes[i][k];
      switch (c.state) {
        case Check::State::Skipped: break;
        case Check::State::Pass: ++a.checked; break;
        case Check::State::Unknown: ++a.unknown; break;
        case Check::State::Fail:
          ++a.checked;
          ++a.failed;
          if (!a.counterexample) a.counterexample = nlohmann::json{{"sample", i}, {"detail", c.counterexample}};
          break;
      }
    }
    a.status = a.failed > 0 ? Status::Fail : (a.unknown_fraction() > opt.unknown_ceiling ? Status::Unknown : Status::Pass);
    r.assertions.push_back(std::move(a));
  }
  return r;
}

/// Names of the assertions produced by axioms_suite, in report order.
inline const std::vector<std::string>& axiom_names() {
  static const std::vector<std::string> names{
      "group_laws",          "positive_closure",   "pointedness",         "conjugation_stability",
      "multiplicativity",    "naive_in_maximal",   "maximal_formula",     "dominant_in_maximal",
      "dominant_from_sign",  "D1_closure",         "D1_conjugation",      "D2_positive_value",
      "D3_sandwich",         "homogeneity",        "conjugation_invariance"};
  return names;
}

/// Sampled order-semigroup axioms. Per sample it draws two positive
/// elements p, q and two arbitrary elements g, h and checks:
/// group laws; closure of positives; pointedness; conjugation stability;
/// multiplicativity (g1 = p g >= g and h1 = q h >= h imply g1 h1 >= g h);
/// the inclusions naive <= maximal and dominant <= maximal; the sign
/// characterization of dominants; D1-D3 with the given sandwich constant;
/// homogeneity and conjugation invariance of f.
template <GroupOracle G>
Report axioms_suite(const G& o, const SuiteOptions& opt, double defect_bound = 1.0) {
  using E = typename G::element_type;
  const SandwichConstants sw = SandwichConstants::from_defect_bound(defect_bound);
  const std::uint64_t n = opt.precision;
  return run_sampled_suite("axioms", G::name(), axiom_names(), opt, [&](std::size_t, Rng& rng, std::span<Check> c) {
    const E p = o.sample_positive(rng);
    const E q = o.sample_positive(rng);
    const E g = o.sample(rng);
    const E h = o.sample(rng);
    auto js = [&](std::initializer_list<std::pair<const char*, const E*>> items) {
      nlohmann::json j;
      for (const auto& [k, v] : items) j[k] = o.to_json(*v);
      return j;
    };

    // group laws
    {
      const bool assoc = o.equal(o.mul(o.mul(g, h), p), o.mul(g, o.mul(h, p)));
      const bool unit = o.equal(o.mul(g, o.identity()), g) && o.equal(o.mul(o.identity(), g), g);
      const bool inverse = o.is_identity(o.mul(g, o.inv(g))) && o.is_identity(o.mul(o.inv(g), g));
      if (assoc && unit && inverse) {
        c[0].pass();
      } else {
        c[0].fail(js({{"g", &g}, {"h", &h}, {"p", &p}}));
      }
    }

    const Verdict pos_p = o.positive(p), pos_q = o.positive(q);
    const Verdict pos_g = o.positive(g);

    // closure
    if (pos_p.is_yes() && pos_q.is_yes()) {
      c[1].expect(o.positive(o.mul(p, q)), [&] { return js({{"p", &p}, {"q", &q}}); });
    } else {
      c[1].unknown();
    }

    // pointedness
    for (const E* x : {&g, &p}) {
      if (o.is_identity(*x)) continue;
      const Verdict a = o.positive(*x);
      if (a.is_no()) {
        c[2].pass();
        continue;
      }
      const Verdict b = o.positive(o.inv(*x));
      if (a.is_yes() && b.is_yes()) {
        c[2].fail(js({{"x", x}}));
      } else if (b.is_no()) {
        c[2].pass();
      } else {
        c[2].unknown();
      }
    }

    // conjugation stability
    if (pos_p.is_yes()) {
      c[3].expect(o.positive(o.mul(o.mul(h, p), o.inv(h))), [&] { return js({{"p", &p}, {"h", &h}}); });
    }

    // multiplicativity
    if (pos_p.is_yes() && pos_q.is_yes()) {
      const E g1 = o.mul(p, g), h1 = o.mul(q, h);
      c[4].expect(order_geq(o, o.mul(g1, h1), o.mul(g, h)), [&] { return js({{"p", &p}, {"q", &q}, {"g", &g}, {"h", &h}}); });
    }

    // naive semigroup inside the maximal one
    for (const E* x : {&g, &h, &p}) {
      const Verdict naive = naive_positive_member(o, *x, defect_bound, n);
      if (naive.is_yes()) c[5].expect(maximal_member(o, *x), [&] { return js({{"x", x}}); });
    }

    // no refutation of the maximal formula for maximal members
    if (pos_p.is_yes()) {
      const std::vector<E> trials{o.identity(), g, h, q};
      if (auto w = falsify_maximal_formula<G>(o, p, trials, n)) {
        c[6].fail(js({{"g", &p}, {"h", &*w}}));
      } else {
        c[6].pass();
      }
    }

    // dominants
    for (const E* x : {&g, &p, &q}) {
      const Verdict dom = dominant_member(o, *x, n);
      if (dom.is_yes()) c[7].expect(maximal_member(o, *x), [&] { return js({{"x", x}}); });
      const Verdict maxv = x == &g ? pos_g : (x == &p ? pos_p : pos_q);
      const Enclosure e = o.qm_enclosure(*x, n);
      if (maxv.is_yes() && e.strictly_above(0.0)) {
        if (dom.is_no()) {
          c[8].fail(js({{"x", x}}));
        } else if (dom.is_yes()) {
          c[8].pass();
        } else {
          c[8].unknown();
        }
      }
      // D2
      if (dom.is_yes()) {
        if (e.hi() <= 0.0) {
          c[11].fail(js({{"x", x}}));
        } else {
          c[11].pass();
        }
      }
      // D3
      if (e.at_least(sw.C1)) {
        if (dom.is_no()) {
          c[12].fail(js({{"x", x}}));
        } else if (dom.is_yes()) {
          c[12].pass();
        } else {
          c[12].unknown();
        }
      }
    }

    // D1
    const Verdict dom_p = dominant_member(o, p, n), dom_q = dominant_member(o, q, n);
    if (dom_p.is_yes() && dom_q.is_yes()) {
      const Verdict prod = dominant_member(o, o.mul(p, q), n);
      if (prod.is_no()) {
        c[9].fail(js({{"p", &p}, {"q", &q}}));
      } else if (prod.is_yes()) {
        c[9].pass();
      } else {
        c[9].unknown();
      }
    }
    if (dom_p.is_yes()) {
      const Verdict conj = dominant_member(o, o.mul(o.mul(h, p), o.inv(h)), n);
      if (conj.is_no()) {
        c[10].fail(js({{"p", &p}, {"h", &h}}));
      } else if (conj.is_yes()) {
        c[10].pass();
      } else {
        c[10].unknown();
      }
    }

    c[13].expect(homogeneity_check(o, g, 4, n), [&] { return js({{"g", &g}}); });
    c[14].expect(conjugation_invariance_check(o, g, h, n), [&] { return js({{"g", &g}, {"h", &h}}); });
  });
}

}  // namespace ordcover
