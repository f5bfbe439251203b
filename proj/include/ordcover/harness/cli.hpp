#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ordcover/circle/circle_group.hpp"
#include "ordcover/errors.hpp"
#include "ordcover/harness/suites.hpp"
#include "ordcover/qm_core.hpp"
#include "ordcover/sl2/sl2_cover.hpp"

namespace ordcover::harness {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int property_failure = 1;
inline constexpr int usage = 2;
inline constexpr int io = 3;
}  // namespace exit_code

/// Raised for unreadable inputs and unwritable outputs.
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Element = std::variant<circle::PLLift, sl2::CoverElement>;

inline std::string group_of(const Element& e) { return std::holds_alternative<circle::PLLift>(e) ? "circle" : "sl2"; }

inline Element element_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) throw parse_error("element needs a string 'type'");
  const auto type = j["type"].get<std::string>();
  if (type == "pl") return circle::pl_from_json(j);
  if (type == "sl2cover") return sl2::cover_from_json(j);
  throw parse_error("unknown element type '" + type + "'");
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot read '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Reads an element from a file, or parses the argument itself when it is
/// inline JSON.
inline Element load_element(const std::string& arg) {
  const auto first = arg.find_first_not_of(" \t\r\n");
  const std::string text = first != std::string::npos && arg[first] == '{' ? arg : read_file(arg);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& ex) {
    throw parse_error(std::string("malformed JSON: ") + ex.what());
  }
  return element_from_json(j);
}

/// Writes to `path`, or to `fallback` when the path is empty.
inline void emit(const std::string& path, const std::string& text, std::ostream& fallback) {
  if (path.empty()) {
    fallback << text;
    return;
  }
  std::ofstream f(path);
  if (!f || !(f << text) || !f.flush()) throw io_error("cannot write '" + path + "'");
}

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct GlobalOptions {
  std::uint64_t seed = 42;
  std::uint64_t precision = 1u << 12;
  std::size_t budget = sl2::kDefaultBudget;
  std::string output;
  std::string format;
};

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

struct GenOptions {
  std::string group;
  std::string cls = "product";
  int k = 3;
  long long denominator_bound = 16;
  std::int64_t winding_range = 2;
  std::uint64_t count = 1;
};

inline int cmd_gen(const GlobalOptions& g, const GenOptions& o, std::ostream& out) {
  if (o.count < 1) throw argument_error("count must be >= 1");
  if (o.group == "circle" && o.k < 1) throw argument_error("k must be >= 1");
  std::optional<sl2::ElementClass> cls;
  if (o.group == "sl2") {
    cls = sl2::parse_element_class(o.cls);
    if (!cls) throw argument_error("invalid class '" + o.cls + "'");
  }
  std::vector<nlohmann::json> items;
  for (std::uint64_t i = 0; i < o.count; ++i) {
    Rng rng = split_rng(g.seed, i);
    if (o.group == "circle") {
      items.push_back(circle::to_json(circle::random_pl(rng, {o.k, o.denominator_bound, 1})));
    } else {
      items.push_back(sl2::to_json(sl2::random_cover_element(rng, *cls, o.winding_range)));
    }
  }
  if (g.output.empty()) {
    for (const auto& j : items) out << j.dump() << "\n";
    return exit_code::ok;
  }
  std::error_code ec;
  std::filesystem::create_directories(g.output, ec);
  if (ec) throw io_error("cannot create directory '" + g.output + "'");
  for (std::size_t i = 0; i < items.size(); ++i) {
    char name[48];
    std::snprintf(name, sizeof name, "element_%04zu.json", i);
    emit((std::filesystem::path(g.output) / name).string(), items[i].dump(2) + "\n", out);
  }
  out << "wrote " << items.size() << " elements to " << g.output << "\n";
  return exit_code::ok;
}

// ---------------------------------------------------------------------------
// tnum
// ---------------------------------------------------------------------------

inline int cmd_tnum(const GlobalOptions& g, const std::string& arg, std::ostream& out) {
  const Element e = load_element(arg);
  const Enclosure enc = std::visit(
      [&](const auto& x) -> Enclosure {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, circle::PLLift>) {
          return circle::translation_number_enclosure(x, g.precision);
        } else {
          return sl2::translation_number_enclosure(x, g.precision);
        }
      },
      e);
  std::string text;
  if (g.format == "json") {
    nlohmann::json j{{"lo", enc.lo()}, {"hi", enc.hi()}, {"precision", g.precision}};
    if (enc.is_exact()) j["exact"] = {to_string(enc.exact_lo()), to_string(enc.exact_hi())};
    text = j.dump() + "\n";
  } else {
    text = format_double(enc.lo()) + " " + format_double(enc.hi()) + "\n";
    if (enc.is_exact()) text += to_string(enc.exact_lo()) + " " + to_string(enc.exact_hi()) + "\n";
  }
  emit(g.output, text, out);
  return exit_code::ok;
}

// ---------------------------------------------------------------------------
// order
// ---------------------------------------------------------------------------

inline int cmd_order(const GlobalOptions& g, const std::string& a, const std::string& b, std::ostream& out) {
  const Element x = load_element(a);
  const Element y = load_element(b);
  if (x.index() != y.index()) throw argument_error("elements belong to different groups");
  Comparison c;
  if (const auto* f = std::get_if<circle::PLLift>(&x)) {
    c = compare(circle::CircleGroup{}, *f, std::get<circle::PLLift>(y));
  } else {
    c = compare(sl2::CoverGroup{g.budget}, std::get<sl2::CoverElement>(x), std::get<sl2::CoverElement>(y));
  }
  emit(g.output, std::string(to_string(c)) + "\n", out);
  return exit_code::ok;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

inline int cmd_verify(const SuiteConfig& cfg, std::ostream& out) {
  cfg.validate();
  const Report r = run_suite(cfg);
  const std::string text = to_json(r).dump(2) + "\n";
  if (cfg.output.empty()) {
    out << text;
  } else {
    emit(cfg.output, text, out);
    for (const auto& a : r.assertions) {
      out << a.name << ": " << to_string(a.status) << " (" << a.checked << " checked, " << a.unknown << " unknown)\n";
    }
  }
  return r.passed() ? exit_code::ok : exit_code::property_failure;
}

// ---------------------------------------------------------------------------
// scan
// ---------------------------------------------------------------------------

struct ScanSpec {
  std::string family = "elliptic";  ///< elliptic | hyperbolic | parabolic
  int resolution = 16;              ///< points along the family parameter
  int resolution2 = 3;              ///< points along the conjugation scale
  double scale = 0.75;              ///< conjugation scale range [-scale, scale]
  std::int64_t winding_min = -1;
  std::int64_t winding_max = 1;

  void validate() const {
    if (family != "elliptic" && family != "hyperbolic" && family != "parabolic") {
      throw argument_error("unknown family '" + family + "'");
    }
    if (resolution < 2 || resolution2 < 2) throw argument_error("resolution must be >= 2 per axis");
    if (winding_min > winding_max) throw argument_error("winding range is empty");
    if (!(scale >= 0.0) || !std::isfinite(scale)) throw argument_error("scale must be finite and >= 0");
  }

  /// Family parameter i of `resolution`: rotation angle in (0, pi), log of
  /// the hyperbolic eigenvalue in [0.1, 1.2], or parabolic shear in (-2, 2).
  double param1(int i) const {
    const double r = resolution;
    if (family == "elliptic") return std::numbers::pi * (i + 0.5) / r;
    if (family == "hyperbolic") return 0.1 + 1.1 * i / (r - 1.0);
    return -2.0 + 4.0 * (i + 0.5) / r;
  }

  double param2(int j) const { return -scale + 2.0 * scale * j / (resolution2 - 1.0); }

  sl2::ProjectiveMatrix representative(double p1) const {
    if (family == "elliptic") return sl2::ProjectiveMatrix::rotation(p1);
    if (family == "hyperbolic") return {std::exp(p1), 0.0, 0.0, std::exp(-p1)};
    return {1.0, p1, 0.0, 1.0};
  }
};

struct ScanRow {
  double param1, param2;
  std::int64_t winding;
  double mu_mid;
  sl2::Classification flags;
};

inline std::vector<ScanRow> run_scan(const ScanSpec& s, std::uint64_t precision, std::size_t budget) {
  s.validate();
  std::vector<ScanRow> rows;
  for (std::int64_t w = s.winding_min; w <= s.winding_max; ++w) {
    for (int j = 0; j < s.resolution2; ++j) {
      for (int i = 0; i < s.resolution; ++i) {
        rows.push_back({s.param1(i), s.param2(j), w, 0.0, {}});
      }
    }
  }
  parallel_for(rows.size(), [&](std::size_t k) {
    ScanRow& row = rows[k];
    const sl2::ProjectiveMatrix conj(std::exp(row.param2), 0.0, 0.0, std::exp(-row.param2));
    const sl2::CoverElement g(conj * s.representative(row.param1) * conj.inverse(), row.winding);
    row.mu_mid = sl2::gw_mu(g, precision).mid();
    row.flags = sl2::hilgert_hofmann_classify(g, budget);
  });
  return rows;
}

inline int cmd_scan(const GlobalOptions& g, const ScanSpec& s, std::ostream& out) {
  const auto rows = run_scan(s, g.precision, g.budget);
  std::ostringstream text;
  if (g.format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
      arr.push_back({{"param1", r.param1},
                     {"param2", r.param2},
                     {"winding", r.winding},
                     {"mu_mid", r.mu_mid},
                     {"pos_flag", to_string(r.flags.in_pos_interior.state)},
                     {"neg_flag", to_string(r.flags.in_neg_interior.state)},
                     {"exp_flag", to_string(r.flags.in_exp_image.state)}});
    }
    text << arr.dump(2) << "\n";
  } else {
    text << "param1,param2,winding,mu_mid,pos_flag,neg_flag,exp_flag\n";
    for (const auto& r : rows) {
      text << format_double(r.param1) << ',' << format_double(r.param2) << ',' << r.winding << ',' << format_double(r.mu_mid)
           << ',' << to_string(r.flags.in_pos_interior.state) << ',' << to_string(r.flags.in_neg_interior.state) << ','
           << to_string(r.flags.in_exp_image.state) << '\n';
    }
  }
  emit(g.output, text.str(), out);
  return exit_code::ok;
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

/// Runs the command line `args` (without the program name). Returns the
/// process exit code; all output goes to `out` and diagnostics to `err`.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quasimorphisms and bi-invariant orders on circle and SL2 covers", "ordcover"};
  app.require_subcommand(1);

  GlobalOptions global;
  CLI::Option* seed_opt = app.add_option("--seed", global.seed, "Random seed")->capture_default_str();
  app.add_option("--precision", global.precision, "Iteration count n for enclosures")->capture_default_str();
  app.add_option("--budget", global.budget, "Grid-refinement cap for certified minimization")->capture_default_str();
  app.add_option("--output", global.output, "Output file (directory for gen)");
  app.add_option("--format", global.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.fallthrough();

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate random elements");
  gen_cmd->add_option("--group", gen.group, "circle or sl2")->required()->check(CLI::IsMember({"circle", "sl2"}));
  gen_cmd->add_option("--class", gen.cls, "sl2 class: elliptic, parabolic, hyperbolic, product")->capture_default_str();
  gen_cmd->add_option("--k", gen.k, "circle: breakpoint count")->capture_default_str();
  gen_cmd->add_option("--denominator-bound", gen.denominator_bound, "circle: largest denominator")->capture_default_str();
  gen_cmd->add_option("--winding-range", gen.winding_range, "sl2: windings drawn from [-r, r]")->capture_default_str();
  gen_cmd->add_option("--count", gen.count, "Number of elements")->capture_default_str();

  std::string tnum_arg;
  auto* tnum_cmd = app.add_subcommand("tnum", "Translation-number enclosure of an element");
  tnum_cmd->add_option("element", tnum_arg, "Element file or inline JSON")->required();

  std::string order_g, order_h;
  auto* order_cmd = app.add_subcommand("order", "Compare two elements in the geometric order");
  order_cmd->add_option("first", order_g, "First element (file or inline JSON)")->required();
  order_cmd->add_option("second", order_h, "Second element (file or inline JSON)")->required();

  SuiteConfig cfg;
  std::string config_path;
  auto* verify_cmd = app.add_subcommand("verify", "Run a property suite and write its report");
  verify_cmd->add_option("--config", config_path, "JSON suite configuration");
  verify_cmd->add_option("--group", cfg.group, "circle or sl2")->capture_default_str();
  verify_cmd->add_option("--suite", cfg.suite, "axioms, dominants, coincidence, trichotomy, wedge, defect")->capture_default_str();
  verify_cmd->add_option("--samples", cfg.sample_count, "Sample count")->capture_default_str();
  verify_cmd->add_option("--unknown-ceiling", cfg.unknown_ceiling, "Largest tolerated Unknown fraction")->capture_default_str();
  verify_cmd->add_option("--defect-bound", cfg.defect_bound, "Configured defect of the quasimorphism")->capture_default_str();

  ScanSpec scan;
  auto* scan_cmd = app.add_subcommand("scan", "Classify a parameter grid of SL2 cover elements");
  scan_cmd->add_option("--family", scan.family, "elliptic, hyperbolic or parabolic")->capture_default_str();
  scan_cmd->add_option("--resolution", scan.resolution, "Points along the family parameter")->capture_default_str();
  scan_cmd->add_option("--resolution2", scan.resolution2, "Points along the conjugation scale")->capture_default_str();
  scan_cmd->add_option("--scale", scan.scale, "Conjugation scale range")->capture_default_str();
  scan_cmd->add_option("--winding-min", scan.winding_min, "Lowest winding")->capture_default_str();
  scan_cmd->add_option("--winding-max", scan.winding_max, "Highest winding")->capture_default_str();

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_code::ok : exit_code::usage;
  }

  try {
    if (*gen_cmd) return cmd_gen(global, gen, out);
    if (*tnum_cmd) return cmd_tnum(global, tnum_arg, out);
    if (*order_cmd) return cmd_order(global, order_g, order_h, out);
    if (*scan_cmd) return cmd_scan(global, scan, out);
    if (*verify_cmd) {
      if (!config_path.empty()) {
        nlohmann::json j;
        try {
          j = nlohmann::json::parse(read_file(config_path));
        } catch (const nlohmann::json::parse_error& ex) {
          throw argument_error(std::string("malformed config: ") + ex.what());
        }
        cfg = config_from_json(j);
      } else if (seed_opt->count() == 0) {
        throw argument_error("verify requires --seed (or a config file with 'seed')");
      } else {
        cfg.seed = global.seed;
        cfg.precision = global.precision;
        cfg.budget = global.budget;
      }
      if (!global.output.empty()) cfg.output = global.output;
      return cmd_verify(cfg, out);
    }
  } catch (const io_error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::io;
  } catch (const invariant_error& e) {
    err << "invariant violation: " << e.what() << "\n";
    return exit_code::io;
  } catch (const parse_error& e) {
    err << "parse error: " << e.what() << "\n";
    return exit_code::usage;
  } catch (const argument_error& e) {
    err << "invalid argument: " << e.what() << "\n";
    return exit_code::usage;
  } catch (const numeric_instability& e) {
    err << "numeric instability: " << e.what() << "\n";
    return exit_code::property_failure;
  }
  return exit_code::usage;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  return run(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace ordcover::harness
