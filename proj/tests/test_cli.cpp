#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ordcover/harness/cli.hpp"

using namespace ordcover;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = harness::run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> v;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> v;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, sep);) v.push_back(f);
  return v;
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() / ("ordcover_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kTau13 = R"({"type":"pl","breakpoints":["0"],"values":["1/3"]})";
const std::string kTau12 = R"({"type":"pl","breakpoints":["0"],"values":["1/2"]})";
const std::string kTau14 = R"({"type":"pl","breakpoints":["0"],"values":["1/4"]})";
const std::string kZ = R"({"type":"sl2cover","mat":[1,0,0,1],"winding":1})";

}  // namespace

TEST(Tnum, TranslationExample) {
  const auto r = cli({"--precision", "9", "tnum", kTau13});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto l = lines(r.out);
  ASSERT_EQ(l.size(), 2u);
  const auto d = split(l[0], ' ');
  EXPECT_DOUBLE_EQ(std::stod(d[0]), 2.0 / 9.0);
  EXPECT_DOUBLE_EQ(std::stod(d[1]), 4.0 / 9.0);
  EXPECT_EQ(l[1], "2/9 4/9");
}

TEST(Tnum, IdentityAndCentral) {
  const auto id = cli({"tnum", R"({"type":"pl","breakpoints":["0"],"values":["0"]})"});
  ASSERT_EQ(id.code, 0);
  const auto d = split(lines(id.out)[0], ' ');
  EXPECT_LE(std::stod(d[0]), 0.0);
  EXPECT_GE(std::stod(d[1]), 0.0);
  const auto z = cli({"--precision", "100", "tnum", kZ});
  ASSERT_EQ(z.code, 0);
  const auto e = split(lines(z.out)[0], ' ');
  EXPECT_LE(std::stod(e[0]), 1.0);
  EXPECT_GE(std::stod(e[1]), 1.0);
  EXPECT_EQ(lines(z.out).size(), 1u);
}

TEST(Tnum, JsonFormatAndFiles) {
  TempDir dir;
  std::ofstream(dir / "tau.json") << kTau13;
  const auto r = cli({"--precision", "9", "--format", "json", "tnum", (dir / "tau.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["exact"][0], "2/9");
  EXPECT_EQ(j["precision"], 9);
  ASSERT_EQ(cli({"--precision", "9", "--output", (dir / "t.txt").string(), "tnum", kTau13}).code, 0);
  EXPECT_EQ(lines(slurp(dir / "t.txt")).back(), "2/9 4/9");
}

TEST(Tnum, Errors) {
  EXPECT_EQ(cli({"tnum", "{not json"}).code, 2);
  EXPECT_EQ(cli({"tnum", R"({"type":"matrix"})"}).code, 2);
  EXPECT_EQ(cli({"tnum", R"({"type":"pl","breakpoints":["0","1/2"],"values":["1/2","1/4"]})"}).code, 3);
  EXPECT_EQ(cli({"tnum", R"({"type":"sl2cover","mat":[2,0,0,1],"winding":0})"}).code, 3);
  EXPECT_EQ(cli({"tnum", "/nonexistent/element.json"}).code, 3);
  EXPECT_EQ(cli({"--precision", "0", "tnum", kTau13}).code, 2);
  EXPECT_EQ(cli({"tnum"}).code, 2);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
}

TEST(Order, Examples) {
  EXPECT_EQ(cli({"order", kTau12, kTau14}).out, "GEQ\n");
  EXPECT_EQ(cli({"order", kTau14, kTau12}).out, "LEQ\n");
  EXPECT_EQ(cli({"order", kTau13, kTau13}).out, "EQUAL\n");
  const std::string rot = R"({"type":"sl2cover","mat":[0.92387953251128674,-0.38268343236508978,0.38268343236508978,0.92387953251128674],"winding":0})";
  const std::string rot45 = R"({"type":"sl2cover","mat":[0.70710678118654757,-0.70710678118654746,0.70710678118654746,0.70710678118654757],"winding":0})";
  const std::string hyp = R"({"type":"sl2cover","mat":[4,0,0,0.25],"winding":0})";
  EXPECT_EQ(cli({"order", rot45, hyp}).out, "INCOMPARABLE\n");
  EXPECT_EQ(cli({"order", rot, rot}).out, "EQUAL\n");
  EXPECT_EQ(cli({"order", kZ, hyp}).out, "GEQ\n");
}

TEST(Order, GroupMismatch) {
  const auto r = cli({"order", kTau12, kZ});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("different groups"), std::string::npos);
}

TEST(Gen, CircleFilesAreValid) {
  TempDir dir;
  const auto r = cli({"--seed", "7", "--output", (dir / "els").string(), "gen", "--group", "circle", "--k", "3", "--count", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  int files = 0;
  for (const auto& entry : fs::directory_iterator(dir / "els")) {
    ++files;
    EXPECT_NO_THROW(circle::pl_from_json(nlohmann::json::parse(slurp(entry.path()))));
  }
  EXPECT_EQ(files, 10);
  EXPECT_TRUE(fs::exists(dir / "els" / "element_0009.json"));
}

TEST(Gen, EllipticTraceAndDeterminism) {
  const auto a = cli({"--seed", "3", "gen", "--group", "sl2", "--class", "elliptic", "--count", "5"});
  ASSERT_EQ(a.code, 0) << a.err;
  const auto l = lines(a.out);
  ASSERT_EQ(l.size(), 5u);
  for (const auto& s : l) {
    const auto g = sl2::cover_from_json(nlohmann::json::parse(s));
    EXPECT_LT(std::abs(g.mat().trace()), 2.0);
  }
  EXPECT_EQ(cli({"--seed", "3", "gen", "--group", "sl2", "--class", "elliptic", "--count", "5"}).out, a.out);
  EXPECT_NE(cli({"--seed", "4", "gen", "--group", "sl2", "--class", "elliptic", "--count", "5"}).out, a.out);
}

TEST(Gen, Errors) {
  EXPECT_EQ(cli({"gen", "--group", "sl2", "--class", "loxodromic"}).code, 2);
  EXPECT_EQ(cli({"gen", "--group", "torus"}).code, 2);
  EXPECT_EQ(cli({"gen"}).code, 2);
  EXPECT_EQ(cli({"gen", "--group", "circle", "--count", "0"}).code, 2);
  EXPECT_EQ(cli({"gen", "--group", "circle", "--k", "0"}).code, 2);
}

TEST(Verify, CircleAxiomsPass) {
  TempDir dir;
  const auto path = (dir / "report.json").string();
  const auto r = cli({"--seed", "42", "--output", path, "verify", "--group", "circle", "--suite", "axioms", "--samples", "50"});
  ASSERT_EQ(r.code, 0) << r.out << r.err;
  const Report rep = report_from_json(nlohmann::json::parse(slurp(path)));
  EXPECT_EQ(rep.seed, 42u);
  EXPECT_EQ(rep.sample_count, 50u);
  EXPECT_EQ(rep.suite, "axioms");
  EXPECT_TRUE(rep.passed());
  EXPECT_NE(r.out.find("group_laws: pass"), std::string::npos);
}

TEST(Verify, WedgeToStdout) {
  const auto r = cli({"--seed", "1", "verify", "--group", "sl2", "--suite", "wedge", "--samples", "100"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Report rep = report_from_json(nlohmann::json::parse(r.out));
  const Assertion* a = rep.find("cone_equals_wedge");
  ASSERT_NE(a, nullptr);
  EXPECT_EQ(a->failed, 0u);
  EXPECT_EQ(a->checked, 100u);
}

TEST(Verify, ConfigFile) {
  TempDir dir;
  std::ofstream(dir / "cfg.json") << R"({"group":"sl2","suite":"trichotomy","sample_count":50,"seed":5})";
  const auto r = cli({"verify", "--config", (dir / "cfg.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out)["seed"], 5);
  std::ofstream(dir / "noseed.json") << R"({"group":"sl2","suite":"trichotomy","sample_count":50})";
  EXPECT_EQ(cli({"verify", "--config", (dir / "noseed.json").string()}).code, 2);
  std::ofstream(dir / "bad.json") << "{";
  EXPECT_EQ(cli({"verify", "--config", (dir / "bad.json").string()}).code, 2);
}

TEST(Verify, PropertyFailureExitsOne) {
  // The translation number has defect 1, so a bound of 0.1 is refuted.
  const auto r = cli({"--seed", "42", "--precision", "1024", "verify", "--group", "circle", "--suite", "defect", "--samples", "50",
                      "--defect-bound", "0.1"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(report_from_json(nlohmann::json::parse(r.out)).find("defect_within_bound")->status, Status::Fail);
}

TEST(Verify, ValidationErrors) {
  EXPECT_EQ(cli({"--seed", "1", "verify", "--samples", "0"}).code, 2);
  EXPECT_EQ(cli({"verify", "--suite", "axioms"}).code, 2);
  EXPECT_EQ(cli({"--seed", "1", "verify", "--suite", "nonsense"}).code, 2);
  EXPECT_EQ(cli({"--seed", "1", "verify", "--group", "torus"}).code, 2);
  EXPECT_EQ(cli({"--seed", "1", "--precision", "0", "verify"}).code, 2);
  EXPECT_EQ(cli({"--seed", "1", "--output", "/nonexistent/dir/r.json", "verify", "--samples", "2"}).code, 3);
}

TEST(Scan, EllipticStrata) {
  const auto r = cli({"scan", "--family", "elliptic", "--resolution", "8", "--winding-min", "0", "--winding-max", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto l = lines(r.out);
  ASSERT_EQ(l[0], "param1,param2,winding,mu_mid,pos_flag,neg_flag,exp_flag");
  ASSERT_EQ(l.size(), 1u + 8 * 3 * 2);
  for (std::size_t i = 1; i < l.size(); ++i) {
    const auto f = split(l[i], ',');
    ASSERT_EQ(f.size(), 7u);
    EXPECT_EQ(f[4], "yes") << l[i];
    EXPECT_EQ(f[5], "no") << l[i];
    EXPECT_EQ(f[6], "yes") << l[i];
    // Conjugation preserves mu, which is theta/pi + winding.
    EXPECT_NEAR(std::stod(f[3]), std::stod(f[0]) / std::numbers::pi + std::stod(f[2]), 2.5 / 4096);
  }
}

TEST(Scan, HyperbolicFamily) {
  const auto r = cli({"scan", "--family", "hyperbolic", "--resolution", "6", "--winding-min", "0", "--winding-max", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto l = lines(r.out);
  ASSERT_EQ(l.size(), 1u + 6 * 3);
  for (std::size_t i = 1; i < l.size(); ++i) {
    const auto f = split(l[i], ',');
    EXPECT_EQ(f[4], "no");
    EXPECT_EQ(f[5], "no");
    EXPECT_EQ(f[6], "yes");
    EXPECT_NEAR(std::stod(f[3]), 0.0, 2.5 / 4096);
  }
}

TEST(Scan, JsonAndFile) {
  TempDir dir;
  const auto path = (dir / "scan.json").string();
  ASSERT_EQ(cli({"--format", "json", "--output", path, "scan", "--family", "parabolic", "--resolution", "4", "--resolution2", "2"}).code, 0);
  const auto j = nlohmann::json::parse(slurp(path));
  EXPECT_EQ(j.size(), 4u * 2 * 3);
  EXPECT_TRUE(j[0].contains("exp_flag"));
}

TEST(Scan, Errors) {
  EXPECT_EQ(cli({"scan", "--resolution", "1"}).code, 2);
  EXPECT_EQ(cli({"scan", "--family", "loxodromic"}).code, 2);
  EXPECT_EQ(cli({"scan", "--winding-min", "2", "--winding-max", "1"}).code, 2);
  EXPECT_EQ(cli({"--output", "/nonexistent/dir/scan.csv", "scan", "--resolution", "2", "--resolution2", "2"}).code, 3);
}

TEST(Help, ExitsZero) {
  const auto r = cli({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("verify"), std::string::npos);
}
