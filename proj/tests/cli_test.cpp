#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

#include "cli.hpp"
#include "commands.hpp"
#include "csv.hpp"
#include "freqent/errors.hpp"
#include "svg.hpp"
#include "support/gen.hpp"

using namespace freqent;
using namespace freqent::cli;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("freqent_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void spit(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

CsvDocument parse(const std::string& text) {
  std::istringstream is(text);
  return read_csv(is);
}

std::string drop_timestamp(const std::string& text) {
  std::istringstream is(text);
  std::string line, kept;
  const std::string stamp = "# " + std::string(kTimestampKey) + "=";
  while (std::getline(is, line))
    if (line.rfind(stamp, 0) != 0) kept += line + "\n";
  return kept;
}

ErrorKind read_error(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected a read error");
  return ErrorKind::InvalidState;
}

// Crude well-formedness check: every tag closes, in order, with one svg root.
bool balanced_xml(const std::string& s) {
  std::vector<std::string> stack;
  int roots = 0;
  for (std::size_t i = s.find('<'); i != std::string::npos; i = s.find('<', i + 1)) {
    const std::size_t end = s.find('>', i);
    if (end == std::string::npos) return false;
    const std::string tag = s.substr(i + 1, end - i - 1);
    if (tag.empty() || tag[0] == '?' || tag[0] == '!') continue;
    if (tag[0] == '/') {
      if (stack.empty() || stack.back() != tag.substr(1)) return false;
      stack.pop_back();
      continue;
    }
    const std::string name = tag.substr(0, tag.find_first_of(" \n/"));
    if (stack.empty()) {
      if (name != "svg") return false;
      ++roots;
    }
    if (tag.back() != '/') stack.push_back(name);
  }
  return stack.empty() && roots == 1;
}

}  // namespace

TEST_CASE("csv round trip keeps 12 significant digits") {
  freqent::testing::Gen g(77);
  CsvDocument doc;
  doc.add_meta("name", "trace");
  doc.add_meta("value", 1.25e-12);
  doc.columns = {"a", "b", "c"};
  for (int i = 0; i < 1000; ++i) {
    const double sign = g.coin() ? 1.0 : -1.0;
    doc.rows.push_back({sign * g.log_uniform(1e-300, 1e300), g.uniform(-1.0, 1.0),
                        g.coin() ? std::optional<double>() : std::optional<double>(0.0)});
  }
  std::ostringstream os;
  write_csv(os, doc);
  const auto back = parse(os.str());
  CHECK(back.columns == doc.columns);
  CHECK(back.meta("name") == "trace");
  CHECK(back.meta("value") == "1.25000000000e-12");
  CHECK_FALSE(back.meta("missing"));
  REQUIRE(back.rows.size() == doc.rows.size());
  for (std::size_t i = 0; i < doc.rows.size(); ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      REQUIRE(back.rows[i][j].has_value() == doc.rows[i][j].has_value());
      if (!doc.rows[i][j]) continue;
      const double a = *doc.rows[i][j], b = *back.rows[i][j];
      CHECK(std::abs(a - b) <= 5e-12 * std::abs(a));
    }
  CHECK(back.column_index("b") == 1);
  CHECK_THROWS_AS(back.column_index("z"), Error);
}

TEST_CASE("csv reader rejects malformed input") {
  CHECK(read_error("") == ErrorKind::InvalidInput);
  CHECK(read_error("# only=metadata\n") == ErrorKind::InvalidInput);
  CHECK(read_error("a,b\n1,2\n3\n") == ErrorKind::InvalidInput);
  CHECK(read_error("a,b\n1,x\n") == ErrorKind::InvalidInput);
  CHECK(read_error("a,b\n1,2e\n") == ErrorKind::InvalidInput);
  const auto ok = parse("# k = v \n a , b \n+1, 2\n\n");
  CHECK(ok.meta("k") == "v");
  CHECK(ok.columns == std::vector<std::string>{"a", "b"});
  CHECK(ok.rows.size() == 1);
  CHECK(*ok.rows[0][0] == 1.0);
}

TEST_CASE("trace from csv") {
  CsvDocument doc = parse("# noise_sigma=0.01\n# seed=9\ntau_s,p\n");
  for (int i = 0; i < 40; ++i) doc.rows.push_back({i * 1e-13, 0.5});
  const auto t = trace_from_csv(doc);
  CHECK(t.samples.size() == 40);
  CHECK(t.noise_sigma == 0.01);
  CHECK(t.rng_seed == 9);
  doc.columns = {"tau", "p"};
  CHECK_THROWS_AS(trace_from_csv(doc), Error);
}

TEST_CASE("svg output is well formed") {
  Series s{"trace", {0.0, 1.0, 2.0, 3.0}, {0.5, NAN, 0.1, 0.4}};
  const auto line = svg_line_plot({s}, {"title <&>", "x", "y"});
  CHECK(line.rfind("<?xml", 0) == 0);
  CHECK(balanced_xml(line));
  CHECK(line.find("&lt;&amp;&gt;") != std::string::npos);
  CHECK(line.find("<polyline") != std::string::npos);

  const auto heat = svg_heatmap({0.0, 1.0}, {0.0, 1.0}, {0.0, 0.5, 0.7, 1.0}, {"h", "x", "y"});
  CHECK(balanced_xml(heat));
  CHECK(heat.find("<rect") != std::string::npos);

  JsaParams p;
  p.grid = 32;
  CHECK(balanced_xml(jsa_document(p, true).svg));
  PhaseMatchParams pm;
  pm.points = 141;
  CHECK(balanced_xml(phasematch_svg(phasematch_document(pm))));
  HomParams h;
  CHECK(balanced_xml(hom_svg(hom_document(h), h)));
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"bogus"}).code == kExitUsage);
  CHECK(run({"pipeline", "--l", "-1"}).code == kExitUsage);
  CHECK(run({"pipeline", "--center-frequency", "0"}).code == kExitUsage);
  CHECK(run({"jsa", "--grid", "8"}).code == kExitUsage);
  CHECK(run({"hom", "--method", "simpson"}).code == kExitUsage);
  CHECK(run({"hom", "--method", "numeric", "--noise", "0.1"}).code == kExitUsage);
  CHECK(run({"phasematch", "--cut-angle", "95"}).code == kExitUsage);
  CHECK(run({"phasematch", "--cut-angle", "20"}).code == kExitNumerical);
  CHECK(run({"estimate"}).code == kExitUsage);
  CHECK(run({"estimate", "--in", "/nonexistent/trace.csv"}).code == kExitUsage);
  CHECK(run({"hom", "--out", "/nonexistent/dir/out.csv"}).code == kExitNumerical);
  CHECK(run({"--version"}).code == kExitOk);
  const auto help = run({"hom", "--help"});
  CHECK(help.code == kExitOk);
  CHECK(help.out.find("--tau-c") != std::string::npos);
  const auto bad = run({"jsa", "--grid", "8"});
  CHECK(bad.err.find("--grid") != std::string::npos);
}

TEST_CASE("pipeline command prints the four stages") {
  const auto r = run({"pipeline", "--l", "2", "--omega", "1e12", "--tau", "1e-12"});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("# command=pipeline") != std::string::npos);
  for (const char* stage : {"[1]", "[2]", "[3]", "[4]", "[5]"}) CHECK(r.out.find(stage) != std::string::npos);
}

TEST_CASE("phasematch reports the intersection or its absence") {
  const auto none = run({"phasematch", "--cut-angle", "40"});
  REQUIRE(none.code == kExitOk);
  CHECK(parse(none.out).meta("intersection") == "none");

  const auto r = run({"phasematch", "--cut-angle", "45"});
  REQUIRE(r.code == kExitOk);
  const auto doc = parse(r.out);
  CHECK(std::stod(*doc.meta("intersection")) == doctest::Approx(370.44).epsilon(2.0 / 370.44));
  CHECK(doc.meta("cut_angle_deg") == "45");
  CHECK(doc.columns.size() == 3);

  // isotropic coefficients have no birefringence to phase match with
  const auto iso = run({"phasematch", "--sellmeier-o", "2.7359", "0.01878", "0.01822", "0.01354",
                        "--sellmeier-e", "2.7359", "0.01878", "0.01822", "0.01354"});
  CHECK(iso.code == kExitNumerical);
}

TEST_CASE("hom closed and numeric methods agree") {
  const std::vector<std::string> base{"hom", "--l", "2", "--omega", "2e12", "--points", "121"};
  auto closed_args = base, numeric_args = base;
  numeric_args.insert(numeric_args.end(), {"--method", "numeric"});
  const auto closed = run(closed_args), numeric = run(numeric_args);
  REQUIRE(closed.code == kExitOk);
  REQUIRE(numeric.code == kExitOk);
  const auto a = parse(closed.out), b = parse(numeric.out);
  CHECK(b.meta("method") == "numeric");
  REQUIRE(a.rows.size() == 121);
  REQUIRE(b.rows.size() == 121);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(*a.rows[i][0] == *b.rows[i][0]);
    CHECK(std::abs(*a.rows[i][1] - *b.rows[i][1]) < 1e-6);
  }
}

TEST_CASE("estimate recovers the beat from a written trace") {
  TempDir dir;
  const auto trace = dir.file("trace.csv"), result = dir.file("fit.json");
  REQUIRE(run({"hom", "--l", "2", "--omega", "2e12", "--points", "1201", "--out", trace}).code == kExitOk);
  const auto r = run({"estimate", "--in", trace, "--out", result});
  REQUIRE(r.code == kExitOk);
  const auto j = nlohmann::json::parse(slurp(result));
  CHECK(j["command"] == "estimate");
  CHECK(j["samples"] == 1201);
  CHECK(j["converged"] == true);
  CHECK(j["beat"].get<double>() == doctest::Approx(8e12).epsilon(0.005));
  CHECK(j["tau_c_hat"].get<double>() == doctest::Approx(1e-12).epsilon(0.01));

  const auto noisy = dir.file("noisy.csv");
  REQUIRE(run({"hom", "--l", "2", "--omega", "2e12", "--points", "1201", "--noise", "0.01",
               "--seed", "4", "--out", noisy}).code == kExitOk);
  const auto n = run({"estimate", "--in", noisy});
  REQUIRE(n.code == kExitOk);
  CHECK(nlohmann::json::parse(n.out)["beat"].get<double>() == doctest::Approx(8e12).epsilon(0.05));
}

TEST_CASE("estimate on bad or flat input") {
  TempDir dir;
  const auto bad = dir.file("bad.csv");
  spit(bad, "tau_s,p\n1,2\n3,oops\n");
  CHECK(run({"estimate", "--in", bad}).code == kExitUsage);
  spit(bad, "tau_s,p\n1,2\n");
  CHECK(run({"estimate", "--in", bad}).code == kExitUsage);

  std::ostringstream flat;
  flat << "tau_s,p\n";
  for (int i = 0; i < 601; ++i) flat << (i - 300) * 1e-14 << ",0.5\n";
  spit(bad, flat.str());
  const auto r = run({"estimate", "--in", bad});
  CHECK(r.code == kExitNotConverged);
  CHECK(nlohmann::json::parse(r.out)["converged"] == false);
}

TEST_CASE("json config presets options and flags override them") {
  TempDir dir;
  const auto cfg = dir.file("cfg.json");
  spit(cfg, R"({"hom": {"l": 2, "omega": 4e12, "points": 50, "method": "closed"}})");
  const auto from_cfg = parse(run({"--config", cfg, "hom"}).out);
  CHECK(from_cfg.meta("l") == "2");
  CHECK(from_cfg.meta("omega_rot") == "4.00000000000e+12");
  CHECK(from_cfg.rows.size() == 50);
  const auto flagged = parse(run({"--config", cfg, "hom", "--points", "33"}).out);
  CHECK(flagged.rows.size() == 33);
  CHECK(flagged.meta("l") == "2");

  spit(cfg, R"({"phasematch": {"sellmeier-o": [2.7359, 0.01878, 0.01822, 0.01354], "cut-angle": 50}})");
  const auto pm = run({"--config", cfg, "phasematch", "--points", "281"});
  REQUIRE(pm.code == kExitOk);
  CHECK(parse(pm.out).meta("cut_angle_deg") == "50");

  spit(cfg, R"({"hom": {"no-such-option": 1}})");
  CHECK(run({"--config", cfg, "hom"}).code == kExitUsage);
  spit(cfg, "{not json");
  CHECK(run({"--config", cfg, "hom"}).code == kExitUsage);
}

TEST_CASE("repeat runs are byte identical apart from the timestamp") {
  const std::vector<std::vector<std::string>> commands{
      {"jsa", "--grid", "32", "--rde-l", "2", "--rde-omega", "1e12"},
      {"hom", "--l", "2", "--omega", "2e12", "--noise", "0.02", "--seed", "11"},
      {"phasematch", "--cut-angle", "50", "--points", "141"},
      {"pipeline", "--tau", "2e-12"},
  };
  for (const auto& c : commands) {
    const auto a = run(c), b = run(c);
    REQUIRE(a.code == kExitOk);
    CHECK(drop_timestamp(a.out) == drop_timestamp(b.out));
    CHECK(a.out.find("# generated=") != std::string::npos);
  }
}

TEST_CASE("SOURCE_DATE_EPOCH pins the timestamp") {
  ::setenv("SOURCE_DATE_EPOCH", "0", 1);
  CHECK(timestamp_now() == "1970-01-01T00:00:00Z");
  ::unsetenv("SOURCE_DATE_EPOCH");
  CHECK(timestamp_now().size() == 20);
}

TEST_CASE("figures command writes every figure") {
  TempDir dir;
  const auto out = dir.file("figs");
  REQUIRE(run({"figures", "--out-dir", out, "--svg"}).code == kExitOk);
  for (const char* stem : {"fig2", "fig3a", "fig3b", "fig4a", "fig4b", "fig4c", "fig4d", "fig5a", "fig5b"}) {
    CHECK(fs::exists(fs::path(out) / (std::string(stem) + ".csv")));
    CHECK(balanced_xml(slurp((fs::path(out) / (std::string(stem) + ".svg")).string())));
  }
}
