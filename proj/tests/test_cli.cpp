#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace fs = std::filesystem;
using nli::cli::run;

namespace {

const std::string kConfigDir = NLI_CONFIG_DIR;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "nlisim");
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "nli_cli_test";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  fs::remove(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Data rows (skipping "# " metadata and the header) split on commas.
std::vector<std::vector<double>> rows(const std::string& csv) {
  std::vector<std::vector<double>> r;
  std::istringstream in(csv);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.rfind("#", 0) == 0) continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<double> v;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) v.push_back(std::stod(cell));
    r.push_back(v);
  }
  return r;
}

std::string header_of(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind("#", 0) != 0) return line;
  return {};
}

}  // namespace

TEST_CASE("psd subcommand writes a CSV with metadata", "[cli]") {
  const auto out = scratch("psd.csv");
  const auto r = invoke({"psd", "--config", kConfigDir + "/single_span.json", "--output", out.string()});
  REQUIRE(r.code == 0);
  const std::string csv = slurp(out);
  CHECK(csv.rfind("# ", 0) == 0);
  CHECK(csv.find("link.spans") != std::string::npos);
  CHECK(header_of(csv).rfind("f_Hz,", 0) == 0);
  CHECK(rows(csv).size() == 81);
}

TEST_CASE("kernel subcommand on stdout, both methods agree", "[cli]") {
  const auto a = invoke({"kernel", "--config", kConfigDir + "/single_span.json"});
  const auto b = invoke({"kernel", "--config", kConfigDir + "/single_span.json", "--method", "quadrature"});
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  const auto ra = rows(a.out), rb = rows(b.out);
  REQUIRE(ra.size() == rb.size());
  REQUIRE(!ra.empty());
  for (std::size_t i = 0; i < ra.size(); ++i) {
    REQUIRE(ra[i].size() >= 3);
    const double scale = std::hypot(ra[i][1], ra[i][2]);
    CHECK(std::abs(ra[i][1] - rb[i][1]) <= 1e-9 * scale);
    CHECK(std::abs(ra[i][2] - rb[i][2]) <= 1e-9 * scale);
  }
}

TEST_CASE("missing config exits 1 without output", "[cli][errors]") {
  const auto out = scratch("missing.csv");
  const auto r = invoke({"psd", "--config", "/nonexistent/cfg.json", "--output", out.string()});
  CHECK(r.code == 1);
  CHECK(!fs::exists(out));
  CHECK(!r.err.empty());
}

TEST_CASE("usage errors exit 1", "[cli][errors]") {
  CHECK(invoke({}).code == 1);
  CHECK(invoke({"bogus"}).code == 1);
  CHECK(invoke({"psd"}).code == 1);
  CHECK(invoke({"montecarlo", "--config", kConfigDir + "/single_span.json", "--mode", "rp2"}).code == 1);
  CHECK(invoke({"psd", "--config", kConfigDir + "/single_span.json", "--threads", "0"}).code == 1);
  CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("quadrature over budget exits 2", "[cli][errors]") {
  const auto cfg = scratch("tight.json");
  {
    std::ofstream f(cfg);
    f << R"({"link": {"spans": [{"length_km": 100, "alpha_db_per_km": 0.2, "beta2_ps2_per_km": -21.7,
                                  "gamma_per_w_per_km": 1.3, "lumped_gain_db": 20}]},
             "psd": {"p0_w": 0.001, "x": {"type": "rectangular", "bandwidth_hz": 32e9, "power_hat": 1},
                     "y": {"type": "zero"}},
             "kernel": {"max_cells_per_span": 4, "f_min_hz2": 1e21, "f_max_hz2": 1e22, "points": 3}})";
  }
  const auto r = invoke({"kernel", "--config", cfg.string(), "--method", "quadrature"});
  CHECK(r.code == 2);
  CHECK(r.err.find("convergence") != std::string::npos);
}

TEST_CASE("montecarlo modes differ by the phase term", "[cli][montecarlo]") {
  const std::vector<std::string> base{"montecarlo", "--config", kConfigDir + "/single_span.json",
                                      "--lines", "64", "--trials", "40", "--seed", "5"};
  auto rp1_args = base, erp1_args = base;
  rp1_args.insert(rp1_args.end(), {"--mode", "rp1"});
  erp1_args.insert(erp1_args.end(), {"--mode", "erp1"});
  const auto rp1 = invoke(rp1_args), erp1 = invoke(erp1_args);
  REQUIRE(rp1.code == 0);
  REQUIRE(erp1.code == 0);
  CHECK(header_of(rp1.out) == "f_Hz,mc_mean,mc_stderr,analytic,abs_z_score");
  CHECK(rp1.err.find("in-band points") != std::string::npos);
  const auto a = rows(rp1.out), b = rows(erp1.out);
  REQUIRE(a.size() == b.size());
  // analytic columns differ exactly by Gx(f) (2 Px + Py)^2 = (1/32 GHz) 2.5^2 in band
  const double phase = 6.25 / 32e9;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double f = a[i][0];
    if (std::abs(f) < 15e9) CHECK_THAT(a[i][3] - b[i][3], Catch::Matchers::WithinRel(phase, 1e-9));
    if (std::abs(f) > 17e9) CHECK(a[i][3] == b[i][3]);
  }
}

TEST_CASE("thread count never changes the bytes", "[cli][determinism]") {
  const std::vector<std::string> base{"montecarlo", "--config", kConfigDir + "/single_span.json",
                                      "--lines", "64", "--trials", "70", "--mode", "erp1"};
  auto one = base, three = base;
  one.insert(one.end(), {"--threads", "1"});
  three.insert(three.end(), {"--threads", "3"});
  CHECK(invoke(one).out == invoke(three).out);

  const auto p1 = scratch("m1.csv"), p3 = scratch("m3.csv");
  REQUIRE(invoke({"moments", "--theorem", "2", "--k", "2", "--trials", "20000", "--threads", "1", "--output",
                  p1.string()}).code == 0);
  REQUIRE(invoke({"moments", "--theorem", "2", "--k", "2", "--trials", "20000", "--threads", "3", "--output",
                  p3.string()}).code == 0);
  CHECK(slurp(p1) == slurp(p3));
}

TEST_CASE("moments subcommand reports checks", "[cli][moments]") {
  const auto r = invoke({"moments", "--theorem", "2", "--k", "3", "--trials", "20000"});
  CHECK(r.code == 0);
  CHECK(r.out.find("PASS") != std::string::npos);
  CHECK(r.out.find("all checks passed") != std::string::npos);
  CHECK(invoke({"moments", "--theorem", "4"}).code == 1);
  CHECK(invoke({"moments", "--theorem", "2", "--k", "9", "--trials", "20000"}).code == 1);
  CHECK(invoke({"moments", "--theorem", "2", "--trials", "100"}).code == 1);
}
