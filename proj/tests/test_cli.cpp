#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "edgetap/preset.hpp"
#include "edgetap/report.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "edgetap");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = edgetap::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

/// Runs the installed-style binary through the shell.
Result run_binary(const std::string& args) {
  const std::string cmd = std::string(EDGETAP_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out, {}};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("edgetap_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(CliPredict, NearEdgeIsSkewed) {
  const auto r = run({"predict", "--preset", "pixel6a-left-index", "--size-mm", "2.339",
                      "--margin-mm", "0", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json::parse(r.out);
  EXPECT_EQ(doc.at("regime"), "skewed");
  EXPECT_NEAR(doc.at("sr").get<double>(), 0.8932667917600412, 1e-15);
}

TEST(CliPredict, FarIsGaussian) {
  const auto r = run({"predict", "--preset", "pixel6a-left-index", "--size-mm", "7.798",
                      "--margin-mm", "18.715", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json::parse(r.out);
  EXPECT_EQ(doc.at("regime"), "gaussian");
  EXPECT_EQ(doc.at("gamma1").get<double>(), 0.0);
}

TEST(CliPredict, TextFormat) {
  const auto r = run({"predict", "--size-mm", "1.56", "--margin-mm", "0"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("regime        skewed"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("71.46 %"), std::string::npos) << r.out;
}

TEST(CliPredict, ExitCodes) {
  EXPECT_EQ(run({"predict", "--preset", "nope", "--size-mm", "1", "--margin-mm", "0"}).code, 3);
  EXPECT_EQ(run({"predict", "--size-mm", "-1", "--margin-mm", "0"}).code, 2);
  EXPECT_EQ(run({"predict", "--size-mm", "1"}).code, 2);
  EXPECT_EQ(run({"predict", "--size-mm", "1", "--margin-mm", "0", "--edge", "middle"}).code, 2);
  EXPECT_EQ(run({"predict", "--size-mm", "1", "--margin-mm", "0", "--bogus"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(CliPredict, BinaryExitCodes) {
  EXPECT_EQ(run_binary("predict --size-mm 2.339 --margin-mm 0").code, 0);
  EXPECT_EQ(run_binary("predict --preset nope --size-mm 1 --margin-mm 0").code, 3);
  EXPECT_EQ(run_binary("predict --size-mm abc --margin-mm 0").code, 2);
}

TEST(CliPresetDir, EnvironmentOverridesDefault) {
  const auto dir = scratch("envdir");
  auto p = edgetap::builtin_left_index_preset();
  p.name = "from-env";
  edgetap::save_preset_file(p, dir / "from-env.json");
  ::setenv("EDGETAP_PRESET_DIR", dir.c_str(), 1);
  EXPECT_EQ(edgetap::cli::resolve_preset_dir(std::nullopt), dir);
  EXPECT_EQ(edgetap::cli::resolve_preset_dir(std::string("/x")), fs::path("/x"));
  EXPECT_EQ(run({"predict", "--preset", "from-env", "--size-mm", "1", "--margin-mm", "0"}).code, 0);
  ::unsetenv("EDGETAP_PRESET_DIR");
  EXPECT_EQ(run({"predict", "--preset", "from-env", "--size-mm", "1", "--margin-mm", "0"}).code, 3);
  EXPECT_EQ(run({"predict", "--preset", "from-env", "--size-mm", "1", "--margin-mm", "0",
                 "--preset-dir", dir.string()})
                .code,
            0);
}

TEST(CliSimulate, ByteIdenticalForFixedSeed) {
  const auto dir = scratch("simulate");
  const auto a = (dir / "a.csv").string(), b = (dir / "b.csv").string();
  ASSERT_EQ(run({"simulate", "--seed", "5", "--participants", "3", "--out", a}).code, 0);
  ASSERT_EQ(run({"simulate", "--seed", "5", "--participants", "3", "--out", b}).code, 0);
  EXPECT_EQ(slurp(a), slurp(b));
  const std::string text = slurp(a);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 9 * 5 * 3 * 25);
}

TEST(CliSimulate, InadmissibleTruthFails) {
  const auto dir = scratch("inadmissible");
  auto p = edgetap::builtin_left_index_preset();
  p.name = "flat";
  p.coeffs.e = p.coeffs.f = p.coeffs.g = 0.0;
  edgetap::save_preset_file(p, dir / "flat.json");
  const auto r = run({"simulate", "--preset-dir", dir.string(), "--preset", "flat", "--out",
                      (dir / "x.csv").string()});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("inadmissible"), std::string::npos) << r.err;
}

TEST(CliFit, EndToEnd) {
  const auto dir = scratch("fit");
  const auto log = (dir / "log.csv").string();
  ASSERT_EQ(run({"simulate", "--seed", "8", "--out", log}).code, 0);
  const auto r = run({"fit", "--log", log, "--out-preset", (dir / "p.json").string(),
                      "--out-report", (dir / "r.json").string(), "--name", "fitted-left"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("Skewed SR"), std::string::npos);
  const auto doc = edgetap::parse_fit_document(slurp(dir / "r.json"));
  EXPECT_GT(doc.fit.rows.back().report.r2, 0.9);
  EXPECT_EQ(edgetap::load_preset_file(dir / "p.json").name, "fitted-left");
}

TEST(CliFit, Failures) {
  const auto dir = scratch("fitfail");
  std::ofstream(dir / "empty.csv")
      << "participant,set,trial,edge,axis,margin_mm,size_mm,tap_mm,perp_miss,success\n";
  EXPECT_NE(run({"fit", "--log", (dir / "empty.csv").string()}).code, 0);
  {
    std::ofstream one(dir / "one.csv");
    one << "participant,set,trial,edge,axis,margin_mm,size_mm,tap_mm,perp_miss,success\n";
    for (int set = 0; set < 10; ++set) {
      one << "P1," << set << ",0,left,x,0,2," << 0.1 * set - 0.4 << ",0,1\n";
    }
  }
  const auto r = run({"fit", "--log", (dir / "one.csv").string()});
  EXPECT_NE(r.code, 0);
  EXPECT_FALSE(r.err.empty());
  EXPECT_NE(run({"fit", "--log", (dir / "missing.csv").string()}).code, 0);
}

TEST(CliEvaluate, ScoresPreset) {
  const auto dir = scratch("evaluate");
  const auto log = (dir / "log.csv").string();
  ASSERT_EQ(run({"simulate", "--seed", "2", "--out", log}).code, 0);
  const auto r = run({"evaluate", "--log", log, "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json::parse(r.out);
  EXPECT_LT(doc.at("skewed_sr").at("mae").get<double>(),
            doc.at("gaussian_sr").at("mae").get<double>());
  EXPECT_EQ(doc.at("conditions"), 45);
}

TEST(CliPlot, ReportFigures) {
  const auto dir = scratch("plot");
  const auto log = (dir / "log.csv").string();
  ASSERT_EQ(run({"simulate", "--seed", "3", "--out", log}).code, 0);
  ASSERT_EQ(run({"fit", "--log", log, "--out-report", (dir / "r.json").string()}).code, 0);
  const auto out = dir / "figs";
  const auto r = run({"plot", "--report", (dir / "r.json").string(), "--out-dir", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (auto row : edgetap::kAllRows) {
    const auto csv = out / ("scatter_" + std::string(edgetap::row_id(row)) + ".csv");
    ASSERT_TRUE(fs::exists(csv)) << csv;
    const std::string text = slurp(csv);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 46);
    EXPECT_TRUE(fs::exists(csv.string().replace(csv.string().size() - 3, 3, "svg")));
  }
  EXPECT_TRUE(fs::exists(out / "likelihood_ratio.csv"));
  EXPECT_TRUE(fs::exists(out / "density_left_s1.560_m0.000.csv"));
}

TEST(CliPlot, DensityIntegratesToOne) {
  const auto dir = scratch("density");
  for (const auto& [size, margin] : {std::pair{"1.56", "0"}, std::pair{"7.798", "18.715"},
                                     std::pair{"2.339", "3.119"}}) {
    const auto r = run({"plot", "--preset", "pixel6a-left-index", "--size-mm", size,
                        "--margin-mm", margin, "--out-dir", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream in(dir / "density.csv");
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "x_mm,predicted,gaussian");
    double px = 0, py = 0, area = 0;
    int n = 0;
    while (std::getline(in, line)) {
      double x = 0, y = 0;
      ASSERT_EQ(std::sscanf(line.c_str(), "%lf,%lf", &x, &y), 2);
      if (n++ > 0) area += 0.5 * (y + py) * (x - px);
      px = x;
      py = y;
    }
    EXPECT_EQ(n, 1001);
    EXPECT_NEAR(area, 1.0, 1e-6) << size << ' ' << margin;
  }
}

TEST(CliPlot, MissingInput) {
  EXPECT_NE(run({"plot", "--report", "/no/such/report.json"}).code, 0);
  EXPECT_NE(run({"plot"}).code, 0);
}
