#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "revlat/body_io.hpp"
#include "revlat/cli.hpp"
#include "revlat/counting.hpp"

namespace {

const std::string kCli = REVLAT_CLI_PATH;
const std::string kBodies = REVLAT_BODIES_DIR;

struct Result {
  int status = -1;
  std::string out;
};

Result run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + kCli + " " + args + " 2>/dev/null";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  while (const auto n = std::fread(buf.data(), 1, buf.size(), p)) r.out.append(buf.data(), n);
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string body(const std::string& name) { return kBodies + "/" + name + ".json"; }

std::string data_rows(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') out += line + "\n";
  return out;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("revlat_test_" + name)).string();
}

}  // namespace

TEST(Cli, CountOfUnitBallAtTwo) {
  const auto r = run_cli("count --body " + body("sphere") + " --R 2 --no-timestamp");
  ASSERT_EQ(r.status, 0);
  const auto rows = data_rows(r.out);
  EXPECT_EQ(rows.substr(0, rows.find('\n')), "R,N,volume_term,E");
  std::istringstream line(rows.substr(rows.find('\n') + 1));
  std::string R, N, V, E;
  std::getline(line, R, ',');
  std::getline(line, N, ',');
  std::getline(line, V, ',');
  std::getline(line, E);
  EXPECT_EQ(N, "33");
  EXPECT_NEAR(std::stod(E), 33.0 - 32.0 * M_PI / 3.0, 1e-12);
}

TEST(Cli, MetadataEchoesConfig) {
  const auto r = run_cli("count --body " + body("perturbed") + " --R 3 --threads 2");
  ASSERT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("# revlat: "), std::string::npos);
  EXPECT_NE(r.out.find("# command: count"), std::string::npos);
  EXPECT_NE(r.out.find("perturbed_parabola"), std::string::npos);
  EXPECT_NE(r.out.find("# threads: 2"), std::string::npos);
  EXPECT_NE(r.out.find("# timestamp: "), std::string::npos);
  EXPECT_EQ(run_cli("count --body " + body("perturbed") + " --R 3 --no-timestamp").out.find("timestamp"),
            std::string::npos);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run_cli("count --body /nonexistent/body.json --R 2").status, 1);
  EXPECT_EQ(run_cli("scan --body " + body("sphere") + " --R-min 5 --R-max 2 --step 1").status, 1);
  EXPECT_EQ(run_cli("scan --body " + body("sphere") + " --R-min 1 --R-max 2 --step 0").status, 1);
  EXPECT_EQ(run_cli("count --body " + body("sphere") + " --R 2e6").status, 2);
  EXPECT_EQ(run_cli("count --body " + body("sphere")).status, 1);
  EXPECT_EQ(run_cli("verify --body " + body("sphere") + " --claim prop3").status, 1);
  EXPECT_EQ(run_cli("hv --body " + body("sphere") + " --R 10 --delta -1").status, 1);
  EXPECT_EQ(run_cli("frobnicate").status, 1);
  EXPECT_EQ(run_cli("--help").status, 0);
  EXPECT_EQ(run_cli("count --help").status, 0);
  EXPECT_EQ(run_cli("count --body " + body("sphere") + " --R 2", "REVLAT_THREADS=abc").status, 1);
}

TEST(Cli, MalformedBodySpecRejected) {
  const auto path = temp_path("bad_body.json");
  for (const std::string text : {"{\"profile\": \"sphere\", \"radius\": -1}", "{\"profile\": \"torus\"}",
                                 "{\"profile\": \"sphere\", \"colour\": 3}", "not json"}) {
    std::ofstream(path) << text;
    EXPECT_EQ(run_cli("count --body " + path + " --R 2").status, 1) << text;
  }
  std::filesystem::remove(path);
}

TEST(Cli, RowsIndependentOfThreadCount) {
  const std::string args = "scan --body " + body("perturbed") + " --R-min 20 --R-max 24 --step 0.25 --no-timestamp";
  const auto one = run_cli(args + " --threads 1");
  const auto many = run_cli(args + " --threads 8");
  const auto env = run_cli(args, "REVLAT_THREADS=3");
  ASSERT_EQ(one.status, 0);
  EXPECT_EQ(data_rows(one.out), data_rows(many.out));
  EXPECT_EQ(data_rows(one.out), data_rows(env.out));
  EXPECT_NE(env.out.find("# threads: 3"), std::string::npos);

  const std::string blocks = "blocks --body " + body("perturbed") + " --R 48 --no-timestamp";
  EXPECT_EQ(data_rows(run_cli(blocks + " --threads 1").out), data_rows(run_cli(blocks + " --threads 6").out));
}

TEST(Cli, OutFileGetsTableAndStdoutGetsSummary) {
  const auto path = temp_path("count.csv");
  const auto r = run_cli("count --body " + body("sphere") + " --R 2 --out " + path);
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(r.out.substr(0, 5), "N=33 ");
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_NE(ss.str().find("\n2,33,"), std::string::npos);
  std::filesystem::remove(path);
}

TEST(Cli, JsonOutputParses) {
  const auto r = run_cli("count --body " + body("sphere") + " --R 2 --format json");
  ASSERT_EQ(r.status, 0);
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["rows"][0]["N"].get<long>(), 33);
  EXPECT_EQ(doc["meta"]["command"], "count");
}

TEST(Cli, VerifyReportsClaim) {
  const auto grid = temp_path("grid.json");
  std::ofstream(grid) << R"({"levels": 4, "u_max": 100})";
  const auto r = run_cli("verify --body " + body("sphere") + " --claim fprime-decay --grid " + grid);
  ASSERT_EQ(r.status, 0);
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["claim"], "fprime-decay");
  EXPECT_TRUE(doc["pass"].get<bool>());
  EXPECT_NEAR(doc["max"].get<double>(), 0.5, 1e-8);
  EXPECT_EQ(doc["grid"]["levels"], 4);
  EXPECT_FALSE(doc["rows"].empty());

  std::ofstream(grid) << R"({"levls": 4})";
  EXPECT_EQ(run_cli("verify --body " + body("sphere") + " --claim fprime-decay --grid " + grid).status, 1);
  std::filesystem::remove(grid);
}

TEST(Cli, FitFromScanFile) {
  const auto scan = temp_path("scan.csv");
  ASSERT_EQ(run_cli("scan --body " + body("sphere") + " --R-min 10 --R-max 30 --step 0.5 --out " + scan).status, 0);
  const auto r = run_cli("fit --input " + scan + " --format json");
  ASSERT_EQ(r.status, 0);
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_GT(doc["alpha_hat"].get<double>(), 0.5);
  EXPECT_LT(doc["alpha_hat"].get<double>(), 2.0);
  EXPECT_EQ(run_cli("fit --input " + scan + " --R-min 1").status, 0);
  std::filesystem::remove(scan);
}

TEST(Cli, InProcessRunMatchesBinary) {
  revlat::cli::RunConfig c;
  c.command = "count";
  c.body_path = body("parabolic");
  c.R = 4.5;
  c.timestamp = false;
  std::ostringstream out, err;
  ASSERT_EQ(revlat::cli::run(c, out, err), 0);
  EXPECT_EQ(out.str(), run_cli("count --body " + body("parabolic") + " --R 4.5 --no-timestamp").out);
}

TEST(BodyIo, ExampleBodiesCountLikeOracles) {
  using oracle::Dilation;
  const oracle::EllipseSpec ell{2, 1, 3, 1, 4, 0, 1};
  for (const Dilation R : {Dilation{5, 1}, Dilation{13, 2}, Dilation{9, 1}}) {
    EXPECT_EQ(revlat::count_lattice_points(revlat::load_body(body("sphere")), R.value()), oracle::ball(R));
    EXPECT_EQ(revlat::count_lattice_points(revlat::load_body(body("perturbed")), R.value()), oracle::poly_lens(R, 1));
    EXPECT_EQ(revlat::count_lattice_points(revlat::load_body(body("parabolic")), R.value()), oracle::poly_lens(R, 0));
    EXPECT_EQ(revlat::count_lattice_points(revlat::load_body(body("elliptic_sphere")), R.value()),
              oracle::elliptic_ball(R, ell));
  }
}

TEST(BodyIo, CustomPolynomialClosesAtFirstRoot) {
  const auto b = revlat::body_from_json({{"profile", "custom_poly"}, {"coefficients", {1.0, 0.0, -1.0}}});
  EXPECT_NEAR(b.r_inf(), 1.0, 1e-12);
  // |z| <= R - (x^2 + y^2) / R at R = 6
  std::int64_t n = 0;
  for (int x = -7; x <= 7; ++x)
    for (int y = -7; y <= 7; ++y)
      for (int z = -7; z <= 7; ++z)
        if (6 * std::abs(z) <= 36 - x * x - y * y) ++n;
  EXPECT_EQ(revlat::count_lattice_points(b, 6.0), n);
}

TEST(BodyIo, RejectsInconsistentSpecs) {
  using revlat::ValidationError;
  using nlohmann::json;
  EXPECT_THROW(revlat::body_from_json(json::array()), ValidationError);
  EXPECT_THROW(revlat::body_from_json({{"profile", "sphere"}, {"r_inf", 2.0}}), ValidationError);
  EXPECT_THROW(revlat::body_from_json({{"profile", "perturbed_parabola"}, {"a", 0.0}}), ValidationError);
  EXPECT_THROW(revlat::body_from_json({{"profile", "custom_poly"}, {"coefficients", json::array()}}),
               ValidationError);
  EXPECT_THROW(revlat::body_from_json(
                   {{"profile", "sphere"}, {"section", {{"type", "elliptic"}, {"Qstar", {{1, 2}, {3, 1}}}}}}),
               ValidationError);
  EXPECT_THROW(revlat::body_from_json(
                   {{"profile", "sphere"}, {"section", {{"type", "elliptic"}, {"Qstar", {{1, 2}, {2, 1}}}}}}),
               ValidationError);
  EXPECT_THROW(revlat::body_from_json({{"profile", "sphere"}, {"section", {{"type", "hexagonal"}}}}),
               ValidationError);
  EXPECT_THROW(revlat::load_body("/nonexistent.json"), ValidationError);
}
