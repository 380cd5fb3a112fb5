#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

const fs::path& work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "smoothprob_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

// Runs the CLI with its output directory pointed into a per-case subdir.
CliResult run_cli(const std::string& args, const std::string& out_subdir) {
  const fs::path out_dir = work_dir() / out_subdir;
  fs::create_directories(out_dir);
  const fs::path capture = work_dir() / (out_subdir + ".capture");
  const std::string cmd = "SMOOTHPROB_OUT_DIR=" + out_dir.string() + " " +
                          std::string(SMOOTHPROB_CLI_PATH) + " " + args + " > " +
                          capture.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
  std::ifstream in(capture);
  std::stringstream ss;
  ss << in.rdbuf();
  r.output = ss.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("rho subcommand prints the classical value and writes json") {
  const auto r = run_cli("rho --s 2 --no-timestamp", "rho1");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("0.3068528194") != std::string::npos);
  const auto j = nlohmann::json::parse(slurp(work_dir() / "rho1" / "rho.json"));
  CHECK(!j.contains("timestamp"));
  REQUIRE(j.contains("points"));
  bool found = false;
  for (const auto& row : j.at("points")) {
    if (row.at("label") == "rho s=2") {
      CHECK(std::fabs(row.at("estimate").get<double>() - 0.30685281944005469) <
            1e-9);
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("reruns without timestamps are byte-identical") {
  REQUIRE(run_cli("rho --s 2 --no-timestamp", "rho_a").exit_code == 0);
  REQUIRE(run_cli("rho --s 2 --no-timestamp", "rho_b").exit_code == 0);
  CHECK(slurp(work_dir() / "rho_a" / "rho.json") ==
        slurp(work_dir() / "rho_b" / "rho.json"));
}

TEST_CASE("timestamp and wall time appear by default") {
  REQUIRE(run_cli("omega --s 2.5 --no-timestamp", "om_plain").exit_code == 0);
  REQUIRE(run_cli("omega --s 2.5", "om_ts").exit_code == 0);
  const auto plain =
      nlohmann::json::parse(slurp(work_dir() / "om_plain" / "omega.json"));
  const auto stamped =
      nlohmann::json::parse(slurp(work_dir() / "om_ts" / "omega.json"));
  CHECK(!plain.contains("timestamp"));
  REQUIRE(stamped.contains("timestamp"));
  CHECK(stamped.contains("wall_seconds"));
  const std::string ts = stamped.at("timestamp").get<std::string>();
  CHECK(ts.size() == 20);
  CHECK(ts.back() == 'Z');
  CHECK(ts[10] == 'T');
}

TEST_CASE("lambda subcommand evaluates log(s-1) at level 2") {
  const auto r = run_cli("lambda --L 2 --s 3 --no-timestamp", "la1");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("0.6931471806") != std::string::npos);
}

TEST_CASE("csv format writes the points table") {
  const auto r =
      run_cli("lambda --L 2 --s 3 --format csv --no-timestamp", "la_csv");
  CHECK(r.exit_code == 0);
  const std::string csv = slurp(work_dir() / "la_csv" / "lambda.csv");
  CHECK(csv.rfind("label,parameter,estimate,stderr,reference,sigma,flagged\n",
                  0) == 0);
  CHECK(csv.find("0.693147180") != std::string::npos);
}

TEST_CASE("kfree census density matches 1/zeta(2) to print precision") {
  const auto r = run_cli("census-kfree --x 100000 --k 2 --no-timestamp", "ck1");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("0.6079") != std::string::npos);
}

TEST_CASE("exact probability of n = 1 under three primes") {
  const auto r = run_cli("exact-prob --n 3 --value 1 --no-timestamp", "ep1");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("0.2666666667") != std::string::npos);
}

TEST_CASE("parameter errors exit with code 2") {
  const auto not_smooth = run_cli("exact-prob --n 3 --value 77", "err1");
  CHECK(not_smooth.exit_code == 2);
  CHECK(not_smooth.output.find("parameter error") != std::string::npos);
  CHECK(run_cli("rho --s -1", "err2").exit_code == 2);
  CHECK(run_cli("no-such-subcommand", "err3").exit_code == 2);
  CHECK(run_cli("rho --s 2 --format yaml", "err4").exit_code == 2);
}

TEST_CASE("resource limits exit with code 3") {
  const auto r = run_cli("census-smooth --x 200000000 --s 2", "err5");
  CHECK(r.exit_code == 3);
}

TEST_CASE("sample rows are seed-deterministic csv") {
  const std::string args =
      "sample --n 50 --samples 100 --seed 5 --format csv --no-timestamp";
  REQUIRE(run_cli(args, "sa_a").exit_code == 0);
  REQUIRE(run_cli(args, "sa_b").exit_code == 0);
  const std::string a = slurp(work_dir() / "sa_a" / "sample.csv");
  CHECK(a == slurp(work_dir() / "sa_b" / "sample.csv"));
  CHECK(a.rfind("index,log_n,ratio_pplus,ratio_pminus,n\n", 0) == 0);
  CHECK(std::count(a.begin(), a.end(), '\n') == 101);  // header + 100 rows
  REQUIRE(run_cli("sample --n 50 --samples 100 --seed 6 --format csv "
                  "--no-timestamp",
                  "sa_c")
              .exit_code == 0);
  CHECK(a != slurp(work_dir() / "sa_c" / "sample.csv"));
}

}  // TEST_SUITE
