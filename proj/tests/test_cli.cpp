#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>
#include <sys/wait.h>

#include "sleppulse/report.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "sleppulse_cli";

const char* kReference = "alpha=1\nbeta=2\ngamma=2\nD=2\nepsilon=0.012\ntau_hat=3\ntheta_hat=2\n";

fs::path write_config(const std::string& name, const std::string& text) {
  fs::create_directories(kRoot);
  const auto p = kRoot / (name + ".cfg");
  std::ofstream(p) << text;
  return p;
}

int run(const std::string& args) {
  const std::string cmd = std::string(SLEPPULSE_CLI) + " " + args + " > " + (kRoot / "stdout.txt").string() +
                          " 2> " + (kRoot / "stderr.txt").string();
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// value of a '# key = value' header line, NaN when absent
double comment_value(const fs::path& csv, const std::string& key) {
  std::ifstream in(csv);
  std::string line;
  const std::string prefix = "# " + key + " = ";
  while (std::getline(in, line))
    if (line.rfind(prefix, 0) == 0) return std::stod(line.substr(prefix.size()));
  return NAN;
}

std::string comment_text(const fs::path& csv, const std::string& key) {
  std::ifstream in(csv);
  std::string line;
  const std::string prefix = "# " + key + " = ";
  while (std::getline(in, line))
    if (line.rfind(prefix, 0) == 0) return line.substr(prefix.size());
  return {};
}

std::vector<std::vector<std::string>> rows(const fs::path& csv) {
  std::ifstream in(csv);
  std::string line;
  std::vector<std::vector<std::string>> out;
  bool seen_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!seen_header) {
      seen_header = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    out.push_back(cells);
  }
  return out;
}

std::string header(const fs::path& csv) {
  std::ifstream in(csv);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') return line;
  return {};
}

}  // namespace

TEST_CASE("configuration errors exit with 2") {
  fs::create_directories(kRoot);
  const auto out = (kRoot / "err").string();
  const auto missing = write_config("missing", "alpha=1\nbeta=2\nD=2\nepsilon=0.012\n");
  CHECK(run("--config " + missing.string() + " --out " + out + " pulse") == 2);
  CHECK(slurp(kRoot / "stderr.txt").find("gamma") != std::string::npos);
  const auto unknown = write_config("unknown", std::string(kReference) + "zeta=1\n");
  CHECK(run("--config " + unknown.string() + " --out " + out + " pulse") == 2);
  const auto regime = write_config("regime", std::string(kReference) + "regime=fast\n");
  CHECK(run("--config " + regime.string() + " --out " + out + " pulse") == 2);
  CHECK(run("--out " + out + " pulse") == 2);
  CHECK(run("--config " + (kRoot / "absent.cfg").string() + " pulse") == 2);
  const auto ok = write_config("ok", kReference);
  CHECK(run("--config " + ok.string() + " --out " + out + " nosuchcommand") == 2);
  CHECK(run("--config " + ok.string() + " --out " + out + " diagram --n-psi 0") == 2);
}

TEST_CASE("pulse output is deterministic and verifiable") {
  const auto cfg = write_config("ok", kReference);
  const auto a = kRoot / "pulse_a", b = kRoot / "pulse_b";
  fs::remove_all(a);
  fs::remove_all(b);
  REQUIRE(run("--config " + cfg.string() + " --out " + a.string() + " pulse --points 2001") == 0);
  REQUIRE(run("--config " + cfg.string() + " --out " + b.string() + " pulse --points 2001") == 0);
  CHECK(header(a / "pulse.csv") == "x,u,v,w");
  CHECK(slurp(a / "pulse.csv") == slurp(b / "pulse.csv"));
  CHECK(sleppulse::verify_manifest(a).empty());
  CHECK(fs::exists(a / "pulse.gp"));

  // plateau near +1 inside the layers
  const double xs = comment_value(a / "pulse.csv", "x_star");
  for (const auto& r : rows(a / "pulse.csv")) {
    const double x = std::stod(r[0]);
    if (std::abs(x) < 0.5 * xs) CHECK(std::abs(std::stod(r[1]) - 1.0) < 0.05);
  }

  // deleting an emitted file breaks verification
  fs::remove(a / "pulse.gp");
  CHECK_FALSE(sleppulse::verify_manifest(a).empty());

  // equal diffusion lengths: closed-form layer position
  const auto d1 = write_config("d1", "alpha=1\nbeta=2\ngamma=2\nD=1\nepsilon=0.012\n");
  const auto c = kRoot / "pulse_d1";
  REQUIRE(run("--config " + d1.string() + " --out " + c.string() + " pulse --points 2001") == 0);
  CHECK(comment_value(c / "pulse.csv", "x_star") == doctest::Approx(0.5 * std::log(3.0 / 2.0)).epsilon(1e-14));
}

TEST_CASE("diagram, trace and spectrum outputs") {
  const auto cfg = write_config("ok", kReference);
  const auto d = kRoot / "diagram";
  fs::remove_all(d);
  REQUIRE(run("--config " + cfg.string() + " --out " + d.string() + " diagram --n-psi 31 --region-grid 4") == 0);
  CHECK(header(d / "drift_line.csv") == "tau_hat,theta_hat");
  CHECK(header(d / "hopf_curve.csv") == "psi,s_star,tau_hat,theta_hat,xi_star,residual,transversality");
  CHECK(header(d / "codim2.csv") == "psi,tau_hat,theta_hat,xi_star,line_residual,slep_residual");
  CHECK(header(d / "regions.csv") == "tau_hat,theta_hat,region");
  CHECK(sleppulse::verify_manifest(d).empty());
  CHECK(std::abs(comment_value(d / "codim2.csv", "x_star") - 0.311905) < 1e-5);
  CHECK(rows(d / "codim2.csv").size() == 2);

  const auto t = kRoot / "trace";
  fs::remove_all(t);
  REQUIRE(run("--config " + cfg.string() + " --out " + t.string() + " trace --n-real 10") == 0);
  CHECK(header(t / "path.csv") == "s,re,im,partner_re,partner_im,kind");
  const double su = comment_value(t / "path.csv", "s_under"), ss = comment_value(t / "path.csv", "s_star"),
               so = comment_value(t / "path.csv", "s_over");
  CHECK(su < ss);
  CHECK(ss < so);
  const auto path = rows(t / "path.csv");
  REQUIRE(path.size() > 2);
  CHECK(path.front()[5] == path.back()[5]);
  CHECK(std::stod(path.front()[2]) == 0.0);
  CHECK(std::stod(path.back()[2]) == 0.0);
  for (const auto& r : path)
    if (r[5] != path.front()[5]) CHECK(std::stod(r[4]) == -std::stod(r[2]));

  const auto s = kRoot / "spectrum";
  fs::remove_all(s);
  REQUIRE(run("--config " + cfg.string() + " --out " + s.string() + " spectrum --n-xi 20 --half") == 0);
  std::ifstream in(s / "dispersion.csv");
  std::string line;
  int rows = 0;
  bool negative = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'x') continue;
    ++rows;
    negative = negative || line[0] == '-';
  }
  CHECK(rows > 0);
  CHECK_FALSE(negative);
  CHECK(comment_value(s / "dispersion.csv", "essential_bound") < 0.0);
}

TEST_CASE("order-one discrete eigenvalues through the spectrum command") {
  const auto cfg = write_config("o1", "alpha=1\nbeta=2\ngamma=2\nD=2\nepsilon=0.012\nregime=order1\ntau=1\ntheta=1\n");
  const auto s = kRoot / "spectrum_o1";
  fs::remove_all(s);
  REQUIRE(run("--config " + cfg.string() + " --out " + s.string() + " spectrum --n-xi 50 --discrete 4096 --n-eigs 2") == 0);
  const double predicted = comment_value(s / "eigenvalues.csv", "leading_even_scaled_prediction");
  bool found = false;
  for (const auto& r : rows(s / "eigenvalues.csv")) {
    if (r[4] != "even") continue;
    found = true;
    CHECK(std::abs(std::stod(r[2]) / predicted - 1.0) < 0.25);
  }
  CHECK(found);
  CHECK(comment_value(s / "dispersion.csv", "essential_bound") < 0.0);
}

TEST_CASE("simulate and sweep") {
  const auto cfg = write_config("ok", kReference);
  const auto a = kRoot / "sim";
  fs::remove_all(a);
  REQUIRE(run("--config " + cfg.string() + " --out " + a.string() + " simulate") == 0);
  CHECK(comment_text(a / "trajectory.csv", "label") == "standing");
  CHECK(header(a / "trajectory.csv") == "t,x_minus,x_plus,center,width");
  CHECK(sleppulse::verify_manifest(a).empty());

  const auto bad = write_config("badregime", "alpha=1\nbeta=2\ngamma=2\nD=2\nepsilon=0.012\nregime=weird\ntau_hat=3\ntheta_hat=2\n");
  CHECK(run("--config " + bad.string() + " --out " + a.string() + " simulate") == 2);

  // the thread count comes from the environment and does not change the bytes
  const auto b1 = kRoot / "sweep1", b2 = kRoot / "sweep2";
  fs::remove_all(b1);
  fs::remove_all(b2);
  REQUIRE(run("--config " + cfg.string() + " --out " + b1.string() + " sweep") == 0);
  REQUIRE(run("--config " + cfg.string() + " --out " + b2.string() + " sweep") == 0);
  const std::string env = "SLEPPULSE_THREADS=2 ";
  const auto b3 = kRoot / "sweep3";
  fs::remove_all(b3);
  REQUIRE(std::system((env + SLEPPULSE_CLI + " --config " + cfg.string() + " --out " + b3.string() + " sweep > /dev/null").c_str()) == 0);
  CHECK(slurp(b1 / "sweep.csv") == slurp(b2 / "sweep.csv"));
  CHECK(slurp(b1 / "sweep.csv") == slurp(b3 / "sweep.csv"));
  const auto sw = rows(b1 / "sweep.csv");
  REQUIRE(sw.size() == 4);
  CHECK(sw[1][5] == "standing");
  CHECK(sw[3][5] == "traveling");
  CHECK(sw[1][6] == "stable");
  CHECK(sw[3][6] == "drift");
}
