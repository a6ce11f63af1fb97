#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "spreadopt/report_io.hpp"

using namespace spreadopt;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

const fs::path& tmp_dir() {
  static const fs::path dir = [] {
    const fs::path d = SPREADOPT_TEST_TMPDIR;
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

RunResult run(const std::string& args) {
  static int counter = 0;
  const fs::path out = tmp_dir() / ("out" + std::to_string(counter) + ".txt");
  const fs::path err = tmp_dir() / ("err" + std::to_string(counter) + ".txt");
  ++counter;
  const std::string cmd = quoted(SPREADOPT_CLI_PATH) + " " + args + " > " +
                          quoted(out.string()) + " 2> " +
                          quoted(err.string());
  const int rc = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = rc != -1 && WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

// Parameter files shared by the cases below.
std::string canonical_file() {
  static const std::string path = [] {
    const fs::path p = tmp_dir() / "canonical.json";
    std::ofstream f(p);
    f << R"({"alpha1": -0.5, "alpha2": 0.5, "sigma1": 1.0, "sigma2": 1.0,)"
      << R"( "rho": 0.0, "c": 1.0})";
    return p.string();
  }();
  return path;
}

std::string shifted_file() {
  static const std::string path = [] {
    const fs::path p = tmp_dir() / "shifted.json";
    std::ofstream f(p);
    f << R"({"alpha1": 0.0, "alpha2": 1.0, "sigma1": 1.0, "sigma2": 1.0,)"
      << R"( "rho": 0.0, "c": 1.0})";
    return p.string();
  }();
  return path;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("analyze: condition market passes, violating market exits 2") {
  const RunResult good = run("analyze -p " + canonical_file());
  CHECK(good.exit_code == 0);
  CHECK(contains(good.out, "spread: kappa=1"));
  CHECK(contains(good.out, "holds=yes"));
  CHECK(contains(good.out, "overall: PASS"));

  const RunResult bad = run("analyze -p " + shifted_file());
  CHECK(bad.exit_code == 2);
  CHECK(contains(bad.out, "holds=no"));
  CHECK(contains(bad.out, "gamma0=0.5"));
  CHECK(contains(bad.out, "critical-horizon"));
  // The analysis verdicts themselves pass: exit 2 reflects the condition.
  CHECK(contains(bad.out, "overall: PASS"));
}

TEST_CASE("analyze: market from flags alone") {
  const RunResult r = run(
      "analyze --alpha1 -0.5 --alpha2 0.5 --sigma1 1 --sigma2 1 --rho 0 "
      "--c 1");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "holds=yes"));
}

TEST_CASE("analyze: flag overrides win over the file") {
  const RunResult r =
      run("analyze -p " + canonical_file() + " --alpha1 0 --alpha2 1");
  CHECK(r.exit_code == 2);
  CHECK(contains(r.out, "holds=no"));
}

TEST_CASE("analyze: json output round-trips and echoes the seed") {
  const RunResult r =
      run("analyze -p " + canonical_file() + " --format json --seed 42");
  REQUIRE(r.exit_code == 0);
  const nlohmann::json j = nlohmann::json::parse(r.out);
  CHECK(j["all_passed"] == true);
  CHECK(j["seed"] == 42);
  CHECK(j["spread"]["kappa"] == 1.0);
  CHECK(j["condition"]["holds"] == true);
  const ExperimentReport rep = report_from_json(j);
  CHECK(rep.title == "wellposedness-analysis");
  CHECK(rep.all_passed());
}

TEST_CASE("analyze: seed echo in text output") {
  const RunResult r = run("analyze -p " + canonical_file() + " --seed 42");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "seed: 42 (0x2a)"));
}

TEST_CASE("analyze: table dump via --out-dir") {
  const fs::path dir = tmp_dir() / "tables";
  const RunResult r = run("analyze -p " + canonical_file() + " --out-dir " +
                          quoted(dir.string()));
  CHECK(r.exit_code == 0);
  REQUIRE(fs::exists(dir / "critical-horizon.csv"));
  REQUIRE(fs::exists(dir / "neutrality-probe.csv"));
  std::ifstream f(dir / "critical-horizon.csv");
  std::string header;
  std::getline(f, header);
  CHECK(header == "gamma,t_n");
}

TEST_CASE("input errors exit with code 1 and a precise message") {
  const fs::path broken = tmp_dir() / "broken.json";
  {
    std::ofstream f(broken);
    f << "{\n  \"alpha1\": 0.1,,\n}\n";
  }
  const RunResult parse = run("analyze -p " + quoted(broken.string()));
  CHECK(parse.exit_code == 1);
  CHECK(contains(parse.err, "error:"));
  CHECK(contains(parse.err, "broken.json:2:"));

  const RunResult absent =
      run("analyze -p " + quoted((tmp_dir() / "absent.json").string()));
  CHECK(absent.exit_code == 1);
  CHECK(contains(absent.err, "error:"));

  const RunResult none = run("analyze");
  CHECK(none.exit_code == 1);
  CHECK(contains(none.err, "provide --params"));

  const RunResult badflag = run("analyze --nonsense 3");
  CHECK(badflag.exit_code == 1);

  const RunResult nosub = run("");
  CHECK(nosub.exit_code == 1);

  // Degenerate inputs are input errors, not verdicts.
  const RunResult badsigma = run(
      "analyze --alpha1 -0.5 --alpha2 0.5 --sigma1 0 --sigma2 1 --rho 0 "
      "--c 1");
  CHECK(badsigma.exit_code == 1);
  CHECK(contains(badsigma.err, "error:"));
}

TEST_CASE("help exits cleanly") {
  const RunResult r = run("--help");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "analyze"));
  CHECK(contains(r.out, "verify"));
}

TEST_CASE("solve: closed form at a point, with market-neutral weights") {
  const RunResult r =
      run("solve -p " + canonical_file() + " --gamma 0.5 --horizon 1 --z 1 "
          "--t 0 --x 1");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "T_N=inf"));
  CHECK(contains(r.out, "h=0.278405"));
  CHECK(contains(r.out, "g=0.203876"));
  CHECK(contains(r.out, "value=0.374262"));
  CHECK(contains(r.out, "pi=(-0.721595, 0.721595)"));
  CHECK(contains(r.out, "mn_pi=(-0.721595, 0.721595)"));
}

TEST_CASE("solve: zero-discriminant point on the shifted market") {
  const RunResult r =
      run("solve -p " + shifted_file() + " --gamma 0.5 --horizon 1 --z 1 "
          "--t 0");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "h=0.666667"));
  CHECK(contains(r.out, "g=0.450694"));
  CHECK(contains(r.out, "mn_pi: not applicable"));
}

TEST_CASE("solve: ill-posed horizon is a verdict, exit 2") {
  const RunResult r =
      run("solve -p " + shifted_file() + " --gamma 0.25 --horizon 1");
  CHECK(r.exit_code == 2);
  CHECK(contains(r.err, "verdict:"));
  CHECK(contains(r.err, "0.893116"));
}

TEST_CASE("solve: terminal time and bad arguments") {
  const RunResult terminal =
      run("solve -p " + canonical_file() + " --t 1 --z 0.5");
  CHECK(terminal.exit_code == 0);
  CHECK(contains(terminal.out, "mn_pi: undefined at t = horizon"));

  const RunResult late = run("solve -p " + canonical_file() + " --t 1.5");
  CHECK(late.exit_code == 1);
  CHECK(contains(late.err, "error:"));

  const RunResult broke = run("solve -p " + canonical_file() + " --x 0");
  CHECK(broke.exit_code == 1);

  const RunResult badgamma = run("solve -p " + canonical_file() + " --gamma 2");
  CHECK(badgamma.exit_code == 1);
}

TEST_CASE("simulate: zero strategy has deterministic utility") {
  const RunResult r =
      run("simulate -p " + canonical_file() + " --strategy zero --x0 2 "
          "--paths 50 --steps 10");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "strategy: zero"));
  CHECK(contains(r.out, "mean=0.828427"));
  CHECK(contains(r.out, "se=0 "));
}

TEST_CASE("simulate: path dumps in plain and gzip form") {
  const fs::path csv = tmp_dir() / "dump.csv";
  const RunResult plain = run("simulate -p " + canonical_file() +
                              " --paths 3 --steps 4 --z0 1 --out " +
                              quoted(csv.string()));
  CHECK(plain.exit_code == 0);
  CHECK(contains(plain.out, "paths written to"));
  REQUIRE(fs::exists(csv));
  const std::string text = slurp(csv);
  CHECK(text.rfind("path,node,time,z,s1,s2,x,w1_inc,w2_inc,wz_inc\n", 0) == 0);

  const fs::path gz = tmp_dir() / "dump.csv.gz";
  const RunResult zipped = run("simulate -p " + canonical_file() +
                               " --paths 3 --steps 4 --z0 1 --out " +
                               quoted(gz.string()));
  CHECK(zipped.exit_code == 0);
  const std::string raw = slurp(gz);
  REQUIRE(raw.size() >= 2);
  CHECK(static_cast<unsigned char>(raw[0]) == 0x1f);
  CHECK(static_cast<unsigned char>(raw[1]) == 0x8b);
}

TEST_CASE("simulate: market-neutral strategy needs the condition") {
  const RunResult r = run("simulate -p " + shifted_file() +
                          " --strategy mn --paths 10 --steps 5");
  CHECK(r.exit_code == 2);
  CHECK(contains(r.err, "verdict:"));

  const RunResult bogus = run("simulate -p " + canonical_file() +
                              " --strategy sideways");
  CHECK(bogus.exit_code == 1);
}

TEST_CASE("verify: full suite passes on the canonical market") {
  const std::string knobs = " --gamma 0.5 --horizon 1 --paths 5000 "
                            "--steps 100 --workers 2";
  const RunResult text = run("verify -p " + canonical_file() + knobs);
  CHECK(text.exit_code == 0);
  CHECK(contains(text.out, "overall: PASS"));
  CHECK(contains(text.out, "mc-optimal-vs-value"));
  CHECK(contains(text.out, "h-vs-rk4"));

  const RunResult js = run("verify -p " + canonical_file() + knobs +
                           " --format json");
  REQUIRE(js.exit_code == 0);
  const nlohmann::json j = nlohmann::json::parse(js.out);
  CHECK(j["all_passed"] == true);
  const ExperimentReport rep = report_from_json(j);
  CHECK(rep.title == "verification-suite");
  CHECK(rep.mc_sections.size() == 5);
}

TEST_CASE("verify: ill-posed horizon is rejected as a verdict") {
  const RunResult r = run("verify -p " + shifted_file() +
                          " --gamma 0.25 --horizon 1 --paths 10 --steps 5");
  CHECK(r.exit_code == 2);
  CHECK(contains(r.err, "verdict:"));
}

TEST_CASE("pde-check: default grid passes, coarse grid is refused") {
  const RunResult fine = run("pde-check -p " + canonical_file());
  CHECK(fine.exit_code == 0);
  CHECK(contains(fine.out, "fd-vs-closed-form"));
  CHECK(contains(fine.out, "overall: PASS"));

  const RunResult coarse =
      run("pde-check -p " + canonical_file() + " --nz 101 --nt 50");
  CHECK(coarse.exit_code == 2);
  CHECK(contains(coarse.err, "verdict:"));

  const RunResult zc = run("pde-check -p " + canonical_file() +
                           " --boundary zero-curvature");
  CHECK(zc.exit_code == 0);
}

TEST_CASE("blowup: diverges on an ill-posed set, refuses a well-posed one") {
  const RunResult ok = run("blowup -p " + shifted_file() + " --gamma 0.25");
  CHECK(ok.exit_code == 0);
  CHECK(contains(ok.out, "blowup-curve"));
  CHECK(contains(ok.out, "overall: PASS"));

  const RunResult wrong_market =
      run("blowup -p " + canonical_file() + " --gamma 0.25");
  CHECK(wrong_market.exit_code == 2);
  CHECK(contains(wrong_market.err, "verdict:"));

  const RunResult wrong_gamma =
      run("blowup -p " + shifted_file() + " --gamma 0.75");
  CHECK(wrong_gamma.exit_code == 2);

  const RunResult bad_k =
      run("blowup -p " + shifted_file() + " --gamma 0.25 --k-max 20");
  CHECK(bad_k.exit_code == 1);
  CHECK(contains(bad_k.err, "error:"));
}
