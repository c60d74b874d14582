#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

const fs::path& workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::path(BIKELAB_WORKDIR) / "cli_work";
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string at(const std::string& name) { return (workdir() / name).string(); }

Run run(const std::string& args) {
  const std::string cmd = std::string(BIKELAB_CLI) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  std::size_t k;
  while ((k = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, k);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

nlohmann::json load(const std::string& path) { return nlohmann::json::parse(slurp(path)); }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("gen writes a 512-point circle") {
  REQUIRE(run("gen --kind circle --r 2 --n 512 --out " + at("c.json")).code == 0);
  const auto j = load(at("c.json"));
  CHECK(j["points"].size() == 512);
  CHECK(j["dim"] == 2);
  CHECK(j["closed"] == true);
}

TEST_CASE("verify theorem-int on the circle passes") {
  REQUIRE(run("gen --kind circle --r 2 --n 512 --out " + at("c.json")).code == 0);
  const auto r = run("verify theorem-int --curve " + at("c.json") + " --l 0.4 --out " + at("ti.json"));
  CHECK(r.code == 0);
  const auto j = load(at("ti.json"));
  CHECK(j["pass"] == true);
  for (const auto& res : j["residuals"])
    if (res["name"] == "integral_drift") CHECK(res["value"].get<double>() < 1e-8);
}

TEST_CASE("monodromy of the circle R=2 at lambda=5 is elliptic or identity") {
  REQUIRE(run("gen --kind circle --r 2 --n 512 --out " + at("c.json")).code == 0);
  const auto r = run("monodromy --curve " + at("c.json") + " --lambda 5");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  const std::string cls = j["class"];
  CHECK((cls == "elliptic" || cls == "identity"));
}

TEST_CASE("a planted failure exits 1") {
  REQUIRE(run("gen --kind fourier_perturbed --seed 4 --amp 0.05 --n 512 --out " + at("p.json")).code == 0);
  REQUIRE(run("gen --kind ellipse --a 2 --b 1 --n 512 --out " + at("e.json")).code == 0);
  CHECK(run("verify zindler --curve " + at("e.json") + " --d 1.5").code == 1);
  CHECK(run("verify zindler --curve " + at("c.json") + " --d 6").code == 1);
}

TEST_CASE("usage errors exit 2 and name the flag") {
  CHECK(run("").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("gen --kind circle --n 0").code == 2);
  CHECK(run("monodromy --lambda 1").code == 2);
  const std::string cmd = std::string(BIKELAB_CLI) + " scan-lambda --curve x.json --grid 1:2 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string msg;
  char buf[512];
  std::size_t k;
  while ((k = fread(buf, 1, sizeof buf, pipe)) > 0) msg.append(buf, k);
  const int status = pclose(pipe);
  CHECK(WEXITSTATUS(status) == 2);
  CHECK(msg.find("--grid") != std::string::npos);
}

TEST_CASE("a missing input file exits 1") {
  CHECK(run("invariants --curve " + at("does_not_exist.json")).code == 1);
}

TEST_CASE("repeated invocations give byte-identical reports") {
  REQUIRE(run("gen --kind fourier_perturbed --seed 9 --amp 0.05 --n 256 --out " + at("q.json")).code == 0);
  for (const char* check : {"bisymp", "mono-conjugacy"}) {
    const std::string base = std::string("verify ") + check + " --curve " + at("q.json") + " --l 0.3 --seed 5 --out ";
    run(base + at("r1.json"));
    run(base + at("r2.json"));
    const std::string a = slurp(at("r1.json"));
    CHECK(!a.empty());
    CHECK(a == slurp(at("r2.json")));
  }
}

TEST_CASE("csv and svg outputs") {
  REQUIRE(run("gen --kind circle --r 2 --n 256 --out " + at("c2.json")).code == 0);
  const auto scan = run("scan-lambda --curve " + at("c2.json") + " --grid 0.1:0.8:8");
  REQUIRE(scan.code == 0);
  CHECK(scan.out.rfind("lambda,tr2_over_det,I", 0) == 0);
  CHECK(std::count(scan.out.begin(), scan.out.end(), '\n') == 9);

  REQUIRE(run("gen --kind circle --r 1 --n 128 --dim 3 --out " + at("u.json")).code == 0);
  CHECK(run("flow --curve " + at("u.json") + " --field filament --dt 1e-3 --steps 10 --log " + at("f.csv") +
            " --out " + at("u1.json"))
            .code == 0);
  const std::string log = slurp(at("f.csv"));
  CHECK(log.rfind("step,t,F1,F2,F3,F4,F5", 0) == 0);
  CHECK(load(at("u1.json"))["points"].size() == 128);

  CHECK(run("plot --curve " + at("c2.json") + " --kind rear --l 0.5 --plot " + at("rear.svg")).code == 0);
  CHECK(slurp(at("rear.svg")).find("<svg") != std::string::npos);
}

}  // TEST_SUITE
