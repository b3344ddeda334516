#include "bellcompat/cli.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace bellcompat;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "bellcompat");
  std::ostringstream out, err;
  Run r;
  r.code = run_command(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class Scratch {
 public:
  Scratch() : dir_(fs::temp_directory_path() / ("bellcompat_cli_" + std::to_string(::getpid()))) {
    fs::create_directories(dir_);
  }
  ~Scratch() { fs::remove_all(dir_); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name, std::ios::binary) << text;
    return dir_ / name;
  }
  fs::path path(const std::string& name) const { return dir_ / name; }

 private:
  fs::path dir_;
};

const std::string kTriple =
    "var_i,var_j,p_pp,p_pm,p_mp,p_mm\n0,1,1/2,0,0,1/2\n2,1,0,1/2,1/2,0\n0,2,1/2,0,0,1/2\n";

const fs::path kData = BELLCOMPAT_DATA_DIR;

}  // namespace

TEST_CASE("check and quasi") {
  Scratch s;
  const auto family = s.write("s2.csv", kTriple).string();
  auto r = run({"check", "--family", family});
  CHECK(r.code == kExitOk);
  const auto report = nlohmann::json::parse(r.out);
  CHECK(report["command"] == "check");
  CHECK(report["result"]["status"] == "INFEASIBLE");
  CHECK(report["result"]["certificate_gap"]["value"].get<double>() > 0);
  CHECK(report["finding"] == true);
  CHECK(run({"--fail-on-finding", "check", "--family", family}).code == kExitFinding);
  CHECK(run({"check", "--family", family, "--fail-on-finding", "--float"}).code == kExitFinding);

  r = run({"quasi", "--family", family});
  CHECK(r.code == kExitOk);
  CHECK(nlohmann::json::parse(r.out)["result"]["negativity"]["exact"] == "1/2");

  const auto feasible = s.write("ok.csv", "var_i,var_j,p_pp,p_pm,p_mp,p_mm\n0,1,1/4,1/4,1/4,1/4\n").string();
  CHECK(run({"--fail-on-finding", "check", "--family", feasible}).code == kExitOk);

  const auto bad = s.write("bad.csv", "var_i,var_j,p_pp,p_pm,p_mp,p_mm\n0,1,1/2,1/2,1/2,0\n").string();
  r = run({"check", "--family", bad});
  CHECK(r.code == kExitInput);
  CHECK(r.err.find("normalization") != std::string::npos);
}

TEST_CASE("predict") {
  auto r = run({"predict", "--angles", "0,60,30"});
  CHECK(r.code == kExitOk);
  const auto report = nlohmann::json::parse(r.out);
  const auto& w = report["result"]["inequalities"][0];
  CHECK(w["lhs"].get<double>() == doctest::Approx(0.375));
  CHECK(w["rhs"].get<double>() == doctest::Approx(0.25));
  CHECK(w["violated"] == true);
  CHECK(report["result"]["compatibility"] == "INFEASIBLE");
  CHECK(run({"predict", "--angles", "0,60,30", "--fail-on-finding"}).code == kExitFinding);
  CHECK(run({"predict", "--angles", "0,90,45", "--fail-on-finding"}).code == kExitOk);

  r = run({"predict", "--angles", "0,45,22.5,67.5", "--chsh"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("2.82842712") != std::string::npos);

  CHECK(run({"predict", "--angles", "0"}).code == kExitInput);
  CHECK(run({"predict", "--angles", "0,x"}).code == kExitInput);
}

TEST_CASE("simulate is reproducible") {
  Scratch s;
  const auto config = (kData / "shared_polarization.json").string();
  const auto a = s.path("a.json").string();
  const auto b = s.path("b.json").string();
  const auto c = s.path("c.json").string();
  CHECK(run({"simulate", "--config", config, "--trials", "20000", "--out", a}).code == kExitOk);
  const std::string first = slurp(a);
  CHECK(run({"simulate", "--config", config, "--trials", "20000", "--out", a}).code == kExitOk);
  CHECK(slurp(a) == first);
  CHECK(run({"simulate", "--config", config, "--trials", "20000", "--out", b}).code == kExitOk);
  CHECK(nlohmann::json::parse(slurp(b))["result"] == nlohmann::json::parse(first)["result"]);
  CHECK(run({"simulate", "--config", config, "--trials", "20000", "--seed", "8", "--out", c}).code ==
        kExitOk);
  CHECK(slurp(a) != slurp(c));

  // Worker count changes nothing but the argv echo.
  auto ra = nlohmann::json::parse(slurp(a));
  const auto w1 = s.path("w1.json").string();
  CHECK(run({"simulate", "--config", config, "--trials", "20000", "--workers", "1", "--out", w1})
            .code == kExitOk);
  auto rw = nlohmann::json::parse(slurp(w1));
  CHECK(ra["result"] == rw["result"]);

  const auto csv = s.path("pooled.csv").string();
  const auto contextual = (kData / "contextual_triple.json").string();
  auto r = run({"simulate", "--config", contextual, "--trials", "1000", "--csv", csv});
  CHECK(r.code == kExitOk);
  CHECK(nlohmann::json::parse(r.out)["result"]["evaluation"]["violated"] == true);
  r = run({"cross", "--data", csv, "--inequality", "bell", "--fail-on-finding"});
  CHECK(r.code == kExitFinding);
  CHECK(nlohmann::json::parse(r.out)["result"]["report"]["lhs"].get<double>() == 2.0);
}

TEST_CASE("analyze") {
  Scratch s;
  const auto data = s.write("d.csv",
                            "theta1_deg,theta2_deg,n_pp,n_pm,n_mp,n_mm\n"
                            "0,60,145000,395000,355000,105000\n0,60,145000,375000,375000,105000\n")
                        .string();
  auto r = run({"analyze", "--data", data, "--combination", "1,1,-1,-1"});
  CHECK(r.code == kExitOk);
  const auto report = nlohmann::json::parse(r.out);
  const auto& rows = report["result"]["records"];
  REQUIRE(rows.size() == 2);
  CHECK(rows[0]["combinations"][0]["deviation"].get<double>() == doctest::Approx(0.08));
  CHECK(rows[0]["flagged"] == true);
  CHECK(rows[1]["flagged"] == true);
  CHECK(run({"analyze", "--data", data, "--combination", "1,1"}).code == kExitInput);

  const auto zero = s.write("z.csv", "theta1_deg,theta2_deg,n_pp,n_pm,n_mp,n_mm\n0,0,0,0,0,0\n").string();
  r = run({"analyze", "--data", zero});
  CHECK(r.code == kExitInput);
  CHECK(r.err.find(":2:") != std::string::npos);
}

TEST_CASE("legget") {
  auto r = run({"legget", "--trials", "50", "--seed", "3", "--grid", "3x3x4"});
  CHECK(r.code == kExitOk);
  const auto report = nlohmann::json::parse(r.out);
  CHECK(report["result"]["failures"] == 0);
  CHECK(report["result"]["max_abs_difference"].get<double>() <= 1e-12);
  CHECK(run({"legget", "--grid", "3x3"}).code == kExitInput);
}

TEST_CASE("input errors exit 2") {
  Scratch s;
  auto r = run({"frobnicate"});
  CHECK(r.code == kExitInput);
  CHECK(r.err.find("unknown subcommand") != std::string::npos);
  CHECK(run({}).code == kExitInput);
  CHECK(run({"check"}).code == kExitInput);
  CHECK(run({"check", "--family", "/nonexistent/f.csv"}).code == kExitInput);
  CHECK(run({"check", "--family", "x", "--exact", "--float"}).code == kExitInput);

  const auto config = s.write("bad.json", R"({"model": "contexts", "trials": 10, "contexts": []})").string();
  r = run({"simulate", "--config", config});
  CHECK(r.code == kExitInput);
  CHECK(r.err.find("config") != std::string::npos);
  CHECK(run({"simulate", "--config", s.write("junk.json", "{").string()}).code == kExitInput);

  const auto good = (kData / "shared_polarization.json").string();
  r = run({"simulate", "--config", good, "--trials", "10", "--out", "/nonexistent/dir/r.json"});
  CHECK(r.code == kExitInput);
  CHECK(r.err.find("cannot write") != std::string::npos);

  CHECK(run({"--version"}).code == kExitOk);
}
