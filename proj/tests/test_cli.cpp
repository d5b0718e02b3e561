#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"
#include "orlicz_qha/serialize.hpp"

using namespace oqha;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "orlicz-qha");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

nlohmann::json parsed(const Result& r) { return nlohmann::json::parse(r.out); }

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "oqha_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string write_text(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kP2 = R"({"family":"Power","p":2})";
const std::string kP43 = R"({"family":"Power","p":1.3333333333333333})";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("young exponents") {
    const Result r = run({"young", "exponents", kP2});
    CHECK(r.code == 0);
    CHECK(r.out == "{\"q\":2.0,\"p\":2.0}\n");
    const Result pl = run({"young", "exponents", R"({"family":"PowerLog","p":2,"a":1})"});
    CHECK(parsed(pl)["q"] == 2.0);
    CHECK(parsed(pl)["p"] == 3.0);
    CHECK(run({"young", "exponents", "{broken"}).code == 2);
  }

  TEST_CASE("young solve-theta") {
    const Result r = run({"young", "solve-theta", kP43, kP43});
    CHECK(r.code == 0);
    const auto theta = parsed(r)["theta"];
    CHECK(theta[0].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(theta[1].get<double>() == doctest::Approx(0.5).epsilon(1e-12));

    const Result bad = run({"young", "solve-theta", kP2, kP2});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("condition n-1 < sum 1/p violated") != std::string::npos);
  }

  TEST_CASE("young check-relation, interpolate, convexify") {
    const Result ok = run({"young", "check-relation", "--psi0", kP2, kP43, kP43});
    CHECK(ok.code == 0);
    CHECK(parsed(ok)["pass"] == true);
    CHECK(run({"young", "check-relation", "--psi0", R"({"family":"Power","p":3})", kP43, kP43}).code == 1);

    // (s^{1/2})^{1/2} (s^{1/4})^{1/2} = s^{3/8}.
    const Result ip = run({"young", "interpolate", kP2, R"({"family":"Power","p":4})", "--theta", "0.5", "0.5"});
    CHECK(ip.code == 0);
    CHECK(parsed(ip)["exponents"]["p"].get<double>() == doctest::Approx(8.0 / 3.0).epsilon(1e-9));

    const Result cv = run({"young", "convexify", R"({"family":"PiecewisePower","p_low":2,"p_high":3,"breakpoint":1})"});
    CHECK(cv.code == 0);
    CHECK(parsed(cv)["L"].get<double>() >= 1.0);
    CHECK(run({"young", "convexify", R"({"family":"Power","p":0.5})"}).code == 1);
  }

  TEST_CASE("norms of stored inputs") {
    const std::string ind = write_text("indicator.csv", "t_break,value\n4,1\n");
    CHECK(run({"norm", "orlicz", ind, "--young", kP2}).out == "{\"norm\":2.0}\n");
    CHECK(parsed(run({"norm", "weak", ind, "--p", "2"}))["norm"].get<double>() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(parsed(run({"norm", "lp", ind, "--p", "2"}))["norm"].get<double>() == doctest::Approx(2.0).epsilon(1e-12));

    OperatorMatrix D = OperatorMatrix::Zero(2, 2);
    D(0, 0) = 3.0;
    D(1, 1) = 1.0;
    const fs::path op = scratch() / "diag.bin";
    {
      std::ofstream out(op, std::ios::binary);
      write_operator_binary(out, D);
    }
    const Result s1 = run({"norm", "schatten", op.string(), "--young", R"({"family":"Power","p":1})"});
    CHECK(s1.code == 0);
    CHECK(parsed(s1)["norm"].get<double>() == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(parsed(run({"norm", "schatten", op.string(), "--p", "1"}))["norm"].get<double>() == doctest::Approx(4.0));
    CHECK(run({"norm", "schatten", ind, "--p", "1"}).code == 2);

    // Grid input with a measure density: the L^2 norm scales with its square root.
    const GridFunction f = gaussian(GridSpec{1, 6.0, 32}, {0.0, 0.0}, 1.0);
    const fs::path grid = scratch() / "g.bin";
    {
      std::ofstream out(grid, std::ios::binary);
      write_grid_binary(out, f);
    }
    const double unit = parsed(run({"norm", "lp", grid.string(), "--p", "2"}))["norm"].get<double>();
    const double quarter = parsed(run({"norm", "lp", grid.string(), "--p", "2", "--measure", "0.25"}))["norm"].get<double>();
    CHECK(quarter == doctest::Approx(0.5 * unit).epsilon(1e-12));

    CHECK(run({"norm", "orlicz", (scratch() / "missing.csv").string(), "--p", "2"}).code == 2);
    CHECK(run({"norm", "orlicz", write_text("bad.csv", "1,x\n"), "--p", "2"}).code == 2);
    CHECK(run({"norm", "orlicz", ind}).code == 2);
  }

  TEST_CASE("argument errors and help") {
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"young", "exponents", kP2, "--bogus"}).code == 2);
    const Result help = run({"norm", "orlicz", "--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("--young") != std::string::npos);
    CHECK(help.out.find("--measure") != std::string::npos);
  }

  TEST_CASE("verify writes deterministic reports and gates the exit code") {
    const fs::path dir = scratch() / "reports";
    fs::remove_all(dir);
    const std::string cfg = write_text("prop1.json", R"({"suite":"prop1","phi":{"family":"Power","p":2},"trials":1})");
    const Result a = run({"verify", cfg, "--out-dir", dir.string(), "--n", "96"});
    CHECK(a.code == 0);
    CHECK(parsed(a)["pass"] == true);
    const std::string js = slurp(dir / "prop1.json"), csv = slurp(dir / "prop1.csv");
    CHECK(!js.empty());
    CHECK(csv.rfind("trial,check,digest,", 0) == 0);

    const Result b = run({"verify", cfg, "--out-dir", dir.string(), "--n", "96"});
    CHECK(b.out == a.out);
    CHECK(slurp(dir / "prop1.json") == js);
    CHECK(slurp(dir / "prop1.csv") == csv);

    const Result rep = run({"report", (dir / "prop1.json").string(), "--csv", (dir / "again.csv").string()});
    CHECK(rep.code == 0);
    CHECK(rep.out.find("pass yes") != std::string::npos);
    CHECK(slurp(dir / "again.csv").rfind("trial,check,digest,", 0) == 0);

    const std::string forced =
        write_text("forced.json", R"({"suite":"prop1","phi":{"family":"Power","p":2},"trials":1,"bound_scale":0.01})");
    CHECK(run({"verify", forced, "--out-dir", dir.string(), "--n", "96", "--name", "forced"}).code == 1);
    CHECK(run({"report", (dir / "forced.json").string()}).code == 1);

    CHECK(run({"verify", (scratch() / "absent.json").string()}).code == 2);
    CHECK(run({"verify", write_text("typo.json", R"({"suite":"prop1","trails":3})")}).code == 2);
    CHECK(run({"verify", cfg, "--n", "64"}).code == 2);
    CHECK(run({"report", write_text("notreport.json", "{}")}).code == 2);
  }
}
