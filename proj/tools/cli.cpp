#include "cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "orlicz_qha/errors.hpp"
#include "orlicz_qha/serialize.hpp"
#include "orlicz_qha/verify.hpp"

namespace oqha::cli {

namespace {

using json = nlohmann::ordered_json;

std::vector<YoungFunction> parse_all(const std::vector<std::string>& specs) {
  std::vector<YoungFunction> out;
  for (const auto& s : specs) out.push_back(parse_young(s));
  return out;
}

json exponents_json(const Exponents& e) {
  json j;
  j["q"] = e.q;
  j["p"] = std::isfinite(e.p) ? json(e.p) : json("inf");
  return j;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Decreasing rearrangement of any supported input file.
StepFunction load_rearrangement(const std::string& path, double measure) {
  const FileKind kind = sniff_file(path);
  std::ifstream in(path, std::ios::binary);
  switch (kind) {
    case FileKind::Grid:
      return rearrange(to_measure_samples(read_grid_binary(in), measure));
    case FileKind::GridCsv:
      return rearrange(to_measure_samples(read_grid_csv(in), measure));
    case FileKind::Operator:
      return singular_values(read_operator_binary(in));
    default:
      return read_step_csv(in);
  }
}

struct NormArgs {
  std::string input;
  std::string young;
  std::optional<double> p;
  double measure = 1.0;
};

YoungFunction norm_young(const NormArgs& a) {
  if (!a.young.empty()) return parse_young(a.young);
  if (a.p) return YoungFunction::power(*a.p);
  throw Error(ErrorCode::InvalidArgument, "either --young or --p is required");
}

void add_norm_options(CLI::App* cmd, NormArgs& a, bool young, bool p) {
  cmd->add_option("input", a.input, "Step-function CSV, grid function (binary or CSV) or operator file")
      ->required();
  if (young) cmd->add_option("--young", a.young, "Young function as inline JSON or a file path");
  if (p) cmd->add_option("--p", a.p, "Power exponent, shorthand for a Power Young function")->check(CLI::PositiveNumber);
  cmd->add_option("--measure", a.measure, "Measure density for grid functions (cell measure = density * h^2d)")
      ->check(CLI::PositiveNumber);
}

void print_json(std::ostream& out, const json& j) { out << j.dump() << '\n'; }

// Per-check aggregate of a report JSON, in first-appearance order.
int print_report(std::ostream& out, const std::string& path, const std::string& csv_path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("report is not valid JSON: ") + e.what());
  }
  if (!j.contains("summary") || !j.contains("records"))
    throw Error(ErrorCode::ParseError, "report lacks 'summary' or 'records'");
  const auto& s = j["summary"];
  out << "suite " << j.value("suite", std::string("?")) << "  seed " << j.value("seed", 0) << "  trials "
      << j.value("trials", 0) << '\n';
  out << "pass " << (s.value("pass", false) ? "yes" : "no") << "  checks " << s.value("passed", 0) << '/'
      << s.value("checks", 0) << "  self-test failed " << (s.value("self_test_failed", false) ? "yes" : "no") << '\n';
  out << "worst relative margin " << s["worst_relative_margin"].dump() << "  empirical constant "
      << s["empirical_constant"].dump() << '\n';

  struct Row {
    std::size_t count = 0, passed = 0;
    std::optional<double> worst_ratio;
  };
  std::vector<std::string> order;
  std::map<std::string, Row> rows;
  for (const auto& r : j["records"]) {
    const std::string check = r.value("check", std::string("?"));
    if (!rows.count(check)) order.push_back(check);
    Row& row = rows[check];
    ++row.count;
    if (r.value("pass", false)) ++row.passed;
    if (r.contains("ratio") && r["ratio"].is_number()) {
      const double x = r["ratio"].get<double>();
      if (!row.worst_ratio || x > *row.worst_ratio) row.worst_ratio = x;
    }
  }
  for (const auto& check : order) {
    const Row& row = rows[check];
    out << "  " << check << ": " << row.passed << '/' << row.count << " passed";
    if (row.worst_ratio) out << ", max ratio " << json(*row.worst_ratio).dump();
    out << '\n';
  }
  if (j.contains("metrics"))
    for (const auto& [k, v] : j["metrics"].items()) out << "  metric " << k << " = " << v.dump() << '\n';

  if (!csv_path.empty()) {
    std::ofstream csv(csv_path);
    if (!csv) throw Error(ErrorCode::InvalidArgument, "cannot write '" + csv_path + "'");
    csv << "trial,check,digest,bound,observed,margin,ratio,pass,self_test\n";
    const auto cell = [](const json& x) { return x.is_null() ? std::string() : x.dump(); };
    for (const auto& r : j["records"])
      csv << r["trial"].dump() << ',' << r.value("check", std::string()) << ',' << r.value("digest", std::string())
          << ',' << cell(r["bound"]) << ',' << cell(r["observed"]) << ',' << cell(r["margin"]) << ','
          << cell(r["ratio"]) << ',' << (r.value("pass", false) ? 1 : 0) << ',' << (r.value("self_test", false) ? 1 : 0)
          << '\n';
  }
  return s.value("pass", false) ? 0 : 1;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Orlicz spaces, Orlicz-Schatten norms and quantum harmonic analysis convolutions", "orlicz-qha"};
  app.require_subcommand(1);
  std::function<int()> action;

  // --- young ---------------------------------------------------------------
  auto* young = app.add_subcommand("young", "Inspect and combine Young functions");
  young->require_subcommand(1);

  std::string ex_spec;
  bool ex_grid = false;
  auto* ex = young->add_subcommand("exponents", "Characteristic exponents q and p");
  ex->add_option("spec", ex_spec, "Young function as inline JSON or a file path")->required();
  ex->add_flag("--grid", ex_grid, "Estimate on the log grid instead of the closed form");
  ex->callback([&] {
    action = [&] {
      const YoungFunction phi = parse_young(ex_spec);
      print_json(out, exponents_json(ex_grid ? exponents_on_grid(phi) : phi.exponents()));
      return 0;
    };
  });

  std::vector<std::string> ip_specs;
  std::vector<double> ip_theta;
  auto* ip = young->add_subcommand("interpolate", "Interpolated Young function [Phi_1, ..., Phi_n]_Theta");
  ip->add_option("specs", ip_specs, "Young functions, inline JSON or file paths")->required();
  ip->add_option("--theta", ip_theta, "Simplex point, one weight per function")->required();
  ip->callback([&] {
    action = [&] {
      const YoungFunction phi = interpolate(parse_all(ip_specs), SimplexPoint(ip_theta));
      json j;
      j["function"] = to_json(phi);
      j["exponents"] = exponents_json(phi.exponents());
      print_json(out, j);
      return 0;
    };
  });

  std::vector<std::string> st_specs;
  auto* st = young->add_subcommand("solve-theta", "Simplex point for psi_1..psi_n and the Phi_j it induces");
  st->add_option("specs", st_specs, "Young functions psi_j, inline JSON or file paths")->required();
  st->callback([&] {
    action = [&] {
      const auto psis = parse_all(st_specs);
      const SimplexPoint theta = theta_solver(psis);
      json j;
      j["theta"] = theta.values();
      print_json(out, j);
      return 0;
    };
  });

  std::string cr_psi0;
  std::vector<std::string> cr_specs;
  double cr_tol = 1e-8;
  auto* cr = young->add_subcommand("check-relation", "Residual of s^{n-1} psi_0^{-1}(s) = prod psi_j^{-1}(s)");
  cr->add_option("--psi0", cr_psi0, "Target Young function psi_0")->required();
  cr->add_option("specs", cr_specs, "Young functions psi_j")->required();
  cr->add_option("--tol", cr_tol, "Largest accepted relative residual")->check(CLI::PositiveNumber);
  cr->callback([&] {
    action = [&] {
      const double residual = verify_young_relation(parse_young(cr_psi0), parse_all(cr_specs));
      json j;
      j["residual"] = residual;
      j["pass"] = residual <= cr_tol;
      print_json(out, j);
      return residual <= cr_tol ? 0 : 1;
    };
  });

  std::string cv_spec;
  auto* cv = young->add_subcommand("convexify", "Equivalent convex Young function and its constant L");
  cv->add_option("spec", cv_spec, "Young function, inline JSON or a file path")->required();
  cv->callback([&] {
    action = [&] {
      const ConvexifyResult r = convexify(parse_young(cv_spec));
      json j;
      j["L"] = r.L;
      j["exponents"] = exponents_json(r.psi.exponents());
      print_json(out, j);
      return 0;
    };
  });

  // --- norm ----------------------------------------------------------------
  auto* norm = app.add_subcommand("norm", "Orlicz, weak, Lebesgue and Schatten norms of stored inputs");
  norm->require_subcommand(1);
  NormArgs on, wn, ln, sn;

  auto* orlicz = norm->add_subcommand("orlicz", "Luxemburg norm");
  add_norm_options(orlicz, on, true, true);
  orlicz->callback([&] {
    action = [&] {
      print_json(out, json{{"norm", orlicz_norm(load_rearrangement(on.input, on.measure), norm_young(on))}});
      return 0;
    };
  });

  auto* weak = norm->add_subcommand("weak", "Weak Orlicz norm");
  add_norm_options(weak, wn, true, true);
  weak->callback([&] {
    action = [&] {
      print_json(out, json{{"norm", weak_orlicz_norm(load_rearrangement(wn.input, wn.measure), norm_young(wn))}});
      return 0;
    };
  });

  auto* lp = norm->add_subcommand("lp", "Lebesgue norm");
  add_norm_options(lp, ln, false, true);
  lp->callback([&] {
    action = [&] {
      if (!ln.p) throw Error(ErrorCode::InvalidArgument, "--p is required");
      print_json(out, json{{"norm", lp_norm(load_rearrangement(ln.input, ln.measure), *ln.p)}});
      return 0;
    };
  });

  auto* schatten = norm->add_subcommand("schatten", "Schatten or Orlicz-Schatten norm of an operator");
  add_norm_options(schatten, sn, true, true);
  schatten->callback([&] {
    action = [&] {
      if (sniff_file(sn.input) != FileKind::Operator)
        throw Error(ErrorCode::InvalidArgument, "'" + sn.input + "' is not an operator file");
      std::ifstream in(sn.input, std::ios::binary);
      const OperatorMatrix A = read_operator_binary(in);
      const double value = sn.young.empty() && sn.p ? schatten_norm(A, *sn.p) : schatten_orlicz_norm(A, norm_young(sn));
      print_json(out, json{{"norm", value}});
      return 0;
    };
  });

  // --- verify --------------------------------------------------------------
  std::string vf_config, vf_dir = ".", vf_name;
  std::optional<std::uint64_t> vf_seed;
  std::optional<std::size_t> vf_trials;
  std::optional<int> vf_N, vf_n;
  std::optional<double> vf_L;
  auto* vf = app.add_subcommand("verify", "Run a verification suite and write JSON and CSV reports");
  vf->add_option("config", vf_config, "Suite configuration JSON file")->required();
  vf->add_option("--out-dir", vf_dir, "Directory for the report files")->capture_default_str();
  vf->add_option("--name", vf_name, "Report file stem (default: the suite name)");
  vf->add_option("--seed", vf_seed, "Override the configured seed");
  vf->add_option("--trials", vf_trials, "Override the configured trial count")->check(CLI::PositiveNumber);
  vf->add_option("--N", vf_N, "Override the Fock truncation");
  vf->add_option("--L", vf_L, "Override the grid half-width");
  vf->add_option("--n", vf_n, "Override the grid points per axis");
  vf->callback([&] {
    action = [&] {
      SuiteConfig cfg = parse_suite_config(read_file(vf_config));
      if (vf_seed) cfg.seed = *vf_seed;
      if (vf_trials) cfg.trials = *vf_trials;
      if (vf_N) cfg.N = *vf_N;
      if (vf_L) cfg.L = *vf_L;
      if (vf_n) cfg.n = *vf_n;
      cfg.context();
      const VerificationReport rep = run_suite(cfg);
      const std::filesystem::path dir(vf_dir);
      std::filesystem::create_directories(dir);
      const std::string stem = vf_name.empty() ? cfg.suite : vf_name;
      const auto json_path = dir / (stem + ".json"), csv_path = dir / (stem + ".csv");
      {
        std::ofstream js(json_path, std::ios::binary);
        js << report_json(rep);
        std::ofstream csv(csv_path, std::ios::binary);
        write_report_csv(csv, rep);
        if (!js || !csv) throw Error(ErrorCode::InvalidArgument, "cannot write reports to '" + vf_dir + "'");
      }
      json j;
      j["suite"] = rep.suite;
      j["pass"] = rep.summary.pass;
      j["checks"] = rep.summary.checks;
      j["passed"] = rep.summary.passed;
      j["empirical_constant"] = rep.summary.empirical_constant;
      j["json"] = json_path.string();
      j["csv"] = csv_path.string();
      print_json(out, j);
      return rep.summary.pass ? 0 : 1;
    };
  });

  // --- report --------------------------------------------------------------
  std::string rp_input, rp_csv;
  auto* rp = app.add_subcommand("report", "Summarize a JSON report; optionally re-emit its CSV table");
  rp->add_option("report", rp_input, "Report JSON written by 'verify'")->required();
  rp->add_option("--csv", rp_csv, "Write the per-trial table to this path");
  rp->callback([&] { action = [&] { return print_report(out, rp_input, rp_csv); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    return action ? action() : 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_input_error(e.code()) ? 2 : 1;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace oqha::cli
