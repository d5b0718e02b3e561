#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>

#include "orlicz_qha/errors.hpp"
#include "orlicz_qha/serialize.hpp"
#include "orlicz_qha/verify.hpp"
#include "verify_internal.hpp"

namespace oqha {

QhaContext SuiteConfig::context() const { return context(n); }

QhaContext SuiteConfig::context(int grid_n) const {
  QhaContext ctx;
  ctx.N = N;
  ctx.grid = GridSpec{1, L, grid_n};
  ctx.validate();
  return ctx;
}

std::optional<double> VerificationReport::find_metric(const std::string& name) const {
  for (const auto& [k, v] : metrics)
    if (k == name) return v;
  return std::nullopt;
}

void VerificationReport::finalize() {
  ReportSummary s;
  bool any_self = false;
  for (const auto& r : records) {
    if (r.self_test) {
      any_self = true;
      if (!r.pass) s.self_test_failed = true;
      continue;
    }
    ++s.checks;
    if (r.pass) ++s.passed;
    if (const auto m = r.margin()) {
      const double rel = *m / std::max(*r.bound, 1e-300);
      if (!s.worst_margin || rel < *s.worst_margin) s.worst_margin = rel;
    }
    if (r.ratio && std::isfinite(*r.ratio)) s.empirical_constant = std::max(s.empirical_constant, *r.ratio);
  }
  s.pass = s.checks > 0 && s.passed == s.checks && (!any_self || s.self_test_failed);
  summary = s;
}

namespace detail {

Rng trial_rng(std::uint64_t seed, std::size_t trial) {
  return Rng(seed ^ (0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(trial) + 1)));
}

TrialRecord bounded(std::size_t trial, std::string check, const Digest& d, double constant, double rhs,
                    double observed, double scale, double slack) {
  TrialRecord r;
  r.trial = trial;
  r.check = std::move(check);
  r.digest = d.hex();
  r.bound = constant * rhs * scale;
  r.observed = observed;
  r.ratio = rhs > 0.0 ? observed / rhs : (observed > 0.0 ? kInf : 0.0);
  r.pass = std::isfinite(observed) && observed <= *r.bound + slack * *r.bound;
  return r;
}

TrialRecord estimate(std::size_t trial, std::string check, const Digest& d, double observed, double rhs) {
  TrialRecord r;
  r.trial = trial;
  r.check = std::move(check);
  r.digest = d.hex();
  r.observed = observed;
  r.ratio = observed / rhs;
  r.pass = std::isfinite(*r.ratio);
  return r;
}

TrialRecord flag(std::size_t trial, std::string check, const Digest& d, double observed, bool pass) {
  TrialRecord r;
  r.trial = trial;
  r.check = std::move(check);
  r.digest = d.hex();
  r.observed = observed;
  r.pass = pass;
  return r;
}

TrialRecord as_self_test(TrialRecord r) {
  r.self_test = true;
  r.check = "self-test:" + r.check;
  return r;
}

VerificationReport start_report(const SuiteConfig& cfg) {
  VerificationReport rep;
  rep.suite = cfg.suite;
  rep.seed = cfg.seed;
  rep.trials = cfg.trials;
  return rep;
}

const YoungFunction& single_young(const SuiteConfig& cfg) {
  if (cfg.young.size() != 1)
    throw Error(ErrorCode::InvalidArgument, "suite '" + cfg.suite + "' takes exactly one Young function");
  const Exponents& e = cfg.young[0].exponents();
  if (!(e.q > 1.0) || !std::isfinite(e.p))
    throw Error(ErrorCode::ExponentOutOfRange, "suite '" + cfg.suite + "' needs 1 < q and p < infinity");
  return cfg.young[0];
}

YoungFunction target_young(const SuiteConfig& cfg, VerificationReport& report) {
  const std::size_t n = cfg.young.size();
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "suite '" + cfg.suite + "' needs at least two Young functions");
  // Condition first: when it fails the relation has no Young solution.
  const SimplexPoint theta = theta_solver(cfg.young);
  YoungFunction psi0 = cfg.psi0 ? *cfg.psi0 : [&] {
    std::vector<std::pair<YoungFunction, double>> factors;
    for (const auto& psi : cfg.young) factors.emplace_back(psi, 1.0);
    return YoungFunction::inverse_product(1.0 - static_cast<double>(n), std::move(factors));
  }();
  const double residual = verify_young_relation(psi0, cfg.young);
  report.metric("relation_residual", residual);
  if (!(residual <= 1e-8))
    throw Error(ErrorCode::ConditionViolated, "Young relation residual " + fmt(residual) + " exceeds 1e-8");
  for (std::size_t j = 0; j < n; ++j) report.metric("theta_" + std::to_string(j + 1), theta[j]);
  report.note("psi0", psi0.describe());
  return psi0;
}

double function_norm(const GridFunction& f, const YoungFunction& phi, double kappa) {
  return orlicz_norm(to_measure_samples(f, kappa), phi);
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace detail

double calibrate_measure(const QhaContext& ctx) {
  const GridFunction f = gaussian(ctx.grid, {0.5, 0.0}, 0.9, {1.0, 0.3});
  const GridFunction g = gaussian(ctx.grid, {0.0, -0.7}, 1.4);
  const cd pairing = (op_w(ctx, f).adjoint() * op_w(ctx, g)).trace();
  const cd inner = f.values.conjugate().cwiseProduct(g.values).sum() * ctx.grid.cell_volume();
  return pairing.real() / inner.real();
}

// --- fixtures -------------------------------------------------------------

namespace fixtures {

GridFunction MixtureParams::sample(const GridSpec& grid) const {
  GridFunction out = GridFunction::zeros(grid);
  for (std::size_t c = 0; c < widths.size(); ++c) out.values += gaussian(grid, centers[c], widths[c], amplitudes[c]).values;
  return out;
}

void MixtureParams::digest(Digest& d) const {
  for (std::size_t c = 0; c < widths.size(); ++c) {
    for (double x : centers[c]) d.add(x);
    d.add(widths[c]);
    d.add(amplitudes[c].real());
    d.add(amplitudes[c].imag());
  }
}

MixtureParams random_mixture(Rng& rng, int max_components) {
  MixtureParams m;
  const int count = rng.integer(1, max_components);
  for (int c = 0; c < count; ++c) {
    m.centers.push_back({std::clamp(0.6 * rng.normal(), -1.0, 1.0), std::clamp(0.6 * rng.normal(), -1.0, 1.0)});
    m.widths.push_back(rng.uniform(0.4, 0.9));
    m.amplitudes.emplace_back(rng.normal(), rng.normal());
  }
  return m;
}

GridFunction gaussian_mixture(const GridSpec& grid, Rng& rng) { return random_mixture(rng).sample(grid); }

OperatorMatrix positive_low_rank(const QhaContext& ctx, Rng& rng) {
  const int rank = rng.integer(1, 3), levels = rng.integer(2, 6);
  Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(ctx.N, rank);
  for (int j = 0; j < rank; ++j)
    for (int i = 0; i < levels; ++i) v(i, j) = cd(rng.normal(), rng.normal());
  OperatorMatrix A = v * v.adjoint();
  A /= A.trace().real();
  const double r = std::sqrt(rng.uniform()), th = 2.0 * kPi * rng.uniform();
  return shift_op(ctx, A, {r * std::cos(th), r * std::sin(th)});
}

GridFunction simple_function(const GridSpec& grid, Rng& rng) {
  const int blocks = rng.integer(1, 6);
  std::vector<std::vector<double>> lo, hi;
  std::vector<cd> value;
  for (int b = 0; b < blocks; ++b) {
    std::vector<double> l, h;
    for (int a = 0; a < grid.axes(); ++a) {
      const double start = rng.uniform(-5.0, 4.0);
      l.push_back(start);
      h.push_back(std::min(5.0, start + rng.uniform(0.5, 3.0)));
    }
    lo.push_back(l);
    hi.push_back(h);
    value.emplace_back(rng.normal(), rng.normal());
  }
  return GridFunction::from(grid, [&](const std::vector<double>& z) {
    cd acc = 0.0;
    for (int b = 0; b < blocks; ++b) {
      bool inside = true;
      for (std::size_t a = 0; a < z.size(); ++a)
        inside = inside && z[a] >= lo[static_cast<std::size_t>(b)][a] && z[a] < hi[static_cast<std::size_t>(b)][a];
      if (inside) acc += value[static_cast<std::size_t>(b)];
    }
    return acc;
  });
}

OperatorMatrix simple_matrix(int N, Rng& rng) {
  const int block = std::min(N, 16);
  OperatorMatrix A = OperatorMatrix::Zero(N, N);
  for (int j = 0; j < block; ++j)
    for (int i = 0; i < block; ++i) A(i, j) = cd(rng.normal(), rng.normal());
  return A;
}

void digest_matrix(Digest& d, const OperatorMatrix& A) { d.add(A.data(), sizeof(cd) * static_cast<std::size_t>(A.size())); }

void digest_grid(Digest& d, const GridFunction& f) {
  d.add(f.values.data(), sizeof(cd) * static_cast<std::size_t>(f.values.size()));
}

}  // namespace fixtures

// --- configuration --------------------------------------------------------

namespace {

const std::set<std::string> kSuites = {"prop1", "multilinear", "dilated", "dilated_orlicz", "interpolation",
                                       "qha_module"};

template <typename T>
T get(const nlohmann::json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("config field '") + key + "': " + e.what());
  }
}

}  // namespace

SuiteConfig parse_suite_config(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "config must be a JSON object");
  static const std::set<std::string> known = {"suite", "young", "phi",   "psi0",        "trials",     "seed",
                                              "grid",  "resolutions", "slack", "bound_scale", "self_test_scale",
                                              "k",     "dilation"};
  for (const auto& item : j.items())
    if (!known.count(item.key())) throw Error(ErrorCode::ParseError, "unknown config field '" + item.key() + "'");

  SuiteConfig cfg;
  cfg.suite = get<std::string>(j, "suite");
  if (!kSuites.count(cfg.suite)) throw Error(ErrorCode::ParseError, "unknown suite '" + cfg.suite + "'");
  if (j.contains("phi")) cfg.young.push_back(young_from_json(j["phi"]));
  if (j.contains("young")) {
    if (!j["young"].is_array()) throw Error(ErrorCode::ParseError, "'young' must be an array");
    for (const auto& y : j["young"]) cfg.young.push_back(young_from_json(y));
  }
  if (j.contains("psi0")) cfg.psi0 = young_from_json(j["psi0"]);
  if (j.contains("trials")) cfg.trials = get<std::size_t>(j, "trials");
  if (j.contains("seed")) cfg.seed = get<std::uint64_t>(j, "seed");
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    for (const auto& item : g.items())
      if (item.key() != "N" && item.key() != "L" && item.key() != "n")
        throw Error(ErrorCode::ParseError, "unknown grid field '" + item.key() + "'");
    if (g.contains("N")) cfg.N = get<int>(g, "N");
    if (g.contains("L")) cfg.L = get<double>(g, "L");
    if (g.contains("n")) cfg.n = get<int>(g, "n");
  }
  if (j.contains("resolutions")) cfg.resolutions = get<std::vector<int>>(j, "resolutions");
  if (j.contains("slack")) cfg.slack = get<double>(j, "slack");
  if (j.contains("bound_scale")) cfg.bound_scale = get<double>(j, "bound_scale");
  if (j.contains("self_test_scale")) cfg.self_test_scale = get<double>(j, "self_test_scale");
  if (j.contains("k")) cfg.k = get<int>(j, "k");
  if (j.contains("dilation")) {
    const auto& d = j["dilation"];
    cfg.dilation.t = get<std::vector<double>>(d, "t");
    cfg.dilation.c = d.contains("c") ? get<std::vector<int>>(d, "c") : std::vector<int>(cfg.dilation.t.size(), 1);
    if (d.contains("p")) cfg.dilation.p = get<std::vector<double>>(d, "p");
    if (d.contains("r")) cfg.dilation.r = get<double>(d, "r");
  }
  if (cfg.trials == 0) throw Error(ErrorCode::InvalidArgument, "trials must be positive");
  if (!(cfg.slack >= 0.0) || !(cfg.bound_scale > 0.0) || !(cfg.self_test_factor() > 0.0))
    throw Error(ErrorCode::InvalidArgument, "slack and scales must be nonnegative / positive");
  if (cfg.resolutions.size() != 2) throw Error(ErrorCode::InvalidArgument, "exactly two resolutions are needed");
  // Fail on bad grid parameters before any suite starts computing.
  cfg.context();
  for (int r : cfg.resolutions) cfg.context(r);
  return cfg;
}

VerificationReport run_suite(const SuiteConfig& cfg) {
  if (cfg.suite == "prop1") return suite_prop1(cfg);
  if (cfg.suite == "multilinear") return suite_multilinear(cfg);
  if (cfg.suite == "dilated") return suite_dilated(cfg);
  if (cfg.suite == "dilated_orlicz") return suite_dilated_orlicz(cfg);
  if (cfg.suite == "interpolation") return suite_interpolation(cfg);
  if (cfg.suite == "qha_module") return suite_qha_module(cfg);
  throw Error(ErrorCode::InvalidArgument, "unknown suite '" + cfg.suite + "'");
}

// --- output ---------------------------------------------------------------

std::string report_json(const VerificationReport& report) {
  using ojson = nlohmann::ordered_json;
  const auto opt = [](const std::optional<double>& x) { return x ? ojson(*x) : ojson(nullptr); };
  ojson j;
  j["suite"] = report.suite;
  j["seed"] = report.seed;
  j["trials"] = report.trials;
  ojson s;
  s["pass"] = report.summary.pass;
  s["checks"] = report.summary.checks;
  s["passed"] = report.summary.passed;
  s["worst_relative_margin"] = opt(report.summary.worst_margin);
  s["empirical_constant"] = report.summary.empirical_constant;
  s["self_test_failed"] = report.summary.self_test_failed;
  j["summary"] = s;
  ojson m = ojson::object();
  for (const auto& [k, v] : report.metrics) m[k] = v;
  j["metrics"] = m;
  ojson n = ojson::object();
  for (const auto& [k, v] : report.notes) n[k] = v;
  j["notes"] = n;
  ojson recs = ojson::array();
  for (const auto& r : report.records) {
    ojson x;
    x["trial"] = r.trial;
    x["check"] = r.check;
    x["digest"] = r.digest;
    x["bound"] = opt(r.bound);
    x["observed"] = r.observed;
    x["margin"] = opt(r.margin());
    x["ratio"] = opt(r.ratio);
    x["pass"] = r.pass;
    x["self_test"] = r.self_test;
    recs.push_back(x);
  }
  j["records"] = recs;
  return j.dump(2) + "\n";
}

void write_report_csv(std::ostream& os, const VerificationReport& report) {
  using detail::fmt;
  const auto opt = [](const std::optional<double>& x) { return x ? fmt(*x) : std::string(); };
  os << "trial,check,digest,bound,observed,margin,ratio,pass,self_test\n";
  for (const auto& r : report.records)
    os << r.trial << ',' << r.check << ',' << r.digest << ',' << opt(r.bound) << ',' << fmt(r.observed) << ','
       << opt(r.margin()) << ',' << opt(r.ratio) << ',' << (r.pass ? 1 : 0) << ',' << (r.self_test ? 1 : 0) << '\n';
}

}  // namespace oqha
