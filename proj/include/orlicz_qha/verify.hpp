#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "orlicz_qha/phase_space.hpp"
#include "orlicz_qha/weyl_qha.hpp"
#include "orlicz_qha/young_function.hpp"

namespace oqha {

// Every suite uses the phase-space measure mu = kappa * Lebesgue, with kappa
// measured by the S2 pairing tr(op_w(f)^* op_w(g)) = kappa <f, g>. Function
// norms take cell measure kappa h^{2d} and every convolution involving a
// function integrates against mu.
struct SuiteConfig {
  std::string suite;
  // Phi for prop1 / interpolation / qha_module; psi_1..psi_n otherwise.
  std::vector<YoungFunction> young;
  // Target psi_0; built from the relation when absent.
  std::optional<YoungFunction> psi0;
  std::size_t trials = 20;
  std::uint64_t seed = 1;
  int N = 64;
  double L = 12.0;
  int n = 128;
  // Two grid sizes for the refinement-stability checks.
  std::vector<int> resolutions{96, 128};
  // Relative: a check passes when margin >= -slack * bound.
  double slack = 1e-6;
  // Multiplies every bound of the main checks; below 1 forces failures.
  double bound_scale = 1.0;
  // Multiplies the bound of the built-in self-test, which must then fail.
  // Defaults to 0.01 for the interpolation suite and 0.1 elsewhere.
  std::optional<double> self_test_scale;
  // Operator factors in the iterated convolution.
  int k = 0;
  DilationSpec dilation;

  double self_test_factor() const { return self_test_scale.value_or(suite == "interpolation" ? 0.01 : 0.1); }
  QhaContext context() const;
  QhaContext context(int grid_n) const;
};

struct TrialRecord {
  std::size_t trial = 0;
  std::string check;
  std::string digest;
  // Absent for checks that only estimate a constant.
  std::optional<double> bound;
  double observed = 0.0;
  // observed divided by the bound's right-hand side without its constant;
  // absent for checks that are not norm estimates.
  std::optional<double> ratio;
  bool pass = true;
  bool self_test = false;

  std::optional<double> margin() const {
    if (!bound) return std::nullopt;
    return *bound - observed;
  }
};

struct ReportSummary {
  std::size_t checks = 0;
  std::size_t passed = 0;
  std::optional<double> worst_margin;
  double empirical_constant = 0.0;
  bool self_test_failed = false;
  bool pass = false;
};

struct VerificationReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::vector<TrialRecord> records;
  // Named scalars in insertion order (calibration, per-resolution constants).
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<std::pair<std::string, std::string>> notes;
  ReportSummary summary;

  void metric(const std::string& name, double value) { metrics.emplace_back(name, value); }
  void note(const std::string& name, const std::string& value) { notes.emplace_back(name, value); }
  std::optional<double> find_metric(const std::string& name) const;
  // Fills the summary from the records.
  void finalize();
};

// kappa from the S2 pairing of two fixed Gaussians on the context grid.
double calibrate_measure(const QhaContext& ctx);

VerificationReport suite_prop1(const SuiteConfig& cfg);
VerificationReport suite_multilinear(const SuiteConfig& cfg);
VerificationReport suite_dilated(const SuiteConfig& cfg);
VerificationReport suite_dilated_orlicz(const SuiteConfig& cfg);
VerificationReport suite_interpolation(const SuiteConfig& cfg);
VerificationReport suite_qha_module(const SuiteConfig& cfg);
VerificationReport run_suite(const SuiteConfig& cfg);

SuiteConfig parse_suite_config(const std::string& json_text);
std::string report_json(const VerificationReport& report);
void write_report_csv(std::ostream& os, const VerificationReport& report);

// Fixture generators shared by the suites and the tests.
namespace fixtures {
// Sum of 1-3 Gaussians (variance 0.4-0.9) with complex amplitudes, centres in [-1, 1]^2.
GridFunction gaussian_mixture(const GridSpec& grid, Rng& rng);
// Same mixture parameters resampled on another grid.
struct MixtureParams {
  std::vector<std::vector<double>> centers;
  std::vector<double> widths;
  std::vector<cd> amplitudes;
  GridFunction sample(const GridSpec& grid) const;
  void digest(Digest& d) const;
};
MixtureParams random_mixture(Rng& rng, int max_components = 3);
// Positive rank <= 3 operator on the first few Fock levels, displaced by |z| <= 1.
OperatorMatrix positive_low_rank(const QhaContext& ctx, Rng& rng);
// Piecewise constant on 1-6 random rectangles inside |z| <= 5.
GridFunction simple_function(const GridSpec& grid, Rng& rng);
// Random complex matrix supported on the first 16 Fock levels.
OperatorMatrix simple_matrix(int N, Rng& rng);
void digest_matrix(Digest& d, const OperatorMatrix& A);
void digest_grid(Digest& d, const GridFunction& f);
}  // namespace fixtures

}  // namespace oqha
