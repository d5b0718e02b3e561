#pragma once

#include <string>

#include "orlicz_qha/verify.hpp"

namespace oqha::detail {

// Independent stream per trial, so a trial's fixtures do not depend on how
// many draws earlier trials made.
Rng trial_rng(std::uint64_t seed, std::size_t trial);

// observed <= constant * rhs * scale, relative slack on the bound.
TrialRecord bounded(std::size_t trial, std::string check, const Digest& d, double constant, double rhs,
                    double observed, double scale, double slack);
// No known constant: records observed / rhs.
TrialRecord estimate(std::size_t trial, std::string check, const Digest& d, double observed, double rhs);

// Pass/fail bookkeeping without a bound (structural checks, stability).
TrialRecord flag(std::size_t trial, std::string check, const Digest& d, double observed, bool pass);

// Marks a record as the forced-failure self-test.
TrialRecord as_self_test(TrialRecord r);

VerificationReport start_report(const SuiteConfig& cfg);
// The Young function of a single-Phi suite; needs 1 < q <= p < infinity.
const YoungFunction& single_young(const SuiteConfig& cfg);
// psi_0 for an n-ary suite: the configured one or the relation solution,
// after checking the relation residual and the theta condition. Records
// both in the report.
YoungFunction target_young(const SuiteConfig& cfg, VerificationReport& report);

double function_norm(const GridFunction& f, const YoungFunction& phi, double kappa);
std::string fmt(double x);

}  // namespace oqha::detail
