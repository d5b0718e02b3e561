#include "orlicz_qha/rearrangement.hpp"

#include <functional>
#include <numeric>
#include <stdexcept>

#include "orlicz_qha/errors.hpp"

namespace oqha {

MeasureSamples::MeasureSamples(std::vector<double> v, std::vector<double> m)
    : values(std::move(v)), measures(std::move(m)) {
  if (values.size() != measures.size())
    throw Error(ErrorCode::DimensionMismatch, "values and measures differ in length");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 0.0) || !std::isfinite(values[i]))
      throw Error(ErrorCode::InvalidArgument, "sample values must be finite and nonnegative");
    if (!(measures[i] > 0.0)) throw Error(ErrorCode::InvalidArgument, "sample measures must be positive");
  }
}

MeasureSamples MeasureSamples::counting(std::vector<double> v) {
  std::vector<double> m(v.size(), 1.0);
  return MeasureSamples(std::move(v), std::move(m));
}

StepFunction::StepFunction(std::vector<double> breakpoints, std::vector<double> values) {
  if (breakpoints.size() != values.size())
    throw Error(ErrorCode::DimensionMismatch, "breakpoints and values differ in length");
  double prev_t = 0.0, prev_v = kInf;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(breakpoints[i] > prev_t)) throw Error(ErrorCode::InvalidArgument, "breakpoints must increase from 0");
    if (!(values[i] >= 0.0) || values[i] > prev_v)
      throw Error(ErrorCode::InvalidArgument, "values must be nonnegative and non-increasing");
    prev_t = breakpoints[i];
    prev_v = values[i];
    if (values[i] == 0.0) break;
    if (!values_.empty() && values_.back() == values[i])
      breaks_.back() = breakpoints[i];
    else {
      breaks_.push_back(breakpoints[i]);
      values_.push_back(values[i]);
    }
  }
}

double StepFunction::value_at(double t) const {
  const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
  return it == breaks_.end() ? 0.0 : values_[static_cast<std::size_t>(it - breaks_.begin())];
}

double StepFunction::distribution(double alpha) const {
  // Blocks are sorted, so the ones above alpha form a prefix.
  const auto it = std::lower_bound(values_.begin(), values_.end(), alpha, std::greater<double>());
  const auto k = static_cast<std::size_t>(it - values_.begin());
  return k == 0 ? 0.0 : breaks_[k - 1];
}

double distribution(const MeasureSamples& samples, double alpha) {
  double total = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (samples.values[i] > alpha) total += samples.measures[i];
  return total;
}

StepFunction rearrange(const MeasureSamples& samples) {
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return samples.values[a] > samples.values[b]; });
  std::vector<double> breaks, values;
  double t = 0.0;
  for (std::size_t idx : order) {
    const double v = samples.values[idx];
    if (v == 0.0) break;
    t += samples.measures[idx];
    if (!values.empty() && values.back() == v)
      breaks.back() = t;
    else {
      breaks.push_back(t);
      values.push_back(v);
    }
  }
  return StepFunction(std::move(breaks), std::move(values));
}

namespace {

double log_sum_exp(const std::vector<double>& x) {
  double m = -kInf;
  for (double v : x) m = std::max(m, v);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

// Root in x = log c of a decreasing function F(x) = log(functional at c),
// crossing 0; bracket starts at log c0 and moves by factors of 2.
template <typename F>
double solve_norm(F&& F_log, double c0) {
  const double step = std::log(2.0);
  double lo = std::log(c0), hi = lo;
  double f_lo = F_log(lo), f_hi = f_lo;
  if (f_hi > 0.0) {
    int k = 0;
    while (f_hi > 0.0) {
      if (++k > 1100) throw Error(ErrorCode::Unbounded, "modular stays above 1 on the expanding bracket");
      lo = hi;
      f_lo = f_hi;
      hi += step;
      f_hi = F_log(hi);
    }
  } else {
    int k = 0;
    while (f_lo <= 0.0) {
      if (f_lo == 0.0) return std::exp(lo);
      if (++k > 1100) return 0.0;
      hi = lo;
      f_hi = f_lo;
      lo -= step;
      f_lo = F_log(lo);
    }
  }
  // Monotonicity at the bracket ends is what makes the root unique.
  if (!(f_lo >= f_hi)) throw std::logic_error("modular is not non-increasing in c");
  return std::exp(find_root(F_log, lo, hi, f_lo, f_hi, 1e-15, 1e-15));
}

double initial_scale(const StepFunction& mu, const YoungFunction& phi) {
  const double inv = phi.left_inverse(1.0 / mu.support());
  const double c0 = mu.values()[0] / inv;
  return std::isfinite(c0) && c0 > 0.0 ? c0 : mu.values()[0];
}

}  // namespace

double orlicz_norm(const StepFunction& mu, const YoungFunction& phi) {
  if (mu.is_zero()) return 0.0;
  const std::size_t m = mu.size();
  std::vector<double> log_w(m), log_v(m), terms(m);
  for (std::size_t i = 0; i < m; ++i) {
    log_w[i] = std::log(mu.width(i));
    log_v[i] = std::log(mu.values()[i]);
  }
  const auto F = [&](double x) {
    for (std::size_t i = 0; i < m; ++i) terms[i] = log_w[i] + phi.log_eval(log_v[i] - x);
    return log_sum_exp(terms);
  };
  return solve_norm(F, initial_scale(mu, phi));
}

double weak_orlicz_norm(const StepFunction& mu, const YoungFunction& phi) {
  if (mu.is_zero()) return 0.0;
  const std::size_t m = mu.size();
  std::vector<double> log_t(m), log_v(m);
  for (std::size_t i = 0; i < m; ++i) {
    log_t[i] = std::log(mu.breakpoints()[i]);
    log_v[i] = std::log(mu.values()[i]);
  }
  // Phi(mu_t/c) is constant on each block, so the sup of t Phi(mu_t/c) over
  // the block sits at its right end.
  const auto F = [&](double x) {
    double best = -kInf;
    for (std::size_t i = 0; i < m; ++i) best = std::max(best, log_t[i] + phi.log_eval(log_v[i] - x));
    return best;
  };
  return solve_norm(F, initial_scale(mu, phi));
}

double lp_norm(const StepFunction& mu, double p) {
  if (mu.is_zero()) return 0.0;
  const double top = mu.values()[0];
  if (std::isinf(p)) return top;
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) s += mu.width(i) * std::pow(mu.values()[i] / top, p);
  return top * std::pow(s, 1.0 / p);
}

double weak_lp_norm_lambda(const StepFunction& mu, double p) {
  // lambda_s is constant on [v_{i+1}, v_i), so s lambda_s^{1/p} approaches
  // its block supremum as s rises to v_i.
  double best = 0.0;
  for (double v : mu.values())
    best = std::max(best, v * std::pow(mu.distribution(std::nextafter(v, 0.0)), 1.0 / p));
  return best;
}

double weak_lp_norm(const StepFunction& mu, double p) {
  double best = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i)
    best = std::max(best, std::pow(mu.breakpoints()[i], 1.0 / p) * mu.values()[i]);
  const double lambda_form = weak_lp_norm_lambda(mu, p);
  if (std::fabs(best - lambda_form) > 1e-12 * best)
    throw std::logic_error("weak L^p: mu-form and lambda-form disagree");
  return best;
}

}  // namespace oqha
