#include <algorithm>
#include <cmath>

#include "orlicz_qha/errors.hpp"
#include "orlicz_qha/young_function.hpp"

namespace oqha {

namespace {

std::vector<double> log_points(double lo, double hi, std::size_t points) {
  std::vector<double> u(points);
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < points; ++i)
    u[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1);
  return u;
}

// Adaptive Simpson for a smooth integrand.
template <typename F>
double simpson(F& f, double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::fabs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  return simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <typename F>
double integrate(F f, double a, double b, double rel_tol) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson(f, a, b, fa, fm, fb, whole, rel_tol * std::fabs(whole), 40);
}

}  // namespace

YoungFunction interpolate(const std::vector<YoungFunction>& phis, const SimplexPoint& theta) {
  if (phis.size() != theta.size() || phis.empty())
    throw Error(ErrorCode::DimensionMismatch, "interpolate: number of functions and weights differ");
  if (phis.size() == 1) return phis[0];
  const bool all_power = std::all_of(phis.begin(), phis.end(),
                                     [](const YoungFunction& f) { return f.kind() == YoungFunction::Kind::Power; });
  if (all_power) {
    double inv = 0.0;
    for (std::size_t j = 0; j < phis.size(); ++j) inv += theta[j] / std::get<family::Power>(phis[j].family()).p;
    return YoungFunction::power(1.0 / inv);
  }
  std::vector<std::pair<YoungFunction, double>> factors;
  for (std::size_t j = 0; j < phis.size(); ++j) factors.emplace_back(phis[j], theta[j]);
  return YoungFunction::inverse_product(0.0, std::move(factors));
}

YoungFunction interpolate(const YoungFunction& phi0, const YoungFunction& phi1, double theta) {
  return interpolate({phi0, phi1}, SimplexPoint({1.0 - theta, theta}));
}

SimplexPoint theta_solver(const std::vector<YoungFunction>& psis) {
  if (psis.empty()) throw Error(ErrorCode::DimensionMismatch, "theta_solver: empty input");
  std::vector<double> m(psis.size()), inv_p(psis.size());
  double M = 0.0, S = 0.0;
  for (std::size_t j = 0; j < psis.size(); ++j) {
    const Exponents& e = psis[j].exponents();
    if (!std::isfinite(e.p) || e.q <= 1.0)
      throw Error(ErrorCode::ExponentOutOfRange, "theta_solver needs 1 < q and p < infinity for every input");
    inv_p[j] = 1.0 / e.p;
    m[j] = 1.0 - inv_p[j];
    M += m[j];
    S += inv_p[j];
  }
  if (M >= 1.0) throw Error(ErrorCode::ConditionViolated, "condition n-1 < sum 1/p violated");
  std::vector<double> theta(psis.size());
  for (std::size_t j = 0; j < psis.size(); ++j) theta[j] = m[j] + (1.0 - M) * inv_p[j] / S;
  return SimplexPoint(std::move(theta));
}

YoungFunction construct_phi(const YoungFunction& psi, double theta) {
  const double p = psi.exponents().p;
  if (!(theta > 0.0 && theta < 1.0) || !(theta > 1.0 - 1.0 / p))
    throw Error(ErrorCode::InfeasibleTheta, "theta must exceed 1 - 1/p");
  if (const auto* pw = std::get_if<family::Power>(&psi.family()))
    return YoungFunction::power(theta / (1.0 / pw->p - (1.0 - theta)));
  return YoungFunction::inverse_product(-(1.0 - theta) / theta, {{psi, 1.0 / theta}});
}

double verify_young_relation(const YoungFunction& psi0, const std::vector<YoungFunction>& psis) {
  const double n = static_cast<double>(psis.size());
  double worst = 0.0;
  for (double w : log_points(1e-6, 1e6, 10000)) {
    const double lhs = (n - 1.0) * w + psi0.log_left_inverse(w);
    double rhs = 0.0;
    for (const auto& psi : psis) rhs += psi.log_left_inverse(w);
    worst = std::max(worst, std::fabs(std::expm1(rhs - lhs)));
  }
  return worst;
}

double max_inverse_discrepancy(const YoungFunction& a, const YoungFunction& b, std::size_t points) {
  double worst = 0.0;
  for (double w : log_points(kGridLow, kGridHigh, points))
    worst = std::max(worst, std::fabs(std::expm1(a.log_left_inverse(w) - b.log_left_inverse(w))));
  return worst;
}

double collapse_identity_check(const YoungFunction& phi, double rho, double nu) {
  const YoungFunction id = YoungFunction::power(1.0);
  const YoungFunction lhs = interpolate(interpolate(id, phi, rho), id, nu);
  const YoungFunction rhs = interpolate(id, phi, rho * (1.0 - nu));
  return max_inverse_discrepancy(lhs, rhs);
}

ConvexifyResult convexify(const YoungFunction& phi) {
  const std::vector<double> u = log_points(kGridLow, kGridHigh, 2001);

  // (aInc)_1: phi(s)/s may not drop below any earlier value.
  double running = -kInf;
  for (double x : u) {
    const double slope = phi.log_eval(x) - x;
    if (slope < running - std::log1p(1e-9))
      throw Error(ErrorCode::NotAInc1, "phi(t)/t decreases on the grid");
    running = std::max(running, slope);
  }

  // Psi(t) = int_0^t phi(s)/s ds = int phi(e^v) dv; below the first knot phi
  // is continued as a power law with its local exponent.
  const auto integrand = [&](double v) { return phi(std::exp(v)); };
  std::vector<double> lt, lv;
  double total = phi(std::exp(u[0])) / phi.log_slope(std::exp(u[0]));
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (i > 0) total += integrate(integrand, u[i - 1], u[i], 1e-13);
    if (!std::isfinite(total) || total <= 0.0) break;
    lt.push_back(u[i]);
    lv.push_back(std::log(total));
  }
  YoungFunction psi = YoungFunction::sampled_log(lt, lv);

  double worst = 0.0;
  for (std::size_t i = 0; i < lt.size(); ++i)
    worst = std::max(worst, std::fabs(phi.log_left_inverse(lv[i]) - lt[i]));
  return {psi, std::exp(worst)};
}

std::optional<double> check_equivalence(const YoungFunction& phi, const YoungFunction& psi) {
  const std::vector<double> u = log_points(kGridLow, kGridHigh, 10000);
  std::vector<double> target(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) target[i] = psi.log_eval(u[i]);
  constexpr double tol = 1e-10;
  for (int k = 0; k <= 64; ++k) {
    const double lL = static_cast<double>(k) / 8.0 * std::log(2.0);
    bool ok = true;
    for (std::size_t i = 0; i < u.size() && ok; ++i)
      ok = phi.log_eval(u[i] - lL) <= target[i] + tol && target[i] <= phi.log_eval(u[i] + lL) + tol;
    if (ok) return std::exp2(static_cast<double>(k) / 8.0);
  }
  return std::nullopt;
}

double strong_type_bound(const BoundSpec& spec, double q_phi, double p_phi) {
  if (!(spec.p0 > 0.0 && spec.p0 < spec.p1 && spec.K >= 1.0 && spec.C0 > 0.0 && spec.C1 > 0.0 &&
        spec.C_K >= 1.0 && spec.r > 0.0 && spec.r <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "BoundSpec invariants violated");
  if (!(spec.p0 < q_phi && q_phi <= p_phi && p_phi < spec.p1))
    throw Error(ErrorCode::ExponentOrderViolated, "need p0 < q <= p < p1");
  const double weak = p_phi / (q_phi - spec.p0) * std::pow(2.0 * spec.K * spec.C0, spec.p0);
  if (std::isinf(spec.p1)) return spec.C1 * std::pow(std::max(1.0, weak), 1.0 / spec.r);
  const double strong =
      spec.p1 * p_phi / (q_phi * (spec.p1 - p_phi)) * std::pow(spec.C1, spec.p1) * spec.C_K;
  return std::max(1.0, std::pow(weak + strong, 1.0 / spec.r));
}

double doubling_constant(const YoungFunction& phi, double factor) {
  const double lf = std::log(factor);
  double worst = 0.0;
  for (double x : log_points(kGridLow, kGridHigh, 10000))
    worst = std::max(worst, phi.log_eval(x + lf) - phi.log_eval(x));
  return std::exp(worst);
}

bool is_nondecreasing_on_grid(const YoungFunction& phi, std::size_t points) {
  double prev = -kInf;
  for (double x : log_points(kGridLow, kGridHigh, points)) {
    const double v = phi.log_eval(x);
    if (v < prev) return false;
    prev = v;
  }
  return phi(0.0) == 0.0;
}

bool is_convex_on_grid(const YoungFunction& phi, std::size_t points) {
  const std::vector<double> u = log_points(1e-4, 1e4, points);
  std::vector<double> t(points), v(points);
  for (std::size_t i = 0; i < points; ++i) {
    t[i] = std::exp(u[i]);
    v[i] = phi(t[i]);
  }
  for (std::size_t i = 0; i < points; ++i)
    for (std::size_t j = i + 1; j < points; ++j) {
      if (!std::isfinite(v[j])) continue;
      const double mid = phi(0.5 * (t[i] + t[j]));
      if (mid > 0.5 * (v[i] + v[j]) * (1.0 + 1e-12)) return false;
    }
  return true;
}

}  // namespace oqha
