#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "orlicz_qha/numeric.hpp"

namespace oqha {

struct Exponents {
  double q = 0.0;
  double p = 0.0;
};

struct Family;

// Immutable value type; copies share the same parameters and exponent cache.
class YoungFunction {
 public:
  enum class Kind { Power, PowerLog, PiecewisePower, Scaled, Sampled, InverseProduct };

  static YoungFunction power(double p);
  // t^p * log(1 + t)^a
  static YoungFunction power_log(double p, double a);
  // t^p_low up to the breakpoint, continued as a multiple of t^p_high.
  static YoungFunction piecewise_power(double p_low, double p_high, double breakpoint);
  // Quasi-Young function inner(t^r).
  static YoungFunction scaled(YoungFunction inner, double r);
  // Monotone knots (t_i, Phi(t_i)), interpolated linearly in log-log
  // coordinates and extrapolated as a power law beyond both ends.
  static YoungFunction sampled(const std::vector<double>& t, const std::vector<double>& values);
  static YoungFunction sampled_log(std::vector<double> log_t, std::vector<double> log_values);
  // The function whose left-inverse is s^s_power * prod_j factor_j^{-1}(s)^{e_j}.
  // Nested products are flattened and Power factors folded into s_power.
  static YoungFunction inverse_product(double s_power,
                                       std::vector<std::pair<YoungFunction, double>> factors);

  Kind kind() const;
  const Family& family() const;

  // Quasi-Young exponent; 1 for genuine Young functions.
  double r() const;

  double operator()(double t) const;
  // log Phi(e^u); -inf where Phi vanishes.
  double log_eval(double u) const;
  // t Phi'_+(t) / Phi(t), from the closed form of each family.
  double log_slope(double t) const;
  double right_derivative(double t) const;

  double left_inverse(double s) const;
  // log of the left-inverse at s = e^w.
  double log_left_inverse(double w) const;

  const Exponents& exponents() const;
  bool is_delta2() const;

  std::string describe() const;
  bool same_object(const YoungFunction& other) const { return impl_ == other.impl_; }

  struct Impl;

 private:
  explicit YoungFunction(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

namespace family {
struct Power {
  double p;
};
struct PowerLog {
  double p;
  double a;
};
struct PiecewisePower {
  double p_low;
  double p_high;
  double breakpoint;
};
struct Scaled {
  YoungFunction inner;
  double r;
};
struct Sampled {
  std::vector<double> log_t;
  std::vector<double> log_value;
};
struct InverseProduct {
  double s_power;
  std::vector<std::pair<YoungFunction, double>> factors;
};
}  // namespace family

struct Family : std::variant<family::Power, family::PowerLog, family::PiecewisePower,
                             family::Scaled, family::Sampled, family::InverseProduct> {
  using variant::variant;
};

// Interpolation weights on the standard simplex.
class SimplexPoint {
 public:
  explicit SimplexPoint(std::vector<double> theta);
  std::size_t size() const { return theta_.size(); }
  double operator[](std::size_t j) const { return theta_[j]; }
  const std::vector<double>& values() const { return theta_; }
  bool is_interior() const;

 private:
  std::vector<double> theta_;
};

struct BoundSpec {
  double p0 = 1.0;
  double p1 = kInf;
  double K = 1.0;
  double C0 = 1.0;
  double C1 = 1.0;
  double C_K = 1.0;
  // Quasi-Young exponent of the target Phi.
  double r = 1.0;
};

struct ConvexifyResult {
  YoungFunction psi;
  double L;
};

inline double evaluate(const YoungFunction& phi, double t) { return phi(t); }
inline double left_inverse(const YoungFunction& phi, double s) { return phi.left_inverse(s); }
inline Exponents exponents(const YoungFunction& phi) { return phi.exponents(); }
inline bool is_delta2(const YoungFunction& phi) { return phi.is_delta2(); }

inline constexpr double kGridLow = 1e-8;
inline constexpr double kGridHigh = 1e8;
inline constexpr std::size_t kExponentGridPoints = 100000;
inline constexpr double kDivergenceThreshold = 1e6;

// Inf and sup of t Phi'_+(t)/Phi(t) over a log grid, the derivative taken as a
// one-sided difference with step t*1e-7. Bypasses any closed form.
Exponents exponents_on_grid(const YoungFunction& phi, double lo = kGridLow, double hi = kGridHigh,
                            std::size_t points = kExponentGridPoints);

YoungFunction interpolate(const std::vector<YoungFunction>& phis, const SimplexPoint& theta);
// Binary interpolation [phi0, phi1]_theta.
YoungFunction interpolate(const YoungFunction& phi0, const YoungFunction& phi1, double theta);

SimplexPoint theta_solver(const std::vector<YoungFunction>& psis);
YoungFunction construct_phi(const YoungFunction& psi, double theta);

double verify_young_relation(const YoungFunction& psi0, const std::vector<YoungFunction>& psis);
double collapse_identity_check(const YoungFunction& phi, double rho, double nu);

ConvexifyResult convexify(const YoungFunction& phi);
std::optional<double> check_equivalence(const YoungFunction& phi, const YoungFunction& psi);

double strong_type_bound(const BoundSpec& spec, double q_phi, double p_phi);
// Grid sup of Phi(factor t)/Phi(t); the doubling constant C_K uses factor 2K.
double doubling_constant(const YoungFunction& phi, double factor);

bool is_nondecreasing_on_grid(const YoungFunction& phi, std::size_t points = 2001);
bool is_convex_on_grid(const YoungFunction& phi, std::size_t points = 401);

// Max relative gap between two left-inverses on the standard log grid.
double max_inverse_discrepancy(const YoungFunction& a, const YoungFunction& b,
                               std::size_t points = 10000);

}  // namespace oqha
