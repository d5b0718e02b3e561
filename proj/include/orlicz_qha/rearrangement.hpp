#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <utility>
#include <vector>

#include "orlicz_qha/young_function.hpp"

namespace oqha {

// Modulus of a simple function: (value, measure) blocks.
struct MeasureSamples {
  std::vector<double> values;
  std::vector<double> measures;

  MeasureSamples() = default;
  MeasureSamples(std::vector<double> v, std::vector<double> m);
  // Unit measure per value, as for singular values.
  static MeasureSamples counting(std::vector<double> v);
  std::size_t size() const { return values.size(); }
};

// Decreasing rearrangement: mu_t = value(i) on [break(i-1), break(i)), 0 beyond
// the last breakpoint. Values are strictly decreasing and positive.
class StepFunction {
 public:
  StepFunction() = default;
  StepFunction(std::vector<double> breakpoints, std::vector<double> values);

  const std::vector<double>& breakpoints() const { return breaks_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  bool is_zero() const { return values_.empty(); }
  double support() const { return breaks_.empty() ? 0.0 : breaks_.back(); }

  double value_at(double t) const;
  // lambda_alpha: measure where the function exceeds alpha.
  double distribution(double alpha) const;
  // Width of block i.
  double width(std::size_t i) const { return breaks_[i] - (i == 0 ? 0.0 : breaks_[i - 1]); }

 private:
  std::vector<double> breaks_;
  std::vector<double> values_;
};

double distribution(const MeasureSamples& samples, double alpha);
StepFunction rearrange(const MeasureSamples& samples);

// Luxemburg norm inf{c > 0 : sum_i w_i Phi(v_i / c) <= 1}.
double orlicz_norm(const StepFunction& mu, const YoungFunction& phi);
// inf{c > 0 : t Phi(mu_t / c) <= 1 for all t}.
double weak_orlicz_norm(const StepFunction& mu, const YoungFunction& phi);
double lp_norm(const StepFunction& mu, double p);
double weak_lp_norm(const StepFunction& mu, double p);
// The same supremum through the distribution function, sup_s s lambda_s^{1/p}.
double weak_lp_norm_lambda(const StepFunction& mu, double p);

inline double orlicz_norm(const MeasureSamples& s, const YoungFunction& phi) {
  return orlicz_norm(rearrange(s), phi);
}
inline double weak_orlicz_norm(const MeasureSamples& s, const YoungFunction& phi) {
  return weak_orlicz_norm(rearrange(s), phi);
}

// --- singular values ------------------------------------------------------

template <typename Scalar>
struct SvdResult {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Matrix U;
  Eigen::VectorXd sigma;
  Matrix V;
};

// One-sided (Hestenes) Jacobi: orthogonalize the columns of A V by plane
// rotations until every pair is orthogonal to rel_tol relative to the column
// norms. Returns A = U diag(sigma) V^* with sigma sorted non-increasing.
template <typename Derived>
SvdResult<typename Derived::Scalar> jacobi_svd(const Eigen::MatrixBase<Derived>& a, double rel_tol = 1e-15) {
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const bool wide = a.cols() > a.rows();
  Matrix W = wide ? Matrix(a.adjoint()) : Matrix(a);
  const Eigen::Index n = W.cols();
  Matrix V = Matrix::Identity(n, n);

  for (int sweep = 0; sweep < 80; ++sweep) {
    bool rotated = false;
    for (Eigen::Index i = 0; i + 1 < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double alpha = W.col(i).squaredNorm();
        const double beta = W.col(j).squaredNorm();
        const Scalar gamma = W.col(i).dot(W.col(j));
        const double g = std::abs(gamma);
        if (g == 0.0 || g <= rel_tol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        // Rotation diagonalizing the 2x2 Gram block [[alpha, gamma], [conj gamma, beta]].
        const Scalar phase = gamma / g;
        const double zeta = (beta - alpha) / (2.0 * g);
        const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (auto* M : {&W, &V}) {
          for (Eigen::Index r = 0; r < M->rows(); ++r) {
            const Scalar x = (*M)(r, i), y = (*M)(r, j);
            (*M)(r, i) = c * x - s * std::conj(phase) * y;
            (*M)(r, j) = s * phase * x + c * y;
          }
        }
      }
    if (!rotated) break;
  }

  Eigen::VectorXd sigma(n);
  for (Eigen::Index k = 0; k < n; ++k) sigma(k) = W.col(k).norm();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) order[static_cast<std::size_t>(k)] = k;
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) { return sigma(x) > sigma(y); });

  SvdResult<Scalar> out;
  out.sigma.resize(n);
  out.U = Matrix::Zero(W.rows(), n);
  out.V.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    out.sigma(k) = sigma(src);
    out.V.col(k) = V.col(src);
    if (sigma(src) > 0.0) out.U.col(k) = W.col(src) / sigma(src);
  }
  if (wide) std::swap(out.U, out.V);
  return out;
}

// Raw non-increasing singular values, including zeros.
template <typename Derived>
Eigen::VectorXd singular_value_spectrum(const Eigen::MatrixBase<Derived>& a) {
  return jacobi_svd(a).sigma;
}

template <typename Derived>
StepFunction singular_values(const Eigen::MatrixBase<Derived>& a) {
  const Eigen::VectorXd s = singular_value_spectrum(a);
  return rearrange(MeasureSamples::counting(std::vector<double>(s.data(), s.data() + s.size())));
}

}  // namespace oqha
