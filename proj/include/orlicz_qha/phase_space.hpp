#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "orlicz_qha/rearrangement.hpp"

namespace oqha {

using cd = std::complex<double>;

// Uniform grid on [-L, L)^{2d}: points -L + k h, h = 2L/n, axis 0 slowest.
struct GridSpec {
  int d = 1;
  double L = 12.0;
  int n = 128;

  double h() const { return 2.0 * L / n; }
  int axes() const { return 2 * d; }
  std::size_t size() const;
  double cell_volume() const;
  double coordinate(int k) const { return -L + k * h(); }
  // Coordinates of a flat index; entries 0..d-1 are x, d..2d-1 are xi.
  std::vector<double> point(std::size_t index) const;
  void validate() const;
  bool operator==(const GridSpec&) const = default;
};

struct GridFunction {
  GridSpec grid;
  Eigen::VectorXcd values;

  GridFunction() = default;
  GridFunction(GridSpec g, Eigen::VectorXcd v);
  static GridFunction zeros(const GridSpec& g);
  // Samples f at every grid point.
  template <typename F>
  static GridFunction from(const GridSpec& g, F&& f) {
    GridFunction out = zeros(g);
    for (std::size_t i = 0; i < g.size(); ++i) out.values(static_cast<Eigen::Index>(i)) = f(g.point(i));
    return out;
  }
};

enum class DilationMethod { Spectral, Linear };

struct DilationSpec {
  std::vector<double> t;
  std::vector<int> c;
  std::vector<double> p;
  double r = 1.0;

  std::size_t size() const { return t.size(); }
  // Throws ConstraintViolated unless both constraints hold within 1e-12.
  void validate() const;
};

bool check_tj_constraint(const std::vector<double>& t, const std::vector<int>& c);
bool check_exponent_constraint(const std::vector<double>& p, double r);

GridFunction gaussian(int d, double L, int n, const std::vector<double>& center, double a, cd amplitude = 1.0);
GridFunction gaussian(const GridSpec& g, const std::vector<double>& center, double a, cd amplitude = 1.0);

// Periodic discrete convolution times measure * h^{2d}.
GridFunction convolve(const GridFunction& f, const GridFunction& g, double measure = 1.0);
GridFunction dilate(const GridFunction& a, double t, DilationMethod method = DilationMethod::Spectral);
// beta_-: z -> -z.
GridFunction reflect(const GridFunction& a);
// Shift by whole grid steps, zero filled.
GridFunction translate(const GridFunction& a, const std::vector<int>& steps);

// a^1_{t_1} * ... * a^n_{t_n} through the rescaling identity
// a_s * b_t = |s|^{-2d} (a * b_{t/s})_s.
GridFunction dilated_convolve(const DilationSpec& spec, const std::vector<GridFunction>& funcs,
                              double measure = 1.0, DilationMethod method = DilationMethod::Spectral);
// Dilate each factor first, then convolve left to right.
GridFunction dilated_convolve_direct(const DilationSpec& spec, const std::vector<GridFunction>& funcs,
                                     double measure = 1.0, DilationMethod method = DilationMethod::Spectral);

double integral_abs(const GridFunction& f, double measure = 1.0);
cd integral(const GridFunction& f, double measure = 1.0);
double sup_abs(const GridFunction& f);
// Largest modulus on the outermost layer of grid cells.
double boundary_max(const GridFunction& f);
// |f| as value-measure samples with cell measure measure * h^{2d}.
MeasureSamples to_measure_samples(const GridFunction& f, double measure = 1.0);

template <typename Derived>
double l1_norm(const Eigen::MatrixBase<Derived>& values, double cell) {
  return values.cwiseAbs().sum() * cell;
}

}  // namespace oqha
