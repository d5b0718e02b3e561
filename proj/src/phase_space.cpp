#include "orlicz_qha/phase_space.hpp"

#include <unsupported/Eigen/FFT>

#include "orlicz_qha/errors.hpp"

namespace oqha {

std::size_t GridSpec::size() const {
  std::size_t s = 1;
  for (int a = 0; a < axes(); ++a) s *= static_cast<std::size_t>(n);
  return s;
}

double GridSpec::cell_volume() const { return std::pow(h(), axes()); }

std::vector<double> GridSpec::point(std::size_t index) const {
  std::vector<double> z(static_cast<std::size_t>(axes()));
  for (int a = axes() - 1; a >= 0; --a) {
    z[static_cast<std::size_t>(a)] = coordinate(static_cast<int>(index % static_cast<std::size_t>(n)));
    index /= static_cast<std::size_t>(n);
  }
  return z;
}

void GridSpec::validate() const {
  if (d < 1 || n < 2 || n % 2 != 0 || !(L > 0.0))
    throw Error(ErrorCode::InvalidArgument, "grid needs d >= 1, even n >= 2 and L > 0");
}

GridFunction::GridFunction(GridSpec g, Eigen::VectorXcd v) : grid(g), values(std::move(v)) {
  grid.validate();
  if (static_cast<std::size_t>(values.size()) != grid.size())
    throw Error(ErrorCode::GridMismatch, "value count does not match the grid");
  if (!values.allFinite()) throw Error(ErrorCode::InvalidArgument, "grid values must be finite");
}

GridFunction GridFunction::zeros(const GridSpec& g) {
  return GridFunction(g, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(g.size())));
}

namespace {

void require_same_grid(const GridFunction& f, const GridFunction& g) {
  if (!(f.grid == g.grid)) throw Error(ErrorCode::GridMismatch, "grid functions live on different grids");
}

// Calls fn(offset, stride) once per line of the tensor along the given axis.
template <typename Fn>
void for_each_line(const GridSpec& g, int axis, Fn&& fn) {
  const std::size_t n = static_cast<std::size_t>(g.n);
  std::size_t stride = 1;
  for (int a = g.axes() - 1; a > axis; --a) stride *= n;
  const std::size_t block = stride * n;
  const std::size_t total = g.size();
  for (std::size_t outer = 0; outer < total; outer += block)
    for (std::size_t inner = 0; inner < stride; ++inner) fn(outer + inner, stride);
}

void fft_all_axes(const GridSpec& g, Eigen::VectorXcd& v, bool inverse) {
  Eigen::FFT<double> fft;
  const auto n = static_cast<std::size_t>(g.n);
  std::vector<cd> line(n), out(n);
  for (int axis = 0; axis < g.axes(); ++axis)
    for_each_line(g, axis, [&](std::size_t off, std::size_t stride) {
      for (std::size_t k = 0; k < n; ++k) line[k] = v(static_cast<Eigen::Index>(off + k * stride));
      if (inverse)
        fft.inv(out, line);
      else
        fft.fwd(out, line);
      for (std::size_t k = 0; k < n; ++k) v(static_cast<Eigen::Index>(off + k * stride)) = out[k];
    });
}

void apply_axis_matrix(const GridSpec& g, Eigen::VectorXcd& v, int axis, const Eigen::MatrixXd& M) {
  const auto n = static_cast<Eigen::Index>(g.n);
  Eigen::VectorXcd line(n), out(n);
  for_each_line(g, axis, [&](std::size_t off, std::size_t stride) {
    for (Eigen::Index k = 0; k < n; ++k) line(k) = v(static_cast<Eigen::Index>(off + static_cast<std::size_t>(k) * stride));
    out.noalias() = M.cast<cd>() * line;
    for (Eigen::Index k = 0; k < n; ++k) v(static_cast<Eigen::Index>(off + static_cast<std::size_t>(k) * stride)) = out(k);
  });
}

// Trigonometric interpolation kernel of period 2L through n nodes, with the
// Nyquist mode split evenly between +-n/2 so that real data stays real.
double dirichlet(double u, int n, double L) {
  const double w = kPi * u / L;
  const double half = std::sin(0.5 * w);
  if (std::fabs(half) < 1e-6) {
    double s = 1.0;
    for (int j = 1; j < n / 2; ++j) s += 2.0 * std::cos(j * w);
    return (s + std::cos(0.5 * n * w)) / n;
  }
  return (std::sin(0.5 * (n - 1) * w) / half + std::cos(0.5 * n * w)) / n;
}

Eigen::MatrixXd dilation_matrix(const GridSpec& g, double t, DilationMethod method) {
  const int n = g.n;
  const double h = g.h();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (int m = 0; m < n; ++m) {
    const double y = t * g.coordinate(m);
    if (y < -g.L || y >= g.L) continue;
    for (int k = 0; k < n; ++k) {
      const double u = y - g.coordinate(k);
      if (method == DilationMethod::Spectral)
        M(m, k) = dirichlet(u, n, g.L);
      else if (y <= g.coordinate(n - 1))
        M(m, k) = std::max(0.0, 1.0 - std::fabs(u) / h);
    }
  }
  return M;
}

}  // namespace

bool check_tj_constraint(const std::vector<double>& t, const std::vector<int>& c) {
  if (t.size() != c.size() || t.empty()) return false;
  double s = 0.0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    if (t[j] == 0.0) return false;
    s += c[j] / (t[j] * t[j]);
  }
  return std::fabs(s - 1.0) <= 1e-12;
}

bool check_exponent_constraint(const std::vector<double>& p, double r) {
  double s = 0.0;
  for (double pj : p) s += 1.0 / pj;
  return std::fabs(s - (static_cast<double>(p.size()) - 1.0 + 1.0 / r)) <= 1e-12;
}

void DilationSpec::validate() const {
  if (t.empty() || c.size() != t.size() || p.size() != t.size())
    throw Error(ErrorCode::ConstraintViolated, "dilation spec lists differ in length");
  for (std::size_t j = 0; j < t.size(); ++j) {
    if (t[j] == 0.0) throw Error(ErrorCode::ConstraintViolated, "dilation parameter t_j = 0");
    if (c[j] != 1 && c[j] != -1) throw Error(ErrorCode::ConstraintViolated, "signs c_j must be +1 or -1");
    if (!(p[j] >= 1.0)) throw Error(ErrorCode::ConstraintViolated, "exponents p_j must be >= 1");
  }
  if (!(r > 0.0)) throw Error(ErrorCode::ConstraintViolated, "target exponent r must be positive");
  if (!check_tj_constraint(t, c)) throw Error(ErrorCode::ConstraintViolated, "sum c_j / t_j^2 != 1");
  if (!check_exponent_constraint(p, r)) throw Error(ErrorCode::ConstraintViolated, "sum 1/p_j != n - 1 + 1/r");
}

GridFunction gaussian(const GridSpec& g, const std::vector<double>& center, double a, cd amplitude) {
  if (!(a > 0.0)) throw Error(ErrorCode::InvalidArgument, "gaussian width must be positive");
  if (center.size() != static_cast<std::size_t>(g.axes()))
    throw Error(ErrorCode::DimensionMismatch, "gaussian center has the wrong dimension");
  return GridFunction::from(g, [&](const std::vector<double>& z) {
    double r2 = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) r2 += (z[i] - center[i]) * (z[i] - center[i]);
    return amplitude * std::exp(-r2 / (2.0 * a));
  });
}

GridFunction gaussian(int d, double L, int n, const std::vector<double>& center, double a, cd amplitude) {
  return gaussian(GridSpec{d, L, n}, center, a, amplitude);
}

GridFunction convolve(const GridFunction& f, const GridFunction& g, double measure) {
  require_same_grid(f, g);
  const GridSpec& grid = f.grid;
  Eigen::VectorXcd F = f.values, G = g.values;
  fft_all_axes(grid, F, false);
  fft_all_axes(grid, G, false);
  Eigen::VectorXcd H = F.cwiseProduct(G);
  fft_all_axes(grid, H, true);

  // The cyclic result is offset by half a period on every axis because grid
  // index 0 sits at -L rather than at the origin.
  GridFunction out = GridFunction::zeros(grid);
  const std::size_t n = static_cast<std::size_t>(grid.n);
  const double scale = measure * grid.cell_volume();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::size_t rest = i, src = 0, mult = 1;
    for (int a = 0; a < grid.axes(); ++a) {
      const std::size_t k = rest % n;
      rest /= n;
      src += ((k + n / 2) % n) * mult;
      mult *= n;
    }
    out.values(static_cast<Eigen::Index>(i)) = H(static_cast<Eigen::Index>(src)) * scale;
  }
  return out;
}

GridFunction dilate(const GridFunction& a, double t, DilationMethod method) {
  if (t == 0.0) throw Error(ErrorCode::ZeroDilation, "dilation by t = 0");
  if (t == 1.0) return a;
  if (t == -1.0) return reflect(a);
  const Eigen::MatrixXd M = dilation_matrix(a.grid, t, method);
  Eigen::VectorXcd v = a.values;
  for (int axis = 0; axis < a.grid.axes(); ++axis) apply_axis_matrix(a.grid, v, axis, M);
  return GridFunction(a.grid, std::move(v));
}

GridFunction reflect(const GridFunction& a) {
  const std::size_t n = static_cast<std::size_t>(a.grid.n);
  GridFunction out = GridFunction::zeros(a.grid);
  for (std::size_t i = 0; i < a.grid.size(); ++i) {
    std::size_t rest = i, src = 0, mult = 1;
    bool inside = true;
    for (int ax = 0; ax < a.grid.axes(); ++ax) {
      const std::size_t k = rest % n;
      rest /= n;
      // -x_k = x_{n-k}; the node at -L has no mirror inside [-L, L).
      if (k == 0) inside = false;
      src += ((n - k) % n) * mult;
      mult *= n;
    }
    if (inside) out.values(static_cast<Eigen::Index>(i)) = a.values(static_cast<Eigen::Index>(src));
  }
  return out;
}

GridFunction translate(const GridFunction& a, const std::vector<int>& steps) {
  if (steps.size() != static_cast<std::size_t>(a.grid.axes()))
    throw Error(ErrorCode::DimensionMismatch, "translation has the wrong dimension");
  const long n = a.grid.n;
  GridFunction out = GridFunction::zeros(a.grid);
  for (std::size_t i = 0; i < a.grid.size(); ++i) {
    std::size_t rest = i, src = 0, mult = 1;
    bool inside = true;
    for (int ax = a.grid.axes() - 1; ax >= 0; --ax) {
      const long k = static_cast<long>(rest % static_cast<std::size_t>(n));
      rest /= static_cast<std::size_t>(n);
      const long s = k - steps[static_cast<std::size_t>(ax)];
      if (s < 0 || s >= n) inside = false;
      src += static_cast<std::size_t>(std::max(0L, s)) * mult;
      mult *= static_cast<std::size_t>(n);
    }
    if (inside) out.values(static_cast<Eigen::Index>(i)) = a.values(static_cast<Eigen::Index>(src));
  }
  return out;
}

GridFunction dilated_convolve(const DilationSpec& spec, const std::vector<GridFunction>& funcs, double measure,
                              DilationMethod method) {
  spec.validate();
  if (funcs.size() != spec.size()) throw Error(ErrorCode::DimensionMismatch, "one function per dilation factor");
  const double t1 = spec.t[0];
  GridFunction acc = funcs[0];
  for (std::size_t j = 1; j < funcs.size(); ++j)
    acc = convolve(acc, dilate(funcs[j], spec.t[j] / t1, method), measure);
  acc = dilate(acc, t1, method);
  const double jacobian = std::pow(std::fabs(t1), -2.0 * acc.grid.d * static_cast<double>(funcs.size() - 1));
  acc.values *= jacobian;
  return acc;
}

GridFunction dilated_convolve_direct(const DilationSpec& spec, const std::vector<GridFunction>& funcs,
                                     double measure, DilationMethod method) {
  spec.validate();
  if (funcs.size() != spec.size()) throw Error(ErrorCode::DimensionMismatch, "one function per dilation factor");
  GridFunction acc = dilate(funcs[0], spec.t[0], method);
  for (std::size_t j = 1; j < funcs.size(); ++j) acc = convolve(acc, dilate(funcs[j], spec.t[j], method), measure);
  return acc;
}

double integral_abs(const GridFunction& f, double measure) {
  return l1_norm(f.values, measure * f.grid.cell_volume());
}

cd integral(const GridFunction& f, double measure) { return f.values.sum() * (measure * f.grid.cell_volume()); }

double sup_abs(const GridFunction& f) { return f.values.size() ? f.values.cwiseAbs().maxCoeff() : 0.0; }

double boundary_max(const GridFunction& f) {
  const std::size_t n = static_cast<std::size_t>(f.grid.n);
  double best = 0.0;
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    std::size_t rest = i;
    bool edge = false;
    for (int ax = 0; ax < f.grid.axes(); ++ax) {
      const std::size_t k = rest % n;
      rest /= n;
      edge = edge || k == 0 || k == n - 1;
    }
    if (edge) best = std::max(best, std::abs(f.values(static_cast<Eigen::Index>(i))));
  }
  return best;
}

MeasureSamples to_measure_samples(const GridFunction& f, double measure) {
  const double cell = measure * f.grid.cell_volume();
  std::vector<double> v, m;
  v.reserve(f.grid.size());
  for (Eigen::Index i = 0; i < f.values.size(); ++i) {
    const double a = std::abs(f.values(i));
    if (a > 0.0) {
      v.push_back(a);
      m.push_back(cell);
    }
  }
  return MeasureSamples(std::move(v), std::move(m));
}

}  // namespace oqha
