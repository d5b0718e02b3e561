#include "orlicz_qha/young_function.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include "orlicz_qha/errors.hpp"

namespace oqha {

struct YoungFunction::Impl {
  explicit Impl(Family f) : family(std::move(f)) {}

  Family family;
  // Slope bounds of w -> log_left_inverse(w), used to bracket inversions.
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  double log_inverse_at_one = 0.0;
  mutable std::once_flag exponents_once;
  mutable Exponents exponents_cache;
};

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

// log(log(1 + e^v)) without overflow or underflow.
double log_log1p_exp(double v) {
  if (v < -30.0) return v + std::log1p(-0.5 * std::exp(v));
  const double l1p = v > 35.0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v));
  return std::log(l1p);
}

// t / ((1 + t) log(1 + t)), tending to 1 at t = 0.
double log_term_slope(double t) {
  if (t < 1e-8) return 1.0 - 0.5 * t;
  if (!std::isfinite(t)) return 0.0;
  return t / ((1.0 + t) * std::log1p(t));
}

// Root v of g(v) = target for an increasing g whose slope lies in [lo, hi].
template <typename G>
double invert_increasing(G&& g, double target, double v0, double lo, double hi) {
  double f0 = g(v0) - target;
  if (f0 == 0.0) return v0;
  double a, b;
  if (lo > 0.0 && std::isfinite(hi) && std::isfinite(f0)) {
    const double v1 = v0 - f0 / lo, v2 = v0 - f0 / hi;
    const double pad = 1e-12 * (1.0 + std::fabs(v0) + std::fabs(v1));
    a = std::min(v1, v2) - pad;
    b = std::max(v1, v2) + pad;
  } else {
    a = b = v0;
  }
  double fa = g(a) - target, fb = g(b) - target;
  double step = std::max(1.0, b - a);
  for (int i = 0; i < 200 && fa > 0.0; ++i) {
    a -= step;
    step *= 2.0;
    fa = g(a) - target;
  }
  step = std::max(1.0, b - a);
  for (int i = 0; i < 200 && fb < 0.0; ++i) {
    b += step;
    step *= 2.0;
    fb = g(b) - target;
  }
  if (fa > 0.0 || fb < 0.0) throw Error(ErrorCode::DegenerateFunction, "inversion failed to bracket");
  return find_root([&](double v) { return g(v) - target; }, a, b, fa, fb, 1e-15, 1e-15);
}

double power_log_inverse(double p, double a, double w) {
  const double lo = std::min(p, p + a), hi = std::max(p, p + a);
  const auto F = [&](double v) { return p * v + a * log_log1p_exp(v); };
  double v = w < 0.0 ? w / (p + a) : w / p;
  double f = F(v) - w;
  if (f == 0.0) return v;
  // The mean value theorem brackets the root using the slope range.
  double left = std::min(v - f / lo, v - f / hi), right = std::max(v - f / lo, v - f / hi);
  for (int iter = 0; iter < 100; ++iter) {
    const double slope = p + a * log_term_slope(std::exp(v));
    double next = v - f / slope;
    if (!(next > left && next < right)) next = 0.5 * (left + right);
    const double change = std::fabs(next - v);
    v = next;
    if (change <= 1e-15 * std::max(1.0, std::fabs(v))) break;
    f = F(v) - w;
    if (f == 0.0) break;
    if (f > 0.0)
      right = std::min(right, v);
    else
      left = std::max(left, v);
  }
  return v;
}

Exponents summarize_ratios(const std::vector<double>& ratio) {
  const auto [mn, mx] = std::minmax_element(ratio.begin(), ratio.end());
  Exponents e{*mn, *mx};
  if (e.p > kDivergenceThreshold) {
    const std::size_t n = ratio.size();
    const bool grows_high = ratio[n - 1] >= ratio[n - 2] && ratio[n - 1] > kDivergenceThreshold;
    const bool grows_low = ratio[0] >= ratio[1] && ratio[0] > kDivergenceThreshold;
    if (grows_high || grows_low) e.p = kInf;
  }
  return e;
}

double sampled_segment_slope(const family::Sampled& s, std::size_t i) {
  return (s.log_value[i + 1] - s.log_value[i]) / (s.log_t[i + 1] - s.log_t[i]);
}

}  // namespace

// --- construction ---------------------------------------------------------

YoungFunction YoungFunction::power(double p) {
  require(p > 0.0 && std::isfinite(p), "Power exponent must be positive");
  return YoungFunction(std::make_shared<Impl>(family::Power{p}));
}

YoungFunction YoungFunction::power_log(double p, double a) {
  require(p > 0.0 && p + a > 0.0, "PowerLog needs p > 0 and p + a > 0");
  return YoungFunction(std::make_shared<Impl>(family::PowerLog{p, a}));
}

YoungFunction YoungFunction::piecewise_power(double p_low, double p_high, double breakpoint) {
  require(p_low > 0.0 && p_high > 0.0 && breakpoint > 0.0, "PiecewisePower parameters must be positive");
  return YoungFunction(std::make_shared<Impl>(family::PiecewisePower{p_low, p_high, breakpoint}));
}

YoungFunction YoungFunction::scaled(YoungFunction inner, double r) {
  require(r > 0.0 && r <= 1.0, "Scaled exponent r must lie in (0, 1]");
  if (r == 1.0) return inner;
  return YoungFunction(std::make_shared<Impl>(family::Scaled{std::move(inner), r}));
}

YoungFunction YoungFunction::sampled(const std::vector<double>& t, const std::vector<double>& values) {
  require(t.size() == values.size(), "Sampled knots and values differ in length");
  std::vector<double> lt(t.size()), lv(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    require(t[i] > 0.0 && values[i] >= 0.0, "Sampled knots must be positive and values nonnegative");
    lt[i] = std::log(t[i]);
    lv[i] = std::log(values[i]);
  }
  return sampled_log(std::move(lt), std::move(lv));
}

YoungFunction YoungFunction::sampled_log(std::vector<double> log_t, std::vector<double> log_values) {
  require(log_t.size() == log_values.size() && log_t.size() >= 2, "Sampled needs at least two knots");
  for (std::size_t i = 0; i + 1 < log_t.size(); ++i) {
    require(log_t[i] < log_t[i + 1], "Sampled knots must be strictly increasing");
    require(log_values[i] <= log_values[i + 1], "Sampled values must be nondecreasing");
  }
  // Leading zero values (log -inf) are allowed; the last two knots must be positive.
  for (double v : log_values) require(!std::isnan(v) && v < kInf, "Sampled values must be finite");
  require(std::isfinite(log_values[log_values.size() - 2]), "Sampled needs two positive trailing values");
  return YoungFunction(std::make_shared<Impl>(family::Sampled{std::move(log_t), std::move(log_values)}));
}

YoungFunction YoungFunction::inverse_product(double s_power,
                                             std::vector<std::pair<YoungFunction, double>> factors) {
  family::InverseProduct out{s_power, {}};
  const auto add = [&](const YoungFunction& f, double e, auto&& self) -> void {
    if (e == 0.0) return;
    if (const auto* pw = std::get_if<family::Power>(&f.family())) {
      out.s_power += e / pw->p;
      return;
    }
    if (const auto* ip = std::get_if<family::InverseProduct>(&f.family())) {
      out.s_power += e * ip->s_power;
      for (const auto& [g, eg] : ip->factors) self(g, e * eg, self);
      return;
    }
    for (auto& [g, eg] : out.factors) {
      if (g.same_object(f)) {
        eg += e;
        return;
      }
    }
    out.factors.emplace_back(f, e);
  };
  for (const auto& [f, e] : factors) add(f, e, add);

  if (out.factors.empty()) {
    if (!(out.s_power > 0.0)) throw Error(ErrorCode::DegenerateFunction, "inverse product is not increasing");
    return power(1.0 / out.s_power);
  }
  if (out.factors.size() == 1 && out.s_power == 0.0 && out.factors[0].second == 1.0)
    return out.factors[0].first;

  double lo = out.s_power, hi = out.s_power;
  for (const auto& [f, e] : out.factors) {
    const Exponents ex = f.exponents();
    const double a = e / ex.q, b = std::isfinite(ex.p) ? e / ex.p : 0.0;
    lo += std::min(a, b);
    hi += std::max(a, b);
  }
  auto impl = std::make_shared<Impl>(std::move(out));
  impl->sigma_min = lo;
  impl->sigma_max = hi;
  YoungFunction result(impl);
  impl->log_inverse_at_one = result.log_left_inverse(0.0);
  return result;
}

YoungFunction::Kind YoungFunction::kind() const { return static_cast<Kind>(impl_->family.index()); }

const Family& YoungFunction::family() const { return impl_->family; }

double YoungFunction::r() const {
  if (const auto* s = std::get_if<family::Scaled>(&impl_->family)) return s->r * s->inner.r();
  return 1.0;
}

// --- evaluation -----------------------------------------------------------

double YoungFunction::operator()(double t) const {
  if (t <= 0.0) return 0.0;
  if (std::isinf(t)) return kInf;
  return std::visit(
      overloaded{
          [&](const family::Power& f) { return std::pow(t, f.p); },
          [&](const family::PowerLog& f) { return std::pow(t, f.p) * std::pow(std::log1p(t), f.a); },
          [&](const family::PiecewisePower& f) {
            if (t <= f.breakpoint) return std::pow(t, f.p_low);
            return std::pow(f.breakpoint, f.p_low) * std::pow(t / f.breakpoint, f.p_high);
          },
          [&](const family::Scaled& f) { return f.inner(std::pow(t, f.r)); },
          [&](const auto&) { return std::exp(log_eval(std::log(t))); },
      },
      impl_->family);
}

double YoungFunction::log_eval(double u) const {
  if (u == -kInf) return -kInf;
  if (u == kInf) return kInf;
  return std::visit(
      overloaded{
          [&](const family::Power& f) { return f.p * u; },
          [&](const family::PowerLog& f) { return f.p * u + f.a * log_log1p_exp(u); },
          [&](const family::PiecewisePower& f) {
            const double lb = std::log(f.breakpoint);
            return u <= lb ? f.p_low * u : f.p_low * lb + f.p_high * (u - lb);
          },
          [&](const family::Scaled& f) { return f.inner.log_eval(f.r * u); },
          [&](const family::Sampled& f) {
            const auto& x = f.log_t;
            const auto& y = f.log_value;
            const std::size_t n = x.size();
            if (u <= x[0]) return y[0] == -kInf ? -kInf : y[0] + sampled_segment_slope(f, 0) * (u - x[0]);
            if (u >= x[n - 1]) return y[n - 1] + sampled_segment_slope(f, n - 2) * (u - x[n - 1]);
            const std::size_t i = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), u) - x.begin()) - 1;
            if (y[i] == -kInf) return -kInf;
            return y[i] + sampled_segment_slope(f, i) * (u - x[i]);
          },
          [&](const family::InverseProduct&) {
            const double mid = 0.5 * (impl_->sigma_min + impl_->sigma_max);
            const double v0 = mid > 0.0 ? (u - impl_->log_inverse_at_one) / mid : u;
            return invert_increasing([this](double v) { return log_left_inverse(v); }, u, v0,
                                     impl_->sigma_min, impl_->sigma_max);
          },
      },
      impl_->family);
}

double YoungFunction::log_slope(double t) const {
  return std::visit(
      overloaded{
          [&](const family::Power& f) { return f.p; },
          [&](const family::PowerLog& f) { return f.p + f.a * log_term_slope(t); },
          [&](const family::PiecewisePower& f) { return t < f.breakpoint ? f.p_low : f.p_high; },
          [&](const family::Scaled& f) { return f.r * f.inner.log_slope(std::pow(t, f.r)); },
          [&](const family::Sampled& f) {
            const auto& x = f.log_t;
            const double u = std::log(t);
            if (u < x[0]) return sampled_segment_slope(f, 0);
            std::size_t i = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), u) - x.begin()) - 1;
            i = std::min(i, x.size() - 2);
            return sampled_segment_slope(f, i);
          },
          [&](const family::InverseProduct& f) {
            // The inverse's log-slope is the reciprocal of each factor's slope
            // taken at the factor's inverse.
            const double w = log_eval(std::log(t));
            double g = f.s_power;
            for (const auto& [phi, e] : f.factors)
              g += e / phi.log_slope(std::exp(phi.log_left_inverse(w)));
            return 1.0 / g;
          },
      },
      impl_->family);
}

double YoungFunction::right_derivative(double t) const {
  if (t <= 0.0) {
    const double h = 1e-12;
    return (*this)(h) / h;
  }
  return (*this)(t) * log_slope(t) / t;
}

double YoungFunction::left_inverse(double s) const {
  if (s <= 0.0) return 0.0;
  if (std::isinf(s)) return kInf;
  if (const auto* pw = std::get_if<family::Power>(&impl_->family)) return std::pow(s, 1.0 / pw->p);
  return std::exp(log_left_inverse(std::log(s)));
}

double YoungFunction::log_left_inverse(double w) const {
  if (w == -kInf) return -kInf;
  if (w == kInf) return kInf;
  return std::visit(
      overloaded{
          [&](const family::Power& f) { return w / f.p; },
          [&](const family::PowerLog& f) { return power_log_inverse(f.p, f.a, w); },
          [&](const family::PiecewisePower& f) {
            const double lb = std::log(f.breakpoint);
            return w <= f.p_low * lb ? w / f.p_low : lb + (w - f.p_low * lb) / f.p_high;
          },
          [&](const family::Scaled& f) { return f.inner.log_left_inverse(w) / f.r; },
          [&](const family::Sampled& f) {
            const auto& x = f.log_t;
            const auto& y = f.log_value;
            const std::size_t n = x.size();
            // First knot whose value reaches w; the infimum lies on the segment
            // ending there.
            const std::size_t k = static_cast<std::size_t>(std::lower_bound(y.begin(), y.end(), w) - y.begin());
            if (k == 0) {
              if (y[0] == -kInf) return x[0];
              const double s0 = sampled_segment_slope(f, 0);
              return s0 > 0.0 ? x[0] + (w - y[0]) / s0 : -kInf;
            }
            if (k == n) {
              const double s1 = sampled_segment_slope(f, n - 2);
              return s1 > 0.0 ? x[n - 1] + (w - y[n - 1]) / s1 : kInf;
            }
            if (y[k - 1] == -kInf) return x[k];
            return x[k - 1] + (w - y[k - 1]) * (x[k] - x[k - 1]) / (y[k] - y[k - 1]);
          },
          [&](const family::InverseProduct& f) {
            double g = f.s_power * w;
            for (const auto& [phi, e] : f.factors) g += e * phi.log_left_inverse(w);
            return g;
          },
      },
      impl_->family);
}

// --- exponents ------------------------------------------------------------

const Exponents& YoungFunction::exponents() const {
  std::call_once(impl_->exponents_once, [this] {
    impl_->exponents_cache = std::visit(
        overloaded{
            [&](const family::Power& f) { return Exponents{f.p, f.p}; },
            [&](const family::PowerLog& f) {
              return f.a >= 0.0 ? Exponents{f.p, f.p + f.a} : Exponents{f.p + f.a, f.p};
            },
            [&](const family::PiecewisePower& f) {
              return Exponents{std::min(f.p_low, f.p_high), std::max(f.p_low, f.p_high)};
            },
            [&](const family::Scaled& f) {
              const Exponents& e = f.inner.exponents();
              return Exponents{f.r * e.q, f.r * e.p};
            },
            [&](const auto&) { return exponents_on_grid(*this); },
        },
        impl_->family);
  });
  return impl_->exponents_cache;
}

bool YoungFunction::is_delta2() const { return std::isfinite(exponents().p); }

Exponents exponents_on_grid(const YoungFunction& phi, double lo, double hi, std::size_t points) {
  constexpr double rel_step = 1e-7;
  const double du = std::log1p(rel_step);
  std::vector<double> ratio(points);
  if (phi.kind() == YoungFunction::Kind::InverseProduct) {
    // Sample in s = Phi(t) so that only the explicit inverse is evaluated:
    // t Phi'/Phi is the reciprocal of s g'(s)/g(s) for g = Phi^{-1}.
    const double w_lo = phi.log_eval(std::log(lo)), w_hi = phi.log_eval(std::log(hi));
    if (!std::isfinite(w_lo) || !std::isfinite(w_hi))
      throw Error(ErrorCode::DegenerateFunction, "function vanishes or overflows on the grid");
    for (std::size_t i = 0; i < points; ++i) {
      const double w = w_lo + (w_hi - w_lo) * static_cast<double>(i) / static_cast<double>(points - 1);
      const double g0 = phi.log_left_inverse(w), g1 = phi.log_left_inverse(w + du);
      ratio[i] = rel_step / std::expm1(g1 - g0);
    }
    return summarize_ratios(ratio);
  }
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < points; ++i) {
    const double u = a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1);
    const double f0 = phi.log_eval(u);
    if (f0 == -kInf) throw Error(ErrorCode::DegenerateFunction, "function vanishes on part of the grid");
    ratio[i] = std::expm1(phi.log_eval(u + du) - f0) / rel_step;
  }
  return summarize_ratios(ratio);
}

std::string YoungFunction::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{
                 [&](const family::Power& f) { os << "Power{" << f.p << "}"; },
                 [&](const family::PowerLog& f) { os << "PowerLog{" << f.p << "," << f.a << "}"; },
                 [&](const family::PiecewisePower& f) {
                   os << "PiecewisePower{" << f.p_low << "," << f.p_high << "," << f.breakpoint << "}";
                 },
                 [&](const family::Scaled& f) { os << "Scaled{" << f.inner.describe() << "," << f.r << "}"; },
                 [&](const family::Sampled& f) { os << "Sampled{" << f.log_t.size() << " knots}"; },
                 [&](const family::InverseProduct& f) {
                   os << "InverseProduct{s^" << f.s_power;
                   for (const auto& [g, e] : f.factors) os << "," << g.describe() << "^" << e;
                   os << "}";
                 },
             },
             impl_->family);
  return os.str();
}

// --- simplex --------------------------------------------------------------

SimplexPoint::SimplexPoint(std::vector<double> theta) : theta_(std::move(theta)) {
  if (theta_.empty()) throw Error(ErrorCode::InvalidArgument, "empty simplex point");
  double sum = 0.0;
  for (double t : theta_) {
    if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorCode::InvalidArgument, "simplex weight outside [0, 1]");
    sum += t;
  }
  if (std::fabs(sum - 1.0) > 1e-12) throw Error(ErrorCode::InvalidArgument, "simplex weights do not sum to 1");
}

bool SimplexPoint::is_interior() const {
  if (theta_.size() == 1) return true;
  return std::all_of(theta_.begin(), theta_.end(), [](double t) { return t > 0.0 && t < 1.0; });
}

}  // namespace oqha
