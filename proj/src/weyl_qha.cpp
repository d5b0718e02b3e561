#include "orlicz_qha/weyl_qha.hpp"

#include <cmath>

#include "orlicz_qha/errors.hpp"
#include "orlicz_qha/parallel.hpp"

namespace oqha {

namespace {

constexpr std::size_t kChunks = 64;
constexpr double kRescale = 1e150;

void require_d1(const QhaContext& ctx) {
  if (ctx.grid.d != 1) throw Error(ErrorCode::InvalidArgument, "the Fock realization is implemented for d = 1");
}

void require_size(const QhaContext& ctx, const OperatorMatrix& A) {
  if (A.rows() != ctx.N || A.cols() != ctx.N)
    throw Error(ErrorCode::DimensionMismatch, "operator size does not match the truncation");
}

void require_decay(const QhaContext& ctx, const GridFunction& f) {
  if (!(f.grid == ctx.grid)) throw Error(ErrorCode::GridMismatch, "function grid differs from the context grid");
  if (!ctx.check_decay) return;
  const double top = sup_abs(f);
  if (boundary_max(f) > ctx.decay_tolerance * top)
    throw Error(ErrorCode::BoundaryDecayViolated, "function does not decay at the grid boundary");
}

// Low-rank factors A = L diag(s) R^*, trimmed to the leading rows where any
// factor is above rounding level.
struct LowRank {
  Eigen::MatrixXcd left, right;
  Eigen::VectorXd sigma;
  int support = 0;
};

LowRank factorize(const OperatorMatrix& A) {
  const auto svd = jacobi_svd(A);
  LowRank out;
  const double top = svd.sigma.size() ? svd.sigma(0) : 0.0;
  Eigen::Index r = 0;
  while (r < svd.sigma.size() && svd.sigma(r) > 1e-15 * top) ++r;
  // Unit-norm factor columns: rows below 1e-16 cannot change any entry of the
  // result at double precision.
  Eigen::Index support = 0;
  for (Eigen::Index i = 0; i < A.rows() && r > 0; ++i) {
    const double row = std::max(svd.U.row(i).head(r).cwiseAbs().maxCoeff(), svd.V.row(i).head(r).cwiseAbs().maxCoeff());
    if (row > 1e-16) support = i + 1;
  }
  out.support = static_cast<int>(support);
  out.sigma = svd.sigma.head(r);
  out.left = svd.U.topLeftCorner(support, r);
  out.right = svd.V.topLeftCorner(support, r);
  return out;
}

std::vector<double> sqrt_table(int size) {
  std::vector<double> s(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) s[static_cast<std::size_t>(i)] = std::sqrt(static_cast<double>(i));
  return s;
}

OperatorMatrix apply_parity_right(OperatorMatrix A) {
  for (Eigen::Index n = 1; n < A.cols(); n += 2) A.col(n) = -A.col(n);
  return A;
}

OperatorMatrix conjugate_parity(const OperatorMatrix& A) {
  OperatorMatrix out = A;
  for (Eigen::Index m = 0; m < A.rows(); ++m)
    for (Eigen::Index n = 0; n < A.cols(); ++n)
      if ((m + n) % 2) out(m, n) = -out(m, n);
  return out;
}

}  // namespace

void QhaContext::validate() const {
  grid.validate();
  if (N < 16) throw Error(ErrorCode::InvalidArgument, "truncation N must be at least 16");
  // The ground-state overlap e^{-|z|^2/4} must be negligible at the edge.
  if (std::exp(-grid.L * grid.L / 4.0) > 1e-12)
    throw Error(ErrorCode::InvalidArgument, "grid extent too small for the truncation guard");
  // Symbols of N-level operators oscillate with wave number up to sqrt(2N);
  // coarser grids alias them.
  if (grid.h() > kPi / std::sqrt(2.0 * N))
    throw Error(ErrorCode::InvalidArgument, "grid spacing too coarse for the truncation N");
}

std::complex<double> phase_point_alpha(double x, double xi) { return {x / std::sqrt(2.0), xi / std::sqrt(2.0)}; }

void displacement_block(std::complex<double> alpha, int rows, int cols, OperatorMatrix& out) {
  out.setZero(rows, cols);
  const double x = std::norm(alpha);
  const int diag = std::min(rows, cols);
  if (x == 0.0) {
    for (int i = 0; i < diag; ++i) out(i, i) = 1.0;
    return;
  }
  // Every element is below e^{-x/4} or so once x exceeds the level count by a margin.
  if (x > 4.0 * std::max(rows, cols) + 200.0) return;
  static thread_local std::vector<double> sq;
  if (static_cast<int>(sq.size()) < rows + cols + 2) sq = sqrt_table(rows + cols + 2);
  const double theta = std::arg(alpha), lx = std::log(x);

  // Along the k-th subdiagonal, <n+k|D|n> = e^{-x/2} x^{k/2}/sqrt(k!) y_n e^{ik theta}
  // with y_n the normalized Laguerre polynomial L_n^{(k)}(x) sqrt(n! k!/(n+k)!).
  for (int k = 0; k < std::max(rows, cols); ++k) {
    const int lower = k < rows ? std::min(cols - 1, rows - 1 - k) : -1;
    const int upper = (k >= 1 && k < cols) ? std::min(rows - 1, cols - 1 - k) : -1;
    const int nmax = std::max(lower, upper);
    if (nmax < 0) continue;
    const double log_pre = -0.5 * x + 0.5 * k * lx - 0.5 * std::lgamma(k + 1.0);
    const std::complex<double> ph = std::polar(1.0, k * theta);
    const std::complex<double> ph_up = (k % 2 ? -1.0 : 1.0) * std::conj(ph);
    double offset = 0.0, scale = std::exp(log_pre);
    double y_prev = 0.0, y = 1.0;
    for (int n = 0; n <= nmax; ++n) {
      const double mag = scale * y;
      if (n <= lower) out(n + k, n) = mag * ph;
      if (n <= upper) out(n, n + k) = mag * ph_up;
      const double y_next = ((2.0 * n + 1.0 + k - x) * y - sq[static_cast<std::size_t>(n)] * sq[static_cast<std::size_t>(n + k)] * y_prev) /
                            (sq[static_cast<std::size_t>(n + 1)] * sq[static_cast<std::size_t>(n + 1 + k)]);
      y_prev = y;
      y = y_next;
      if (std::fabs(y) > kRescale) {
        y /= kRescale;
        y_prev /= kRescale;
        offset += std::log(kRescale);
        scale = std::exp(log_pre + offset);
      }
    }
  }
}

OperatorMatrix weyl_operator(const QhaContext& ctx, const std::vector<double>& z) {
  require_d1(ctx);
  if (z.size() != 2) throw Error(ErrorCode::DimensionMismatch, "phase-space point must have 2 coordinates");
  OperatorMatrix W;
  displacement_block(phase_point_alpha(z[0], z[1]), ctx.N, ctx.N, W);
  return W;
}

OperatorMatrix parity(const QhaContext& ctx) {
  OperatorMatrix U = OperatorMatrix::Zero(ctx.N, ctx.N);
  for (int n = 0; n < ctx.N; ++n) U(n, n) = n % 2 ? -1.0 : 1.0;
  return U;
}

OperatorMatrix shift_op(const QhaContext& ctx, const OperatorMatrix& A, const std::vector<double>& z) {
  require_size(ctx, A);
  const OperatorMatrix W = weyl_operator(ctx, z);
  return W * A * W.adjoint();
}

OperatorMatrix op_w(const QhaContext& ctx, const GridFunction& f) {
  ctx.validate();
  require_d1(ctx);
  require_decay(ctx, f);
  const std::size_t count = ctx.grid.size();
  const double cutoff = ctx.negligible * sup_abs(f);
  std::vector<OperatorMatrix> partial(kChunks, OperatorMatrix::Zero(ctx.N, ctx.N));
  parallel_chunks(count, kChunks, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    OperatorMatrix W;
    OperatorMatrix& acc = partial[chunk];
    for (std::size_t i = begin; i < end; ++i) {
      const cd v = f.values(static_cast<Eigen::Index>(i));
      if (std::abs(v) <= cutoff) continue;
      const auto z = ctx.grid.point(i);
      displacement_block(2.0 * phase_point_alpha(z[0], z[1]), ctx.N, ctx.N, W);
      acc.noalias() += v * W;
    }
  });
  OperatorMatrix total = OperatorMatrix::Zero(ctx.N, ctx.N);
  for (const auto& p : partial) total += p;
  return apply_parity_right(total) * (ctx.grid.cell_volume() / kPi);
}

GridFunction sym_w(const QhaContext& ctx, const OperatorMatrix& A) {
  ctx.validate();
  require_d1(ctx);
  require_size(ctx, A);
  // tr(A W U) = sum_{m,n} A_{nm} W_{mn} (-1)^n.
  const OperatorMatrix weights = apply_parity_right(OperatorMatrix(A.transpose()));
  GridFunction out = GridFunction::zeros(ctx.grid);
  parallel_chunks(ctx.grid.size(), kChunks, [&](std::size_t, std::size_t begin, std::size_t end) {
    OperatorMatrix W;
    for (std::size_t i = begin; i < end; ++i) {
      const auto z = ctx.grid.point(i);
      displacement_block(2.0 * phase_point_alpha(z[0], z[1]), ctx.N, ctx.N, W);
      out.values(static_cast<Eigen::Index>(i)) = 2.0 * weights.cwiseProduct(W).sum();
    }
  });
  return out;
}

OperatorMatrix conv_fun_op(const QhaContext& ctx, const GridFunction& f, const OperatorMatrix& A, double measure) {
  ctx.validate();
  require_d1(ctx);
  require_size(ctx, A);
  require_decay(ctx, f);
  const LowRank lr = factorize(A);
  const Eigen::Index r = lr.sigma.size();
  if (r == 0) return OperatorMatrix::Zero(ctx.N, ctx.N);
  const Eigen::MatrixXcd left = lr.left * lr.sigma.cast<cd>().asDiagonal();
  const double cutoff = ctx.negligible * sup_abs(f);
  constexpr Eigen::Index batch = 32;

  // W A W^* = (W L S)(W R)^*; outer products are batched into one product.
  std::vector<OperatorMatrix> partial(kChunks, OperatorMatrix::Zero(ctx.N, ctx.N));
  parallel_chunks(ctx.grid.size(), kChunks, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    OperatorMatrix W;
    Eigen::MatrixXcd P(ctx.N, batch * r), Q(ctx.N, batch * r);
    Eigen::Index used = 0;
    const auto flush = [&] {
      if (used == 0) return;
      partial[chunk].noalias() += P.leftCols(used * r) * Q.leftCols(used * r).adjoint();
      used = 0;
    };
    for (std::size_t i = begin; i < end; ++i) {
      const cd v = f.values(static_cast<Eigen::Index>(i));
      if (std::abs(v) <= cutoff) continue;
      const auto z = ctx.grid.point(i);
      displacement_block(phase_point_alpha(z[0], z[1]), ctx.N, lr.support, W);
      P.middleCols(used * r, r).noalias() = v * (W * left);
      Q.middleCols(used * r, r).noalias() = W * lr.right;
      if (++used == batch) flush();
    }
    flush();
  });
  OperatorMatrix total = OperatorMatrix::Zero(ctx.N, ctx.N);
  for (const auto& p : partial) total += p;
  return total * (measure * ctx.grid.cell_volume());
}

GridFunction conv_op_op(const QhaContext& ctx, const OperatorMatrix& A, const OperatorMatrix& B) {
  ctx.validate();
  require_d1(ctx);
  require_size(ctx, A);
  require_size(ctx, B);
  const LowRank a = factorize(A);
  const LowRank b = factorize(conjugate_parity(B));
  GridFunction out = GridFunction::zeros(ctx.grid);
  if (a.sigma.size() == 0 || b.sigma.size() == 0) return out;
  const Eigen::MatrixXcd b_left = b.left * b.sigma.cast<cd>().asDiagonal();
  const Eigen::MatrixXcd a_left_adj = (a.left * a.sigma.cast<cd>().asDiagonal()).adjoint();
  const Eigen::MatrixXcd a_right_adj = a.right.adjoint();

  // tr(u v^* W x y^* W^*) = (v^* W x) conj(u^* W y), summed over both factorizations.
  parallel_chunks(ctx.grid.size(), kChunks, [&](std::size_t, std::size_t begin, std::size_t end) {
    OperatorMatrix W;
    for (std::size_t i = begin; i < end; ++i) {
      const auto z = ctx.grid.point(i);
      displacement_block(phase_point_alpha(z[0], z[1]), a.support, b.support, W);
      const Eigen::MatrixXcd m1 = a_right_adj * (W * b_left);
      const Eigen::MatrixXcd m2 = a_left_adj * (W * b.right);
      out.values(static_cast<Eigen::Index>(i)) = m1.cwiseProduct(m2.conjugate()).sum();
    }
  });
  return out;
}

double schatten_orlicz_norm(const OperatorMatrix& A, const YoungFunction& phi) {
  return orlicz_norm(singular_values(A), phi);
}

double schatten_norm(const OperatorMatrix& A, double p) { return lp_norm(singular_values(A), p); }

double trace_norm(const OperatorMatrix& A) { return singular_value_spectrum(A).sum(); }

double truncation_weight(const OperatorMatrix& A) {
  const double total = A.norm();
  if (total == 0.0) return 0.0;
  const Eigen::Index n = A.rows(), keep = n - n / 4;
  const double outer = A.bottomRows(n - keep).squaredNorm() + A.topRightCorner(keep, A.cols() - keep).squaredNorm();
  return std::sqrt(outer) / total;
}

void require_truncation(const OperatorMatrix& A, double tol) {
  if (truncation_weight(A) > tol)
    throw Error(ErrorCode::TruncationViolated, "operator has weight on the top quarter of Fock levels");
}

bool is_hermitian(const OperatorMatrix& A, double tol) {
  return (A - A.adjoint()).norm() <= tol * std::max(1.0, A.norm());
}

double min_eigenvalue(const OperatorMatrix& A) {
  const OperatorMatrix H = 0.5 * (A + A.adjoint());
  Eigen::SelfAdjointEigenSolver<OperatorMatrix> es(H, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace oqha
