#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "doctest.h"
#include "oracles.hpp"
#include "orlicz_qha/errors.hpp"
#include "orlicz_qha/weyl_qha.hpp"

using namespace oqha;

namespace {

const QhaContext kCtx{};

// exp(i(xi X - x P)) on a large truncation of the quadrature operators.
OperatorMatrix weyl_expm(double x, double xi, int size) {
  OperatorMatrix a = OperatorMatrix::Zero(size, size);
  for (int n = 1; n < size; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  const OperatorMatrix X = (a + a.adjoint()) / std::sqrt(2.0);
  const OperatorMatrix P = (a - a.adjoint()) / cd(0, std::sqrt(2.0));
  const OperatorMatrix G = cd(0, 1) * (xi * X - x * P);
  return G.exp();
}

OperatorMatrix ground_state(int N) {
  OperatorMatrix g = OperatorMatrix::Zero(N, N);
  g(0, 0) = 1.0;
  return g;
}

// Random positive operator living on the first `levels` Fock states.
OperatorMatrix low_positive(Rng& rng, int N, int levels, int rank) {
  Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(N, rank);
  for (int j = 0; j < rank; ++j)
    for (int i = 0; i < levels; ++i) v(i, j) = cd(rng.normal(), rng.normal());
  return v * v.adjoint();
}

double low_block_error(const OperatorMatrix& A, const OperatorMatrix& B, int size) {
  return (A.topLeftCorner(size, size) - B.topLeftCorner(size, size)).cwiseAbs().maxCoeff();
}

// Sup of |f - g| over grid points with |z| <= radius.
double trust_error(const GridFunction& f, const GridFunction& g, double radius) {
  double worst = 0.0;
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    const auto z = f.grid.point(i);
    if (std::hypot(z[0], z[1]) <= radius)
      worst = std::max(worst, std::abs(f.values(static_cast<Eigen::Index>(i)) - g.values(static_cast<Eigen::Index>(i))));
  }
  return worst;
}

}  // namespace

TEST_SUITE("weyl_qha") {

TEST_CASE("context validation") {
  QhaContext small;
  small.N = 8;
  CHECK_THROWS_AS(small.validate(), Error);
  QhaContext narrow;
  narrow.grid = GridSpec{1, 5.0, 64};
  CHECK_THROWS_AS(narrow.validate(), Error);
  kCtx.validate();
}

TEST_CASE("weyl operator examples") {
  CHECK(weyl_operator(kCtx, {0, 0}).isIdentity(0.0));
  Rng rng(21);
  for (int k = 0; k < 20; ++k) {
    const double r = 3.0 * std::sqrt(rng.uniform()), th = 2 * kPi * rng.uniform();
    const double x = r * std::cos(th), xi = r * std::sin(th);
    CHECK(std::abs(weyl_operator(kCtx, {x, xi})(0, 0) - std::exp(-r * r / 4)) <= 1e-10);
  }
}

TEST_CASE("weyl operator matches the matrix exponential") {
  for (auto [x, xi] : {std::pair{0.7, -0.3}, std::pair{-2.0, 1.5}, std::pair{3.0, 2.5}}) {
    const OperatorMatrix ref = weyl_expm(x, xi, 220);
    const OperatorMatrix W = weyl_operator(kCtx, {x, xi});
    CHECK(low_block_error(W, ref, kCtx.N) <= 1e-10);
  }
}

TEST_CASE("displacement blocks are consistent slices") {
  OperatorMatrix full, part;
  const cd alpha(1.2, -0.4);
  displacement_block(alpha, 40, 40, full);
  displacement_block(alpha, 40, 7, part);
  CHECK((full.leftCols(7) - part).cwiseAbs().maxCoeff() == 0.0);
  displacement_block(alpha, 5, 40, part);
  CHECK((full.topRows(5) - part).cwiseAbs().maxCoeff() == 0.0);
  // Far out every element underflows; the recurrence must stay finite.
  displacement_block(cd(40, 0), 64, 64, part);
  CHECK(part.allFinite());
  CHECK(part.cwiseAbs().maxCoeff() <= 1e-100);
}

TEST_CASE("weyl unitarity on the low block") {
  const OperatorMatrix I = OperatorMatrix::Identity(kCtx.N / 2, kCtx.N / 2);
  for (auto [x, xi] : {std::pair{0.5, 0.5}, std::pair{-2.5, 1.0}, std::pair{3.5, -3.0}}) {
    // The inner sum runs over enough levels that the dropped tail is negligible.
    OperatorMatrix left, right;
    displacement_block(phase_point_alpha(x, xi), kCtx.N / 2, 4 * kCtx.N, left);
    displacement_block(phase_point_alpha(-x, -xi), 4 * kCtx.N, kCtx.N / 2, right);
    CHECK(low_block_error(left * right, I, kCtx.N / 2) <= 1e-8);
  }
  // With both factors truncated at N the product is only unitary for small shifts.
  const OperatorMatrix small = weyl_operator(kCtx, {0.5, 0.5}) * weyl_operator(kCtx, {-0.5, -0.5});
  CHECK(low_block_error(small, OperatorMatrix::Identity(kCtx.N, kCtx.N), kCtx.N / 2) <= 1e-8);
}

TEST_CASE("parity") {
  const OperatorMatrix U = parity(kCtx);
  CHECK((U * U).isIdentity(0.0));
  CHECK(U(0, 0) == cd(1.0));
  CHECK(U(1, 1) == cd(-1.0));
  const OperatorMatrix conj = U * weyl_operator(kCtx, {1.3, -0.8}) * U;
  CHECK((conj - weyl_operator(kCtx, {-1.3, 0.8})).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("shift operator") {
  Rng rng(22);
  const OperatorMatrix A = low_positive(rng, kCtx.N, 6, 2);
  CHECK((shift_op(kCtx, A, {0, 0}) - A).cwiseAbs().maxCoeff() == 0.0);
  const std::vector<double> z = {0.8, -0.4}, w = {-0.3, 1.1}, zw = {0.5, 0.7};
  const OperatorMatrix two = shift_op(kCtx, shift_op(kCtx, A, w), z);
  CHECK(low_block_error(two, shift_op(kCtx, A, zw), kCtx.N / 2) <= 1e-8);
  CHECK(std::abs(shift_op(kCtx, A, {2.0, 1.0}).trace() - A.trace()) <= 1e-9 * std::abs(A.trace()));
}

TEST_CASE("op_w examples") {
  QhaContext loose = kCtx;
  loose.check_decay = false;
  const auto one = GridFunction::from(kCtx.grid, [](const std::vector<double>&) { return cd(1.0); });
  CHECK(low_block_error(op_w(loose, one), OperatorMatrix::Identity(kCtx.N, kCtx.N), kCtx.N / 2) <= 1e-6);
  CHECK_THROWS_AS(op_w(kCtx, one), Error);

  const auto wigner0 = gaussian(kCtx.grid, {0, 0}, 0.5, 2.0);
  CHECK((op_w(kCtx, wigner0) - ground_state(kCtx.N)).cwiseAbs().maxCoeff() <= 1e-6);

  const auto f = gaussian(kCtx.grid, {1, 0}, 0.8), g = gaussian(kCtx.grid, {0, -1}, 1.2, {0, 1});
  const cd a(0.3, -1.1), b(2.0, 0.5);
  const GridFunction mix(kCtx.grid, a * f.values + b * g.values);
  CHECK((op_w(kCtx, mix) - (a * op_w(kCtx, f) + b * op_w(kCtx, g))).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("sym_w examples") {
  // sym_w of the truncated identity is 2 e^{-x/2} sum_{n<N} (-1)^n L_n(x), x = 2|z|^2.
  // The alternating sum has no pointwise limit (it vanishes at z = 0 for even N),
  // so the identity symbol is 1 only weakly: paired against Gaussians.
  const auto ident = sym_w(kCtx, OperatorMatrix::Identity(kCtx.N, kCtx.N));
  CHECK(std::abs(ident.values(kCtx.grid.n / 2 * kCtx.grid.n + kCtx.grid.n / 2)) <= 1e-12);
  for (std::size_t i : {std::size_t{128 * 64 + 70}, std::size_t{128 * 70 + 61}, std::size_t{128 * 50 + 64}}) {
    const auto z = kCtx.grid.point(i);
    const double x = 2.0 * (z[0] * z[0] + z[1] * z[1]);
    double l_prev = 0.0, l = 1.0, acc = 0.0;
    for (int n = 0; n < kCtx.N; ++n) {
      acc += (n % 2 ? -1.0 : 1.0) * l;
      const double next = ((2.0 * n + 1.0 - x) * l - n * l_prev) / (n + 1.0);
      l_prev = l;
      l = next;
    }
    CHECK(std::abs(ident.values(static_cast<Eigen::Index>(i)) - 2.0 * std::exp(-x / 2) * acc) <= 1e-10);
  }
  for (auto c : {std::vector<double>{0, 0}, std::vector<double>{1.5, -1}}) {
    const auto g = gaussian(kCtx.grid, c, 0.8);
    const cd paired = ident.values.cwiseProduct(g.values).sum() * kCtx.grid.cell_volume();
    CHECK(std::abs(paired - integral(g)) <= 1e-6);
  }

  for (auto c : {std::vector<double>{0, 0}, std::vector<double>{1, -0.5}, std::vector<double>{-2, 1.5}}) {
    const auto f = gaussian(kCtx.grid, c, 1.0, {0.7, 0.2});
    CHECK(trust_error(sym_w(kCtx, op_w(kCtx, f)), f, kCtx.grid.L / 2) <= 1e-6);
  }

  Rng rng(23);
  const OperatorMatrix A = low_positive(rng, kCtx.N, 8, 3);
  const OperatorMatrix U = parity(kCtx);
  const auto lhs = sym_w(kCtx, U * A * U);
  const auto rhs = reflect(sym_w(kCtx, A));
  CHECK(trust_error(lhs, rhs, kCtx.grid.L - 0.5) <= 1e-8);
}

TEST_CASE("weyl covariance of op_w") {
  const auto f = gaussian(kCtx.grid, {0.3, 0.1}, 1.0);
  const std::vector<int> steps = {8, -5};
  const double h = kCtx.grid.h();
  const std::vector<double> z = {steps[0] * h, steps[1] * h};
  const OperatorMatrix lhs = op_w(kCtx, translate(f, steps));
  const OperatorMatrix rhs = shift_op(kCtx, op_w(kCtx, f), z);
  CHECK(low_block_error(lhs, rhs, kCtx.N / 2) <= 1e-6);
}

TEST_CASE("S2 pairing fixes the normalization") {
  const auto f = gaussian(kCtx.grid, {0.5, 0}, 0.9, {1.0, 0.3});
  const auto g = gaussian(kCtx.grid, {0, -0.7}, 1.4);
  const cd lhs = (op_w(kCtx, f).adjoint() * op_w(kCtx, g)).trace();
  const cd inner = (f.values.conjugate().cwiseProduct(g.values)).sum() * kCtx.grid.cell_volume();
  CHECK(std::abs(lhs - inner / (2 * kPi)) <= 1e-6);
}

TEST_CASE("conv_fun_op examples") {
  Rng rng(24);
  const OperatorMatrix A = low_positive(rng, kCtx.N, 6, 2);
  // Grid delta at the origin.
  GridFunction delta = GridFunction::zeros(kCtx.grid);
  delta.values(kCtx.grid.n / 2 * kCtx.grid.n + kCtx.grid.n / 2) = 1.0 / kCtx.grid.cell_volume();
  CHECK((conv_fun_op(kCtx, delta, A) - A).cwiseAbs().maxCoeff() <= 1e-12 * A.norm());

  const auto f = gaussian(kCtx.grid, {0.2, -0.4}, 0.6, 1.5);
  const OperatorMatrix fa = conv_fun_op(kCtx, f, A);
  CHECK(std::abs(fa.trace() - integral(f) * A.trace()) <= 1e-8 * std::abs(integral(f) * A.trace()));
  CHECK(min_eigenvalue(fa) >= -1e-10);
  CHECK(is_hermitian(fa, 1e-12));
  // The measure argument scales linearly.
  CHECK((conv_fun_op(kCtx, f, A, 0.25) - 0.25 * fa).norm() <= 1e-12 * fa.norm());
}

TEST_CASE("conv_op_op examples") {
  const OperatorMatrix g = ground_state(kCtx.N);
  const auto gg = conv_op_op(kCtx, g, g);
  const auto want = gaussian(kCtx.grid, {0, 0}, 1.0);
  CHECK((gg.values - want.values).cwiseAbs().maxCoeff() <= 1e-8);

  Rng rng(25);
  const OperatorMatrix A = low_positive(rng, kCtx.N, 5, 2), B = low_positive(rng, kCtx.N, 7, 3);
  const auto ab = conv_op_op(kCtx, A, B), ba = conv_op_op(kCtx, B, A);
  CHECK(ab.values.real().minCoeff() >= -1e-10);
  CHECK((ab.values - ba.values).cwiseAbs().maxCoeff() <= 1e-8);

  // Brute-force trace at a few points.
  const OperatorMatrix U = parity(kCtx);
  for (std::size_t i : {std::size_t{0}, std::size_t{128 * 60 + 70}, std::size_t{128 * 64 + 64}}) {
    const auto z = kCtx.grid.point(i);
    const cd ref = (A * shift_op(kCtx, U * B * U, z)).trace();
    CHECK(std::abs(ab.values(static_cast<Eigen::Index>(i)) - ref) <= 1e-10);
  }
}

TEST_CASE("three convolutions are consistent") {
  const auto f = gaussian(kCtx.grid, {0.4, 0}, 0.7);
  const auto g = gaussian(kCtx.grid, {0, 0.6}, 1.1, {0.5, 0.5});
  const auto lhs = sym_w(kCtx, conv_fun_op(kCtx, f, op_w(kCtx, g)));
  const auto rhs = convolve(f, sym_w(kCtx, op_w(kCtx, g)));
  CHECK(trust_error(lhs, rhs, kCtx.grid.L / 2) <= 1e-6);
}

TEST_CASE("schatten-orlicz norms") {
  OperatorMatrix d = OperatorMatrix::Zero(2, 2);
  d(0, 0) = 3;
  d(1, 1) = 1;
  CHECK(schatten_orlicz_norm(d, YoungFunction::power(1)) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(trace_norm(d) == doctest::Approx(4.0).epsilon(1e-15));
  Rng rng(26);
  OperatorMatrix a(6, 6);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = {rng.normal(), rng.normal()};
  CHECK(std::fabs(schatten_orlicz_norm(a, YoungFunction::power(2)) / a.norm() - 1.0) <= 1e-9);
  CHECK(std::fabs(schatten_norm(a, 2) / a.norm() - 1.0) <= 1e-12);
  const auto pl = YoungFunction::power_log(2, 1);
  CHECK(schatten_orlicz_norm(OperatorMatrix::Identity(4, 4), pl) ==
        doctest::Approx(1.0 / pl.left_inverse(0.25)).epsilon(1e-10));
}

TEST_CASE("truncation guard") {
  CHECK(truncation_weight(ground_state(kCtx.N)) == 0.0);
  CHECK(truncation_weight(OperatorMatrix::Identity(kCtx.N, kCtx.N)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_NOTHROW(require_truncation(op_w(kCtx, gaussian(kCtx.grid, {0, 0}, 1.0))));
  try {
    require_truncation(OperatorMatrix::Identity(kCtx.N, kCtx.N));
    FAIL("expected TruncationViolated");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TruncationViolated);
  }
}

}  // TEST_SUITE
