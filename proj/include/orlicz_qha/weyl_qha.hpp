#pragma once

#include <Eigen/Dense>
#include <array>

#include "orlicz_qha/phase_space.hpp"
#include "orlicz_qha/young_function.hpp"

namespace oqha {

using OperatorMatrix = Eigen::MatrixXcd;

// Conventions: z = (x, xi) maps to alpha = (x + i xi)/sqrt(2); W_z is the
// displacement D(alpha) in the Fock basis; U = diag((-1)^n); alpha_z(U) = W_{2z} U.
// op_w(f) = pi^{-d} int f(z) alpha_z(U) dz and sym_w(A)(z) = 2^d tr(A alpha_z(U)).
struct QhaContext {
  int N = 64;
  GridSpec grid{1, 12.0, 128};
  // Grid points with |f| below this fraction of sup |f| are skipped.
  double negligible = 1e-18;
  // Inputs must satisfy boundary_max <= decay_tolerance * sup.
  bool check_decay = true;
  double decay_tolerance = 1e-12;

  void validate() const;
};

// Truncated displacement matrix D(alpha) restricted to rows < rows and
// columns < cols (exact matrix elements of the infinite operator).
void displacement_block(std::complex<double> alpha, int rows, int cols, OperatorMatrix& out);
std::complex<double> phase_point_alpha(double x, double xi);

OperatorMatrix weyl_operator(const QhaContext& ctx, const std::vector<double>& z);
OperatorMatrix parity(const QhaContext& ctx);
OperatorMatrix shift_op(const QhaContext& ctx, const OperatorMatrix& A, const std::vector<double>& z);

OperatorMatrix op_w(const QhaContext& ctx, const GridFunction& f);
GridFunction sym_w(const QhaContext& ctx, const OperatorMatrix& A);

// f * A = int f(z) alpha_z(A) dz, with dz = measure * Lebesgue.
OperatorMatrix conv_fun_op(const QhaContext& ctx, const GridFunction& f, const OperatorMatrix& A,
                           double measure = 1.0);
// (A * B)(z) = tr(A alpha_z(U B U)).
GridFunction conv_op_op(const QhaContext& ctx, const OperatorMatrix& A, const OperatorMatrix& B);

double schatten_orlicz_norm(const OperatorMatrix& A, const YoungFunction& phi);
double schatten_norm(const OperatorMatrix& A, double p);
double trace_norm(const OperatorMatrix& A);

// Frobenius weight of A on the top quarter of Fock levels, relative to ||A||_F.
double truncation_weight(const OperatorMatrix& A);
void require_truncation(const OperatorMatrix& A, double tol = 1e-8);

bool is_hermitian(const OperatorMatrix& A, double tol = 1e-12);
double min_eigenvalue(const OperatorMatrix& A);

}  // namespace oqha
