#pragma once

// Small dense numerical kernels shared by the simulator modules: spectral
// decomposition of non-Hermitian generators, matrix exponentials, a fixed-step
// RK4 oracle, Gauss-Hermite quadrature, and non-uniform trapezoid rules.

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "cascade/errors.hpp"

namespace cascade::num {

using cplx = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// A = right * diag(values) * left with left * right == identity, so the pair
// (right, left) is biorthogonal and A^k, exp(At), resolvents etc. come for free.
struct EigDecomposition {
    VectorXcd values;
    MatrixXcd right;  // columns are right eigenvectors
    MatrixXcd left;   // rows are the matching left eigenvectors
};

// Dense eigendecomposition for small (n <= 16) complex matrices.
// Throws NonConvergence if the QR iteration stalls and DegenerateSpectrum when
// the eigenvector basis cannot reproduce the matrix to recon_tol (relative
// Frobenius), which is the signature of a defective or near-defective matrix.
EigDecomposition eig_dense(const MatrixXcd& a, double recon_tol = 1e-9);

// exp(A t) * v0 through a cached decomposition of A. Exact short-circuit at t == 0.
VectorXcd expm_action(const EigDecomposition& dec, double t, const VectorXcd& v0);

// Dense exp(A) by scaling-and-squaring; works for defective matrices too.
MatrixXcd expm_dense(const MatrixXcd& a);

// Fixed-step classic RK4 for y' = A y, reporting y at the requested times
// (non-decreasing, first >= 0). A short landing step is taken before each
// sample so the reported states sit exactly on the sample times.
// Throws StepTooLarge unless dt <= 0.1 / max|A_ij|.
std::vector<VectorXcd> rk4_sampled(const MatrixXcd& a, const VectorXcd& y0,
                                   const std::vector<double>& sample_times, double dt);

// Quadrature rule for E[f(X)], X ~ Normal(0, sigma^2):
//   E[f] ~= sum_i weights[i] * f(nodes[i])
// Nodes ascending and symmetric about 0; weights positive, summing to 1.
struct QuadratureGrid {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Hermite rule with 1 <= n <= 64 nodes (Golub-Welsch).
QuadratureGrid gauss_hermite(int n, double sigma);

// Composite sampling grid on [0, t_max]: a geometric section resolving the
// fast transient up to `knee`, then uniform spacing out to t_max. The first
// entry is exactly 0 and the last exactly t_max; n >= 16.
std::vector<double> log_linear_grid(double t_max, double knee, int n);

// Trapezoid rule on a non-uniform grid.
double trapezoid(const std::vector<double>& x, const std::vector<double>& y);

// Derivative-corrected (cubic-Hermite) trapezoid rule: per-panel
//   h/2 (y_i + y_{i+1}) + h^2/12 (dy_i - dy_{i+1}),
// exact for cubics, O(h^4) composite error. Use when the integrand's slope
// is known exactly (e.g. from a spectral representation).
double hermite_trapezoid(const std::vector<double>& x, const std::vector<double>& y,
                         const std::vector<double>& dy);

// Per-node trapezoid weights w with integral = w . f(x).
VectorXd trapezoid_weights(const std::vector<double>& x);

} // namespace cascade::num
