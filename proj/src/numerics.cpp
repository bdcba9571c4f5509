#include "cascade/numerics.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace cascade::num {

EigDecomposition eig_dense(const MatrixXcd& a, double recon_tol) {
    const auto n = a.rows();
    if (n != a.cols()) throw InvalidParams("eig_dense: matrix must be square");
    if (n < 1 || n > 16) throw InvalidParams("eig_dense: dimension must be in [1, 16]");

    Eigen::ComplexEigenSolver<MatrixXcd> solver(a, /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success)
        throw NonConvergence("eig_dense: QR iteration did not converge");

    EigDecomposition dec;
    dec.values = solver.eigenvalues();
    dec.right = solver.eigenvectors();

    Eigen::FullPivLU<MatrixXcd> lu(dec.right);
    if (!lu.isInvertible())
        throw DegenerateSpectrum("eig_dense: eigenvector basis is rank deficient");
    dec.left = lu.inverse();

    // A defective matrix can still sneak through the rank test with an ill
    // conditioned basis; the reconstruction residual is the real arbiter.
    const double scale = std::max(a.norm(), 1e-300);
    const double resid =
        (dec.right * dec.values.asDiagonal() * dec.left - a).norm() / scale;
    if (!(resid <= recon_tol))
        throw DegenerateSpectrum("eig_dense: spectral reconstruction failed");
    return dec;
}

VectorXcd expm_action(const EigDecomposition& dec, double t, const VectorXcd& v0) {
    if (t == 0.0) return v0;
    VectorXcd c = dec.left * v0;
    for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= std::exp(dec.values(k) * t);
    return dec.right * c;
}

MatrixXcd expm_dense(const MatrixXcd& a) {
    const auto n = a.rows();
    if (n != a.cols()) throw InvalidParams("expm_dense: matrix must be square");
    // scale so the Taylor series converges at machine precision, then square back
    const double norm = a.cwiseAbs().sum() > 0.0 ? a.norm() : 0.0;
    int squarings = 0;
    if (norm > 0.25) squarings = int(std::ceil(std::log2(norm / 0.25)));
    const MatrixXcd t = a / std::pow(2.0, squarings);

    MatrixXcd result = MatrixXcd::Identity(n, n);
    MatrixXcd term = MatrixXcd::Identity(n, n);
    for (int k = 1; k <= 24; ++k) {
        term = (term * t) / double(k);
        result += term;
        if (term.norm() < 1e-18 * result.norm()) break;
    }
    for (int s = 0; s < squarings; ++s) result = result * result;
    return result;
}

std::vector<VectorXcd> rk4_sampled(const MatrixXcd& a, const VectorXcd& y0,
                                   const std::vector<double>& sample_times, double dt) {
    if (!(dt > 0.0)) throw InvalidParams("rk4_sampled: dt must be positive");
    const double max_entry = a.cwiseAbs().maxCoeff();
    if (max_entry > 0.0 && dt > 0.1 / max_entry)
        throw StepTooLarge("rk4_sampled: dt exceeds 0.1 / max|A_ij|");
    for (size_t i = 0; i < sample_times.size(); ++i) {
        if (sample_times[i] < 0.0 || (i > 0 && sample_times[i] < sample_times[i - 1]))
            throw InvalidParams("rk4_sampled: sample times must be non-decreasing and >= 0");
    }

    auto step = [&a](const VectorXcd& y, double h) {
        VectorXcd k1 = a * y;
        VectorXcd k2 = a * (y + 0.5 * h * k1);
        VectorXcd k3 = a * (y + 0.5 * h * k2);
        VectorXcd k4 = a * (y + h * k3);
        return (y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)).eval();
    };

    std::vector<VectorXcd> out;
    out.reserve(sample_times.size());
    VectorXcd y = y0;
    double t = 0.0;
    for (double target : sample_times) {
        while (target - t > dt) {
            y = step(y, dt);
            t += dt;
        }
        const double rest = target - t;
        if (rest > 1e-15 * std::max(1.0, target)) {
            y = step(y, rest);
            t = target;
        }
        out.push_back(y);
    }
    return out;
}

QuadratureGrid gauss_hermite(int n, double sigma) {
    if (n < 1 || n > 64) throw InvalidParams("gauss_hermite: n must be in [1, 64]");
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
        throw InvalidParams("gauss_hermite: sigma must be non-negative and finite");

    // Golub-Welsch: nodes are eigenvalues of the Jacobi matrix of the Hermite
    // recurrence, weights come from the first eigenvector components.
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double beta = std::sqrt(k / 2.0);
        jacobi(k - 1, k) = beta;
        jacobi(k, k - 1) = beta;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    if (solver.info() != Eigen::Success)
        throw NonConvergence("gauss_hermite: Jacobi matrix eigensolve failed");

    QuadratureGrid grid;
    grid.nodes.resize(n);
    grid.weights.resize(n);
    const double scale = std::sqrt(2.0) * sigma;
    for (int i = 0; i < n; ++i) {
        grid.nodes[i] = scale * solver.eigenvalues()(i);     // ascending already
        const double v0 = solver.eigenvectors()(0, i);
        grid.weights[i] = v0 * v0;                           // normalized total mass 1
    }
    return grid;
}

std::vector<double> log_linear_grid(double t_max, double knee, int n) {
    if (!(t_max > 0.0) || !std::isfinite(t_max))
        throw InvalidParams("log_linear_grid: t_max must be positive and finite");
    if (n < 16) throw InvalidParams("log_linear_grid: need at least 16 samples");

    knee = std::clamp(knee, 0.0, t_max / 4.0);
    std::vector<double> ts;
    ts.reserve(n);
    ts.push_back(0.0);

    int n_log = n / 4;
    if (knee <= t_max * 1e-12) n_log = 0;  // nothing fast to resolve
    constexpr double span = 1e6;           // decades covered below the knee
    for (int k = 0; k < n_log; ++k) {
        const double frac = (n_log == 1) ? 1.0 : double(k) / double(n_log - 1);
        ts.push_back(knee * std::pow(span, frac - 1.0));
    }

    const int n_lin = n - int(ts.size());
    const double start = ts.back();
    for (int j = 1; j <= n_lin; ++j)
        ts.push_back(start + (t_max - start) * double(j) / double(n_lin));
    ts.back() = t_max;
    return ts;
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw InvalidParams("trapezoid: need matching arrays with >= 2 samples");
    double sum = 0.0;
    for (size_t i = 0; i + 1 < x.size(); ++i)
        sum += 0.5 * (x[i + 1] - x[i]) * (y[i] + y[i + 1]);
    return sum;
}

double hermite_trapezoid(const std::vector<double>& x, const std::vector<double>& y,
                         const std::vector<double>& dy) {
    if (x.size() != y.size() || x.size() != dy.size() || x.size() < 2)
        throw InvalidParams("hermite_trapezoid: need three matching arrays with >= 2 samples");
    double sum = 0.0;
    for (size_t i = 0; i + 1 < x.size(); ++i) {
        const double h = x[i + 1] - x[i];
        sum += 0.5 * h * (y[i] + y[i + 1]) + h * h / 12.0 * (dy[i] - dy[i + 1]);
    }
    return sum;
}

VectorXd trapezoid_weights(const std::vector<double>& x) {
    if (x.size() < 2) throw InvalidParams("trapezoid_weights: need >= 2 samples");
    const int n = int(x.size());
    VectorXd w = VectorXd::Zero(n);
    w(0) = 0.5 * (x[1] - x[0]);
    for (int i = 1; i + 1 < n; ++i) w(i) = 0.5 * (x[i + 1] - x[i - 1]);
    w(n - 1) = 0.5 * (x[n - 1] - x[n - 2]);
    return w;
}

} // namespace cascade::num
