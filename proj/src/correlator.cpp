#include "cascade/correlator.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "cascade/errors.hpp"
#include "cascade/liouvillian.hpp"

namespace cascade {

namespace {

using num::cplx;

// Denominator magnitudes below this mean the chosen mode never emits and the
// visibility ratio is undefined.
constexpr double kEmissionFloor = 1e-30;

// Window rule shared with the population propagation: integrate until the
// slowest decay mode has fallen by exp(-40).
constexpr double kWindowDecay = 40.0;

// Dense-grid resolution of the quadrature path (per time axis).
constexpr int kQuadSamples = 2048;

int mode_index(Mode mode) {
    switch (mode) {
        case Mode::Emitter:   return 0;
        case Mode::CavityOne: return 1;
        case Mode::CavityTwo: return 2;
    }
    throw InvalidParams("unknown emission mode");
}

// Slowest strictly-decaying amplitude rate, used to size the delay window.
double slowest_amplitude_rate(const Eigen::Vector3cd& modes) {
    double fastest = 0.0;
    for (int k = 0; k < kDim; ++k) fastest = std::max(fastest, std::abs(modes[k].real()));
    if (fastest == 0.0) throw NumericsError("retarded propagator has no decaying mode");
    double slowest = fastest;
    for (int k = 0; k < kDim; ++k) {
        const double r = std::abs(modes[k].real());
        if (r > 1e-12 * fastest) slowest = std::min(slowest, r);
    }
    return slowest;
}

// Tracked density entry at sample i, with conjugate mirroring for the lower
// triangle (only the upper triangle is stored).
cplx tracked_entry(const PopulationTrace& trace, int row, int col, size_t i) {
    const bool mirrored = row > col;
    const int r = mirrored ? col : row;
    const int c = mirrored ? row : col;
    cplx out;
    if (r == c) {
        const std::vector<double>& pop = (r == 0) ? trace.p_e : (r == 1) ? trace.p_a : trace.p_b;
        out = cplx(pop[i], 0.0);
    } else if (r == 0 && c == 1) {
        out = trace.coh_ea[i];
    } else if (r == 0 && c == 2) {
        out = trace.coh_eb[i];
    } else {
        out = trace.coh_ab[i];
    }
    return mirrored ? std::conj(out) : out;
}

void finalize_report(IndistinguishabilityReport& rep) {
    if (!(std::abs(rep.denominator) > kEmissionFloor))
        throw InvalidParams("indistinguishability undefined: the chosen mode never emits");
    rep.value = rep.numerator / rep.denominator;
    rep.p_coincidence = 0.5 * (1.0 - rep.value);
}

// Closed-form evaluation from the double spectral expansion
//   c(t, tau) = sum_{j,k} amp(j,k) exp(lambda_j t) exp(nu_k tau),
// where lambda are the population-generator modes carried by the trace and nu
// the amplitude modes of the retarded propagator. Both integrals of the
// visibility ratio then reduce to resolvent sums.
IndistinguishabilityReport spectral_report(const PopulationTrace& trace,
                                           const RetardedPropagator& prop,
                                           Mode mode, bool diagonal_only) {
    const CorrelatorModes cm = correlator_modes(trace, prop, mode, diagonal_only);
    const auto& lam = cm.generator_modes;
    const auto& nu = cm.decay_modes;
    const auto& amp = cm.amplitudes;

    // int_0^inf exp((nu_k + conj nu_q) tau) dtau, as a reusable 3x3 table.
    Eigen::Matrix3cd tau_res;
    for (int k = 0; k < kDim; ++k)
        for (int q = 0; q < kDim; ++q)
            tau_res(k, q) = -1.0 / (nu[k] + std::conj(nu[q]));

    cplx numer(0.0, 0.0);
    for (int j = 0; j < kVecDim; ++j) {
        for (int l = 0; l < kVecDim; ++l) {
            const cplx t_res = -1.0 / (lam[j] + std::conj(lam[l]));
            cplx tau_sum(0.0, 0.0);
            for (int k = 0; k < kDim; ++k)
                for (int q = 0; q < kDim; ++q)
                    tau_sum += amp(j, k) * std::conj(amp(l, q)) * tau_res(k, q);
            numer += t_res * tau_sum;
        }
    }

    // P(t) P(t+tau) = sum_{j,l} p_j p_l exp((lambda_j + lambda_l) t) exp(lambda_l tau).
    cplx denom(0.0, 0.0);
    for (int j = 0; j < kVecDim; ++j)
        for (int l = 0; l < kVecDim; ++l)
            denom += cm.population_weights[j] * cm.population_weights[l] /
                     ((lam[j] + lam[l]) * lam[l]);

    IndistinguishabilityReport rep;
    rep.numerator = numer.real();
    rep.denominator = denom.real();
    rep.method = CorrelatorMethod::Spectral;
    finalize_report(rep);
    return rep;
}

// Derivative-corrected trapezoid over one row (same rule as
// num::hermite_trapezoid, operating on Eigen rows without copies).
double herm_row(const std::vector<double>& x, const Eigen::RowVectorXd& y,
                const Eigen::RowVectorXd& dy) {
    double sum = 0.0;
    for (size_t i = 0; i + 1 < x.size(); ++i) {
        const double h = x[i + 1] - x[i];
        sum += 0.5 * h * (y[i] + y[i + 1]) + h * h / 12.0 * (dy[i] - dy[i + 1]);
    }
    return sum;
}

// Dense-grid evaluation of the same two integrals on the trace's grid (t)
// and an amplitude-window grid (tau). On spectral traces both integrands
// come with exact slopes, enabling derivative-corrected trapezoid rules in
// both directions; sampled traces fall back to the plain product rule.
IndistinguishabilityReport quadrature_report(const PopulationTrace& trace,
                                             const RetardedPropagator& prop,
                                             Mode mode, bool diagonal_only) {
    const int m = mode_index(mode);
    const std::vector<double>& ts = trace.times;
    const int nt = static_cast<int>(ts.size());

    // The numerator integrand decays in tau at amplitude rates, but the
    // denominator's P(t+tau) decays at population rates, which under strong
    // dephasing are far slower than any amplitude. Cover both: the trace
    // window already spans the slowest population mode.
    const double slow = slowest_amplitude_rate(prop.decay_modes);
    const double tau_max = std::max(kWindowDecay / slow, trace.window.t_max);
    const std::vector<double> taus = num::log_linear_grid(tau_max, 0.25 * tau_max, kQuadSamples);
    const int ntau = static_cast<int>(taus.size());

    const Eigen::VectorXd wt = num::trapezoid_weights(ts);
    const Eigen::VectorXd wtau = num::trapezoid_weights(taus);

    // Green rows and their delay derivatives for every tau (ntau x 3 each).
    const cplx im(0.0, 1.0);
    const Eigen::Matrix3cd kmat = (-im * prop.h_eff).eval();
    Eigen::MatrixXcd gm(ntau, kDim);
    Eigen::MatrixXcd gm_dot(ntau, kDim);
    for (int i = 0; i < ntau; ++i) {
        Eigen::Vector3cd row, drow;
        if (prop.spectral) {
            row.setZero();
            drow.setZero();
            for (int k = 0; k < kDim; ++k) {
                const cplx ph = std::exp(prop.eig.values[k] * taus[i]) * prop.eig.right(m, k);
                for (int x = 0; x < kDim; ++x) {
                    const cplx term = ph * prop.eig.left(k, x);
                    row[x] += term;
                    drow[x] += prop.eig.values[k] * term;
                }
            }
        } else {
            const Eigen::MatrixXcd full = num::expm_dense((kmat * taus[i]).eval());
            row = full.row(m).transpose();
            drow = (kmat.row(m) * full).transpose();
        }
        if (diagonal_only) {
            for (int x = 0; x < kDim; ++x) {
                if (x != m) {
                    row[x] = cplx(0.0, 0.0);
                    drow[x] = cplx(0.0, 0.0);
                }
            }
        }
        gm.row(i) = row.transpose();
        gm_dot.row(i) = drow.transpose();
    }

    // Amplitude triple feeding mode m at every emission time (3 x nt).
    Eigen::MatrixXcd rho(kDim, nt);
    for (int j = 0; j < nt; ++j)
        for (int x = 0; x < kDim; ++x)
            rho(x, j) = tracked_entry(trace, x, m, static_cast<size_t>(j));

    Eigen::RowVectorXd pop_row(nt);
    for (int j = 0; j < nt; ++j)
        pop_row[j] = tracked_entry(trace, m, m, static_cast<size_t>(j)).real();

    double numer = 0.0;
    double denom = 0.0;
    if (trace.has_spectral) {
        const auto& lam = trace.eigenvalues;
        // Emission-time slopes of the amplitude triple, and the mode
        // population's modal representation for the tau shift.
        Eigen::MatrixXcd rho_dot(kDim, nt);
        for (int j = 0; j < nt; ++j) {
            for (int x = 0; x < kDim; ++x) {
                const int idx = vec_index(x, m);
                cplx s(0.0, 0.0);
                for (int k = 0; k < kVecDim; ++k)
                    s += lam[k] * trace.modal_weights(idx, k) * std::exp(lam[k] * ts[j]);
                rho_dot(x, j) = s;
            }
        }
        Eigen::MatrixXcd etau(ntau, kVecDim), etau_dot(ntau, kVecDim);
        Eigen::MatrixXcd et(kVecDim, nt);
        Eigen::RowVectorXd pop_dot(nt);
        pop_dot.setZero();
        for (int k = 0; k < kVecDim; ++k) {
            const cplx pk = trace.modal_weights(vec_index(m, m), k);
            for (int i = 0; i < ntau; ++i) {
                etau(i, k) = pk * std::exp(lam[k] * taus[i]);
                etau_dot(i, k) = lam[k] * etau(i, k);
            }
            for (int j = 0; j < nt; ++j) et(k, j) = std::exp(lam[k] * ts[j]);
        }
        for (int j = 0; j < nt; ++j) pop_dot[j] = rho_dot(m, j).real();

        std::vector<double> fn(ntau), dfn(ntau), fd(ntau), dfd(ntau);
        for (int i = 0; i < ntau; ++i) {
            const Eigen::RowVectorXcd crow = gm.row(i) * rho;
            const Eigen::RowVectorXcd crow_t = gm.row(i) * rho_dot;
            const Eigen::RowVectorXcd crow_tau = gm_dot.row(i) * rho;

            const Eigen::RowVectorXd f = crow.cwiseAbs2();
            const Eigen::RowVectorXd f_t =
                2.0 * crow.conjugate().cwiseProduct(crow_t).real();
            const Eigen::RowVectorXd f_tau =
                2.0 * crow.conjugate().cwiseProduct(crow_tau).real();
            fn[i] = herm_row(ts, f, f_t);
            dfn[i] = f_tau.dot(wt);  // plain rule suffices inside the correction term

            const Eigen::RowVectorXd shifted = (etau.row(i) * et).real();
            const Eigen::RowVectorXd shifted_dot = (etau_dot.row(i) * et).real();
            const Eigen::RowVectorXd g = pop_row.cwiseProduct(shifted);
            const Eigen::RowVectorXd g_t =
                pop_dot.cwiseProduct(shifted) + pop_row.cwiseProduct(shifted_dot);
            const Eigen::RowVectorXd g_tau = pop_row.cwiseProduct(shifted_dot);
            fd[i] = herm_row(ts, g, g_t);
            dfd[i] = g_tau.dot(wt);
        }
        numer = num::hermite_trapezoid(taus, fn, dfn);
        denom = num::hermite_trapezoid(taus, fd, dfd);
    } else {
        for (int i = 0; i < ntau; ++i) {
            const Eigen::RowVectorXcd crow = gm.row(i) * rho;
            numer += wtau[i] * crow.cwiseAbs2().dot(wt);
            double row_sum = 0.0;
            for (int j = 0; j < nt; ++j)
                row_sum += wt[j] * pop_row[j] *
                           density_entry(trace, m, m, ts[j] + taus[i]).real();
            denom += wtau[i] * row_sum;
        }
    }

    IndistinguishabilityReport rep;
    rep.numerator = numer;
    rep.denominator = denom;
    rep.method = CorrelatorMethod::Quadrature;
    finalize_report(rep);
    return rep;
}

IndistinguishabilityReport dispatch(const PopulationTrace& trace, const RetardedPropagator& prop,
                                    Mode mode, bool diagonal_only) {
    if (trace.has_spectral && prop.spectral)
        return spectral_report(trace, prop, mode, diagonal_only);
    return quadrature_report(trace, prop, mode, diagonal_only);
}

IndistinguishabilityReport dispatch(const SystemParams& p, Mode mode, bool diagonal_only) {
    validate(p);
    const PopulationTrace trace = propagate(p);
    const RetardedPropagator prop = make_propagator(p);
    return dispatch(trace, prop, mode, diagonal_only);
}

} // namespace

double mode_rate(const SystemParams& p, Mode mode) {
    switch (mode) {
        case Mode::Emitter:   return p.gamma;
        case Mode::CavityOne: return p.kappa1;
        case Mode::CavityTwo: return p.kappa2;
    }
    throw InvalidParams("unknown emission mode");
}

CorrelatorModes correlator_modes(const PopulationTrace& trace, const RetardedPropagator& prop,
                                 Mode mode, bool diagonal_only) {
    if (!trace.has_spectral || !prop.spectral)
        throw DegenerateSpectrum(
            "correlator modes need spectral decompositions of both generators");
    const int m = mode_index(mode);
    const auto& w = trace.modal_weights;
    const auto& v = prop.eig.right;
    const auto& vinv = prop.eig.left;

    CorrelatorModes cm;
    cm.generator_modes = trace.eigenvalues;
    cm.decay_modes = prop.eig.values;
    for (int j = 0; j < kVecDim; ++j) {
        for (int k = 0; k < kDim; ++k) {
            cplx s(0.0, 0.0);
            if (diagonal_only) {
                s = vinv(k, m) * w(vec_index(m, m), j);
            } else {
                for (int x = 0; x < kDim; ++x) s += vinv(k, x) * w(vec_index(x, m), j);
            }
            cm.amplitudes(j, k) = v(m, k) * s;
        }
        cm.population_weights[j] = w(vec_index(m, m), j);
    }
    return cm;
}

RetardedPropagator make_propagator(const SystemParams& p) {
    validate(p);
    const cplx im(0.0, 1.0);

    RetardedPropagator prop;
    prop.h_eff.setZero();
    prop.h_eff(0, 0) = p.delta - 0.5 * im * (p.gamma + p.gamma_star);
    prop.h_eff(1, 1) = -0.5 * im * p.kappa1;
    prop.h_eff(2, 2) = -0.5 * im * p.kappa2;
    prop.h_eff(0, 1) = p.g1;
    prop.h_eff(1, 0) = p.g1;
    prop.h_eff(1, 2) = p.g2;
    prop.h_eff(2, 1) = p.g2;

    const Eigen::Matrix3cd k = (-im * prop.h_eff).eval();
    Eigen::ComplexEigenSolver<Eigen::Matrix3cd> ces(k, /*computeEigenvectors=*/false);
    if (ces.info() != Eigen::Success)
        throw NonConvergence("retarded propagator eigensolve did not converge");
    prop.decay_modes = ces.eigenvalues();

    try {
        prop.eig = num::eig_dense(k);
        prop.spectral = true;
    } catch (const DegenerateSpectrum&) {
        prop.spectral = false;  // exceptional point: evaluate by matrix exponential
    }
    return prop;
}

Eigen::Vector3cd green_row(const RetardedPropagator& prop, Mode mode, double tau) {
    if (!(tau >= 0.0) || !std::isfinite(tau))
        throw InvalidParams("green_row: tau must be >= 0 and finite");
    const int m = mode_index(mode);
    if (tau == 0.0) return Eigen::Vector3cd::Unit(m);

    Eigen::Vector3cd row = Eigen::Vector3cd::Zero();
    if (prop.spectral) {
        for (int k = 0; k < kDim; ++k) {
            const cplx ph = std::exp(prop.eig.values[k] * tau) * prop.eig.right(m, k);
            for (int x = 0; x < kDim; ++x) row[x] += ph * prop.eig.left(k, x);
        }
    } else {
        const cplx im(0.0, 1.0);
        const Eigen::MatrixXcd g = num::expm_dense((-im * prop.h_eff * tau).eval());
        row = g.row(m).transpose();
    }
    return row;
}

num::cplx density_entry(const PopulationTrace& trace, int row, int col, double t) {
    if (row < 0 || row >= kDim || col < 0 || col >= kDim)
        throw InvalidParams("density_entry: indices must lie in the excited block");
    if (!(t >= 0.0) || !std::isfinite(t))
        throw InvalidParams("density_entry: time must be >= 0 and finite");

    if (trace.has_spectral) {
        const int idx = vec_index(row, col);
        cplx s(0.0, 0.0);
        for (int k = 0; k < kVecDim; ++k)
            s += trace.modal_weights(idx, k) * std::exp(trace.eigenvalues[k] * t);
        return s;
    }

    // Sampled trace: linear interpolation; past the window everything has
    // decayed below the tail tolerance, so extrapolate with zero.
    const std::vector<double>& ts = trace.times;
    if (t >= ts.back())
        return (t == ts.back()) ? tracked_entry(trace, row, col, ts.size() - 1) : cplx(0.0, 0.0);
    const auto it = std::upper_bound(ts.begin(), ts.end(), t);
    const size_t hi = static_cast<size_t>(it - ts.begin());  // >= 1 because ts front is 0
    const size_t lo = hi - 1;
    const double span = ts[hi] - ts[lo];
    const double frac = (span > 0.0) ? (t - ts[lo]) / span : 0.0;
    return (1.0 - frac) * tracked_entry(trace, row, col, lo) +
           frac * tracked_entry(trace, row, col, hi);
}

num::cplx two_time_correlator(const PopulationTrace& trace, const RetardedPropagator& prop,
                              Mode mode, double t, double tau) {
    const Eigen::Vector3cd g = green_row(prop, mode, tau);
    const int m = mode_index(mode);
    cplx out(0.0, 0.0);
    for (int x = 0; x < kDim; ++x) out += g[x] * density_entry(trace, x, m, t);
    return out;
}

IndistinguishabilityReport indistinguishability(const SystemParams& p, Mode mode) {
    return dispatch(p, mode, /*diagonal_only=*/false);
}

IndistinguishabilityReport indistinguishability(const PopulationTrace& trace,
                                                const RetardedPropagator& prop, Mode mode) {
    return dispatch(trace, prop, mode, /*diagonal_only=*/false);
}

IndistinguishabilityReport indistinguishability_quadrature(const SystemParams& p, Mode mode) {
    validate(p);
    const PopulationTrace trace = propagate(p);
    const RetardedPropagator prop = make_propagator(p);
    return quadrature_report(trace, prop, mode, /*diagonal_only=*/false);
}

IndistinguishabilityReport indistinguishability_diagonal(const SystemParams& p, Mode mode) {
    return dispatch(p, mode, /*diagonal_only=*/true);
}

} // namespace cascade
