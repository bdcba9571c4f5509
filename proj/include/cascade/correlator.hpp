#pragma once

// Delayed-coincidence machinery: the retarded amplitude propagator, the
// two-time emission correlator it generates through the regression step, and
// the Hong-Ou-Mandel indistinguishability of the emitted photon.

#include <complex>

#include <Eigen/Dense>

#include "cascade/master.hpp"
#include "cascade/numerics.hpp"
#include "cascade/params.hpp"

namespace cascade {

// Emission mode whose output correlations are analyzed.
enum class Mode { Emitter = 0, CavityOne = 1, CavityTwo = 2 };

// Decay rate feeding the chosen emission channel.
double mode_rate(const SystemParams& p, Mode mode);

// Non-Hermitian effective Hamiltonian generating the delayed-time evolution
// of the one-excitation amplitudes:
//   diag(delta - i(gamma+gamma*)/2, -i kappa1/2, -i kappa2/2),
// with couplings g1 (emitter <-> cavity 1) and g2 (cavity 1 <-> cavity 2).
struct RetardedPropagator {
    Eigen::Matrix3cd h_eff;

    // Amplitude decay modes: eigenvalues of -i h_eff (always available; all
    // real parts negative for valid parameters).
    Eigen::Vector3cd decay_modes;

    // Spectral decomposition of -i h_eff; `spectral` is false at an
    // exceptional point, where the matrix is defective and evaluation falls
    // back to dense matrix exponentials.
    bool spectral = false;
    num::EigDecomposition eig;
};

RetardedPropagator make_propagator(const SystemParams& p);

// Row `mode` of exp(-i h_eff tau): the coefficients (G_{m,e}, G_{m,a}, G_{m,b})
// weighting the initial amplitudes in the delayed correlator. tau >= 0.
Eigen::Vector3cd green_row(const RetardedPropagator& prop, Mode mode, double tau);

// Density-matrix entry (row, col) at an arbitrary time: exact modal sum on
// the spectral path, linear interpolation between samples otherwise (zero
// past the sampled window).
num::cplx density_entry(const PopulationTrace& trace, int row, int col, double t);

// <m^dag(t+tau) m(t)> = sum_x G_{m,x}(tau) * rho_{x,m}(t).
num::cplx two_time_correlator(const PopulationTrace& trace, const RetardedPropagator& prop,
                              Mode mode, double t, double tau);

// Modal expansion of the delayed correlator and the mode population:
//   c(t, tau) = sum_{j,k} amplitudes(j, k) exp(generator_modes[j] t + decay_modes[k] tau)
//   P(t)      = sum_j  population_weights[j] exp(generator_modes[j] t)
// The closed-form visibility integrals — and the ensemble cross terms built
// from photons with different detunings — are resolvent sums over these
// coefficients.
struct CorrelatorModes {
    Eigen::Vector<num::cplx, kVecDim> generator_modes;
    Eigen::Vector3cd decay_modes;
    Eigen::Matrix<num::cplx, kVecDim, kDim> amplitudes;
    Eigen::Vector<num::cplx, kVecDim> population_weights;
};

// Requires spectral decompositions on both factors; throws DegenerateSpectrum
// when either is defective (callers divert to the quadrature path).
CorrelatorModes correlator_modes(const PopulationTrace& trace, const RetardedPropagator& prop,
                                 Mode mode, bool diagonal_only = false);

enum class CorrelatorMethod { Spectral, Quadrature };

struct IndistinguishabilityReport {
    double value = 0.0;          // two-photon interference visibility
    double p_coincidence = 0.0;  // residual coincidence probability, (1 - value)/2
    double numerator = 0.0;      // time-integrated |correlator|^2
    double denominator = 0.0;    // time-integrated P(t) P(t+tau)
    CorrelatorMethod method = CorrelatorMethod::Spectral;
};

// Hong-Ou-Mandel indistinguishability of photons leaving `mode`:
//
//   I = (int_0^inf dt int_0^inf dtau |<m^dag(t+tau) m(t)>|^2)
//       / (int_0^inf dt int_0^inf dtau P(t) P(t+tau))
//
// evaluated in closed form from the double spectral expansion of the
// correlator. Degenerate decompositions divert automatically to the
// dense-grid quadrature path (method flag records this). Throws
// InvalidParams when the chosen mode never emits (zero denominator).
IndistinguishabilityReport indistinguishability(const SystemParams& p,
                                                Mode mode = Mode::CavityTwo);

// Same evaluation reusing a propagation and propagator the caller already
// built (both must come from the same parameter set).
IndistinguishabilityReport indistinguishability(const PopulationTrace& trace,
                                                const RetardedPropagator& prop,
                                                Mode mode = Mode::CavityTwo);

// The same two integrals on dense 2048 x 2048 sample grids with
// auto-selected windows: the automatic fallback target, also exposed as the
// cross-check oracle for the spectral sums.
IndistinguishabilityReport indistinguishability_quadrature(const SystemParams& p,
                                                           Mode mode = Mode::CavityTwo);

// Diagnostic variant keeping only the mode's own propagator coefficient,
// i.e. dropping the coherence cross-terms from the correlator expansion.
IndistinguishabilityReport indistinguishability_diagonal(const SystemParams& p,
                                                         Mode mode = Mode::CavityTwo);

} // namespace cascade
