#pragma once

// Spectral-diffusion ensemble averages.
//
// A slowly wandering emitter frequency is modeled as a Gaussian distribution
// of quasi-static detunings: each emitted photon sees one frozen detuning
// drawn from N(delta, sigma^2). Observables follow by Gauss-Hermite averaging
// of the exact single-detuning results:
//
//   efficiency            — mean of the per-detuning collection efficiency;
//   indistinguishability  — two-photon visibility of photons drawn
//                           *independently* from the distribution, i.e. the
//                           cross-term double sum over node pairs (default);
//   indistinguishability_averaged — mean of the per-detuning single-photon
//                           visibilities (each photon interfered with a twin
//                           of the same detuning), kept as a diagnostic.
//
// Node evaluations reuse the exact population propagation and the modal
// expansion of the delayed correlator; each cross term is a closed resolvent
// sum, so no quadrature grids are involved. Degenerate-spectrum errors from
// individual nodes propagate to the caller.

#include <vector>

#include "cascade/correlator.hpp"
#include "cascade/master.hpp"
#include "cascade/params.hpp"

namespace cascade {

struct DiffusionSpec {
    double fwhm = 0.0;  // full width at half maximum of the detuning distribution
    int n_nodes = 15;   // Gauss-Hermite quadrature order

    // Standard deviation of the underlying Gaussian.
    double sigma() const;
};

// Throws InvalidParams unless fwhm is finite and >= 0 and n_nodes is in [1, 64].
void validate(const DiffusionSpec& spec);

// One quadrature node with its single-detuning observables.
struct EnsembleNode {
    double delta = 0.0;                 // absolute detuning at this node
    double weight = 0.0;                // Gauss-Hermite weight (weights sum to 1)
    double efficiency = 0.0;            // collection efficiency at this detuning
    double indistinguishability = 0.0;  // single-photon visibility at this detuning
};

struct EnsembleReport {
    double efficiency = 0.0;
    double indistinguishability = 0.0;           // cross-term definition
    double indistinguishability_averaged = 0.0;  // per-detuning mean
    std::vector<EnsembleNode> nodes;             // diagnostic: the evaluated nodes
};

// Evaluate all ensemble observables at once (one propagation per node).
// The distribution is centered on params.delta; fwhm = 0 collapses to the
// plain single-detuning evaluation.
EnsembleReport ensemble_evaluate(const SystemParams& params, const DiffusionSpec& spec,
                                 Mode mode = Mode::CavityTwo);

// Convenience scalar accessors (each performs a full evaluation).
double ensemble_efficiency(const SystemParams& params, const DiffusionSpec& spec,
                           Mode mode = Mode::CavityTwo);
double ensemble_indistinguishability(const SystemParams& params, const DiffusionSpec& spec,
                                     Mode mode = Mode::CavityTwo);
double ensemble_indistinguishability_averaged(const SystemParams& params,
                                              const DiffusionSpec& spec,
                                              Mode mode = Mode::CavityTwo);

}  // namespace cascade
