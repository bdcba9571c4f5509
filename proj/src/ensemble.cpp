#include "cascade/ensemble.hpp"

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "cascade/errors.hpp"
#include "cascade/liouvillian.hpp"
#include "cascade/numerics.hpp"

namespace cascade {

namespace {

using num::cplx;

// Matches the gate used by the collected-efficiency accessor: a window that
// left more excitation than this unaccounted for cannot support the integrals.
constexpr double kTailGate = 1e-6;

// Denominator magnitudes below this mean the chosen mode never emits and the
// visibility ratio is undefined.
constexpr double kEmissionFloor = 1e-30;

struct NodeData {
    double delta = 0.0;
    double weight = 0.0;
    double efficiency = 0.0;
    CorrelatorModes modes;
};

// int_0^inf dt int_0^inf dtau  c_a(t,tau) conj(c_b(t,tau)), as a resolvent sum
// over the modal expansions of two generally different-detuning evaluations.
// With a == b this is the single-photon visibility numerator.
cplx pair_numerator(const CorrelatorModes& a, const CorrelatorModes& b) {
    Eigen::Matrix3cd tau_res;
    for (int k = 0; k < kDim; ++k)
        for (int q = 0; q < kDim; ++q)
            tau_res(k, q) = -1.0 / (a.decay_modes[k] + std::conj(b.decay_modes[q]));

    cplx sum(0.0, 0.0);
    for (int j = 0; j < kVecDim; ++j) {
        for (int l = 0; l < kVecDim; ++l) {
            const cplx t_res =
                -1.0 / (a.generator_modes[j] + std::conj(b.generator_modes[l]));
            cplx tau_sum(0.0, 0.0);
            for (int k = 0; k < kDim; ++k)
                for (int q = 0; q < kDim; ++q)
                    tau_sum += a.amplitudes(j, k) * std::conj(b.amplitudes(l, q)) *
                               tau_res(k, q);
            sum += t_res * tau_sum;
        }
    }
    return sum;
}

// int_0^inf dt int_0^inf dtau  P_a(t) P_b(t + tau).
cplx pair_denominator(const CorrelatorModes& a, const CorrelatorModes& b) {
    cplx sum(0.0, 0.0);
    for (int j = 0; j < kVecDim; ++j)
        for (int l = 0; l < kVecDim; ++l)
            sum += a.population_weights[j] * b.population_weights[l] /
                   ((a.generator_modes[j] + b.generator_modes[l]) * b.generator_modes[l]);
    return sum;
}

// Collection efficiency through the chosen mode, sharing the trace the caller
// already propagated.
double node_efficiency(const PopulationTrace& trace, const SystemParams& p, Mode mode) {
    if (mode == Mode::CavityTwo) return efficiency_exact(trace, p);
    if (trace.window.tail_mass > kTailGate)
        throw TailTooHeavy("efficiency integral: window left too much excitation behind");
    const int m = static_cast<int>(mode);
    return mode_rate(p, mode) * channel_integral(trace, vec_index(m, m));
}

NodeData evaluate_node(const SystemParams& p, double weight, Mode mode) {
    NodeData nd;
    nd.delta = p.delta;
    nd.weight = weight;
    const PopulationTrace trace = propagate(p);
    nd.efficiency = node_efficiency(trace, p, mode);
    nd.modes = correlator_modes(trace, make_propagator(p), mode);
    return nd;
}

}  // namespace

double DiffusionSpec::sigma() const {
    return fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
}

void validate(const DiffusionSpec& spec) {
    if (!std::isfinite(spec.fwhm) || spec.fwhm < 0.0)
        throw InvalidParams("diffusion fwhm must be finite and >= 0");
    if (spec.n_nodes < 1 || spec.n_nodes > 64)
        throw InvalidParams("diffusion n_nodes must be in [1, 64]");
}

EnsembleReport ensemble_evaluate(const SystemParams& params, const DiffusionSpec& spec,
                                 Mode mode) {
    validate(params);
    validate(spec);

    EnsembleReport rep;

    if (spec.fwhm == 0.0 || spec.n_nodes == 1) {
        // Collapsed distribution: the single-detuning values verbatim.
        const PopulationTrace trace = propagate(params);
        rep.efficiency = node_efficiency(trace, params, mode);
        rep.indistinguishability = indistinguishability(params, mode).value;
        rep.indistinguishability_averaged = rep.indistinguishability;
        rep.nodes.push_back(
            {params.delta, 1.0, rep.efficiency, rep.indistinguishability});
        return rep;
    }

    const num::QuadratureGrid rule = num::gauss_hermite(spec.n_nodes, spec.sigma());
    std::vector<NodeData> nodes;
    nodes.reserve(rule.nodes.size());
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        SystemParams pi = params;
        pi.delta = params.delta + rule.nodes[i];
        nodes.push_back(evaluate_node(pi, rule.weights[i], mode));
    }

    // Diagonal terms give the per-node observables; the full double sum gives
    // the visibility of two photons drawn independently from the distribution.
    cplx numer(0.0, 0.0);
    cplx denom(0.0, 0.0);
    rep.nodes.reserve(nodes.size());
    for (const NodeData& a : nodes) {
        const double d_a = pair_denominator(a.modes, a.modes).real();
        if (std::abs(d_a) <= kEmissionFloor)
            throw InvalidParams(
                "ensemble indistinguishability undefined: the chosen mode never emits");
        const double i_a = pair_numerator(a.modes, a.modes).real() / d_a;
        rep.efficiency += a.weight * a.efficiency;
        rep.indistinguishability_averaged += a.weight * i_a;
        rep.nodes.push_back({a.delta, a.weight, a.efficiency, i_a});
        for (const NodeData& b : nodes) {
            const cplx wab = a.weight * b.weight;
            numer += wab * pair_numerator(a.modes, b.modes);
            denom += wab * pair_denominator(a.modes, b.modes);
        }
    }
    if (std::abs(denom.real()) <= kEmissionFloor)
        throw InvalidParams(
            "ensemble indistinguishability undefined: the chosen mode never emits");
    rep.indistinguishability = numer.real() / denom.real();
    return rep;
}

double ensemble_efficiency(const SystemParams& params, const DiffusionSpec& spec,
                           Mode mode) {
    return ensemble_evaluate(params, spec, mode).efficiency;
}

double ensemble_indistinguishability(const SystemParams& params, const DiffusionSpec& spec,
                                     Mode mode) {
    return ensemble_evaluate(params, spec, mode).indistinguishability;
}

double ensemble_indistinguishability_averaged(const SystemParams& params,
                                              const DiffusionSpec& spec, Mode mode) {
    return ensemble_evaluate(params, spec, mode).indistinguishability_averaged;
}

}  // namespace cascade
