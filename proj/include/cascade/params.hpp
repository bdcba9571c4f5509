#pragma once

#include <cmath>

#include "cascade/errors.hpp"

namespace cascade {

// One emitter radiatively coupled to a two-cavity chain:
//
//   emitter --g1--> cavity 1 --g2--> cavity 2 --kappa2--> collection
//      |                |
//    gamma            kappa1   (loss channels)
//
// plus pure dephasing gamma_star on the emitter. Everything is expressed
// in units of the emitter's radiative rate, so gamma == 1 in typical use.
struct SystemParams {
    double gamma      = 1.0;  // emitter radiative decay
    double gamma_star = 1e4;  // emitter pure dephasing
    double g1         = 0.0;  // emitter <-> cavity-1 coupling
    double kappa1     = 1.0;  // cavity-1 leak rate
    double g2         = 0.0;  // cavity-1 <-> cavity-2 coupling
    double kappa2     = 1.0;  // cavity-2 leak rate
    double delta      = 0.0;  // emitter-cavity detuning (cavities mutually resonant)

    // Total emitter linewidth entering the transfer-rate Lorentzian.
    double total_linewidth() const { return gamma + gamma_star; }
};

// Throws InvalidParams unless all rates are physical and finite.
inline void validate(const SystemParams& p) {
    auto fail = [](const char* msg) { throw InvalidParams(msg); };
    if (!(p.gamma > 0.0) || !std::isfinite(p.gamma)) fail("gamma must be positive and finite");
    if (!(p.gamma_star >= 0.0) || !std::isfinite(p.gamma_star)) fail("gamma_star must be non-negative and finite");
    if (!(p.g1 >= 0.0) || !std::isfinite(p.g1)) fail("g1 must be non-negative and finite");
    if (!(p.g2 >= 0.0) || !std::isfinite(p.g2)) fail("g2 must be non-negative and finite");
    if (!(p.kappa1 > 0.0) || !std::isfinite(p.kappa1)) fail("kappa1 must be positive and finite");
    if (!(p.kappa2 > 0.0) || !std::isfinite(p.kappa2)) fail("kappa2 must be positive and finite");
    if (!std::isfinite(p.delta)) fail("delta must be finite");
}

} // namespace cascade
