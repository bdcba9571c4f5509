#include "cascade/master.hpp"

#include <algorithm>
#include <cmath>

#include "cascade/errors.hpp"
#include "cascade/rate_model.hpp"

namespace cascade {
namespace {

using num::cplx;
using Vec9 = Eigen::Vector<cplx, kVecDim>;
using Mat9 = Eigen::Matrix<cplx, kVecDim, kVecDim>;

constexpr double kWindowDecay = 40.0;  // t_max = 40 / slowest rate => tail ~ e^-40
constexpr double kAutoTailTol = 1e-8;  // auto-window guarantee
constexpr double kTailGate = 1e-6;     // efficiency refuses windows leakier than this

Vec9 initial_state() {
    Vec9 v = Vec9::Zero();
    v[kIdxEE] = cplx(1.0, 0.0);
    return v;
}

// Smallest |Re lambda| over the nonzero eigenvalues: the rate that dominates
// the long-time tail and therefore sets the integration window.
double slowest_decay_rate(const Eigen::VectorXcd& values) {
    double fastest = 0.0;
    for (Eigen::Index k = 0; k < values.size(); ++k)
        fastest = std::max(fastest, std::abs(values[k].real()));
    double slow = fastest;
    for (Eigen::Index k = 0; k < values.size(); ++k) {
        const double re = std::abs(values[k].real());
        if (re > 1e-12 * fastest) slow = std::min(slow, re);
    }
    return slow;
}

// Shared sample grid: geometric section over the six decades below t_max/4
// (resolves every separated timescale the model produces), linear afterwards.
std::vector<double> sample_grid(const TimeWindow& win) {
    return num::log_linear_grid(win.t_max, win.t_max / 4.0, win.n_samples);
}

void reserve_trace(PopulationTrace& tr, size_t n) {
    tr.times.reserve(n);
    for (auto* v : {&tr.p_e, &tr.p_a, &tr.p_b, &tr.dp_e, &tr.dp_a, &tr.dp_b}) v->reserve(n);
    for (auto* v : {&tr.coh_ea, &tr.coh_eb, &tr.coh_ab}) v->reserve(n);
}

void push_sample(PopulationTrace& tr, double t, const Vec9& v, const Vec9& dv) {
    tr.times.push_back(t);
    tr.p_e.push_back(v[kIdxEE].real());
    tr.p_a.push_back(v[kIdxAA].real());
    tr.p_b.push_back(v[kIdxBB].real());
    tr.dp_e.push_back(dv[kIdxEE].real());
    tr.dp_a.push_back(dv[kIdxAA].real());
    tr.dp_b.push_back(dv[kIdxBB].real());
    tr.coh_ea.push_back(v[kIdxEA]);
    tr.coh_eb.push_back(v[kIdxEB]);
    tr.coh_ab.push_back(v[kIdxAB]);
}

void finish_trace(PopulationTrace& tr) {
    tr.window.tail_mass = tr.p_e.back() + tr.p_a.back() + tr.p_b.back();
}

PopulationTrace spectral_trace(const LiouvillianDecomposition& dec, TimeWindow win) {
    PopulationTrace tr;
    tr.method = PropagationMethod::Spectral;
    tr.has_spectral = true;
    tr.window = win;
    tr.eigenvalues = dec.eig.values;

    // vec(rho)(t) = R exp(Lambda t) L vec(rho0); with rho0 = |e><e| the modal
    // weights collapse to W(:, k) = R(:, k) * L(k, 0).
    for (int k = 0; k < kVecDim; ++k)
        tr.modal_weights.col(k) = dec.eig.right.col(k) * dec.eig.left(k, 0);

    const auto ts = sample_grid(win);
    reserve_trace(tr, ts.size());
    Vec9 ew, v, dv;
    for (double t : ts) {
        for (int k = 0; k < kVecDim; ++k) ew[k] = std::exp(tr.eigenvalues[k] * t);
        v = tr.modal_weights * ew;
        dv = tr.modal_weights * tr.eigenvalues.cwiseProduct(ew);
        push_sample(tr, t, v, dv);
    }
    // exact initial condition (the modal resum carries ~1e-15 roundoff)
    tr.p_e.front() = 1.0;
    tr.p_a.front() = 0.0;
    tr.p_b.front() = 0.0;
    finish_trace(tr);
    return tr;
}

PopulationTrace rk_trace(const SystemParams& p, TimeWindow win) {
    const Mat9 g = build_generator(p);
    PopulationTrace tr;
    tr.method = PropagationMethod::RungeKutta;
    tr.window = win;

    // Comfortably inside the RK4 stability/accuracy region: the sum below
    // bounds every generator entry from above.
    const double scale = p.gamma + p.gamma_star + p.kappa1 + p.kappa2 +
                         2.0 * (p.g1 + p.g2) + std::abs(p.delta);
    const double dt = 0.05 / scale;

    const auto ts = sample_grid(win);
    const auto states = num::rk4_sampled(g, initial_state(), ts, dt);
    reserve_trace(tr, ts.size());
    for (size_t i = 0; i < ts.size(); ++i) {
        const Vec9 v = states[i];
        push_sample(tr, ts[i], v, g * v);
    }
    finish_trace(tr);
    return tr;
}

void validate_window(const TimeWindow& win) {
    if (!(win.t_max > 0.0) || !std::isfinite(win.t_max))
        throw InvalidParams("TimeWindow: t_max must be positive and finite");
    if (win.n_samples < 64) throw InvalidParams("TimeWindow: need at least 64 samples");
}

} // namespace

PopulationTrace propagate(const SystemParams& p) {
    validate(p);
    try {
        const auto dec = build_liouvillian(p);
        TimeWindow win;
        win.t_max = kWindowDecay / slowest_decay_rate(dec.eig.values);
        return spectral_trace(dec, win);
    } catch (const DegenerateGenerator&) {
        // Defective generator (exceptional point): step the equation directly.
        // The incoherent-rate matrix gives a serviceable window estimate;
        // widen it until the tail criterion holds.
        const RateModel rm = build_rate_model(p);
        TimeWindow win;
        win.t_max = 1.5 * kWindowDecay / std::abs(rm.roots[0].real());
        PopulationTrace tr = rk_trace(p, win);
        for (int attempt = 0; attempt < 2 && tr.window.tail_mass > kAutoTailTol; ++attempt) {
            win.t_max *= 4.0;
            tr = rk_trace(p, win);
        }
        tr.fallback = true;
        return tr;
    }
}

PopulationTrace propagate(const SystemParams& p, TimeWindow window) {
    validate(p);
    validate_window(window);
    try {
        const auto dec = build_liouvillian(p);
        return spectral_trace(dec, window);
    } catch (const DegenerateGenerator&) {
        PopulationTrace tr = rk_trace(p, window);
        tr.fallback = true;
        return tr;
    }
}

double channel_integral(const PopulationTrace& tr, int vec_idx) {
    if (vec_idx < 0 || vec_idx >= kVecDim)
        throw InvalidParams("channel_integral: index outside the density block");
    if (tr.has_spectral) {
        // integral_0^inf exp(lambda t) dt = -1/lambda for Re lambda < 0
        cplx sum = 0.0;
        for (int k = 0; k < kVecDim; ++k)
            sum += tr.modal_weights(vec_idx, k) * (-1.0 / tr.eigenvalues[k]);
        return sum.real();
    }
    const std::vector<double>* y = nullptr;
    const std::vector<double>* dy = nullptr;
    if (vec_idx == kIdxEE) { y = &tr.p_e; dy = &tr.dp_e; }
    if (vec_idx == kIdxAA) { y = &tr.p_a; dy = &tr.dp_a; }
    if (vec_idx == kIdxBB) { y = &tr.p_b; dy = &tr.dp_b; }
    if (y == nullptr)
        throw InvalidParams("channel_integral: only populations are integrable on the stepped path");
    return num::hermite_trapezoid(tr.times, *y, *dy);
}

double efficiency_exact(const PopulationTrace& tr, const SystemParams& p) {
    validate(p);
    if (tr.window.tail_mass > kTailGate)
        throw TailTooHeavy("efficiency: window leaves too much excitation unaccounted for");
    return p.kappa2 * channel_integral(tr, kIdxBB);
}

double efficiency_exact_single(const PopulationTrace& tr, const SystemParams& p) {
    validate(p);
    if (p.g2 != 0.0)
        throw InvalidParams("single-cavity efficiency requires g2 == 0");
    if (tr.window.tail_mass > kTailGate)
        throw TailTooHeavy("efficiency: window leaves too much excitation unaccounted for");
    return p.kappa1 * channel_integral(tr, kIdxAA);
}

double efficiency_single_cavity(const SystemParams& p) {
    validate(p);
    return efficiency_exact_single(propagate(p), p);
}

} // namespace cascade
