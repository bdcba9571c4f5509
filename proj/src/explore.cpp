#include "cascade/explore.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "cascade/correlator.hpp"
#include "cascade/errors.hpp"
#include "cascade/liouvillian.hpp"

namespace cascade {

namespace {

// Log-spaced grid hitting both endpoints exactly; collapses when lo == hi.
std::vector<double> log_grid(double lo, double hi, int n) {
    if (!(hi > lo) || n <= 1) return {lo};
    std::vector<double> v(static_cast<std::size_t>(n));
    const double llo = std::log(lo);
    const double step = (std::log(hi) - llo) / (n - 1);
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = std::exp(llo + step * i);
    v.front() = lo;
    v.back() = hi;
    return v;
}

void check_box_axis(const char* name, double lo, double hi) {
    if (!(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi)) {
        throw InvalidParams(std::string("optimize box: ") + name +
                            " needs 0 < min <= max, finite");
    }
}

struct ObjectiveSample {
    bool ok = false;
    double eta = 0.0;
    double ind = 0.0;
    double value = 0.0;
};

ObjectiveSample sample_objective(const SystemParams& p, Objective objective) {
    ObjectiveSample s;
    try {
        const EmissionReport rep = evaluate_point(p, /*single=*/false, Evaluator::Master);
        if (rep.i_undefined || !std::isfinite(rep.i_master) ||
            !std::isfinite(rep.eta_master)) {
            return s;
        }
        s.eta = rep.eta_master;
        s.ind = rep.i_master;
        switch (objective) {
            case Objective::EtaInd: s.value = s.eta * s.ind; break;
            case Objective::Ind:    s.value = s.ind; break;
            case Objective::Eta:    s.value = s.eta; break;
        }
        s.ok = std::isfinite(s.value);
    } catch (const std::exception&) {
        s.ok = false;
    }
    return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Laboratory-unit conversion
// ---------------------------------------------------------------------------

void validate(const QFactorSpec& spec) {
    auto fail = [](const char* msg) { throw InvalidParams(msg); };
    if (!(spec.q > 0.0) || !std::isfinite(spec.q)) fail("q must be positive and finite");
    if (!(spec.omega > 0.0) || !std::isfinite(spec.omega))
        fail("omega must be positive and finite");
    if (!(spec.gamma_lab > 0.0) || !std::isfinite(spec.gamma_lab))
        fail("gamma_lab must be positive and finite");
}

double q_to_kappa(const QFactorSpec& spec) {
    validate(spec);
    return (spec.omega / spec.q) / spec.gamma_lab;
}

double kappa_to_q(double kappa, double omega, double gamma_lab) {
    QFactorSpec probe{1.0, omega, gamma_lab};
    validate(probe);
    if (!(kappa > 0.0) || !std::isfinite(kappa))
        throw InvalidParams("kappa must be positive and finite");
    return omega / (kappa * gamma_lab);
}

// ---------------------------------------------------------------------------
// Single-point evaluation
// ---------------------------------------------------------------------------

EmissionReport evaluate_point(const SystemParams& p, bool single, Evaluator evaluator) {
    validate(p);
    if (single && p.g2 != 0.0)
        throw InvalidParams("single-cavity evaluation requires g2 == 0");

    EmissionReport rep;
    rep.params = p;
    rep.single = single;

    if (evaluator != Evaluator::Rate) {
        const PopulationTrace trace = propagate(p);
        rep.master_run = true;
        rep.t_max = trace.window.t_max;
        rep.method = trace.method;
        rep.fallback = trace.fallback;
        rep.eta_master =
            single ? efficiency_exact_single(trace, p) : efficiency_exact(trace, p);
        if (p.g1 == 0.0 || (!single && p.g2 == 0.0)) {
            rep.i_undefined = true;  // nothing ever reaches the collection mode
        } else {
            const Mode mode = single ? Mode::CavityOne : Mode::CavityTwo;
            rep.i_master = indistinguishability(trace, make_propagator(p), mode).value;
        }
    }

    if (evaluator != Evaluator::Master) {
        rep.rate_run = true;
        if (single) {
            rep.r1 = single_cavity_transfer_rate(p);
            rep.eta_closed = efficiency_closed_single(p);
            rep.i_closed = indistinguishability_closed_single(p);
        } else {
            const RateModel rm = build_rate_model(p);
            rep.r1 = rm.r1;
            rep.r2 = rm.r2;
            rep.eta_closed = rm.eta_closed;
            rep.i_closed = rm.i_closed;
            rep.pb_decay_rate = rm.pb_decay_rate;
            rep.regime = classify_regime(rm);
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

std::vector<double> axis_values(const SweepAxis& axis) {
    if (!std::isfinite(axis.min) || !std::isfinite(axis.max))
        throw InvalidParams("sweep axis: bounds must be finite");
    if (axis.n < 1) throw InvalidParams("sweep axis: n must be >= 1");
    if (axis.n == 1) return {axis.min};
    if (!(axis.min < axis.max))
        throw InvalidParams("sweep axis: min must be < max");
    if (axis.log_scale && !(axis.min > 0.0))
        throw InvalidParams("sweep axis: log scale requires min > 0");

    std::vector<double> v(static_cast<std::size_t>(axis.n));
    if (axis.log_scale) {
        const double llo = std::log(axis.min);
        const double step = (std::log(axis.max) - llo) / (axis.n - 1);
        for (int i = 0; i < axis.n; ++i)
            v[static_cast<std::size_t>(i)] = std::exp(llo + step * i);
    } else {
        const double step = (axis.max - axis.min) / (axis.n - 1);
        for (int i = 0; i < axis.n; ++i)
            v[static_cast<std::size_t>(i)] = axis.min + step * i;
    }
    v.front() = axis.min;
    v.back() = axis.max;
    return v;
}

void apply_parameter(SystemParams& p, const std::string& name, double value) {
    std::string key = name;
    std::replace(key.begin(), key.end(), '-', '_');
    if (key == "g1" || key == "g") p.g1 = value;
    else if (key == "kappa1" || key == "kappa") p.kappa1 = value;
    else if (key == "g2") p.g2 = value;
    else if (key == "kappa2") p.kappa2 = value;
    else if (key == "gamma") p.gamma = value;
    else if (key == "gamma_star") p.gamma_star = value;
    else if (key == "delta") p.delta = value;
    else throw InvalidParams("unknown sweep parameter: " + name);
}

SweepResult run_sweep(const SystemParams& base, const SweepRequest& request) {
    const std::vector<double> values1 = axis_values(request.axis1);
    const std::vector<double> values2 =
        request.axis2 ? axis_values(*request.axis2) : std::vector<double>{};
    const std::size_t n2 = std::max<std::size_t>(values2.size(), 1);
    const std::size_t total = values1.size() * n2;

    SweepResult result;
    result.rows.resize(total);
    parallel_for(total, [&](std::size_t i) {
        SweepRow& row = result.rows[i];
        const std::size_t i1 = i / n2;
        const std::size_t i2 = i % n2;
        row.axis1 = values1[i1];
        if (!values2.empty()) row.axis2 = values2[i2];
        try {
            SystemParams p = base;
            apply_parameter(p, request.axis1.name, row.axis1);
            if (request.axis2) apply_parameter(p, request.axis2->name, row.axis2);
            row.report = evaluate_point(p, request.single, request.evaluator);
            row.ok = true;
            if (row.report.i_undefined)
                row.note = "indistinguishability undefined: collection mode never emits";
        } catch (const std::exception& e) {
            row.ok = false;
            row.note = e.what();
        }
    });

    for (const SweepRow& row : result.rows)
        if (!row.ok) ++result.failed;
    // Degraded when fewer than 90% of the points succeeded.
    result.degraded = 10 * result.failed > static_cast<long>(total);
    return result;
}

// ---------------------------------------------------------------------------
// Optimization
// ---------------------------------------------------------------------------

OptimizeResult optimize(const OptimizeRequest& request) {
    validate(request.base);
    if (!(request.base.g1 > 0.0))
        throw InfeasibleRegion("optimization requires a fixed g1 > 0");
    check_box_axis("kappa1", request.kappa1_min, request.kappa1_max);
    check_box_axis("g2", request.g2_min, request.g2_max);
    check_box_axis("kappa2", request.kappa2_min, request.kappa2_max);
    if (request.grid_points < 1) throw InvalidParams("optimize: grid_points must be >= 1");
    if (request.refine_rounds < 0) throw InvalidParams("optimize: refine_rounds must be >= 0");
    if (!(request.shrink > 1.0)) throw InvalidParams("optimize: shrink must be > 1");

    auto point = [&](double k1, double g2, double k2) {
        SystemParams p = request.base;
        p.kappa1 = k1;
        p.g2 = g2;
        p.kappa2 = k2;
        return p;
    };

    long evaluations = 0;
    SystemParams best = point(request.kappa1_min, request.g2_min, request.kappa2_min);
    ObjectiveSample best_sample;

    // Evaluate a batch of candidate points in parallel and fold the best one
    // (first index wins ties) into the running optimum.
    auto consider = [&](const std::vector<SystemParams>& candidates) {
        std::vector<ObjectiveSample> samples(candidates.size());
        parallel_for(candidates.size(), [&](std::size_t i) {
            samples[i] = sample_objective(candidates[i], request.objective);
        });
        evaluations += static_cast<long>(candidates.size());
        for (std::size_t i = 0; i < samples.size(); ++i) {
            if (!samples[i].ok) continue;
            if (!best_sample.ok || samples[i].value > best_sample.value) {
                best_sample = samples[i];
                best = candidates[i];
            }
        }
    };

    const std::vector<double> grid1 =
        log_grid(request.kappa1_min, request.kappa1_max, request.grid_points);
    const std::vector<double> grid2 =
        log_grid(request.g2_min, request.g2_max, request.grid_points);
    const std::vector<double> grid3 =
        log_grid(request.kappa2_min, request.kappa2_max, request.grid_points);

    std::vector<SystemParams> coarse;
    coarse.reserve(grid1.size() * grid2.size() * grid3.size());
    for (double k1 : grid1)
        for (double g2 : grid2)
            for (double k2 : grid3) coarse.push_back(point(k1, g2, k2));
    consider(coarse);
    if (!best_sample.ok)
        throw InfeasibleRegion("optimize: no point in the box evaluated successfully");

    // Coordinate descent: per round, scan each axis on a log bracket around
    // the current best; the bracket starts at the coarse grid spacing and
    // shrinks each round.
    struct AxisView {
        double SystemParams::* field;
        double lo, hi;
        double step0;  // coarse log spacing
    };
    auto log_step = [&](const std::vector<double>& g) {
        return g.size() > 1 ? std::log(g[1] / g[0]) : 0.0;
    };
    const AxisView axes[3] = {
        {&SystemParams::kappa1, request.kappa1_min, request.kappa1_max, log_step(grid1)},
        {&SystemParams::g2, request.g2_min, request.g2_max, log_step(grid2)},
        {&SystemParams::kappa2, request.kappa2_min, request.kappa2_max, log_step(grid3)},
    };
    constexpr int kScanPoints = 9;

    for (int round = 0; round < request.refine_rounds; ++round) {
        for (const AxisView& axis : axes) {
            if (axis.step0 == 0.0) continue;  // degenerate axis: nothing to scan
            const double width = axis.step0 / std::pow(request.shrink, round);
            const double center = best.*(axis.field);
            const double lo = std::max(axis.lo, center * std::exp(-width));
            const double hi = std::min(axis.hi, center * std::exp(width));
            std::vector<SystemParams> scan;
            scan.reserve(kScanPoints);
            for (double v : log_grid(lo, hi, kScanPoints)) {
                SystemParams p = best;
                p.*(axis.field) = v;
                scan.push_back(p);
            }
            consider(scan);
        }
    }

    OptimizeResult result;
    result.best = best;
    result.eta = best_sample.eta;
    result.ind = best_sample.ind;
    result.objective_value = best_sample.value;
    result.evaluations = evaluations;
    return result;
}

// ---------------------------------------------------------------------------
// Worker pool
// ---------------------------------------------------------------------------

int worker_count(std::size_t n_tasks) {
    if (n_tasks <= 1) return n_tasks == 0 ? 0 : 1;
    long requested = 0;  // 0 = auto
    if (const char* env = std::getenv("CASCADE_QED_THREADS")) {
        char* end = nullptr;
        const long parsed = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && parsed >= 0) requested = parsed;
    }
    if (requested == 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        requested = hw == 0 ? 1 : static_cast<long>(hw);
    }
    return static_cast<int>(
        std::min<long>(requested, static_cast<long>(n_tasks)));
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    const int workers = worker_count(n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto drain = [&]() {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    };
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(workers) - 1);
    for (int w = 1; w < workers; ++w) threads.emplace_back(drain);
    drain();
    for (std::thread& t : threads) t.join();
}

}  // namespace cascade
