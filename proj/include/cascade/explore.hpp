#pragma once

// Exploration layer on top of the solvers: single-point evaluation reports,
// deterministic (optionally parallel) parameter sweeps, derivative-free
// optimization over the cavity parameters, and conversion between laboratory
// units and normalized rates.

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cascade/master.hpp"
#include "cascade/params.hpp"
#include "cascade/rate_model.hpp"

namespace cascade {

// Search region contains no evaluable point (distinct from a numerical
// failure: the request itself cannot be satisfied).
struct InfeasibleRegion : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Laboratory-unit conversion
// ---------------------------------------------------------------------------

struct QFactorSpec {
    double q = 1.0;          // quality factor (dimensionless)
    double omega = 1.0;      // optical frequency, same unit as gamma_lab
    double gamma_lab = 1.0;  // emitter decay rate in laboratory units
};

// Throws InvalidParams unless all fields are positive and finite.
void validate(const QFactorSpec& spec);

// Cavity leak rate in emitter-decay units: (omega/q) / gamma_lab.
double q_to_kappa(const QFactorSpec& spec);
// Inverse map; q_to_kappa and kappa_to_q round-trip to relative 1e-12.
double kappa_to_q(double kappa, double omega, double gamma_lab);

// ---------------------------------------------------------------------------
// Single-point evaluation
// ---------------------------------------------------------------------------

enum class Evaluator { Master, Rate, Both };

// Everything known about one parameter point. Scalars default to NaN, which
// serializers render as empty/null; they stay NaN when the corresponding
// evaluator was not requested (or the quantity is undefined for the system).
struct EmissionReport {
    static constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

    SystemParams params;
    bool single = false;  // single-cavity system: collection from cavity 1

    // Exact (master-equation) observables.
    bool master_run = false;
    double eta_master = kUnset;
    double i_master = kUnset;
    bool i_undefined = false;  // the collection mode never emits (e.g. g1 = 0)

    // Closed-form observables.
    bool rate_run = false;
    double eta_closed = kUnset;
    double i_closed = kUnset;
    double r1 = kUnset;
    double r2 = kUnset;             // cascaded systems only
    double pb_decay_rate = kUnset;  // cascaded systems only
    RegimeFlags regime;             // cascaded systems only

    // Diagnostics of the master propagation.
    double t_max = kUnset;
    PropagationMethod method = PropagationMethod::Spectral;
    bool fallback = false;
};

// Evaluate one point with the requested evaluator(s). `single` collects from
// cavity 1 and requires g2 == 0. A collection mode that never emits yields
// eta_master = 0 with i_undefined set instead of an error.
EmissionReport evaluate_point(const SystemParams& p, bool single = false,
                              Evaluator evaluator = Evaluator::Both);

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

struct SweepAxis {
    std::string name;  // parameter name, e.g. "kappa2" (aliases: "g", "kappa")
    double min = 0.0;
    double max = 0.0;
    int n = 2;
    bool log_scale = false;
};

// Grid of axis values: n >= 2 needs min < max (log scale also min > 0);
// n == 1 yields the single value {min}. Endpoints are hit exactly.
std::vector<double> axis_values(const SweepAxis& axis);

// Set one named parameter. Accepted names: g1, kappa1, g2, kappa2, gamma,
// gamma_star, delta, plus the single-cavity aliases g -> g1, kappa -> kappa1;
// '-' and '_' are interchangeable. Throws InvalidParams on unknown names.
void apply_parameter(SystemParams& p, const std::string& name, double value);

struct SweepRequest {
    SweepAxis axis1;
    std::optional<SweepAxis> axis2;
    Evaluator evaluator = Evaluator::Both;
    bool single = false;
};

struct SweepRow {
    double axis1 = 0.0;
    double axis2 = std::numeric_limits<double>::quiet_NaN();  // NaN for 1D sweeps
    bool ok = false;
    std::string note;       // failure reason, or an annotation on an ok row
    EmissionReport report;  // meaningful when ok
};

struct SweepResult {
    std::vector<SweepRow> rows;  // deterministic order, axis2 fastest
    int failed = 0;
    bool degraded = false;  // fewer than 90% of the points succeeded
};

// Evaluate the grid; per-point failures become rows with ok = false and a
// note instead of aborting the sweep.
SweepResult run_sweep(const SystemParams& base, const SweepRequest& request);

// ---------------------------------------------------------------------------
// Optimization
// ---------------------------------------------------------------------------

enum class Objective { EtaInd, Ind, Eta };

// Box-constrained search over (kappa1, g2, kappa2) with everything else held
// at `base` (g1 stays fixed at base.g1, which must be positive). Coarse
// log-spaced grid scan followed by coordinate-descent refinement with a
// log-bracket shrinking by `shrink` each round; all evaluations use the
// master-equation evaluator.
struct OptimizeRequest {
    SystemParams base;
    double kappa1_min = 0.1, kappa1_max = 2e4;
    double g2_min = 0.5, g2_max = 5e3;
    double kappa2_min = 0.1, kappa2_max = 5e4;
    Objective objective = Objective::EtaInd;
    int grid_points = 8;    // coarse grid points per axis
    int refine_rounds = 3;  // coordinate-descent rounds
    double shrink = 4.0;    // bracket shrink factor per round
};

struct OptimizeResult {
    SystemParams best;
    double eta = 0.0;
    double ind = 0.0;
    double objective_value = 0.0;
    long evaluations = 0;
};

// Throws InvalidParams on a malformed box and InfeasibleRegion when no point
// in the box evaluates successfully.
OptimizeResult optimize(const OptimizeRequest& request);

// ---------------------------------------------------------------------------
// Worker pool
// ---------------------------------------------------------------------------

// Workers used for n independent tasks: CASCADE_QED_THREADS caps the count
// (0, unset, or unparsable = hardware concurrency), clamped to [1, n].
int worker_count(std::size_t n_tasks);

// Run fn(i) for every i in [0, n) across the pool. Tasks must be independent
// and must not throw; result placement by index keeps output deterministic.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace cascade
