#pragma once

// Deterministic serialization of exploration results: every float is printed
// with 9 significant digits through the C locale, so identical inputs yield
// byte-identical CSV/JSON. NaN renders as an empty CSV cell / JSON null.

#include <string>
#include <vector>

#include "cascade/explore.hpp"
#include "cascade/master.hpp"
#include "cascade/rate_model.hpp"

namespace cascade::io {

inline constexpr const char* kSchemaVersionLine = "# schema-version: 1\n";

// Scalar formatting building blocks.
std::string fmt9(double v);                     // "%.9g"; non-finite -> ""
std::string json_number(double v);              // "%.9g"; non-finite -> "null"
std::string json_string(const std::string& s);  // quoted, escaped
std::string csv_field(const std::string& s);    // quoted when needed

// One evaluated point as a JSON document (params / master / closed /
// regime / diagnostics), or as a one-row CSV.
std::string simulate_json(const EmissionReport& rep);
std::string simulate_csv(const EmissionReport& rep);

// Sweep rows in grid order; failed points keep their axis cells and a note.
std::string sweep_csv(const SweepResult& result);

// Exact and rate-equation populations on the master trace's time grid.
std::string compare_csv(const PopulationTrace& master, const RateTrace& rate);

// Spectral-diffusion scan rows plus the zero-width reference columns.
struct DiffusionRow {
    double fwhm = 0.0;
    double eta_ensemble = 0.0;
    double i_ensemble = 0.0;
};
std::string diffusion_csv(const std::vector<DiffusionRow>& rows, double eta_delta0,
                          double i_delta0);

// Optimization outcome with the search box echoed back.
std::string optimize_json(const OptimizeRequest& req, const OptimizeResult& res,
                          const std::string& objective_name);

// Unit-conversion result.
std::string convert_json(double q, double omega, double gamma_lab, double kappa);

}  // namespace cascade::io
