#include "report_io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

namespace cascade::io {

namespace {

std::string raw9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

const char* method_name(PropagationMethod m) {
    return m == PropagationMethod::Spectral ? "spectral" : "runge_kutta";
}

const char* bool_name(bool b) { return b ? "true" : "false"; }

// Regime annotation for CSV/JSON: single-cavity systems are labeled as such,
// cascaded ones carry the rate-model classification.
std::string regime_name(const EmissionReport& rep) {
    if (!rep.rate_run) return "";
    return rep.single ? "single" : rep.regime.label();
}

}  // namespace

std::string fmt9(double v) { return std::isfinite(v) ? raw9(v) : std::string(); }

std::string json_number(double v) {
    return std::isfinite(v) ? raw9(v) : std::string("null");
}

std::string json_string(const std::string& s) {
    std::string out = "\"";
    for (const char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    out += '"';
    return out;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out += "\"\"";
        out += c;
    }
    out += '"';
    return out;
}

std::string simulate_json(const EmissionReport& rep) {
    const SystemParams& p = rep.params;
    std::ostringstream os;
    os << "{\n";
    os << "  \"params\": {\n";
    os << "    \"g1\": " << json_number(p.g1) << ",\n";
    os << "    \"kappa1\": " << json_number(p.kappa1) << ",\n";
    os << "    \"g2\": " << json_number(p.g2) << ",\n";
    os << "    \"kappa2\": " << json_number(p.kappa2) << ",\n";
    os << "    \"gamma\": " << json_number(p.gamma) << ",\n";
    os << "    \"gamma_star\": " << json_number(p.gamma_star) << ",\n";
    os << "    \"delta\": " << json_number(p.delta) << ",\n";
    os << "    \"single\": " << bool_name(rep.single) << "\n";
    os << "  },\n";
    os << "  \"master\": {\n";
    os << "    \"eta\": " << json_number(rep.eta_master) << ",\n";
    os << "    \"ind\": " << json_number(rep.i_master) << "\n";
    os << "  },\n";
    os << "  \"closed\": {\n";
    os << "    \"eta\": " << json_number(rep.eta_closed) << ",\n";
    os << "    \"ind\": " << json_number(rep.i_closed) << ",\n";
    os << "    \"r1\": " << json_number(rep.r1) << ",\n";
    os << "    \"r2\": " << json_number(rep.r2) << ",\n";
    os << "    \"pb_decay_rate\": " << json_number(rep.pb_decay_rate) << "\n";
    os << "  },\n";
    const std::string regime = regime_name(rep);
    os << "  \"regime\": " << (regime.empty() ? "null" : json_string(regime)) << ",\n";
    os << "  \"diagnostics\": {\n";
    os << "    \"t_max\": " << json_number(rep.t_max) << ",\n";
    os << "    \"method\": "
       << (rep.master_run ? json_string(method_name(rep.method)) : "null") << ",\n";
    os << "    \"fallback\": " << bool_name(rep.fallback) << ",\n";
    os << "    \"i_undefined\": " << bool_name(rep.i_undefined) << "\n";
    os << "  }\n";
    os << "}\n";
    return os.str();
}

std::string simulate_csv(const EmissionReport& rep) {
    const SystemParams& p = rep.params;
    std::ostringstream os;
    os << kSchemaVersionLine;
    os << "g1,kappa1,g2,kappa2,gamma,gamma_star,delta,eta_master,i_master,"
          "eta_closed,i_closed,r1,r2,pb_decay_rate,regime,note\n";
    os << fmt9(p.g1) << ',' << fmt9(p.kappa1) << ',' << fmt9(p.g2) << ','
       << fmt9(p.kappa2) << ',' << fmt9(p.gamma) << ',' << fmt9(p.gamma_star) << ','
       << fmt9(p.delta) << ',' << fmt9(rep.eta_master) << ',' << fmt9(rep.i_master)
       << ',' << fmt9(rep.eta_closed) << ',' << fmt9(rep.i_closed) << ','
       << fmt9(rep.r1) << ',' << fmt9(rep.r2) << ',' << fmt9(rep.pb_decay_rate) << ','
       << regime_name(rep) << ','
       << csv_field(rep.i_undefined
                        ? "indistinguishability undefined: collection mode never emits"
                        : "")
       << '\n';
    return os.str();
}

std::string sweep_csv(const SweepResult& result) {
    std::ostringstream os;
    os << kSchemaVersionLine;
    os << "axis1,axis2,eta_master,i_master,eta_closed,i_closed,r1,r2,regime,note\n";
    for (const SweepRow& row : result.rows) {
        os << fmt9(row.axis1) << ',' << fmt9(row.axis2) << ',';
        if (row.ok) {
            const EmissionReport& rep = row.report;
            os << fmt9(rep.eta_master) << ',' << fmt9(rep.i_master) << ','
               << fmt9(rep.eta_closed) << ',' << fmt9(rep.i_closed) << ','
               << fmt9(rep.r1) << ',' << fmt9(rep.r2) << ',' << regime_name(rep);
        } else {
            os << ",,,,,,";
        }
        os << ',' << csv_field(row.note) << '\n';
    }
    return os.str();
}

std::string compare_csv(const PopulationTrace& master, const RateTrace& rate) {
    std::ostringstream os;
    os << kSchemaVersionLine;
    os << "t,p_e_master,p_a_master,p_b_master,p_e_rate,p_a_rate,p_b_rate\n";
    for (std::size_t i = 0; i < master.times.size(); ++i) {
        os << fmt9(master.times[i]) << ',' << fmt9(master.p_e[i]) << ','
           << fmt9(master.p_a[i]) << ',' << fmt9(master.p_b[i]) << ','
           << fmt9(rate.p_e[i]) << ',' << fmt9(rate.p_a[i]) << ','
           << fmt9(rate.p_b[i]) << '\n';
    }
    return os.str();
}

std::string diffusion_csv(const std::vector<DiffusionRow>& rows, double eta_delta0,
                          double i_delta0) {
    std::ostringstream os;
    os << kSchemaVersionLine;
    os << "fwhm,eta_ensemble,i_ensemble,eta_delta0,i_delta0\n";
    for (const DiffusionRow& row : rows) {
        os << fmt9(row.fwhm) << ',' << fmt9(row.eta_ensemble) << ','
           << fmt9(row.i_ensemble) << ',' << fmt9(eta_delta0) << ','
           << fmt9(i_delta0) << '\n';
    }
    return os.str();
}

std::string optimize_json(const OptimizeRequest& req, const OptimizeResult& res,
                          const std::string& objective_name) {
    const SystemParams& p = res.best;
    std::ostringstream os;
    os << "{\n";
    os << "  \"objective\": " << json_string(objective_name) << ",\n";
    os << "  \"best\": {\n";
    os << "    \"g1\": " << json_number(p.g1) << ",\n";
    os << "    \"kappa1\": " << json_number(p.kappa1) << ",\n";
    os << "    \"g2\": " << json_number(p.g2) << ",\n";
    os << "    \"kappa2\": " << json_number(p.kappa2) << ",\n";
    os << "    \"gamma\": " << json_number(p.gamma) << ",\n";
    os << "    \"gamma_star\": " << json_number(p.gamma_star) << ",\n";
    os << "    \"delta\": " << json_number(p.delta) << "\n";
    os << "  },\n";
    os << "  \"eta\": " << json_number(res.eta) << ",\n";
    os << "  \"ind\": " << json_number(res.ind) << ",\n";
    os << "  \"eta_ind\": " << json_number(res.eta * res.ind) << ",\n";
    os << "  \"objective_value\": " << json_number(res.objective_value) << ",\n";
    os << "  \"evaluations\": " << res.evaluations << ",\n";
    os << "  \"box\": {\n";
    os << "    \"kappa1_min\": " << json_number(req.kappa1_min) << ",\n";
    os << "    \"kappa1_max\": " << json_number(req.kappa1_max) << ",\n";
    os << "    \"g2_min\": " << json_number(req.g2_min) << ",\n";
    os << "    \"g2_max\": " << json_number(req.g2_max) << ",\n";
    os << "    \"kappa2_min\": " << json_number(req.kappa2_min) << ",\n";
    os << "    \"kappa2_max\": " << json_number(req.kappa2_max) << "\n";
    os << "  }\n";
    os << "}\n";
    return os.str();
}

std::string convert_json(double q, double omega, double gamma_lab, double kappa) {
    std::ostringstream os;
    os << "{\n";
    os << "  \"q\": " << json_number(q) << ",\n";
    os << "  \"omega\": " << json_number(omega) << ",\n";
    os << "  \"gamma_lab\": " << json_number(gamma_lab) << ",\n";
    os << "  \"kappa\": " << json_number(kappa) << "\n";
    os << "}\n";
    return os.str();
}

}  // namespace cascade::io
