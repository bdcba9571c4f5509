// Command-line front end for the emitter/two-cavity chain library:
// single-point evaluation, 1D/2D parameter sweeps, exact-vs-closed-form
// population comparison, spectral-diffusion scans, box-constrained
// optimization, and conversion between laboratory units and normalized rates.

#include <cmath>
#include <cstddef>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cascade/ensemble.hpp"
#include "cascade/errors.hpp"
#include "cascade/explore.hpp"
#include "cascade/master.hpp"
#include "cascade/params.hpp"
#include "cascade/rate_model.hpp"
#include "report_io.hpp"

namespace {

using namespace cascade;

// ---------------------------------------------------------------------------
// Shared option block
// ---------------------------------------------------------------------------

struct CommonOpts {
    SystemParams p;
    bool single = false;
    double g = 0.0;      // single-cavity alias for g1
    double kappa = 0.0;  // single-cavity alias for kappa1
    std::string out = "-";
    std::string format;
    CLI::Option* g_opt = nullptr;
    CLI::Option* kappa_opt = nullptr;
};

void add_params(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--g1", o.p.g1, "emitter <-> cavity-1 coupling")->capture_default_str();
    cmd->add_option("--kappa1", o.p.kappa1, "cavity-1 leak rate")->capture_default_str();
    cmd->add_option("--g2", o.p.g2, "cavity-1 <-> cavity-2 coupling")->capture_default_str();
    cmd->add_option("--kappa2", o.p.kappa2, "cavity-2 leak rate")->capture_default_str();
    cmd->add_option("--gamma", o.p.gamma, "emitter radiative decay rate")->capture_default_str();
    cmd->add_option("--gamma-star", o.p.gamma_star, "emitter pure-dephasing rate")
        ->capture_default_str();
    cmd->add_option("--delta", o.p.delta, "emitter-cavity detuning")->capture_default_str();
    cmd->add_flag("--single", o.single, "single-cavity system, collected from cavity 1");
    o.g_opt = cmd->add_option("--g", o.g, "alias for --g1 (requires --single)");
    o.kappa_opt = cmd->add_option("--kappa", o.kappa, "alias for --kappa1 (requires --single)");
    cmd->add_option("--out", o.out, "output path, or - for standard output")
        ->capture_default_str();
    cmd->set_config("--config", "", "flat key = value file; explicit flags override it");
}

void add_format(CLI::App* cmd, CommonOpts& o, const std::string& def,
                const std::vector<std::string>& allowed) {
    o.format = def;
    cmd->add_option("--format", o.format, "output format")
        ->transform(CLI::IsMember(allowed))
        ->capture_default_str();
}

// Resolve the single-cavity aliases and sanity-check their use. Full physical
// validation happens inside the library calls.
SystemParams finalize(const CommonOpts& o) {
    SystemParams p = o.p;
    const bool g_set = o.g_opt != nullptr && o.g_opt->count() > 0;
    const bool kappa_set = o.kappa_opt != nullptr && o.kappa_opt->count() > 0;
    if (!o.single && (g_set || kappa_set))
        throw InvalidParams("--g/--kappa are single-cavity aliases; pass --single or use --g1/--kappa1");
    if (o.single) {
        if (g_set) p.g1 = o.g;
        if (kappa_set) p.kappa1 = o.kappa;
        if (p.g2 != 0.0)
            throw InvalidParams("a single-cavity system has no second cavity; drop --g2");
    }
    return p;
}

void write_output(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::cout << content << std::flush;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InvalidParams("cannot open output file: " + path);
    f << content << std::flush;
    if (!f) throw InvalidParams("failed while writing output file: " + path);
}

// ---------------------------------------------------------------------------
// Flat config files
// ---------------------------------------------------------------------------

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Apply a flat `key = value` file to the parsed subcommand: keys are the long
// flag names, values feed the same parsing pipeline as flags, and anything
// already given on the command line wins over the file.
void apply_flat_config(CLI::App* cmd) {
    CLI::Option* cfg = cmd->get_config_ptr();
    if (cfg == nullptr || cfg->count() == 0) return;
    for (const std::string& path : cfg->as<std::vector<std::string>>()) {
        std::ifstream f(path);
        if (!f) throw InvalidParams("cannot open config file: " + path);
        std::string line;
        int lineno = 0;
        while (std::getline(f, line)) {
            ++lineno;
            const std::string s = trim(line);
            if (s.empty() || s[0] == '#' || s[0] == ';') continue;
            const auto where = [&] { return path + ":" + std::to_string(lineno); };
            const auto eq = s.find('=');
            if (eq == std::string::npos)
                throw InvalidParams("config " + where() + ": expected key = value");
            std::string key = trim(s.substr(0, eq));
            std::string value = trim(s.substr(eq + 1));
            if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') &&
                value.back() == value.front()) {
                value = value.substr(1, value.size() - 2);
            } else {
                for (std::size_t i = 1; i < value.size(); ++i) {
                    if (value[i] == '#' && (value[i - 1] == ' ' || value[i - 1] == '\t')) {
                        value = trim(value.substr(0, i));
                        break;
                    }
                }
            }
            if (key.empty()) throw InvalidParams("config " + where() + ": empty key");
            for (char& c : key)
                if (c == '_') c = '-';
            if (key == "config")
                throw InvalidParams("config " + where() + ": config files cannot nest");
            CLI::Option* op = cmd->get_option_no_throw("--" + key);
            if (op == nullptr)
                throw InvalidParams("config " + where() + ": unknown key '" + key + "'");
            if (op->count() > 0) continue;  // explicit flags override the file
            op->add_result(value);
            op->run_callback();
        }
    }
}

// ---------------------------------------------------------------------------
// Flag-value parsing helpers
// ---------------------------------------------------------------------------

double parse_double(const std::string& text, const char* what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw InvalidParams(std::string(what) + " is not a number: '" + text + "'");
    }
}

int parse_int(const std::string& text, const char* what) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw InvalidParams(std::string(what) + " is not an integer: '" + text + "'");
    }
}

// "name:min:max:n[:log|linear]" -> SweepAxis (grid validation happens later,
// inside axis_values).
SweepAxis parse_axis(const std::string& text) {
    std::vector<std::string> parts;
    std::string::size_type start = 0;
    while (true) {
        const auto pos = text.find(':', start);
        parts.push_back(text.substr(start, pos == std::string::npos ? std::string::npos
                                                                    : pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    if (parts.size() != 4 && parts.size() != 5)
        throw InvalidParams("axis spec must be name:min:max:n[:log|linear], got '" + text + "'");
    SweepAxis axis;
    axis.name = parts[0];
    if (axis.name.empty()) throw InvalidParams("axis spec has an empty parameter name");
    axis.min = parse_double(parts[1], "axis min");
    axis.max = parse_double(parts[2], "axis max");
    axis.n = parse_int(parts[3], "axis point count");
    if (parts.size() == 5) {
        if (parts[4] == "log")
            axis.log_scale = true;
        else if (parts[4] == "linear")
            axis.log_scale = false;
        else
            throw InvalidParams("axis scale must be 'log' or 'linear', got '" + parts[4] + "'");
    }
    return axis;
}

Evaluator to_evaluator(const std::string& name) {
    if (name == "master") return Evaluator::Master;
    if (name == "rate") return Evaluator::Rate;
    return Evaluator::Both;
}

Objective to_objective(const std::string& name) {
    if (name == "ind") return Objective::Ind;
    if (name == "eta") return Objective::Eta;
    return Objective::EtaInd;
}

// ---------------------------------------------------------------------------
// Subcommand runners
// ---------------------------------------------------------------------------

int run_simulate(const CommonOpts& o) {
    const SystemParams p = finalize(o);
    const EmissionReport rep = evaluate_point(p, o.single, Evaluator::Both);
    write_output(o.out, o.format == "csv" ? io::simulate_csv(rep) : io::simulate_json(rep));
    return 0;
}

struct SweepOpts {
    CommonOpts common;
    std::string axis1;
    std::string axis2;
    std::string evaluator = "both";
};

int run_sweep(const SweepOpts& o) {
    if (o.axis1.empty()) throw InvalidParams("sweep requires --axis1 (flag or config entry)");
    SweepRequest req;
    req.axis1 = parse_axis(o.axis1);
    if (!o.axis2.empty()) req.axis2 = parse_axis(o.axis2);
    req.evaluator = to_evaluator(o.evaluator);
    req.single = o.common.single;
    const SystemParams base = finalize(o.common);
    {
        // An unknown axis name is a usage error, not a per-point failure.
        SystemParams scratch = base;
        apply_parameter(scratch, req.axis1.name, req.axis1.min);
        if (req.axis2) apply_parameter(scratch, req.axis2->name, req.axis2->min);
    }
    const SweepResult result = run_sweep(base, req);
    write_output(o.common.out, io::sweep_csv(result));
    return result.degraded ? 4 : 0;
}

int run_compare(const CommonOpts& o) {
    if (o.single)
        throw InvalidParams("compare contrasts the three-population models of a cascaded system; --single is not supported");
    const SystemParams p = finalize(o);
    const PopulationTrace trace = propagate(p);
    const RateTrace rate = rate_propagate(build_rate_model(p), trace.times);
    write_output(o.out, io::compare_csv(trace, rate));
    return 0;
}

struct DiffusionOpts {
    CommonOpts common;
    std::vector<double> fwhm;
    int nodes = 15;
};

int run_diffusion(const DiffusionOpts& o) {
    if (o.fwhm.empty()) throw InvalidParams("diffusion requires --fwhm (flag or config entry)");
    const SystemParams p = finalize(o.common);
    const Mode mode = o.common.single ? Mode::CavityOne : Mode::CavityTwo;
    const EnsembleReport base =
        ensemble_evaluate(p, DiffusionSpec{.fwhm = 0.0, .n_nodes = o.nodes}, mode);
    std::vector<io::DiffusionRow> rows;
    rows.reserve(o.fwhm.size());
    for (const double fwhm : o.fwhm) {
        const EnsembleReport rep =
            ensemble_evaluate(p, DiffusionSpec{.fwhm = fwhm, .n_nodes = o.nodes}, mode);
        rows.push_back({fwhm, rep.efficiency, rep.indistinguishability});
    }
    write_output(o.common.out, io::diffusion_csv(rows, base.efficiency, base.indistinguishability));
    return 0;
}

struct OptimizeOpts {
    CommonOpts common;
    OptimizeRequest req;
    std::string objective = "eta_ind";
    double q1_max = 0.0;
    double q2_max = 0.0;
    double omega = 4e14;
    double gamma_lab = 1.6e8;
    CLI::Option* q1_opt = nullptr;
    CLI::Option* q2_opt = nullptr;
    CLI::Option* k1min_opt = nullptr;
    CLI::Option* k2min_opt = nullptr;
};

int run_optimize(OptimizeOpts& o) {
    if (o.common.single)
        throw InvalidParams("optimize searches the two-cavity box; --single is not supported");
    o.req.base = finalize(o.common);
    o.req.objective = to_objective(o.objective);
    // A quality-factor cap is a lower bound on the normalized leak rate; an
    // explicit --kappaN-min overrides the derived bound.
    if (o.q1_opt->count() > 0 && o.k1min_opt->count() == 0)
        o.req.kappa1_min = q_to_kappa({o.q1_max, o.omega, o.gamma_lab});
    if (o.q2_opt->count() > 0 && o.k2min_opt->count() == 0)
        o.req.kappa2_min = q_to_kappa({o.q2_max, o.omega, o.gamma_lab});
    const OptimizeResult res = optimize(o.req);
    write_output(o.common.out, io::optimize_json(o.req, res, o.objective));
    return 0;
}

struct ConvertOpts {
    double q = 0.0;
    double kappa = 0.0;
    double omega = 0.0;
    double gamma_lab = 0.0;
    std::string out = "-";
    std::string format = "json";
    CLI::Option* q_opt = nullptr;
    CLI::Option* kappa_opt = nullptr;
};

int run_convert(const ConvertOpts& o) {
    if (o.q_opt->count() > 0) {
        const QFactorSpec spec{o.q, o.omega, o.gamma_lab};
        validate(spec);
        write_output(o.out, io::convert_json(o.q, o.omega, o.gamma_lab, q_to_kappa(spec)));
    } else if (o.kappa_opt->count() > 0) {
        if (!(o.kappa > 0.0) || !std::isfinite(o.kappa))
            throw InvalidParams("kappa must be positive and finite");
        validate(QFactorSpec{1.0, o.omega, o.gamma_lab});
        const double q = kappa_to_q(o.kappa, o.omega, o.gamma_lab);
        write_output(o.out, io::convert_json(q, o.omega, o.gamma_lab, o.kappa));
    } else {
        throw InvalidParams("convert needs exactly one of --q or --kappa");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Explorer for single-photon emission from a dephasing emitter in a cascaded two-cavity chain"};
    app.require_subcommand(1);

    CommonOpts sim_opts;
    CLI::App* sim = app.add_subcommand(
        "simulate", "evaluate one parameter point (exact and closed-form observables)");
    add_params(sim, sim_opts);
    add_format(sim, sim_opts, "json", {"json", "csv"});

    SweepOpts sweep_opts;
    CLI::App* sweep = app.add_subcommand("sweep", "evaluate a 1D or 2D parameter grid as CSV");
    add_params(sweep, sweep_opts.common);
    add_format(sweep, sweep_opts.common, "csv", {"csv"});
    sweep->add_option("--axis1", sweep_opts.axis1, "first axis, name:min:max:n[:log|linear]");
    sweep->add_option("--axis2", sweep_opts.axis2, "optional second axis, same form");
    sweep->add_option("--evaluator", sweep_opts.evaluator, "which solvers to run per point")
        ->transform(CLI::IsMember({"master", "rate", "both"}))
        ->capture_default_str();

    CommonOpts compare_opts;
    CLI::App* compare = app.add_subcommand(
        "compare", "time traces of the exact populations next to the rate-model ones (CSV)");
    add_params(compare, compare_opts);
    add_format(compare, compare_opts, "csv", {"csv"});

    DiffusionOpts diffusion_opts;
    CLI::App* diffusion = app.add_subcommand(
        "diffusion", "ensemble observables under Gaussian detuning diffusion (CSV)");
    add_params(diffusion, diffusion_opts.common);
    add_format(diffusion, diffusion_opts.common, "csv", {"csv"});
    diffusion->add_option("--fwhm", diffusion_opts.fwhm,
                          "comma-separated detuning-distribution FWHM values")
        ->delimiter(',');
    diffusion->add_option("--nodes", diffusion_opts.nodes, "quadrature nodes per ensemble")
        ->capture_default_str();

    OptimizeOpts optimize_opts;
    CLI::App* opt = app.add_subcommand(
        "optimize", "search the (kappa1, g2, kappa2) box for the best emission figure of merit");
    add_params(opt, optimize_opts.common);
    add_format(opt, optimize_opts.common, "json", {"json"});
    opt->add_option("--objective", optimize_opts.objective, "figure of merit to maximize")
        ->transform(CLI::IsMember({"eta_ind", "ind", "eta"}))
        ->capture_default_str();
    optimize_opts.k1min_opt =
        opt->add_option("--kappa1-min", optimize_opts.req.kappa1_min)->capture_default_str();
    opt->add_option("--kappa1-max", optimize_opts.req.kappa1_max)->capture_default_str();
    opt->add_option("--g2-min", optimize_opts.req.g2_min)->capture_default_str();
    opt->add_option("--g2-max", optimize_opts.req.g2_max)->capture_default_str();
    optimize_opts.k2min_opt =
        opt->add_option("--kappa2-min", optimize_opts.req.kappa2_min)->capture_default_str();
    opt->add_option("--kappa2-max", optimize_opts.req.kappa2_max)->capture_default_str();
    optimize_opts.q1_opt = opt->add_option(
        "--q1-max", optimize_opts.q1_max, "cavity-1 quality-factor cap (sets --kappa1-min)");
    optimize_opts.q2_opt = opt->add_option(
        "--q2-max", optimize_opts.q2_max, "cavity-2 quality-factor cap (sets --kappa2-min)");
    opt->add_option("--omega", optimize_opts.omega, "optical frequency for Q conversion")
        ->capture_default_str();
    opt->add_option("--gamma-lab", optimize_opts.gamma_lab,
                    "laboratory emitter decay rate for Q conversion")
        ->capture_default_str();

    ConvertOpts convert_opts;
    CLI::App* convert = app.add_subcommand(
        "convert", "convert between a cavity quality factor and a normalized leak rate");
    convert_opts.q_opt = convert->add_option("--q", convert_opts.q, "quality factor");
    convert_opts.kappa_opt =
        convert->add_option("--kappa", convert_opts.kappa, "normalized leak rate");
    convert_opts.q_opt->excludes(convert_opts.kappa_opt);
    convert_opts.kappa_opt->excludes(convert_opts.q_opt);
    convert->add_option("--omega", convert_opts.omega, "optical frequency (same unit as --gamma-lab)")
        ->required();
    convert->add_option("--gamma-lab", convert_opts.gamma_lab,
                        "emitter decay rate in laboratory units")
        ->required();
    convert->add_option("--out", convert_opts.out, "output path, or - for standard output")
        ->capture_default_str();
    convert->add_option("--format", convert_opts.format, "output format")
        ->transform(CLI::IsMember({"json"}))
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) {
            apply_flat_config(sim);
            return run_simulate(sim_opts);
        }
        if (sweep->parsed()) {
            apply_flat_config(sweep);
            return run_sweep(sweep_opts);
        }
        if (compare->parsed()) {
            apply_flat_config(compare);
            return run_compare(compare_opts);
        }
        if (diffusion->parsed()) {
            apply_flat_config(diffusion);
            return run_diffusion(diffusion_opts);
        }
        if (opt->parsed()) {
            apply_flat_config(opt);
            return run_optimize(optimize_opts);
        }
        if (convert->parsed()) return run_convert(convert_opts);
    } catch (const InvalidParams& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const InfeasibleRegion& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const NumericsError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
