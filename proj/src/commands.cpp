#include <charconv>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "aprobe/config.hpp"
#include "aprobe/parallel.hpp"

namespace aprobe {

namespace {

using nlohmann::json;

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

struct Table {
    std::string command;
    std::vector<std::string> columns;
    std::vector<std::vector<json>> rows;

    std::string to_csv() const {
        std::string out = "# schema=1\n";
        for (size_t i = 0; i < columns.size(); ++i) {
            out += columns[i];
            out += (i + 1 < columns.size()) ? ',' : '\n';
        }
        for (const auto& row : rows) {
            for (size_t i = 0; i < row.size(); ++i) {
                const json& cell = row[i];
                if (cell.is_null()) {
                    // empty cell
                } else if (cell.is_string()) {
                    out += cell.get<std::string>();
                } else if (cell.is_boolean()) {
                    out += cell.get<bool>() ? "true" : "false";
                } else if (cell.is_number_integer()) {
                    out += std::to_string(cell.get<long long>());
                } else {
                    out += format_double(cell.get<double>());
                }
                out += (i + 1 < row.size()) ? ',' : '\n';
            }
        }
        return out;
    }

    std::string to_json() const {
        json doc;
        doc["schema"] = 1;
        doc["command"] = command;
        doc["columns"] = columns;
        doc["rows"] = rows;
        return doc.dump(1) + "\n";
    }
};

void write_table(const Table& table, const ExperimentConfig& cfg, const std::string& out_path) {
    std::string path = !out_path.empty() ? out_path : cfg.out_path;
    if (path.empty())
        path = table.command + (cfg.format == OutputFormat::csv ? ".csv" : ".json");
    std::ofstream file(path, std::ios::binary);
    if (!file) throw ConfigError("cannot open output file '" + path + "' for writing");
    file << (cfg.format == OutputFormat::csv ? table.to_csv() : table.to_json());
    if (!file.good()) throw ConfigError("failed writing output file '" + path + "'");
}

json num_or_null(double v) {
    return std::isfinite(v) ? json(v) : json();
}

Table cmd_ratio_curve(const ExperimentConfig& cfg) {
    if (cfg.sweep.parameter != "np")
        throw ConfigError("ratio-curve needs sweep.parameter = \"np\" with the photon numbers");
    for (double np : cfg.sweep.values)
        if (np < 0.0 || np > 35.0)
            throw ConfigError("ratio-curve sweep values must lie in [0, 35]; larger photon "
                              "numbers are closed-form-only (use qfi-table)");

    Table table;
    table.command = "ratio-curve";
    table.columns = {"np", "kind", "phi_star", "fi", "qfi", "ratio"};
    struct Row {
        double np, phi, fi, qfi;
        Kind kind;
    };
    std::vector<Row> rows(cfg.sweep.values.size() * cfg.kinds.size());
    parallel_for(static_cast<int>(rows.size()), cfg.threads, [&](int idx) {
        const size_t ki = idx % cfg.kinds.size();
        const size_t ni = idx / cfg.kinds.size();
        ProtocolParams p = cfg.params;
        p.alpha = std::sqrt(cfg.sweep.values[ni]);
        p.dim_c = 0;  // re-derive the truncation per point
        Row row;
        row.np = cfg.sweep.values[ni];
        row.kind = cfg.kinds[ki];
        if (cfg.optimize_phi) {
            const auto [phi, fi] = optimize_phase(p, row.kind, 24);
            row.phi = phi;
            row.fi = fi;
        } else {
            MeasurementConfig m = cfg.measurement;
            row.phi = m.phi;
            row.fi = fisher_homodyne(m, p, row.kind);
        }
        row.qfi = qfi_numeric(p, row.kind);
        rows[idx] = row;
    });
    for (const Row& r : rows)
        table.rows.push_back({r.np, kind_name(r.kind), r.phi, r.fi, r.qfi,
                              r.qfi > 0.0 ? json(r.fi / r.qfi) : json()});
    return table;
}

Table cmd_validate_map(const ExperimentConfig& cfg) {
    Table table;
    table.command = "validate-map";
    table.columns = {"kind",
                     "strength",
                     "fidelity_deficit",
                     "field_purity",
                     "mech_return_fidelity",
                     "joint_trace",
                     "deficit_ratio_to_half"};
    struct Job {
        Kind kind;
        double strength;
    };
    std::vector<Job> jobs;
    for (Kind kind : cfg.kinds) {
        const double base = cfg.params.strength(kind);
        if (!(base > 0.0))
            throw ConfigError(std::string("validate-map: params.") +
                              (kind == Kind::quartic ? "gamma" : "delta") +
                              " must be positive for kind " + kind_name(kind));
        for (double s : {base, base / 2.0, base / 4.0, 0.0}) jobs.push_back({kind, s});
    }
    std::vector<std::array<double, 4>> results(jobs.size());
    RunOptions opts;
    opts.max_joint_dim = cfg.max_joint_dim;
    parallel_for(static_cast<int>(jobs.size()), cfg.threads, [&](int i) {
        ProtocolParams p = cfg.params;
        if (jobs[i].kind == Kind::quartic)
            p.gamma = jobs[i].strength;
        else
            p.delta = jobs[i].strength;
        const ProtocolRun run = run_protocol(p, jobs[i].kind, opts);
        results[i] = {1.0 - run.diagnostics.at("fidelity_vs_effective_map"),
                      run.diagnostics.at("field_purity"),
                      run.diagnostics.at("mech_return_fidelity"),
                      run.diagnostics.at("joint_trace")};
    });
    for (size_t i = 0; i < jobs.size(); ++i) {
        json ratio;
        if (i + 1 < jobs.size() && jobs[i + 1].kind == jobs[i].kind &&
            jobs[i].strength > 0.0 && jobs[i + 1].strength > 0.0 &&
            results[i + 1][0] != 0.0)
            ratio = results[i][0] / results[i + 1][0];
        table.rows.push_back({kind_name(jobs[i].kind), jobs[i].strength, results[i][0],
                              results[i][1], results[i][2], results[i][3], ratio});
    }
    return table;
}

Table cmd_qfi_table(const ExperimentConfig& cfg) {
    const std::vector<double> lambdas =
        cfg.qfi_table.lambdas.empty() ? std::vector<double>{cfg.params.lambda}
                                      : cfg.qfi_table.lambdas;
    const std::vector<double> nps =
        cfg.qfi_table.nps.empty() ? std::vector<double>{cfg.params.np()} : cfg.qfi_table.nps;
    const std::vector<double> ms =
        cfg.qfi_table.ms.empty() ? std::vector<double>{1e4} : cfg.qfi_table.ms;
    for (double m : ms)
        if (m < 1.0) throw ConfigError("qfi_table.ms entries must be >= 1");

    Table table;
    table.command = "qfi-table";
    table.columns = {"kind",       "lambda",      "np",  "m",   "strength",
                     "qfi_closed", "qfi_numeric", "crb", "snr"};
    for (double lambda : lambdas)
        for (double np : nps)
            for (Kind kind : cfg.kinds) {
                const double qfi = kind == Kind::quartic ? qfi_quartic_closed(lambda, np)
                                                         : qfi_cubic_closed(lambda, np);
                json qfi_num;
                if (np <= kSamplingNpCap) {
                    ProtocolParams p = cfg.params;
                    p.lambda = lambda;
                    p.alpha = std::sqrt(np);
                    p.dim_c = 0;
                    p.nbar = 0.0;  // closed forms hold in the cold limit
                    qfi_num = qfi_numeric(p, kind);
                }
                const double strength = cfg.params.strength(kind);
                for (double m : ms) {
                    const json crb = qfi > 0.0 ? json(1.0 / (m * qfi)) : json();
                    table.rows.push_back({kind_name(kind), lambda, np, m, strength, qfi, qfi_num,
                                          crb, snr_bound(strength, qfi, m)});
                }
            }
    return table;
}

Table cmd_estimate(const ExperimentConfig& cfg) {
    Table table;
    table.command = "estimate";
    table.columns = {"kind",  "record",     "index",  "value", "std_error", "tau",
                     "visibility", "statistic", "fisher", "ci_lo", "ci_hi", "phi", "converged"};
    const json none;
    for (Kind kind : cfg.kinds) {
        const double strength = cfg.params.strength(kind);
        std::pair<double, double> bracket = cfg.estimate.bracket;
        if (bracket.first == 0.0 && bracket.second == 0.0) {
            if (!(strength > 0.0))
                throw ConfigError("estimate: set a bracket or a positive anharmonicity");
            bracket = {strength / 10.0, strength * 10.0};
        }
        const SaturationReport sat =
            crb_saturation_experiment(cfg.params, kind, cfg.estimate.m_per_repeat,
                                      cfg.estimate.repeats, cfg.seed, std::nullopt, cfg.threads);
        for (int r = 0; r < sat.n_repeats; ++r)
            table.rows.push_back({kind_name(kind), "repeat", r, sat.estimates[r], none, none,
                                  none, none, none, none, none, none, none});
        table.rows.push_back({kind_name(kind), "saturation", 0, sat.variance, none, none, none,
                              sat.statistic, sat.fisher, sat.ci_lo, sat.ci_hi, sat.phi, none});

        const auto trace = adaptive_closure(cfg.params, kind, cfg.estimate.rounds,
                                            cfg.estimate.m_per_round, cfg.seed, bracket,
                                            RunOptions{0.0, false, cfg.max_joint_dim});
        for (const ClosureRound& round : trace)
            table.rows.push_back({kind_name(kind), "round", round.round, round.gamma_hat,
                                  round.std_error, round.tau, round.visibility, none, none, none,
                                  none, none, round.converged});
    }
    return table;
}

Table cmd_losses(const ExperimentConfig& cfg) {
    if (cfg.sweep.parameter != "epsilon")
        throw ConfigError("losses needs sweep.parameter = \"epsilon\" with the loss fractions");
    for (double eps : cfg.sweep.values)
        if (eps < 0.0 || eps >= 1.0) throw ConfigError("loss fractions must lie in [0, 1)");

    Table table;
    table.command = "losses";
    table.columns = {"kind",
                     "epsilon",
                     "purity_harmonic",
                     "purity_anharmonic",
                     "harm_coeff_predicted",
                     "harm_coeff_extracted",
                     "harm_coeff_error",
                     "harm_modulus_error",
                     "anharmonic_phase",
                     "anharmonic_phase_rel_change",
                     "mech_return_fidelity"};
    RunOptions opts;
    opts.max_joint_dim = cfg.max_joint_dim;
    for (Kind kind : cfg.kinds) {
        const auto rows = loss_sweep(cfg.params, kind, cfg.sweep.values, opts);
        const LossRow* baseline = nullptr;
        for (const auto& row : rows)
            if (row.epsilon == 0.0) baseline = &row;
        for (const auto& row : rows) {
            json rel;
            if (baseline && baseline->anharmonic_phase != 0.0)
                rel = std::abs(row.anharmonic_phase / baseline->anharmonic_phase - 1.0);
            table.rows.push_back({kind_name(kind), row.epsilon, row.purity_harmonic,
                                  row.purity_anharmonic, row.harm_coeff_predicted,
                                  row.harm_coeff_extracted, row.harm_coeff_error,
                                  num_or_null(row.harm_modulus_error), row.anharmonic_phase, rel,
                                  row.mech_return_fidelity});
        }
    }
    return table;
}

}  // namespace

void run_command(const std::string& command, const ExperimentConfig& cfg,
                 const std::string& out_path) {
    Table table;
    if (command == "ratio-curve")
        table = cmd_ratio_curve(cfg);
    else if (command == "validate-map")
        table = cmd_validate_map(cfg);
    else if (command == "qfi-table")
        table = cmd_qfi_table(cfg);
    else if (command == "estimate")
        table = cmd_estimate(cfg);
    else if (command == "losses")
        table = cmd_losses(cfg);
    else
        throw ConfigError("unknown command '" + command + "'");
    write_table(table, cfg, out_path);
}

}  // namespace aprobe
