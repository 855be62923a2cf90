#pragma once

// Command-line front end: evolve | qsl | sweep | check.
// Exit codes: 0 success, 1 validation error, 2 numerical failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sqsl/check.hpp"
#include "sqsl/dynamics.hpp"
#include "sqsl/errors.hpp"
#include "sqsl/qsl.hpp"
#include "sqsl/sweep.hpp"

namespace sqsl {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumerical = 2;

namespace detail {

struct CliState {
    std::map<std::string, std::string> flags;  // config keys given on the command line
    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 20221;
};

inline void add_key_options(CLI::App* app, CliState& st) {
    for (const auto& key : config_keys()) {
        app->add_option_function<std::string>(
            "--" + key, [&st, key](const std::string& v) { st.flags[key] = v; },
            "override config key '" + key + "'");
    }
    app->add_option("--config", st.config_path, "flat key = value config file");
    app->add_option("--out", st.out_path, "write CSV here instead of stdout");
}

inline SweepSpec build_spec(const CliState& st) {
    std::vector<ConfigEntry> overrides;
    for (const auto& [k, v] : st.flags) overrides.push_back({k, v, 0});

    std::vector<ConfigEntry> file_entries;
    if (!st.config_path.empty()) {
        std::ifstream in(st.config_path);
        if (!in) throw ConfigError("cannot open config file '" + st.config_path + "'");
        file_entries = parse_config(in);
    }
    auto given = [&](const std::string& key) {
        for (const auto& e : file_entries) if (e.key == key) return true;
        return st.flags.count(key) > 0;
    };
    // An explicit delta_c only means something without the Delta_s = 3 g_s
    // constraint, so it switches the default mode to free.
    std::vector<ConfigEntry> pre;
    if (given("delta_c") && !given("constraint_mode")) pre.push_back({"constraint_mode", "free", 0});

    SweepSpec s;
    for (const auto& e : pre) apply_setting(s, e.key, e.value);
    for (const auto& e : file_entries) {
        try {
            apply_setting(s, e.key, e.value);
        } catch (const ConfigError& err) {
            throw ConfigError(st.config_path + ":" + std::to_string(e.line) + ": " + err.message());
        }
    }
    for (const auto& e : overrides) apply_setting(s, e.key, e.value);
    return s;
}

inline SystemParams single_point(const SweepSpec& s) {
    return resolve_point(s, field_of(s.base, s.variable), std::nullopt);
}

class Output {
public:
    Output(const std::string& path, std::ostream& fallback) : os_(&fallback) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw ConfigError("cannot open output file '" + path + "'");
            os_ = &file_;
        }
    }
    std::ostream& stream() { return *os_; }

private:
    std::ofstream file_;
    std::ostream* os_;
};

inline int run_evolve(const CliState& st, std::ostream& out, std::ostream& err) {
    const SweepSpec s = build_spec(st);
    const SystemParams p = single_point(s);
    Trajectory tr;
    if (s.engine == EngineChoice::both) throw ConfigError("engine = both is not valid for evolve");
    if (s.engine == EngineChoice::analytic) {
        tr = analytic_trajectory(p, s.steps);
    } else {
        tr = evolve_master(p, s.cutoff, s.steps, {.record_full = false});
        err << "cutoff " << tr.fock_cutoff << ", cutoff-check trace distance "
            << tr.cutoff_check_distance.value_or(0.0) << ", max trace error " << tr.max_trace_error() << '\n';
    }
    Output o(st.out_path, out);
    write_trajectory_csv(o.stream(), tr);
    return kExitOk;
}

inline int run_qsl(const CliState& st, std::ostream& out, std::ostream& err) {
    const SweepSpec s = build_spec(st);
    validate(s.base);
    if (s.engine != EngineChoice::master && s.base.alpha != 0.0) {
        throw ConfigError("engine = analytic/both requires alpha = 0");
    }
    const SystemParams p = single_point(s);
    std::vector<SweepRow> rows;
    if (s.engine != EngineChoice::master) rows.push_back(evaluate_point(p, Engine::analytic, s.cutoff, s.steps));
    if (s.engine != EngineChoice::analytic) rows.push_back(evaluate_point(p, Engine::master, s.cutoff, s.steps));
    int code = kExitOk;
    for (auto& r : rows) {
        r.var1 = field_of(p, s.variable);
        if (r.flag == "frozen") err << to_string(r.engine) << ": FrozenDynamics (state does not move; t_qsl = 0)\n";
        if (r.flag.starts_with("error:")) {
            err << to_string(r.engine) << ": " << r.flag << '\n';
            code = kExitNumerical;
        }
    }
    Output o(st.out_path, out);
    write_sweep_csv(o.stream(), rows);
    return code;
}

inline int run_sweep_cmd(const CliState& st, std::ostream& out, std::ostream& err) {
    const SweepSpec s = build_spec(st);
    const auto rows = run_sweep(s);
    std::size_t failed = 0;
    for (const auto& r : rows) failed += r.flag.starts_with("error:");
    Output o(st.out_path, out);
    write_sweep_csv(o.stream(), rows);
    if (failed) {
        err << failed << " of " << rows.size() << " rows failed (see flag column)\n";
        return kExitNumerical;
    }
    return kExitOk;
}

inline int run_check_cmd(const CliState& st, std::ostream& out) {
    const auto results = run_invariant_checks(st.seed);
    bool all = true;
    for (const auto& r : results) {
        out << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << r.detail << ")\n";
        all = all && r.passed;
    }
    out << (all ? "all invariants hold" : "invariant failures detected") << " [seed " << st.seed << "]\n";
    return all ? kExitOk : kExitNumerical;
}

}  // namespace detail

inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
    CLI::App app{"Quantum speed limit of a two-level atom in a squeezed cavity mode"};
    app.require_subcommand(1);
    detail::CliState st;

    auto* evolve = app.add_subcommand("evolve", "one trajectory -> trajectory CSV");
    auto* qsl = app.add_subcommand("qsl", "one parameter point -> QSL result row");
    auto* sweep = app.add_subcommand("sweep", "parameter sweep -> sweep CSV");
    auto* check = app.add_subcommand("check", "run the built-in invariant suite");
    for (auto* sc : {evolve, qsl, sweep}) detail::add_key_options(sc, st);
    check->add_option("--seed", st.seed, "seed for randomized sampling");
    for (auto* sc : {evolve, qsl, sweep}) sc->add_option("--seed", st.seed, "seed (unused: runs are deterministic)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o, eo;
        const int code = app.exit(e, o, eo);
        out << o.str();
        err << eo.str();
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (*evolve) return detail::run_evolve(st, out, err);
        if (*qsl) return detail::run_qsl(st, out, err);
        if (*sweep) return detail::run_sweep_cmd(st, out, err);
        if (*check) return detail::run_check_cmd(st, out);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitValidation;
}

}  // namespace sqsl
