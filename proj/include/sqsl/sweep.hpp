#pragma once

// Parameter sweeps over the squeezed-cavity model, their flat key = value
// configuration, and the CSV row format shared with the single-point CLI.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "sqsl/dynamics.hpp"
#include "sqsl/errors.hpp"
#include "sqsl/model.hpp"
#include "sqsl/qsl.hpp"

namespace sqsl {

enum class Variable { delta_a, delta_c, r_p, g, alpha };
enum class ConstraintMode { free, fig2_constrained };
enum class ReservoirMode { matched, fixed };
enum class EngineChoice { analytic, master, both };

struct GridRange {
    double start = 0.0;
    double stop = 1.0;
    std::size_t points = 2;

    /// Inclusive endpoints, uniform spacing.
    double at(std::size_t i) const {
        if (i + 1 == points) return stop;
        return start + (stop - start) * static_cast<double>(i) / static_cast<double>(points - 1);
    }
};

struct SweepSpec {
    Variable variable = Variable::delta_a;
    GridRange range{-10.0, 10.0, 201};
    std::optional<Variable> second_variable;
    GridRange second_range{0.0, std::numbers::pi / 2.0, 101};
    ConstraintMode constraint_mode = ConstraintMode::fig2_constrained;
    // matched: the reservoir squeezing follows the pump (r_e = r_p,
    // theta_e = pi - theta_p), which cancels the squeezed-bath noise.
    ReservoirMode reservoir = ReservoirMode::matched;
    EngineChoice engine = EngineChoice::master;
    SystemParams base{};
    std::size_t cutoff = 0;  // 0: default_cutoff per point
    std::size_t steps = kDefaultSteps;
    std::size_t workers = 0;  // 0: hardware concurrency
};

struct SweepRow {
    std::size_t index = 0;
    double var1 = 0.0;
    std::optional<double> var2;
    DerivedParams derived{};
    Engine engine = Engine::master;
    std::optional<QslResult> qsl;
    std::size_t cutoff = 0;
    std::size_t steps = 0;
    double trace_err = 0.0;
    // Master route only; not part of the CSV.
    double hermiticity_err = 0.0;
    double min_eig = 0.0;
    std::string flag;
};

inline const char* to_string(Variable v) {
    switch (v) {
        case Variable::delta_a: return "delta_a";
        case Variable::delta_c: return "delta_c";
        case Variable::r_p: return "r_p";
        case Variable::g: return "g";
        case Variable::alpha: return "alpha";
    }
    return "?";
}

inline std::optional<Variable> parse_variable(std::string_view s) {
    for (Variable v : {Variable::delta_a, Variable::delta_c, Variable::r_p, Variable::g, Variable::alpha}) {
        if (s == to_string(v)) return v;
    }
    return std::nullopt;
}

inline double& field_of(SystemParams& p, Variable v) {
    switch (v) {
        case Variable::delta_a: return p.delta_a;
        case Variable::delta_c: return p.delta_c;
        case Variable::r_p: return p.r_p;
        case Variable::g: return p.g;
        case Variable::alpha: return p.alpha;
    }
    return p.delta_a;
}

inline double field_of(const SystemParams& p, Variable v) {
    return field_of(const_cast<SystemParams&>(p), v);
}

/// Delta_c = 3 g_s / sqrt(1 - beta^2), i.e. Delta_s = 3 g_s.
inline double fig2_delta_c(double g, double r_p) {
    return 3.0 * g * std::cosh(r_p) * std::cosh(2.0 * r_p);
}

inline bool sweeps(const SweepSpec& s, Variable v) {
    return s.variable == v || (s.second_variable && *s.second_variable == v);
}

inline void validate(const SweepSpec& s) {
    auto check_range = [](const GridRange& r, const char* what) {
        if (r.points < 2) throw ConfigError(std::string(what) + "points must be >= 2");
        if (!(r.start < r.stop)) throw ConfigError(std::string(what) + "start must be < " + what + "stop");
    };
    check_range(s.range, "");
    if (s.second_variable) {
        check_range(s.second_range, "second_");
        if (*s.second_variable == s.variable) throw ConfigError("second_variable must differ from variable");
    }
    if (s.steps < 100) throw ConfigError("steps must be >= 100");
    if (s.constraint_mode == ConstraintMode::fig2_constrained && sweeps(s, Variable::delta_c)) {
        throw ConfigError("constraint_mode = fig2_constrained fixes delta_c; use free to sweep it");
    }
    if (s.engine != EngineChoice::master && (s.base.alpha != 0.0 || sweeps(s, Variable::alpha))) {
        throw ConfigError("engine = analytic/both requires alpha = 0 over the whole sweep");
    }
}

/// Physical parameters at one grid point, with the constraint and
/// reservoir modes applied.
inline SystemParams resolve_point(const SweepSpec& s, double v1, std::optional<double> v2) {
    SystemParams p = s.base;
    field_of(p, s.variable) = v1;
    if (s.second_variable && v2) field_of(p, *s.second_variable) = *v2;
    if (s.constraint_mode == ConstraintMode::fig2_constrained) {
        // Delta_a is quoted in units of the swept coupling (Delta_a = 2g).
        if (!sweeps(s, Variable::delta_a)) p.delta_a = s.base.delta_a * p.g / s.base.g;
        p.delta_c = fig2_delta_c(p.g, p.r_p);
    }
    if (s.reservoir == ReservoirMode::matched) {
        p.r_e = p.r_p;
        p.theta_e = std::numbers::pi - p.theta_p;
    }
    return p;
}

/// Evaluates one parameter point with one engine. Library errors are caught
/// and recorded in the row's flag.
inline SweepRow evaluate_point(const SystemParams& p, Engine engine, std::size_t cutoff, std::size_t steps) {
    SweepRow row;
    row.engine = engine;
    row.steps = steps;
    try {
        validate(p);
        row.derived = derive(p);
        if (engine == Engine::analytic) {
            const Trajectory tr = analytic_trajectory(p, steps);
            row.trace_err = 1.0 - tr.rho_atom.back().trace().real();
            row.qsl = qsl_time(tr);
        } else {
            const std::size_t cut = cutoff == 0 ? default_cutoff(row.derived) : cutoff;
            row.cutoff = cut;
            const Trajectory tr = evolve_master(p, cut, steps, {.record_full = false});
            row.trace_err = tr.max_trace_error();
            row.hermiticity_err = std::ranges::max(tr.hermiticity_error);
            row.min_eig = std::ranges::min(tr.min_eigenvalue);
            row.qsl = qsl_time(tr);
        }
        if (row.qsl->frozen) row.flag = "frozen";
    } catch (const Error& e) {
        row.qsl.reset();
        row.flag = "error:" + e.kind();
    }
    return row;
}

/// Runs every grid point (var1 outer, var2 inner) on a bounded worker pool.
/// Rows come back in grid-index order, engines in (analytic, master) order.
inline std::vector<SweepRow> run_sweep(const SweepSpec& s) {
    validate(s);
    const std::size_t n1 = s.range.points;
    const std::size_t n2 = s.second_variable ? s.second_range.points : 1;
    const std::size_t total = n1 * n2;

    std::vector<Engine> engines;
    if (s.engine != EngineChoice::master) engines.push_back(Engine::analytic);
    if (s.engine != EngineChoice::analytic) engines.push_back(Engine::master);

    std::vector<SweepRow> rows(total * engines.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t idx = next++; idx < total; idx = next++) {
            const std::size_t i1 = idx / n2, i2 = idx % n2;
            const double v1 = s.range.at(i1);
            const std::optional<double> v2 =
                s.second_variable ? std::optional<double>(s.second_range.at(i2)) : std::nullopt;
            const SystemParams p = resolve_point(s, v1, v2);
            for (std::size_t e = 0; e < engines.size(); ++e) {
                SweepRow row = evaluate_point(p, engines[e], s.cutoff, s.steps);
                row.index = idx;
                row.var1 = v1;
                row.var2 = v2;
                rows[idx * engines.size() + e] = std::move(row);
            }
        }
    };

    std::size_t workers = s.workers ? s.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, total);
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// CSV

inline constexpr std::string_view kSweepCsvHeader =
    "index,var1,var2,beta,g_s,delta_s,n_s,abs_m_s,engine,bures,lambda_op,lambda_tr,lambda_hs,"
    "t_op,t_tr,t_hs,t_qsl,cutoff,steps,trace_err,flag";

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_sweep_header(std::ostream& os) { os << kSweepCsvHeader << '\n'; }

inline void write_sweep_row(std::ostream& os, const SweepRow& r) {
    const auto f = [](double v) { return std::isfinite(v) ? format_double(v) : std::string{}; };
    os << r.index << ',' << f(r.var1) << ',' << (r.var2 ? f(*r.var2) : std::string{}) << ','
       << f(r.derived.beta) << ',' << f(r.derived.g_s) << ',' << f(r.derived.delta_s) << ','
       << f(r.derived.n_s) << ',' << f(std::abs(r.derived.m_s)) << ',' << to_string(r.engine);
    if (r.qsl) {
        const QslResult& q = *r.qsl;
        for (double v : {q.bures, q.lambda_op, q.lambda_tr, q.lambda_hs, q.t_op, q.t_tr, q.t_hs, q.t_qsl}) {
            os << ',' << f(v);
        }
    } else {
        os << ",,,,,,,,";
    }
    os << ',' << r.cutoff << ',' << r.steps << ',' << f(r.trace_err) << ',' << r.flag << '\n';
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    write_sweep_header(os);
    for (const auto& r : rows) write_sweep_row(os, r);
}

// ---------------------------------------------------------------------------
// Configuration: flat "key = value" lines, '#' starts a comment.

struct ConfigEntry {
    std::string key;
    std::string value;
    int line = 0;
};

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<ConfigEntry> parse_config(std::istream& in) {
    std::vector<ConfigEntry> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value, got '" + t + "'");
        }
        ConfigEntry e{trim(std::string_view(t).substr(0, eq)), trim(std::string_view(t).substr(eq + 1)), lineno};
        if (e.key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        out.push_back(std::move(e));
    }
    return out;
}

namespace detail {

inline double parse_number(const std::string& key, const std::string& v, const std::string& range) {
    double x = 0.0;
    const char* b = v.data();
    const char* e = v.data() + v.size();
    std::string_view sv(v);
    // Accept "pi", "pi/2", "-pi/4" for phase-like keys.
    if (sv == "pi" || sv == "-pi" || sv.starts_with("pi/") || sv.starts_with("-pi/")) {
        const bool neg = sv.front() == '-';
        if (neg) sv.remove_prefix(1);
        double div = 1.0;
        if (sv.size() > 3) {
            const auto r = std::from_chars(sv.data() + 3, sv.data() + sv.size(), div);
            if (r.ec != std::errc{} || r.ptr != sv.data() + sv.size() || div == 0.0) {
                throw ConfigError(key + " = '" + v + "' is not a number; accepted: " + range);
            }
        }
        return (neg ? -1.0 : 1.0) * std::numbers::pi / div;
    }
    const auto r = std::from_chars(b, e, x);
    if (r.ec != std::errc{} || r.ptr != e || !std::isfinite(x)) {
        throw ConfigError(key + " = '" + v + "' is not a number; accepted: " + range);
    }
    return x;
}

inline std::size_t parse_count(const std::string& key, const std::string& v, std::size_t min,
                               const std::string& range) {
    std::size_t x = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (r.ec != std::errc{} || r.ptr != v.data() + v.size() || x < min) {
        throw ConfigError(key + " = '" + v + "' out of range; accepted: " + range);
    }
    return x;
}

}  // namespace detail

/// Applies one key to the spec, validating its local range. Unknown keys
/// are errors.
inline void apply_setting(SweepSpec& s, const std::string& key, const std::string& value) {
    using detail::parse_count;
    using detail::parse_number;
    auto real = [&](double& dst, const std::string& range, auto ok) {
        const double x = parse_number(key, value, range);
        if (!ok(x)) throw ConfigError(key + " = " + value + " out of range; accepted: " + range);
        dst = x;
    };
    auto any = [](double) { return true; };
    auto positive = [](double x) { return x > 0.0; };
    auto nonneg = [](double x) { return x >= 0.0; };

    if (key == "g") return real(s.base.g, "real > 0", positive);
    if (key == "r_p") return real(s.base.r_p, "real >= 0", nonneg);
    if (key == "delta_a") return real(s.base.delta_a, "any real", any);
    if (key == "delta_c") return real(s.base.delta_c, "any real", any);
    if (key == "theta_p") return real(s.base.theta_p, "any real (radians)", any);
    if (key == "gamma") return real(s.base.gamma, "real >= 0", nonneg);
    if (key == "kappa") return real(s.base.kappa, "real >= 0", nonneg);
    if (key == "r_e") return real(s.base.r_e, "real >= 0", nonneg);
    if (key == "theta_e") return real(s.base.theta_e, "any real (radians)", any);
    if (key == "tau") return real(s.base.tau, "real > 0", positive);
    if (key == "alpha") return real(s.base.alpha, "any real (radians)", any);
    if (key == "start") return real(s.range.start, "any real", any);
    if (key == "stop") return real(s.range.stop, "any real", any);
    if (key == "points") {
        s.range.points = parse_count(key, value, 2, "integer >= 2");
        return;
    }
    if (key == "second_start") return real(s.second_range.start, "any real", any);
    if (key == "second_stop") return real(s.second_range.stop, "any real", any);
    if (key == "second_points") {
        s.second_range.points = parse_count(key, value, 2, "integer >= 2");
        return;
    }
    const std::string vars = "one of delta_a, delta_c, r_p, g, alpha";
    if (key == "variable") {
        const auto v = parse_variable(value);
        if (!v) throw ConfigError("variable = '" + value + "'; accepted: " + vars);
        s.variable = *v;
        return;
    }
    if (key == "second_variable") {
        if (value == "none" || value.empty()) {
            s.second_variable.reset();
            return;
        }
        const auto v = parse_variable(value);
        if (!v) throw ConfigError("second_variable = '" + value + "'; accepted: none or " + vars);
        s.second_variable = *v;
        return;
    }
    if (key == "constraint_mode") {
        if (value == "free") s.constraint_mode = ConstraintMode::free;
        else if (value == "fig2_constrained") s.constraint_mode = ConstraintMode::fig2_constrained;
        else throw ConfigError("constraint_mode = '" + value + "'; accepted: free, fig2_constrained");
        return;
    }
    if (key == "reservoir") {
        if (value == "matched") s.reservoir = ReservoirMode::matched;
        else if (value == "fixed") s.reservoir = ReservoirMode::fixed;
        else throw ConfigError("reservoir = '" + value + "'; accepted: matched, fixed");
        return;
    }
    if (key == "engine") {
        if (value == "analytic") s.engine = EngineChoice::analytic;
        else if (value == "master") s.engine = EngineChoice::master;
        else if (value == "both") s.engine = EngineChoice::both;
        else throw ConfigError("engine = '" + value + "'; accepted: analytic, master, both");
        return;
    }
    if (key == "cutoff") {
        s.cutoff = parse_count(key, value, 0, "integer >= 0 (0 = automatic)");
        return;
    }
    if (key == "steps") {
        s.steps = parse_count(key, value, 100, "integer >= 100");
        return;
    }
    if (key == "workers") {
        s.workers = parse_count(key, value, 0, "integer >= 0 (0 = all cores)");
        return;
    }
    throw ConfigError("unknown key '" + key + "'");
}

/// Keys understood by apply_setting, in documentation order.
inline const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {
        "g", "r_p", "delta_a", "delta_c", "theta_p", "gamma", "kappa", "r_e", "theta_e", "tau",
        "alpha", "variable", "start", "stop", "points", "second_variable", "second_start",
        "second_stop", "second_points", "constraint_mode", "reservoir", "engine", "cutoff",
        "steps", "workers"};
    return keys;
}

inline SweepSpec load_sweep_spec(std::istream& in, const std::vector<ConfigEntry>& overrides = {}) {
    SweepSpec s;
    for (const auto& e : parse_config(in)) {
        try {
            apply_setting(s, e.key, e.value);
        } catch (const ConfigError& err) {
            throw ConfigError("line " + std::to_string(e.line) + ": " + err.message());
        }
    }
    for (const auto& e : overrides) apply_setting(s, e.key, e.value);
    return s;
}

}  // namespace sqsl
