#include "obslab/cli/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>

#include "obslab/cli/expression.hpp"
#include "obslab/errors.hpp"

namespace obslab {

namespace {

using C = ExperimentConfig;

struct Entry {
    std::string section;
    std::string key;
    std::string help;
    std::function<std::string(const C&)> get;
    std::function<void(C&, const std::string&)> set;

    std::string name() const { return section + "." + key; }
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double to_double(const std::string& s) {
    const std::string t = trim(s);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || *end != '\0' || errno == ERANGE || !std::isfinite(v)) {
        throw InputError("expected a finite real number, got '" + t + "'");
    }
    return v;
}

std::uint64_t to_u64(const std::string& s) {
    const std::string t = trim(s);
    char* end = nullptr;
    errno = 0;
    if (t.empty() || t[0] == '-') throw InputError("expected a non-negative integer, got '" + t + "'");
    const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
    if (*end != '\0' || errno == ERANGE) {
        throw InputError("expected a non-negative integer, got '" + t + "'");
    }
    return v;
}

std::vector<std::string> to_list(const std::string& s) {
    const std::string t = trim(s);
    if (t.size() < 2 || t.front() != '[' || t.back() != ']') {
        throw InputError("expected a bracketed list such as [1, 2], got '" + t + "'");
    }
    std::vector<std::string> out;
    const std::string body = trim(t.substr(1, t.size() - 2));
    if (body.empty()) return out;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

template <class T>
std::string join(const std::vector<T>& v, std::string (*f)(T)) {
    std::string out = "[";
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (k) out += ", ";
        out += f(v[k]);
    }
    return out + "]";
}

Entry real(const char* sec, const char* key, double C::*m, const char* help) {
    return {sec, key, help, [m](const C& c) { return format_double(c.*m); },
            [m](C& c, const std::string& v) { c.*m = to_double(v); }};
}

Entry count(const char* sec, const char* key, std::size_t C::*m, const char* help) {
    return {sec, key, help, [m](const C& c) { return std::to_string(c.*m); },
            [m](C& c, const std::string& v) { c.*m = static_cast<std::size_t>(to_u64(v)); }};
}

Entry text(const char* sec, const char* key, std::string C::*m, const char* help) {
    return {sec, key, help, [m](const C& c) { return c.*m; },
            [m](C& c, const std::string& v) { c.*m = trim(v); }};
}

const std::vector<Entry>& entries() {
    static const std::vector<Entry> table{
        text("experiment", "problem", &C::problem, "wave, heat or square"),
        {"experiment", "seed", "u64 seed of the noise generator",
         [](const C& c) { return std::to_string(c.seed); },
         [](C& c, const std::string& v) { c.seed = to_u64(v); }},
        text("experiment", "output", &C::output, "output directory"),

        {"grid", "dimension", "1 (unit interval) or 2 (unit square)",
         [](const C& c) { return std::to_string(c.dimension); },
         [](C& c, const std::string& v) { c.dimension = static_cast<int>(to_u64(v)); }},
        count("grid", "nodes", &C::nodes, "inversion nodes per axis"),
        count("grid", "forward_nodes", &C::forward_nodes, "data nodes per axis"),

        real("time", "tau", &C::tau, "observation horizon"),
        real("time", "dt", &C::dt, "inversion time step"),
        count("time", "time_ratio", &C::time_ratio, "forward steps per inversion step"),

        text("coefficients", "q", &C::q, "reference potential q(x, y)"),
        text("coefficients", "a", &C::a, "interior damping for forward runs"),
        text("coefficients", "q_true", &C::q_true, "potential generating twin data"),
        text("coefficients", "a_true", &C::a_true, "damping generating twin data"),
        text("coefficients", "a1", &C::a1, "square: bottom-edge damping a1(x)"),
        text("coefficients", "a2", &C::a2, "square: left-edge damping a2(x)"),
        text("coefficients", "u0", &C::u0, "initial state"),
        text("coefficients", "u1", &C::u1, "initial velocity"),
        text("coefficients", "source", &C::source, "spatial source f(x, y), empty for none"),
        text("coefficients", "g", &C::g, "time profile g(t) of the source"),
        text("coefficients", "kernel", &C::kernel, "Volterra kernel, real part"),
        text("coefficients", "kernel_im", &C::kernel_im, "Volterra kernel, imaginary part"),
        text("coefficients", "signal", &C::signal, "h(t) convolved then recovered by deconvolve"),

        count("recovery", "probes", &C::probes, "probe count K"),
        count("recovery", "truncation", &C::truncation, "retained modes l, 0 derives it from s"),
        real("recovery", "regularization", &C::regularization, "Tikhonov floor"),
        real("recovery", "epsilon", &C::epsilon, "heat-source spectral cutoff"),
        real("recovery", "s", &C::s, "potential truncation parameter"),
        real("recovery", "noise", &C::noise, "noise standard deviation"),
        real("recovery", "theta", &C::theta, "pointwise division threshold"),
        count("recovery", "max_modes", &C::max_modes, "dictionary cap"),
        count("recovery", "smoothing_width", &C::smoothing_width, "odd moving-average width"),
        count("recovery", "outer_iterations", &C::outer_iterations, "relinearization sweeps"),
        real("recovery", "condition_limit", &C::condition_limit, "largest accepted condition number"),

        real("damping", "lower", &C::lower, "admissible lower bound"),
        real("damping", "upper", &C::upper, "admissible upper bound"),
        real("damping", "delta", &C::delta, "regularity index of the Holder exponent"),
        real("damping", "holder_constant", &C::holder_constant, "constant of the Holder bound"),
        count("damping", "control_points", &C::control_points, "piecewise-linear nodes per edge"),
        real("damping", "initial", &C::initial, "initial iterate"),
        count("damping", "max_iterations", &C::max_iterations, "Levenberg-Marquardt iterations"),
        real("damping", "misfit_tolerance", &C::misfit_tolerance, "accepted relative misfit"),

        text("sweep", "pipeline", &C::pipeline, "potential-heat, potential-damping-wave, boundary-damping"),
        text("sweep", "family", &C::family, "perturbation family of the pipeline"),
        {"sweep", "amplitudes", "strictly decreasing amplitudes",
         [](const C& c) { return join<double>(c.amplitudes, format_double); },
         [](C& c, const std::string& v) {
             c.amplitudes.clear();
             for (const auto& s : to_list(v)) c.amplitudes.push_back(to_double(s));
         }},
        {"sweep", "seeds", "seeds per amplitude",
         [](const C& c) {
             return join<std::uint64_t>(c.seeds, [](std::uint64_t s) { return std::to_string(s); });
         },
         [](C& c, const std::string& v) {
             c.seeds.clear();
             for (const auto& s : to_list(v)) c.seeds.push_back(to_u64(s));
         }},
        text("sweep", "modulus", &C::modulus, "holder:e, log-power:p, theta:n, phi:n, psi, half-log"),
        text("sweep", "input", &C::input, "sweep CSV read by certify"),
    };
    return table;
}

const std::vector<std::string> expression_keys{"q", "a", "q_true", "a_true", "a1", "a2", "u0",
                                               "u1", "source", "g", "kernel", "kernel_im", "signal"};

std::string expression_of(const C& c, const std::string& key) {
    for (const auto& e : entries()) {
        if (e.section == "coefficients" && e.key == key) return e.get(c);
    }
    return "";
}

template <class F>
void check(std::vector<ConfigViolation>& out, const std::string& key, F&& f) {
    try {
        f();
    } catch (const InputError& e) {
        out.push_back({0, key, e.what()});
    }
}

}  // namespace

std::vector<ConfigKey> config_schema() {
    std::vector<ConfigKey> out;
    for (const auto& e : entries()) out.push_back({e.section, e.key, e.help});
    return out;
}

StabilityModulus parse_modulus(const std::string& text) {
    const auto colon = text.find(':');
    const std::string name = trim(text.substr(0, colon));
    const std::string arg = colon == std::string::npos ? "" : trim(text.substr(colon + 1));
    auto need = [&]() {
        require(!arg.empty(), "modulus '" + name + "' needs a parameter after ':'");
        return to_double(arg);
    };
    if (name == "holder") return StabilityModulus::holder(need());
    if (name == "log-power") return StabilityModulus::log_power(need());
    if (name == "phi") return StabilityModulus::phi(static_cast<int>(need()));
    if (name == "theta") return StabilityModulus::theta(static_cast<int>(need()));
    if (name == "psi") return StabilityModulus::psi();
    if (name == "half-log") return StabilityModulus::half_log();
    throw InputError("unknown modulus '" + text + "'");
}

RecoveryConfig ExperimentConfig::recovery() const {
    RecoveryConfig r;
    r.probes = probes;
    r.truncation = truncation;
    r.regularization = regularization;
    r.epsilon = epsilon;
    r.s = s;
    r.noise_level = noise;
    r.theta = theta;
    r.max_modes = max_modes;
    r.smoothing_width = smoothing_width;
    r.outer_iterations = outer_iterations;
    r.condition_limit = condition_limit;
    return r;
}

DampingOptions ExperimentConfig::damping() const {
    DampingOptions d;
    d.lower = lower;
    d.upper = upper;
    d.delta = delta;
    d.holder_constant = holder_constant;
    d.control_points = control_points;
    d.initial = initial;
    d.max_iterations = max_iterations;
    d.misfit_tolerance = misfit_tolerance;
    return d;
}

Grid ExperimentConfig::inversion_grid() const {
    require(dimension == 1 || dimension == 2, "dimension must be 1 or 2");
    require(nodes >= 3, "grid needs at least 3 nodes per axis");
    return dimension == 1 ? Grid::interval(nodes) : Grid::square(nodes);
}

Grid ExperimentConfig::forward_grid() const {
    require(dimension == 1 || dimension == 2, "dimension must be 1 or 2");
    require(forward_nodes >= 3, "grid needs at least 3 nodes per axis");
    return dimension == 1 ? Grid::interval(forward_nodes) : Grid::square(forward_nodes);
}

TwinSetup ExperimentConfig::twin(unsigned threads) const {
    TwinSetup t;
    t.inversion = inversion_grid();
    t.forward = forward_grid();
    t.tau = tau;
    t.dt = dt;
    t.time_ratio = time_ratio;
    t.label = problem == "square" ? BoundaryLabel::Gamma1 : BoundaryLabel::All;
    t.threads = threads;
    return t;
}

SweepSpec ExperimentConfig::sweep() const {
    SweepSpec s;
    s.pipeline = pipeline;
    s.family = family;
    s.amplitudes = amplitudes;
    s.noise = noise;
    s.seeds = seeds;
    s.setup = twin();
    if (pipeline == "boundary-damping") s.setup.label = BoundaryLabel::Gamma1;
    s.recovery = recovery();
    s.recovery.noise_level = noise;
    s.damping = damping();
    return s;
}

StabilityModulus ExperimentConfig::sweep_modulus() const {
    if (!modulus.empty()) return parse_modulus(modulus);
    if (pipeline == "potential-heat") return StabilityModulus::theta(dimension);
    if (pipeline == "potential-damping-wave") return StabilityModulus::holder(0.5);
    return StabilityModulus::holder(damping_holder_exponent(delta));
}

std::vector<ConfigViolation> validate_config(const ExperimentConfig& c) {
    std::vector<ConfigViolation> out;
    if (c.problem != "wave" && c.problem != "heat" && c.problem != "square") {
        out.push_back({0, "experiment.problem", "must be one of wave, heat, square"});
    }
    if (c.dimension != 1 && c.dimension != 2) out.push_back({0, "grid.dimension", "must be 1 or 2"});
    if (c.problem == "square" && c.dimension != 2) {
        out.push_back({0, "grid.dimension", "problem square requires dimension 2"});
    }
    if (c.nodes < 3) out.push_back({0, "grid.nodes", "must be at least 3"});
    if (!(c.tau > 0.0)) out.push_back({0, "time.tau", "must be positive"});
    if (!(c.dt > 0.0)) out.push_back({0, "time.dt", "must be positive"});
    if (c.time_ratio < 1) out.push_back({0, "time.time_ratio", "must be at least 1"});
    if (c.dimension == 1 || c.dimension == 2) {
        if (c.nodes >= 3 && c.forward_nodes >= 3) {
            check(out, "grid.forward_nodes", [&] {
                TwinSetup t = c.twin();
                t.tau = t.dt = 1.0;
                t.validate();
            });
        } else if (c.forward_nodes < 3) {
            out.push_back({0, "grid.forward_nodes", "must be at least 3"});
        }
    }
    for (const auto& k : expression_keys) {
        const std::string v = expression_of(c, k);
        if (v.empty() && (k == "source" || k == "kernel_im")) continue;
        check(out, "coefficients." + k, [&] { (void)Expression::parse(v); });
    }
    check(out, "recovery", [&] { c.recovery().validate(); });
    check(out, "damping", [&] { c.damping().validate(); });
    check(out, "sweep.family", [&] {
        const auto fams = sweep_families(c.pipeline);
        bool known = false;
        for (const auto& f : fams) known |= f == c.family;
        require(known, "unknown perturbation family '" + c.family + "' for pipeline " + c.pipeline);
    });
    if (c.amplitudes.empty()) out.push_back({0, "sweep.amplitudes", "needs at least one amplitude"});
    for (std::size_t k = 0; k < c.amplitudes.size(); ++k) {
        if (c.amplitudes[k] < 0.0 || (k > 0 && c.amplitudes[k] >= c.amplitudes[k - 1])) {
            out.push_back({0, "sweep.amplitudes", "must be non-negative and strictly decreasing"});
            break;
        }
    }
    if (c.seeds.empty()) out.push_back({0, "sweep.seeds", "needs at least one seed"});
    if (!c.modulus.empty()) check(out, "sweep.modulus", [&] { (void)parse_modulus(c.modulus); });
    if (c.noise < 0.0) out.push_back({0, "recovery.noise", "must be non-negative"});
    return out;
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig c;
    std::vector<ConfigViolation> bad;
    std::map<std::string, std::size_t> seen;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[' && line.find('=') == std::string::npos) {
            if (line.back() != ']') {
                bad.push_back({line_no, line, "malformed section header"});
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            bool known = false;
            for (const auto& e : entries()) known |= e.section == section;
            if (!known) bad.push_back({line_no, section, "unknown section"});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            bad.push_back({line_no, line, "expected 'key = value'"});
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string full = section + "." + key;
        const Entry* entry = nullptr;
        for (const auto& e : entries()) {
            if (e.section == section && e.key == key) entry = &e;
        }
        if (!entry) {
            bad.push_back({line_no, full, "unknown key"});
            continue;
        }
        if (auto it = seen.find(full); it != seen.end()) {
            bad.push_back({line_no, full, "duplicate key (first set on line " +
                                              std::to_string(it->second) + ")"});
            continue;
        }
        seen[full] = line_no;
        try {
            entry->set(c, value);
        } catch (const InputError& e) {
            bad.push_back({line_no, full, e.what()});
        }
    }
    if (bad.empty()) {
        for (auto v : validate_config(c)) {
            for (const auto& [k, ln] : seen) {
                if (k == v.key || k.rfind(v.key + ".", 0) == 0) {
                    v.line = ln;
                    break;
                }
            }
            bad.push_back(v);
        }
    }
    if (!bad.empty()) throw ConfigError(bad);
    return c;
}

std::string serialize_config(const ExperimentConfig& c) {
    std::string out;
    std::string section;
    for (const auto& e : entries()) {
        if (e.section != section) {
            if (!section.empty()) out += "\n";
            section = e.section;
            out += "[" + section + "]\n";
        }
        out += e.key + " = " + e.get(c) + "\n";
    }
    return out;
}

namespace {
std::string describe(const std::vector<ConfigViolation>& v) {
    std::string out = "invalid config:";
    for (const auto& x : v) {
        out += "\n  ";
        if (x.line > 0) out += "line " + std::to_string(x.line) + ": ";
        out += x.key + ": " + x.constraint;
    }
    return out;
}
}  // namespace

ConfigError::ConfigError(std::vector<ConfigViolation> v)
    : InputError(describe(v)), violations(std::move(v)) {}

}  // namespace obslab
