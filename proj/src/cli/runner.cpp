#include "obslab/cli/runner.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "obslab/cli/config.hpp"
#include "obslab/cli/expression.hpp"
#include "obslab/cli/io.hpp"
#include "obslab/domain/norms.hpp"
#include "obslab/domain/spectral.hpp"
#include "obslab/errors.hpp"
#include "obslab/forward/damped_square.hpp"
#include "obslab/forward/heat.hpp"
#include "obslab/forward/trace.hpp"
#include "obslab/forward/wave.hpp"
#include "obslab/inequality/inequality.hpp"
#include "obslab/recovery/boundary_damping.hpp"
#include "obslab/recovery/potential.hpp"
#include "obslab/recovery/source.hpp"
#include "obslab/stability/sweep.hpp"
#include "obslab/volterra/volterra.hpp"

namespace fs = std::filesystem;

namespace obslab {

namespace {

struct Context {
    const ExperimentConfig& config;
    RunDirectory& dir;
    unsigned threads;
    fs::path config_dir;
    Json results = Json::object();
    Json certificates = Json::object();
    Json diagnostics = Json::object();
};

constexpr const char* kDistanceKind =
    "supremum over the finite probe dictionary; a lower estimate of the operator-norm distance";

bool measures_distance(const Json& certificates) {
    for (const auto& [name, cert] : certificates.items()) {
        if (name == "modulus" || (cert.is_object() && cert.contains("distance"))) return true;
    }
    return false;
}

Field sample(const Grid& g, const std::string& expr) {
    return Field::sample(g, Expression::parse(expr).spatial());
}

std::function<double(double)> time_fn(const std::string& expr) {
    return Expression::parse(expr).temporal();
}

Json map_json(const std::map<std::string, double>& m) {
    Json j = Json::object();
    for (const auto& [k, v] : m) j[k] = v;
    return j;
}

Json recovery_json(const RecoveryResult& r) {
    Json modes = Json::array();
    for (const auto& m : r.modes) {
        modes.push_back({{"mode", m.mode}, {"coefficient", m.coefficient}, {"residual", m.residual}});
    }
    Json series = Json::object();
    for (const auto& [k, v] : r.series) series[k] = v;
    return {{"modes", modes}, {"series", series}, {"flags", r.flags}};
}

CsvTable coefficient_table(const RecoveryResult& r) {
    CsvTable t({"mode", "coefficient", "residual"});
    for (const auto& m : r.modes) {
        t.add({std::to_string(m.mode), csv_number(m.coefficient), csv_number(m.residual)});
    }
    return t;
}

CsvTable field_table(const std::vector<std::string>& names, const std::vector<const Field*>& fields) {
    std::vector<std::string> header{"x", "y"};
    header.insert(header.end(), names.begin(), names.end());
    CsvTable t(header);
    const Grid& g = fields.front()->grid;
    for (std::size_t n = 0; n < g.size(); ++n) {
        std::vector<double> row{g.x(n), g.dimension() == 2 ? g.y(n) : 0.0};
        for (const Field* f : fields) row.push_back(f->values[n]);
        t.add(row);
    }
    return t;
}

double l2(const Field& f) { return norm(f, NormKind::L2); }

MapKind kind_of(const ExperimentConfig& c) {
    if (c.problem == "heat") return MapKind::Heat;
    if (c.problem == "wave") return MapKind::Wave;
    throw InputError("experiment.problem must be wave or heat for this subcommand");
}

void run_forward(Context& ctx) {
    const auto& c = ctx.config;
    const Grid g = c.inversion_grid();
    const Field q = sample(g, c.q);
    const Field u0 = sample(g, c.u0);
    const Field u1 = sample(g, c.u1);
    const std::size_t steps = step_count(c.tau, c.dt);
    std::optional<Source> src;
    if (!c.source.empty()) src = Source{Kernel::sample(time_fn(c.g), c.dt, steps + 2), sample(g, c.source)};

    SpaceTimeSolution sol;
    BoundaryLabel label = BoundaryLabel::All;
    if (c.problem == "wave") {
        sol = solve_wave(g, q, sample(g, c.a), u0, u1, src, c.tau, c.dt);
    } else if (c.problem == "heat") {
        sol = solve_heat(g, q, u0, src, c.tau, c.dt);
    } else {
        require(g.dimension() == 2, "problem square requires dimension 2");
        require(!src, "the boundary-damped square takes no interior source");
        const Grid edge = Grid::interval(c.nodes);
        EdgeDamping d{sample(edge, c.a1), sample(edge, c.a2)};
        sol = solve_wave_boundary_damped(g, d, u0, u1, std::nullopt, c.tau, c.dt);
        label = BoundaryLabel::Gamma1;
    }
    const BoundaryTrace trace = neumann_trace(sol, label);

    CsvTable tt({"t", "node", "x", "y", "value"});
    for (std::size_t n = 0; n < trace.steps(); ++n) {
        for (std::size_t b = 0; b < trace.width(); ++b) {
            const auto node = trace.nodes[b];
            tt.add({csv_number(n * trace.dt), std::to_string(node), csv_number(g.x(node)),
                    csv_number(g.dimension() == 2 ? g.y(node) : 0.0), csv_number(trace.values(n, b))});
        }
    }
    ctx.dir.write("trace.csv", tt);
    const Field& last = sol.u.back();
    ctx.dir.write("final.csv", field_table({"u"}, {&last}));

    ctx.results["steps"] = sol.steps();
    ctx.results["final_l2"] = l2(last);
    ctx.results["trace_l2"] = trace_l2_norm(trace.values, trace.dt, g.boundary_weights(label));
    if (!sol.energy.empty()) {
        CsvTable et({"t", "energy"});
        for (std::size_t n = 0; n < sol.energy.size(); ++n) et.add({(n + 0.5) * c.dt, sol.energy[n]});
        ctx.dir.write("energy.csv", et);
        ctx.diagnostics["energy_initial"] = sol.energy.front();
        ctx.diagnostics["energy_final"] = sol.energy.back();
    }
}

void run_deconvolve(Context& ctx) {
    const auto& c = ctx.config;
    const std::size_t steps = step_count(c.tau, c.dt);
    const auto kr = time_fn(c.kernel);
    Kernel kernel;
    if (c.kernel_im.empty()) {
        kernel = Kernel::sample(kr, c.dt, steps);
    } else {
        const auto ki = time_fn(c.kernel_im);
        kernel = Kernel::sample_complex([&](double t) { return std::complex<double>(kr(t), ki(t)); }, c.dt,
                                        steps);
    }
    const auto h = time_fn(c.signal);
    Eigen::VectorXcd hv(static_cast<Eigen::Index>(steps));
    for (std::size_t n = 0; n < steps; ++n) hv(n) = h(n * c.dt);
    const Eigen::VectorXcd y = convolve(kernel, hv);
    DeconvolutionOptions opt;
    opt.smoothing_width = c.smoothing_width;
    const Eigen::VectorXcd back = deconvolve(kernel, y, opt);

    CsvTable t({"t", "h", "y_re", "y_im", "h_rec_re", "h_rec_im"});
    for (std::size_t n = 0; n < steps; ++n) {
        t.add({n * c.dt, hv(n).real(), y(n).real(), y(n).imag(), back(n).real(), back(n).imag()});
    }
    ctx.dir.write("series.csv", t);

    const double err = series_l2_norm(back - hv, c.dt) / std::max(series_l2_norm(hv, c.dt), 1e-300);
    const double amp = amplification_constant(kernel, c.tau, 1.0);
    const double lhs = series_l2_norm(back, c.dt);
    const double rhs = amp * series_h1_norm(y, c.dt);
    ctx.results["roundtrip_relative_error"] = err;
    ctx.certificates["gronwall"] = {{"lhs", lhs}, {"rhs", rhs}, {"holds", lhs <= rhs}};
    ctx.diagnostics["amplification_constant"] = amp;
    ctx.diagnostics["kernel_derivative_norm_sq"] = kernel_derivative_norm_sq(kernel, c.tau);
}

void run_invert_source(Context& ctx) {
    const auto& c = ctx.config;
    const MapKind kind = kind_of(c);
    const TwinSetup setup = c.twin(ctx.threads);
    const auto q = Expression::parse(c.q).spatial();
    require(!c.source.empty(), "coefficients.source must name the source to recover");
    const auto f = Expression::parse(c.source).spatial();
    const auto g = time_fn(c.g);

    Stopwatch sw;
    BoundaryTrace trace = source_trace(kind, setup, q, g, f);
    Xoshiro256 rng(c.seed);
    add_noise(trace, c.noise, rng);
    ctx.dir.time_stage("data", sw.seconds());

    Stopwatch si;
    const auto basis = dirichlet_eigenpairs(setup.inversion, Field::sample(setup.inversion, q), c.max_modes);
    const Kernel ker = Kernel::sample(g, c.dt, trace.steps());
    const RecoveryConfig rc = c.recovery();
    const RecoveryResult r = kind == MapKind::Wave ? recover_source_wave(ker, trace, basis, rc)
                                                   : recover_source_heat(ker, trace, basis, rc);
    ctx.dir.time_stage("inversion", si.seconds());

    const Field truth = Field::sample(setup.inversion, f);
    const double err = l2(r.field("f") - truth);
    ctx.dir.write("coefficients.csv", coefficient_table(r));
    ctx.dir.write("source.csv", field_table({"f", "f_true"}, {&r.field("f"), &truth}));
    ctx.results = recovery_json(r);
    ctx.results["error_l2"] = err;
    ctx.certificates["bound"] = {{"value", r.bound}, {"note", r.bound_note}, {"dominates_error", err <= r.bound}};
    ctx.diagnostics = map_json(r.diagnostics);
}

void run_invert_potential(Context& ctx) {
    const auto& c = ctx.config;
    const MapKind kind = kind_of(c);
    const TwinSetup setup = c.twin(ctx.threads);
    const Grid& g = setup.inversion;
    const auto q = Expression::parse(c.q).spatial();
    const auto qt = Expression::parse(c.q_true).spatial();
    const auto at = Expression::parse(c.a_true).spatial();
    Xoshiro256 rng(c.seed);
    const RecoveryConfig rc = c.recovery();

    Stopwatch sw;
    ProbeResponseSet data = kind == MapKind::Heat ? potential_heat_data(setup, q, qt, c.probes)
                                                  : potential_damping_wave_data(setup, q, qt, at, c.probes);
    add_noise(data, c.noise, rng);
    ctx.dir.time_stage("data", sw.seconds());

    Stopwatch si;
    const Field q_ref = Field::sample(g, q);
    const RecoveryResult r = kind == MapKind::Heat ? recover_potential_heat(q_ref, data, rc, ctx.threads)
                                                   : recover_potential_damping_wave(q_ref, data, rc, ctx.threads);
    ctx.dir.time_stage("inversion", si.seconds());

    const Field q_true = Field::sample(g, qt);
    const double err = l2(r.field("q") - q_true);
    ctx.dir.write("coefficients.csv", coefficient_table(r));
    ctx.dir.write("potential.csv", field_table({"q", "q_true"}, {&r.field("q"), &q_true}));
    ctx.results = recovery_json(r);
    ctx.results["error_l2"] = err;
    if (const double dq = l2(q_true - q_ref); dq > 0.0) ctx.results["relative_error"] = err / dq;
    if (kind == MapKind::Heat) {
        const auto modulus = StabilityModulus::theta(g.dimension());
        const double rho = std::min(r.diagnostics.at("distance"), modulus_domain_limit());
        ctx.certificates["theta"] = {{"modulus", modulus.describe()},
                                     {"distance", r.diagnostics.at("distance")},
                                     {"value", modulus_eval(modulus, rho)},
                                     {"bound", r.bound},
                                     {"note", r.bound_note}};
    } else {
        const Field a_true = Field::sample(g, at);
        ctx.dir.write("damping.csv", field_table({"a", "a_true"}, {&r.field("a"), &a_true}));
        ctx.results["damping_error_l2"] = l2(r.field("a") - a_true);
        if (const double an = l2(a_true); an > 0.0) ctx.results["damping_relative_error"] = l2(r.field("a") - a_true) / an;
        ctx.certificates["holder_half"] = {{"distance", r.diagnostics.at("distance")},
                                           {"bound", r.bound},
                                           {"note", r.bound_note}};
    }
    ctx.diagnostics = map_json(r.diagnostics);
}

void run_invert_damping(Context& ctx) {
    const auto& c = ctx.config;
    if (c.problem == "wave") {
        run_invert_potential(ctx);
        return;
    }
    require(c.problem == "square", "invert-damping needs problem wave (interior) or square (boundary)");
    const TwinSetup setup = c.twin(ctx.threads);
    const auto e1 = Expression::parse(c.a1).spatial();
    const auto e2 = Expression::parse(c.a2).spatial();
    const auto a1 = [e1](double s) { return e1(s, 0.0); };
    const auto a2 = [e2](double s) { return e2(s, 0.0); };
    Xoshiro256 rng(c.seed);

    Stopwatch sw;
    ProbeResponseSet data = boundary_damping_data(setup, a1, a2, c.probes);
    add_noise(data, c.noise, rng);
    ctx.dir.time_stage("data", sw.seconds());

    Stopwatch si;
    const RecoveryResult r = recover_boundary_damping(setup.inversion, data, c.recovery(), c.damping(), ctx.threads);
    ctx.dir.time_stage("inversion", si.seconds());

    const Grid edge = Grid::interval(setup.inversion.nx());
    const Field t1 = Field::sample(edge, e1);
    const Field t2 = Field::sample(edge, e2);
    CsvTable t({"s", "a1", "a2", "a1_true", "a2_true"});
    for (std::size_t n = 0; n < edge.size(); ++n) {
        t.add({edge.x(n), r.field("a1").values[n], r.field("a2").values[n], t1.values[n], t2.values[n]});
    }
    ctx.dir.write("edges.csv", t);
    ctx.dir.write("coefficients.csv", coefficient_table(r));
    ctx.results = recovery_json(r);
    ctx.results["error_a1_l2"] = l2(r.field("a1") - t1);
    ctx.results["error_a2_l2"] = l2(r.field("a2") - t2);
    ctx.certificates["holder"] = {{"exponent", damping_holder_exponent(c.delta)},
                                  {"distance", r.diagnostics.at("distance")},
                                  {"bound", r.bound},
                                  {"note", r.bound_note}};
    ctx.diagnostics = map_json(r.diagnostics);
}

void run_inequalities(Context& ctx) {
    const auto& c = ctx.config;
    const auto reports = inequality_suite(c.nodes, c.seed, ctx.threads);
    CsvTable t({"id", "sample", "resolution", "constant", "lhs", "rhs", "pass"});
    std::size_t hardy = 0, hardy_pass = 0, checked = 0, passed = 0;
    for (const auto& r : reports) {
        t.add({r.id, r.sample, std::to_string(r.resolution), csv_number(r.constant), csv_number(r.lhs),
               csv_number(r.rhs), r.pass ? (*r.pass ? "true" : "false") : ""});
        if (r.pass) {
            ++checked;
            passed += *r.pass;
            if (r.id.rfind("hardy", 0) == 0) {
                ++hardy;
                hardy_pass += *r.pass;
            }
        }
    }
    ctx.dir.write("inequalities.csv", t);
    ctx.results["samples"] = reports.size();
    ctx.results["checked"] = checked;
    ctx.results["passed"] = passed;
    ctx.certificates["hardy_convex"] = {{"samples", hardy}, {"passed", hardy_pass}, {"all_pass", hardy == hardy_pass}};
}

CsvTable sweep_table(const std::vector<SweepRecord>& rows) {
    CsvTable t({"amplitude", "distance", "error", "seed"});
    for (const auto& r : rows) {
        t.add({csv_number(r.amplitude), csv_number(r.distance), csv_number(r.error), std::to_string(r.seed)});
    }
    return t;
}

Json certificate_json(const Certificate& c) {
    return {{"modulus", c.modulus}, {"constant", c.constant}, {"pass", c.pass},
            {"used", c.used},       {"clamped", c.clamped},   {"skipped", c.skipped}};
}

Json fit_json(const std::vector<SweepRecord>& rows, StabilityModulus::Kind kind) {
    try {
        const RateFit f = rate_fit(rows, kind);
        return {{"model", kind == StabilityModulus::Kind::Holder ? "holder" : "log-power"},
                {"parameter", f.parameter},
                {"residual", f.residual},
                {"used", f.used},
                {"low_confidence", f.low_confidence}};
    } catch (const std::exception& e) {
        return {{"error", e.what()}};
    }
}

void run_stability_sweep(Context& ctx) {
    const auto& c = ctx.config;
    const SweepSpec spec = c.sweep();
    const StabilityModulus modulus = c.sweep_modulus();
    Stopwatch sw;
    const auto rows = run_sweep(spec, ctx.threads);
    ctx.dir.time_stage("sweep", sw.seconds());
    ctx.dir.write("sweep.csv", sweep_table(rows));
    Json rec = Json::array();
    for (const auto& r : rows) {
        rec.push_back({{"amplitude", r.amplitude}, {"distance", r.distance}, {"error", r.error},
                       {"perturbation", r.perturbation}, {"seed", r.seed}, {"ok", r.ok},
                       {"message", r.message}});
    }
    ctx.results["records"] = rec;
    ctx.results["config"] = rows.empty() ? "" : rows.front().config;
    ctx.results["rate_fit"] = fit_json(rows, modulus.kind);
    ctx.certificates["modulus"] = certificate_json(certify(rows, modulus));
}

void run_certify(Context& ctx) {
    const auto& c = ctx.config;
    std::vector<SweepRecord> rows;
    if (c.input.empty()) {
        rows = run_sweep(c.sweep(), ctx.threads);
        ctx.dir.write("sweep.csv", sweep_table(rows));
    } else {
        fs::path p = c.input;
        if (p.is_relative()) p = ctx.config_dir / p;
        const ParsedCsv csv = read_csv(p);
        const auto ia = csv.column("amplitude"), id = csv.column("distance"), ie = csv.column("error"),
                   is = csv.column("seed");
        for (const auto& row : csv.rows) {
            SweepRecord r;
            try {
                r.amplitude = std::stod(row[ia]);
                r.distance = std::stod(row[id]);
                r.error = std::stod(row[ie]);
                r.seed = std::stoull(row[is]);
            } catch (const std::exception&) {
                throw InputError(p.string() + ": malformed sweep row");
            }
            r.ok = std::isfinite(r.distance) && std::isfinite(r.error);
            rows.push_back(r);
        }
    }
    const StabilityModulus modulus = c.sweep_modulus();
    const Certificate cert = certify(rows, modulus);
    CsvTable t({"modulus", "constant", "pass", "used", "clamped", "skipped"});
    t.add({cert.modulus, csv_number(cert.constant), cert.pass ? "true" : "false", std::to_string(cert.used),
           std::to_string(cert.clamped), std::to_string(cert.skipped)});
    ctx.dir.write("certificate.csv", t);
    ctx.results["records"] = rows.size();
    ctx.results["rate_fit"] = fit_json(rows, modulus.kind);
    ctx.certificates["modulus"] = certificate_json(cert);
    if (!cert.pass) throw NumericalError("certification failed: no finite constant for " + cert.modulus);
}

const std::vector<std::pair<std::string, void (*)(Context&)>>& table() {
    static const std::vector<std::pair<std::string, void (*)(Context&)>> t{
        {"forward", run_forward},
        {"deconvolve", run_deconvolve},
        {"invert-source", run_invert_source},
        {"invert-potential", run_invert_potential},
        {"invert-damping", run_invert_damping},
        {"verify-inequalities", run_inequalities},
        {"stability-sweep", run_stability_sweep},
        {"certify", run_certify},
    };
    return t;
}

Json config_json(const std::string& serialized) {
    Json out = Json::object();
    std::istringstream in(serialized);
    std::string line, section;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.front() == '[') {
            section = line.substr(1, line.size() - 2);
            out[section] = Json::object();
            continue;
        }
        const auto eq = line.find(" = ");
        out[section][line.substr(0, eq)] = line.substr(eq + 3);
    }
    return out;
}

}  // namespace

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& [k, f] : table()) n.push_back(k);
        return n;
    }();
    return names;
}

int run(const RunOptions& options, std::ostream& log, std::ostream& err) {
    try {
        void (*body)(Context&) = nullptr;
        for (const auto& [k, f] : table()) {
            if (k == options.subcommand) body = f;
        }
        require(body != nullptr, "unknown subcommand '" + options.subcommand + "'");
        require(options.threads >= 1, "--threads must be at least 1");

        ExperimentConfig config = parse_config(read_text(options.config));
        if (options.seed) config.seed = *options.seed;
        if (options.out) config.output = options.out->string();
        const std::string serialized = serialize_config(config);
        const std::string hash = text_hash(serialized);

        RunDirectory dir(config.output);
        Context ctx{config, dir, options.threads, options.config.parent_path()};
        Stopwatch total;
        body(ctx);
        dir.time_stage("total", total.seconds());
        dir.write("config.txt", serialized);

        Json report;
        report["config"] = config_json(serialized);
        report["results"] = ctx.results;
        report["certificates"] = ctx.certificates;
        if (measures_distance(ctx.certificates)) {
            report["certificates"]["distance_kind"] = kDistanceKind;
        }
        report["diagnostics"] = ctx.diagnostics;
        Json manifest = dir.manifest(hash);
        manifest["outputs"].insert(manifest["outputs"].end() - 1, "report.json");
        report["manifest"] = manifest;
        dir.write("report.json", report);
        dir.commit(hash);
        log << options.subcommand << ": wrote " << dir.outputs().size() << " files to " << dir.path().string()
            << "\n";
        return 0;
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace obslab
