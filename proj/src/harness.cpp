#include "vpfocus/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "vpfocus/bounds.hpp"
#include "vpfocus/dynamics.hpp"
#include "vpfocus/errors.hpp"
#include "vpfocus/observables.hpp"

namespace vpfocus {

namespace {

constexpr double pi = std::numbers::pi;

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw DomainError("config key '" + key + "': '" + text + "' is not a number");
    }
    if (used != text.size())
        throw DomainError("config key '" + key + "': trailing characters in '" + text + "'");
    return v;
}

int parse_int(const std::string& key, const std::string& text)
{
    const double v = parse_double(key, text);
    if (v != std::floor(v) || v < 1 || v > 1e7)
        throw DomainError("config key '" + key + "' must be a positive integer");
    return static_cast<int>(v);
}

Check upper_check(std::string name, double measured, double threshold)
{
    return {std::move(name), "<=", measured, threshold, threshold - measured, measured <= threshold};
}

Check lower_check(std::string name, double measured, double threshold)
{
    return {std::move(name), ">=", measured, threshold, measured - threshold, measured >= threshold};
}

std::string_view status_name(RunStatus s)
{
    switch (s) {
    case RunStatus::Ok: return "ok";
    case RunStatus::Infeasible: return "infeasible";
    case RunStatus::NumericalFailure: return "numerical_failure";
    }
    return "unknown";
}

Json check_json(const Check& c)
{
    Json j;
    j["name"] = c.name;
    j["relation"] = c.relation;
    j["measured"] = c.measured;
    j["threshold"] = c.threshold;
    j["margin"] = c.margin;
    j["pass"] = c.pass;
    return j;
}

Json spec_json(const ExperimentSpec& s)
{
    Json j;
    j["kind"] = std::string(to_string(s.kind));
    j["C1"] = s.targets.C1;
    j["C2"] = s.targets.C2;
    j["a"] = s.targets.a;
    j["b"] = s.targets.b;
    j["c"] = s.targets.c;
    j["grid"] = std::to_string(s.grid.n_r) + "x" + std::to_string(s.grid.n_w) + "x" + std::to_string(s.grid.n_l);
    j["dt_fraction"] = s.resolved_dt_fraction();
    j["safety_factor"] = s.safety_factor;
    j["weight_floor"] = s.weight_floor;
    j["bins_initial"] = s.bins_initial;
    j["bins_final"] = s.bins_final;
    j["snapshot_stride"] = s.snapshot_stride;
    j["concentration_slack"] = s.concentration_slack;
    return j;
}

void write_artifact(const ExperimentSpec& spec, const char* name, const std::string& text)
{
    if (!spec.output_dir.empty())
        write_text_file(spec.output_dir / name, text);
}

Ensemble with_state(const Ensemble& base, const Snapshot& s)
{
    Ensemble e = base;
    e.t = s.t;
    e.r = s.r;
    e.w = s.w;
    return e;
}

EnvelopeOracleSummary envelope_oracle(const Ensemble& initial, const Ensemble& final_state, const ParameterSet& p,
                                double max_w)
{
    EnvelopeOracleSummary out;
    out.shells = initial.size();
    out.max_w_before_T = max_w;
    out.worst_envelope_margin = std::numeric_limits<double>::infinity();
    const double M = initial.total_weight();
    const double a = p.targets.a;
    const double b = p.targets.b;
    const double d_cap = 86.0 * pi * std::pow(p.a0, 16.0 / 3.0);
    for (Eigen::Index i = 0; i < initial.size(); ++i) {
        const InitialDatum datum{initial.r[i], initial.w[i], initial.l[i], M};
        const double R = final_state.r[i];
        const double tol = 1e-6 * datum.r;
        double upper_sq = 0.0;
        double lower = 0.0;
        double t0_lower = 0.0;
        if (p.kind == SystemKind::VP) {
            const auto env = vp_envelope(p.T, datum);
            upper_sq = env.upper_sq;
            lower = env.lower;
            t0_lower = vp_t0_lower(datum);
        } else {
            const auto env = rvp_envelope(p.T, datum);
            upper_sq = env.upper_sq;
            lower = env.lower;
            t0_lower = datum.l > 0.0 ? rvp_t0_bounds(datum).lower : 0.0;
            if (rvp_aux(datum) <= d_cap)
                ++out.d_estimate_holds;
        }
        const double margin = std::min(R - (lower - tol), std::sqrt(upper_sq) + tol - R);
        out.worst_envelope_margin = std::min(out.worst_envelope_margin, margin);
        if (margin < 0.0)
            ++out.envelope_violations;
        if (p.T <= t0_lower)
            ++out.turning_condition_holds;
        if (lower >= a)
            ++out.lower_envelope_above_a;
        if (upper_sq <= b * b)
            ++out.upper_envelope_below_b;
    }
    return out;
}

} // namespace

double default_dt_fraction(SystemKind kind)
{
    return kind == SystemKind::VP ? 1.0 / 4096.0 : 1.0 / 16384.0;
}

double ExperimentSpec::resolved_dt_fraction() const
{
    return dt_fraction.value_or(default_dt_fraction(kind));
}

void ExperimentSpec::validate() const
{
    targets.validate();
    if (grid.n_r < 2 || grid.n_w < 2 || grid.n_l < 2)
        throw DomainError("grid needs at least 2 cells per dimension");
    if (dt_fraction && !(*dt_fraction > 0.0 && *dt_fraction <= 1e-2))
        throw DomainError("dt_fraction must lie in (0, 1e-2]");
    if (!(safety_factor >= 1.0))
        throw DomainError("safety_factor must be >= 1");
    if (bins_initial < 1 || bins_final < 1)
        throw DomainError("bin counts must be positive");
    if (snapshot_stride < 0)
        throw DomainError("snapshot stride must be non-negative");
    if (!(concentration_slack >= 0.0 && concentration_slack < 1.0))
        throw DomainError("concentration_slack must lie in [0, 1)");
}

SamplingGrid parse_grid(const std::string& text)
{
    SamplingGrid g;
    int* dims[] = {&g.n_r, &g.n_w, &g.n_l};
    std::size_t pos = 0;
    for (int k = 0; k < 3; ++k) {
        const auto next = k < 2 ? text.find('x', pos) : text.size();
        if (next == std::string::npos)
            throw DomainError("grid must look like NRxNWxNL, got '" + text + "'");
        *dims[k] = parse_int("grid", text.substr(pos, next - pos));
        pos = next + 1;
    }
    return g;
}

ExperimentSpec parse_config(std::istream& in, ExperimentSpec spec)
{
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw DomainError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "kind")
            spec.kind = parse_kind(value);
        else if (key == "C1")
            spec.targets.C1 = parse_double(key, value);
        else if (key == "C2")
            spec.targets.C2 = parse_double(key, value);
        else if (key == "a")
            spec.targets.a = parse_double(key, value);
        else if (key == "b")
            spec.targets.b = parse_double(key, value);
        else if (key == "c")
            spec.targets.c = parse_double(key, value);
        else if (key == "n_r")
            spec.grid.n_r = parse_int(key, value);
        else if (key == "n_w")
            spec.grid.n_w = parse_int(key, value);
        else if (key == "n_l")
            spec.grid.n_l = parse_int(key, value);
        else if (key == "safety_factor")
            spec.safety_factor = parse_double(key, value);
        else if (key == "dt_frac")
            spec.dt_fraction = parse_double(key, value);
        else
            throw DomainError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    spec.validate();
    return spec;
}

ExperimentSpec load_config(const std::filesystem::path& path, ExperimentSpec base)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config '" + path.string() + "'");
    return parse_config(in, std::move(base));
}

bool Report::pass() const
{
    return status == RunStatus::Ok && checks.size() == 6
        && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

int Report::exit_code() const
{
    switch (status) {
    case RunStatus::Infeasible: return 2;
    case RunStatus::NumericalFailure: return 3;
    case RunStatus::Ok: break;
    }
    return pass() ? 0 : 1;
}

Report run_experiment(const ExperimentSpec& spec)
{
    spec.validate();
    const auto t_start = std::chrono::steady_clock::now();
    auto seconds_since = [](auto t0) {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    Report report;
    report.spec = spec;
    if (!spec.output_dir.empty())
        std::filesystem::create_directories(spec.output_dir);

    try {
        DeriveOptions derive;
        derive.safety_factor = spec.safety_factor;
        const ParameterSet p = derive_parameters(spec.kind, spec.targets, derive);
        report.params = p;
        write_artifact(spec, "params.json", params_to_json(p).dump(2) + "\n");

        SamplingOptions sampling;
        sampling.weight_floor = spec.weight_floor;
        const SampledEnsemble sampled = sample_ensemble(p, spec.grid, sampling);
        const Ensemble& initial = sampled.ensemble;
        report.n_shells = initial.size();
        report.total_mass = initial.total_weight();
        report.grid_mass = sampled.grid_mass;
        report.truncated_mass = sampled.truncated_mass;
        report.validation = validate_initial(initial, p);
        write_artifact(spec, "initial.csv", ensemble_csv(initial));

        // Radial cells and bins share the window; more bins than cells would leave bins empty.
        const int bins0 = std::min(spec.bins_initial, spec.grid.n_r);
        const Observables obs0 = measure(initial, {p.a0 - p.eps, p.a0 + p.eps, bins0});
        write_artifact(spec, "profiles_t0.csv", density_profile_csv(obs0));
        write_artifact(spec, "field_t0.csv", field_profile_csv(obs0));

        IntegratorConfig cfg;
        cfg.dt = p.T * spec.resolved_dt_fraction();
        cfg.snapshot_stride = spec.snapshot_stride;
        double max_w = initial.w.maxCoeff();
        const auto t_evolve = std::chrono::steady_clock::now();
        EvolveResult run = evolve(initial, p.T, cfg, SelfConsistent{},
                                  [&max_w](const Ensemble& e, long) { max_w = std::max(max_w, e.w.maxCoeff()); });
        report.seconds_evolve = seconds_since(t_evolve);
        report.steps = run.steps;
        const Ensemble& final_state = run.ensemble;
        write_artifact(spec, "snapshots.csv", snapshots_csv(initial, run.snapshots));

        report.energy_initial = total_energy(initial);
        report.energy_final = total_energy(final_state);
        const double e_scale = std::abs(report.energy_initial);
        report.energy_max_rel_drift = std::abs(report.energy_final - report.energy_initial) / e_scale;
        for (const auto& s : run.snapshots)
            report.energy_max_rel_drift = std::max(
                report.energy_max_rel_drift, std::abs(total_energy(with_state(initial, s)) - report.energy_initial) / e_scale);

        const double a = p.targets.a;
        const double b = p.targets.b;
        const double r_lo = std::min(a, final_state.r.minCoeff());
        const double r_hi = std::max(b, final_state.r.maxCoeff());
        const Observables obsT = measure(final_state, RadialBinning::with_width(r_lo, r_hi, (b - a) / spec.bins_final));
        write_artifact(spec, "profiles_T.csv", density_profile_csv(obsT));
        write_artifact(spec, "field_T.csv", field_profile_csv(obsT));

        const auto& t = p.targets;
        report.checks.push_back(lower_check("initial_radius_ge_c", obs0.r_min, t.c));
        report.checks.push_back(upper_check("rho0_sup_le_C1", obs0.linf_rho, t.C1));
        report.checks.push_back(upper_check("E0_sup_le_C1", obs0.linf_field, t.C1));
        {
            const double low_gap = obsT.r_min - a;
            const double high_gap = b - obsT.r_max;
            Check c{"final_radius_in_ab", "in", 0.0, 0.0, std::min(low_gap, high_gap), false};
            c.measured = low_gap <= high_gap ? obsT.r_min : obsT.r_max;
            c.threshold = low_gap <= high_gap ? a : b;
            c.pass = c.margin >= 0.0;
            report.checks.push_back(c);
        }
        report.checks.push_back(lower_check("rhoT_sup_ge_C2", obsT.linf_rho, t.C2));
        report.checks.push_back(lower_check("ET_sup_ge_C2", obsT.linf_field, t.C2));

        const double M = report.total_mass;
        const double eps = p.eps;
        const double a0 = p.a0;
        auto& x = report.cross_checks;
        x.push_back(lower_check("mass_ge_lower_bound", M, p.mass_lower_bound()));
        x.push_back(upper_check("mass_le_upper_bound", M, p.mass_upper_bound()));
        {
            double worst = std::numeric_limits<double>::infinity();
            for (const auto& w : report.validation->checks)
                if (w.gating)
                    worst = std::min(worst, w.worst_margin);
            Check c{"initial_windows", ">=", worst, 0.0, worst, report.validation->pass};
            x.push_back(c);
        }
        x.push_back(upper_check("rho0_sup_le_inv_a0", obs0.linf_rho, 1.0 / a0));
        x.push_back(upper_check("E0_sup_le_uniform_bound", obs0.linf_field,
                                32.0 * pi * eps / a0 + 32.0 * pi / 3.0 * std::pow(eps / a0, 3.0)));
        x.push_back(upper_check("E0_inside_support_zero", field_at(initial, a0 - eps), 0.0));
        x.push_back(upper_check("E0_outside_support_bound", field_at(initial, a0 + eps),
                                8.0 * pi * eps / a0 + 8.0 * pi / 3.0 * std::pow(eps / a0, 3.0)));
        x.push_back(upper_check("no_turning_before_T", max_w, 0.0));
        x.back().pass = max_w < 0.0;
        const auto conc = concentration_bounds(M, a, b);
        x.push_back(lower_check("concentration_density", obsT.linf_rho, (1.0 - spec.concentration_slack) * conc.rho_lb));
        x.push_back(lower_check("concentration_field", obsT.linf_field, (1.0 - spec.concentration_slack) * conc.field_lb));
        x.push_back(upper_check("energy_rel_drift", report.energy_max_rel_drift, 1e-5));

        report.envelope = envelope_oracle(initial, final_state, p, max_w);
        x.push_back(lower_check("envelope_at_T", report.envelope.worst_envelope_margin, 0.0));
    } catch (const InfeasibleError& e) {
        report.status = RunStatus::Infeasible;
        report.error = std::string(e.constraint()) + ": " + e.what();
    } catch (const SingularityError& e) {
        report.status = RunStatus::NumericalFailure;
        report.error = e.what();
    } catch (const SamplingError& e) {
        report.status = RunStatus::NumericalFailure;
        report.error = e.what();
    } catch (const DomainError& e) {
        report.status = RunStatus::NumericalFailure;
        report.error = e.what();
    }
    report.seconds_total = seconds_since(t_start);
    write_artifact(spec, "report.json", emit(report, Format::Json));
    return report;
}

Json report_to_json(const Report& r)
{
    Json j;
    j["schema"] = "vpfocus-report/1";
    j["status"] = std::string(status_name(r.status));
    j["pass"] = r.pass();
    j["exit_code"] = r.exit_code();
    j["error"] = r.error;
    j["spec"] = spec_json(r.spec);
    j["parameters"] = r.params ? params_to_json(*r.params) : Json(nullptr);

    Json m;
    m["n_shells"] = r.n_shells;
    m["total_mass"] = r.total_mass;
    m["grid_mass"] = r.grid_mass;
    m["truncated_mass"] = r.truncated_mass;
    m["steps"] = r.steps;
    m["energy_initial"] = r.energy_initial;
    m["energy_final"] = r.energy_final;
    m["energy_max_rel_drift"] = r.energy_max_rel_drift;
    j["measured"] = m;

    j["checks"] = Json::array();
    for (const auto& c : r.checks)
        j["checks"].push_back(check_json(c));
    j["cross_checks"] = Json::array();
    for (const auto& c : r.cross_checks)
        j["cross_checks"].push_back(check_json(c));

    if (r.validation) {
        Json v;
        v["pass"] = r.validation->pass;
        v["windows"] = Json::array();
        for (const auto& w : r.validation->checks) {
            Json wj;
            wj["name"] = w.name;
            wj["lower"] = w.lower;
            wj["upper"] = w.upper;
            wj["worst_margin"] = w.worst_margin;
            wj["violations"] = w.violations;
            wj["gating"] = w.gating;
            v["windows"].push_back(wj);
        }
        v["violating_shells"] = r.validation->violating_shells;
        j["initial_validation"] = v;
    } else {
        j["initial_validation"] = nullptr;
    }

    Json l;
    l["shells"] = r.envelope.shells;
    l["envelope_violations"] = r.envelope.envelope_violations;
    l["worst_envelope_margin"] = r.envelope.worst_envelope_margin;
    l["turning_condition_holds"] = r.envelope.turning_condition_holds;
    l["lower_envelope_above_a"] = r.envelope.lower_envelope_above_a;
    l["upper_envelope_below_b"] = r.envelope.upper_envelope_below_b;
    l["d_estimate_holds"] = r.envelope.d_estimate_holds;
    l["max_w_before_T"] = r.envelope.max_w_before_T;
    j["envelope_oracle"] = l;

    Json t;
    t["total_seconds"] = r.seconds_total;
    t["evolve_seconds"] = r.seconds_evolve;
    j["timing"] = t;
    return j;
}

namespace {

std::string number_or_dash(const Json& v)
{
    if (v.is_number())
        return format_number(v.get<double>());
    return "-";
}

void check_table(std::ostringstream& os, const Json& checks)
{
    os << "  " << std::left << std::setw(28) << "check" << std::setw(4) << "rel" << std::setw(24) << "measured"
       << std::setw(24) << "threshold" << std::setw(24) << "margin" << "result\n";
    for (const auto& c : checks) {
        os << "  " << std::left << std::setw(28) << c["name"].get<std::string>() << std::setw(4)
           << c["relation"].get<std::string>() << std::setw(24) << number_or_dash(c["measured"]) << std::setw(24)
           << number_or_dash(c["threshold"]) << std::setw(24) << number_or_dash(c["margin"])
           << (c["pass"].get<bool>() ? "PASS" : "FAIL") << "\n";
    }
}

} // namespace

std::string emit(const Json& report, Format fmt)
{
    if (fmt == Format::Json)
        return report.dump(2) + "\n";

    std::ostringstream os;
    const auto& spec = report["spec"];
    os << "focusing experiment (" << spec["kind"].get<std::string>() << "), grid " << spec["grid"].get<std::string>()
       << ", dt = T * " << number_or_dash(spec["dt_fraction"]) << "\n";
    os << "status: " << report["status"].get<std::string>();
    if (!report["error"].get<std::string>().empty())
        os << " (" << report["error"].get<std::string>() << ")";
    os << "\n";
    if (report["parameters"].is_object()) {
        const auto& p = report["parameters"];
        os << "parameters: a0 = " << number_or_dash(p["a0"]) << ", eps = " << number_or_dash(p["eps"])
           << ", T = " << number_or_dash(p["T"]) << ", delta = " << number_or_dash(p["delta"]) << "\n";
    }
    const auto& m = report["measured"];
    os << "shells: " << m["n_shells"].get<long>() << ", mass: " << number_or_dash(m["total_mass"])
       << ", steps: " << m["steps"].get<long>() << ", energy drift: " << number_or_dash(m["energy_max_rel_drift"])
       << "\n\ntheorem checks:\n";
    check_table(os, report["checks"]);
    os << "\ncross checks (informational):\n";
    check_table(os, report["cross_checks"]);
    os << "\noverall: " << (report["pass"].get<bool>() ? "PASS" : "FAIL") << "\n";
    return os.str();
}

std::string emit(const Report& report, Format fmt)
{
    return emit(report_to_json(report), fmt);
}

int exit_code_of(const Json& report)
{
    if (report.contains("exit_code") && report["exit_code"].is_number_integer())
        return report["exit_code"].get<int>();
    return 3;
}

} // namespace vpfocus
