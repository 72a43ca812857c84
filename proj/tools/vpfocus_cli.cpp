// vpfocus: focusing solutions of the spherically symmetric (relativistic) Vlasov-Poisson system.

#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "vpfocus/certify.hpp"
#include "vpfocus/errors.hpp"
#include "vpfocus/harness.hpp"

using namespace vpfocus;

namespace {

struct SpecFlags {
    std::string config;
    std::optional<std::string> kind;
    std::optional<double> c1, c2, a, b, c, dt_frac;
    std::optional<std::string> grid;
    std::string out;
    std::string format = "text";

    void attach(CLI::App* app, bool with_out = true)
    {
        app->add_option("--config", config, "config file with key = value lines")->check(CLI::ExistingFile);
        app->add_option("--kind", kind, "vp or rvp")->check(CLI::IsMember({"vp", "rvp", "VP", "RVP"}));
        app->add_option("--c1", c1, "upper bound on the initial sup norms");
        app->add_option("--c2", c2, "lower bound on the sup norms at T");
        app->add_option("--a", a, "inner target radius");
        app->add_option("--b", b, "outer target radius");
        app->add_option("--c", c, "minimum initial radius");
        app->add_option("--grid", grid, "sampling grid NRxNWxNL");
        app->add_option("--dt-frac", dt_frac, "time step as a fraction of T (default 1/4096 VP, 1/16384 RVP)");
        if (with_out)
            app->add_option("--out", out, "output directory for artifacts");
        app->add_option("--format", format, "json or text")->check(CLI::IsMember({"json", "text"}));
    }

    ExperimentSpec spec() const
    {
        ExperimentSpec s;
        if (!config.empty())
            s = load_config(config, s);
        if (kind)
            s.kind = parse_kind(*kind);
        if (c1)
            s.targets.C1 = *c1;
        if (c2)
            s.targets.C2 = *c2;
        if (a)
            s.targets.a = *a;
        if (b)
            s.targets.b = *b;
        if (c)
            s.targets.c = *c;
        if (grid)
            s.grid = parse_grid(*grid);
        if (dt_frac)
            s.dt_fraction = *dt_frac;
        if (!out.empty())
            s.output_dir = out;
        s.validate();
        return s;
    }

    Format fmt() const { return format == "json" ? Format::Json : Format::Text; }
};

void write_artifact(const ExperimentSpec& s, const char* name, const std::string& text)
{
    if (s.output_dir.empty())
        return;
    std::filesystem::create_directories(s.output_dir);
    write_text_file(s.output_dir / name, text);
}

ParameterSet derive(const ExperimentSpec& s)
{
    DeriveOptions options;
    options.safety_factor = s.safety_factor;
    return derive_parameters(s.kind, s.targets, options);
}

void print_params_text(const ParameterSet& p)
{
    const Json j = params_to_json(p);
    for (const auto& [key, value] : j.items()) {
        if (value.is_number())
            std::cout << std::left << std::setw(24) << key << format_number(value.get<double>()) << "\n";
        else if (value.is_string())
            std::cout << std::left << std::setw(24) << key << value.get<std::string>() << "\n";
    }
    std::cout << "a0 terms:\n";
    for (const auto& t : p.a0_terms)
        std::cout << "  " << std::left << std::setw(22) << t.name << format_number(t.value) << "\n";
    std::cout << "T constraints:\n";
    for (const auto& t : p.T_terms)
        std::cout << "  " << std::left << std::setw(22) << t.name << format_number(t.value) << "\n";
}

int cmd_derive(const SpecFlags& flags)
{
    const ExperimentSpec s = flags.spec();
    const ParameterSet p = derive(s);
    const std::string json = params_to_json(p).dump(2) + "\n";
    write_artifact(s, "params.json", json);
    if (flags.fmt() == Format::Json)
        std::cout << json;
    else
        print_params_text(p);
    return 0;
}

int cmd_build_initial(const SpecFlags& flags)
{
    const ExperimentSpec s = flags.spec();
    const ParameterSet p = derive(s);
    SamplingOptions options;
    options.weight_floor = s.weight_floor;
    const SampledEnsemble sampled = sample_ensemble(p, s.grid, options);
    const InitialValidation validation = validate_initial(sampled.ensemble, p);
    write_artifact(s, "params.json", params_to_json(p).dump(2) + "\n");
    write_artifact(s, "initial.csv", ensemble_csv(sampled.ensemble));

    Json j;
    j["shells"] = sampled.ensemble.size();
    j["total_mass"] = sampled.ensemble.total_weight();
    j["grid_mass"] = sampled.grid_mass;
    j["truncated_mass"] = sampled.truncated_mass;
    j["dropped_cells"] = sampled.dropped_cells;
    j["windows_pass"] = validation.pass;
    j["windows"] = Json::array();
    for (const auto& w : validation.checks)
        j["windows"].push_back({{"name", w.name}, {"worst_margin", w.worst_margin},
                                {"violations", w.violations}, {"gating", w.gating}});
    if (flags.fmt() == Format::Json) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "shells " << sampled.ensemble.size() << ", mass " << format_number(j["total_mass"].get<double>())
                  << ", truncated " << format_number(sampled.truncated_mass) << "\n";
        for (const auto& w : validation.checks)
            std::cout << "  " << std::left << std::setw(26) << w.name << std::setw(24) << format_number(w.worst_margin)
                      << w.violations << " violations" << (w.gating ? "" : " (informational)") << "\n";
    }
    return validation.pass ? 0 : 3;
}

int cmd_evolve(const SpecFlags& flags, std::optional<double> t_end, long stride)
{
    ExperimentSpec s = flags.spec();
    const ParameterSet p = derive(s);
    SamplingOptions options;
    options.weight_floor = s.weight_floor;
    const Ensemble initial = sample_ensemble(p, s.grid, options).ensemble;
    IntegratorConfig cfg;
    cfg.dt = p.T * s.resolved_dt_fraction();
    cfg.snapshot_stride = stride;
    const double horizon = t_end.value_or(p.T);
    const EvolveResult run = evolve(initial, horizon, cfg);
    write_artifact(s, "params.json", params_to_json(p).dump(2) + "\n");
    write_artifact(s, "initial.csv", ensemble_csv(initial));
    write_artifact(s, "snapshots.csv", snapshots_csv(initial, run.snapshots));

    const double r_min = run.ensemble.r.minCoeff();
    const double r_max = run.ensemble.r.maxCoeff();
    Json j;
    j["t_end"] = horizon;
    j["steps"] = run.steps;
    j["snapshots"] = run.snapshots.size();
    j["r_min"] = r_min;
    j["r_max"] = r_max;
    j["energy_initial"] = total_energy(initial);
    j["energy_final"] = total_energy(run.ensemble);
    if (flags.fmt() == Format::Json) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "evolved to t = " << format_number(horizon) << " in " << run.steps << " steps\n"
                  << "radii in [" << format_number(r_min) << ", " << format_number(r_max) << "]\n"
                  << "energy " << format_number(j["energy_initial"].get<double>()) << " -> "
                  << format_number(j["energy_final"].get<double>()) << "\n";
    }
    return 0;
}

Json certificate_json(const DatumCertificate& c)
{
    Json j;
    j["kind"] = std::string(to_string(c.kind));
    j["r"] = c.datum.r;
    j["w"] = c.datum.w;
    j["l"] = c.datum.l;
    j["M"] = c.datum.M;
    j["t0_measured"] = c.t0_measured;
    j["t0_lower"] = c.t0_lower;
    j["t0_upper"] = c.t0_upper;
    j["dt"] = c.dt;
    j["upper_margin"] = c.upper_margin;
    j["lower_margin"] = c.lower_margin;
    j["kinetic_margin"] = c.kinetic_margin;
    j["sign_changes"] = c.sign_changes;
    j["pass"] = c.pass();
    return j;
}

int cmd_check_bounds(const std::string& kind_text, std::optional<double> r, std::optional<double> w,
                     std::optional<double> l, double M, int samples, unsigned long long seed, const std::string& format)
{
    const SystemKind kind = parse_kind(kind_text);
    std::vector<InitialDatum> data;
    if (r || w || l) {
        if (!(r && w && l))
            throw DomainError("--r, --w and --l must be given together");
        data.push_back({*r, *w, *l, M});
    } else {
        std::mt19937_64 rng(seed);
        for (int i = 0; i < samples; ++i)
            data.push_back(random_datum(rng));
    }

    const bool json = format == "json";
    if (!json)
        std::cout << std::left << std::setw(12) << "r" << std::setw(12) << "w" << std::setw(12) << "l"
                  << std::setw(8) << "M" << std::setw(14) << "T0" << std::setw(14) << "T0_lower" << std::setw(14)
                  << "T0_upper" << std::setw(13) << "upper_margin" << std::setw(13) << "lower_margin"
                  << std::setw(13) << "kin_margin" << "result\n";
    long failures = 0;
    for (const auto& d : data) {
        const DatumCertificate c = certify_datum(kind, d);
        failures += c.pass() ? 0 : 1;
        if (json) {
            std::cout << certificate_json(c).dump() << "\n";
            continue;
        }
        auto num = [](double v) {
            std::ostringstream os;
            os << std::setprecision(5) << v;
            return os.str();
        };
        std::cout << std::left << std::setw(12) << num(d.r) << std::setw(12) << num(d.w) << std::setw(12) << num(d.l)
                  << std::setw(8) << num(d.M) << std::setw(14) << num(c.t0_measured) << std::setw(14)
                  << num(c.t0_lower) << std::setw(14) << num(c.t0_upper) << std::setw(13) << num(c.upper_margin)
                  << std::setw(13) << num(c.lower_margin) << std::setw(13) << num(c.kinetic_margin)
                  << (c.pass() ? "PASS" : "FAIL") << "\n";
    }
    if (!json)
        std::cout << data.size() - failures << "/" << data.size() << " data certified\n";
    return failures == 0 ? 0 : 1;
}

int cmd_focus(const SpecFlags& flags)
{
    const Report report = run_experiment(flags.spec());
    std::cout << emit(report, flags.fmt());
    return report.exit_code();
}

int cmd_report(const std::string& path, const std::string& format)
{
    const Json j = Json::parse(read_text_file(path));
    std::cout << emit(j, format == "json" ? Format::Json : Format::Text);
    return exit_code_of(j);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Focusing solutions of the spherically symmetric Vlasov-Poisson system"};
    app.require_subcommand(1);

    SpecFlags derive_flags, initial_flags, evolve_flags, focus_flags;
    auto* derive_cmd = app.add_subcommand("derive-params", "derive the construction constants");
    derive_flags.attach(derive_cmd);
    auto* initial_cmd = app.add_subcommand("build-initial", "sample and validate the initial shells");
    initial_flags.attach(initial_cmd);

    auto* evolve_cmd = app.add_subcommand("evolve", "evolve the initial shells to T");
    evolve_flags.attach(evolve_cmd);
    std::optional<double> t_end;
    long stride = 512;
    evolve_cmd->add_option("--t-end", t_end, "final time (default T)");
    evolve_cmd->add_option("--snapshot-stride", stride, "steps between snapshots, 0 for none")->check(CLI::NonNegativeNumber);

    auto* bounds_cmd = app.add_subcommand("check-bounds", "certify the characteristic bounds on single data");
    std::string bounds_kind = "vp";
    std::optional<double> br, bw, bl;
    double bM = 0.0;
    int samples = 10;
    unsigned long long seed = 1;
    std::string bounds_format = "text";
    bounds_cmd->add_option("--kind", bounds_kind, "vp or rvp")->check(CLI::IsMember({"vp", "rvp", "VP", "RVP"}));
    bounds_cmd->add_option("--r", br, "initial radius");
    bounds_cmd->add_option("--w", bw, "initial radial velocity (< 0)");
    bounds_cmd->add_option("--l", bl, "angular momentum squared (> 0)");
    bounds_cmd->add_option("--M", bM, "constant enclosed mass")->check(CLI::NonNegativeNumber);
    bounds_cmd->add_option("--samples", samples, "random data when no datum is given")->check(CLI::PositiveNumber);
    bounds_cmd->add_option("--seed", seed, "random seed");
    bounds_cmd->add_option("--format", bounds_format, "json (one line per datum) or text")
        ->check(CLI::IsMember({"json", "text"}));

    auto* focus_cmd = app.add_subcommand("focus-experiment", "run the full focusing experiment");
    focus_flags.attach(focus_cmd);

    auto* report_cmd = app.add_subcommand("report", "re-emit a saved report.json");
    std::string report_path;
    std::string report_format = "text";
    report_cmd->add_option("path", report_path, "report.json")->required()->check(CLI::ExistingFile);
    report_cmd->add_option("--format", report_format, "json or text")->check(CLI::IsMember({"json", "text"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (*derive_cmd)
            return cmd_derive(derive_flags);
        if (*initial_cmd)
            return cmd_build_initial(initial_flags);
        if (*evolve_cmd)
            return cmd_evolve(evolve_flags, t_end, stride);
        if (*bounds_cmd)
            return cmd_check_bounds(bounds_kind, br, bw, bl, bM, samples, seed, bounds_format);
        if (*focus_cmd)
            return cmd_focus(focus_flags);
        if (*report_cmd)
            return cmd_report(report_path, report_format);
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible (" << e.constraint() << "): " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
