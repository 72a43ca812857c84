#pragma once

// End-to-end focusing experiment: parameters -> initial shells -> evolution to T ->
// theorem checks, cross-checks and artifacts.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vpfocus/initdata.hpp"
#include "vpfocus/io.hpp"
#include "vpfocus/params.hpp"

namespace vpfocus {

/// 1/4096 for VP. RVP needs 1/16384 to hold the energy drift below 1e-5: near the focus the
/// shells move at light speed and T/4096 is larger than the target radius.
double default_dt_fraction(SystemKind kind);

struct ExperimentSpec {
    SystemKind kind = SystemKind::VP;
    TargetSpec targets{1.0, 10.0, 1.0, 2.0, 3.0};
    SamplingGrid grid;
    /// dt = T * dt_fraction; unset means default_dt_fraction(kind).
    std::optional<double> dt_fraction;
    double safety_factor = 1.0;
    double weight_floor = 1e-15;
    int bins_initial = 64;         ///< across the initial support [a0 - eps, a0 + eps], capped at grid.n_r
    int bins_final = 64;           ///< across the target shell [a, b]
    long snapshot_stride = 512;
    double concentration_slack = 0.05;
    std::filesystem::path output_dir; ///< empty: no artifacts

    double resolved_dt_fraction() const;

    /// Throws DomainError on any invariant violation (including a >= b).
    void validate() const;
};

/// Reads `key = value` lines (`#` starts a comment). Keys: kind, C1, C2, a, b, c, n_r, n_w, n_l,
/// safety_factor, dt_frac. Unknown keys and malformed values throw DomainError.
ExperimentSpec parse_config(std::istream& in, ExperimentSpec base = {});
ExperimentSpec load_config(const std::filesystem::path& path, ExperimentSpec base = {});

/// Parses "NRxNWxNL".
SamplingGrid parse_grid(const std::string& text);

struct Check {
    std::string name;
    std::string relation; ///< "<=", ">=", "in"
    double measured = 0.0;
    double threshold = 0.0;
    double margin = 0.0; ///< positive when satisfied
    bool pass = false;
};

enum class RunStatus { Ok, Infeasible, NumericalFailure };

struct EnvelopeOracleSummary {
    long shells = 0;
    /// Shells whose simulated R(T) leaves the envelope [lower, sqrt(upper_sq)] evaluated with M.
    long envelope_violations = 0;
    double worst_envelope_margin = 0.0;
    /// Shells for which the sufficient analytic condition T <= lower bound of T0 holds.
    long turning_condition_holds = 0;
    /// Proof inequalities: analytic lower envelope at T >= a, analytic upper envelope at T <= b^2.
    long lower_envelope_above_a = 0;
    long upper_envelope_below_b = 0;
    /// RVP: shells with D <= 86 pi a0^(16/3).
    long d_estimate_holds = 0;
    /// Largest W reached by any shell on [0, T]; negative means no turning before T.
    double max_w_before_T = 0.0;
};

struct Report {
    ExperimentSpec spec;
    RunStatus status = RunStatus::Ok;
    std::string error;
    std::optional<ParameterSet> params;

    long n_shells = 0;
    double total_mass = 0.0;
    double grid_mass = 0.0;
    double truncated_mass = 0.0;
    long steps = 0;
    double energy_initial = 0.0;
    double energy_final = 0.0;
    double energy_max_rel_drift = 0.0;

    std::vector<Check> checks;       ///< the six theorem checks
    std::vector<Check> cross_checks; ///< non-gating consistency checks
    std::optional<InitialValidation> validation;
    EnvelopeOracleSummary envelope;

    double seconds_total = 0.0;
    double seconds_evolve = 0.0;

    bool pass() const;
    /// 0 pass, 1 theorem-check failure, 2 infeasible parameters, 3 numerical failure.
    int exit_code() const;
};

/// Runs the whole pipeline. Never throws for infeasible parameters or numerical failures; those
/// come back as a failed report. Writes artifacts when spec.output_dir is set.
Report run_experiment(const ExperimentSpec& spec);

Json report_to_json(const Report& report);

enum class Format { Json, Text };

/// Serializes a report JSON document. JSON output is `dump(2)` of the ordered document.
std::string emit(const Json& report, Format fmt);
std::string emit(const Report& report, Format fmt);
/// Exit code encoded by a report JSON document.
int exit_code_of(const Json& report);

} // namespace vpfocus
