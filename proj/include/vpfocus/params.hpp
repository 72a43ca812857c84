#pragma once

// Parameter derivation for the focusing initial data: from target bounds
// (C1, C2) and radii a < b < c to the constants k, eps, a0, T, d, delta
// (and N, h for the relativistic system).

#include <string>
#include <vector>

#include "vpfocus/phase.hpp"

namespace vpfocus {

struct TargetSpec {
    double C1 = 1.0; ///< sup bound on rho(0), E(0)
    double C2 = 1.0; ///< lower bound on rho(T), E(T)
    double a = 1.0;
    double b = 2.0;
    double c = 3.0;

    /// Throws DomainError unless c > b > a > 0 and C1, C2 > 0.
    void validate() const;
};

struct NamedTerm {
    std::string name;
    double value = 0.0;
};

struct DeriveOptions {
    double safety_factor = 1.0; ///< a0 = safety_factor * max(term list), >= 1
    int max_fixed_point_iterations = 100; ///< cap on the VP root solve for T
};

struct ParameterSet {
    SystemKind kind = SystemKind::VP;
    TargetSpec targets;
    double safety_factor = 1.0;

    double k = 0.0;
    double eps = 0.0;
    double a0 = 0.0;
    double T = 0.0;
    double d = 0.0;
    double delta = 0.0;
    double N = 0.0; ///< RVP only
    double h = 0.0; ///< RVP only
    double l_max = 0.0;

    std::vector<NamedTerm> a0_terms;
    /// Time constraints: VP lists each bound of the T inequality (both readings), RVP the
    /// lower and upper ends of the admissible interval.
    std::vector<NamedTerm> T_terms;
    int fixed_point_iterations = 0; ///< bracketing halvings plus root-solver iterations

    double sqrt_k_b() const;
    /// Total mass the initial datum must carry per unit radial volume: the bump normalization.
    double bump_mass() const;
    /// Inclusive range of M from the rho0 bounds: [2 pi a0 eps + pi/6 eps^3/a0, 8 pi a0 eps + 8 pi/3 eps^3/a0].
    double mass_lower_bound() const;
    double mass_upper_bound() const;
};

/// Closed-form term list for a0 (VP: six terms, RVP: ten terms), before the safety factor.
std::vector<NamedTerm> a0_term_list(SystemKind kind, const TargetSpec& spec);

/// Derives all constants. Throws InfeasibleError naming the violated constraint.
ParameterSet derive_parameters(SystemKind kind, const TargetSpec& spec, const DeriveOptions& options = {});

/// Remark-1 window: eps < (sqrt(k) b - a)/2, so the VP velocity window is nonempty.
double vp_velocity_window_margin(const ParameterSet& p);

/// The two inequalities that make the RVP T interval nonempty, as (rhs - lhs):
/// sqrt(N) - (a0^3 + h a0)/(a0^3 - h a0) and N - (2 + (a0^3 + h a0)^2)/(1 + (a0^3 - h a0)^2).
struct RvpIntervalMargins {
    double ratio_margin = 0.0;
    double square_margin = 0.0;
};
RvpIntervalMargins rvp_interval_margins(const ParameterSet& p);

/// VP time bounds evaluated for a given l: {first bound with eps reading, first bound with eps^3 reading, second bound}.
std::vector<NamedTerm> vp_time_bounds(const ParameterSet& p, double l);

} // namespace vpfocus
