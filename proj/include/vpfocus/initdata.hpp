#pragma once

// Explicit focusing initial datum f0(r, w, l) and its discretization into shells.

#include <string>
#include <vector>

#include "vpfocus/ensemble.hpp"
#include "vpfocus/mollifier.hpp"
#include "vpfocus/params.hpp"

namespace vpfocus {

/// Argument of the bump: VP (r - d + T w)^2 + T^2 l / r^2, RVP (r + d + w)^2 + l / r^2.
double support_argument(const ParameterSet& params, const PhasePoint& p);

/// The bump H_delta with the normalization the parameter set requires.
ScaledBump initial_bump(const ParameterSet& params);

/// f0(r, w, l) >= 0.
double f0_eval(const ParameterSet& params, const PhasePoint& p);

/// Cutoff chi(r) of the initial radial profile.
double initial_cutoff(const ParameterSet& params, double r);

/// rho0(r) = pi / r^2 * int int f0 dw dl, by adaptive quadrature in the variables that
/// straighten the support (u = r - d + T w, q = T^2 l / r^2 for VP).
double rho0_radial(const ParameterSet& params, double r);

struct SamplingGrid {
    int n_r = 64;
    int n_w = 64;
    int n_l = 16;
};

struct PhaseBox {
    double r_lo = 0.0, r_hi = 0.0;
    double w_lo = 0.0, w_hi = 0.0;
    double l_lo = 0.0, l_hi = 0.0;
};

/// Bounding box of supp f0.
PhaseBox support_box(const ParameterSet& params);

struct SamplingOptions {
    double weight_floor = 1e-15; ///< shells lighter than weight_floor * M are dropped
};

struct SampledEnsemble {
    Ensemble ensemble;
    double grid_mass = 0.0;      ///< sum over all nonzero cells
    double truncated_mass = 0.0; ///< mass of dropped cells
    long nonzero_cells = 0;
    long dropped_cells = 0;
};

/// Tensor-product midpoint sampling of 4 pi^2 f0 dr dw dl over support_box. Throws SamplingError
/// if no cell carries mass.
SampledEnsemble sample_ensemble(const ParameterSet& params, const SamplingGrid& grid,
                                const SamplingOptions& options = {});

struct WindowCheck {
    std::string name;
    double lower = 0.0;
    double upper = 0.0;
    double worst_margin = 0.0; ///< min over shells of the distance to the nearer end (negative = outside)
    long violations = 0;
    bool gating = true;
    bool pass() const { return violations == 0; }
};

struct InitialValidation {
    std::vector<WindowCheck> checks;
    std::vector<long> violating_shells; ///< first violating ids, capped
    bool pass = true;
};

/// Shell-by-shell radius, velocity and angular momentum windows. Never throws on violations.
InitialValidation validate_initial(const Ensemble& ens, const ParameterSet& params);

} // namespace vpfocus
