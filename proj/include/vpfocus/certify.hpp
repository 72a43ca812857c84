#pragma once

// Certification of the closed-form characteristic bounds against fine-step trajectories
// under a constant enclosed mass M.

#include <limits>
#include <random>

#include "vpfocus/bounds.hpp"
#include "vpfocus/phase.hpp"

namespace vpfocus {

struct CertifyOptions {
    /// RK4 steps per perihelion crossing time r_p / |r'|, where r_p = sqrt(l)/|v| is the free
    /// closest approach (a lower bound on the radius under a repulsive field).
    double steps_per_timescale = 2000.0;
    long max_steps = 20'000'000;
    double envelope_rel_tol = 1e-6; ///< radius envelopes, relative to r
    double kinetic_abs_tol = 1e-9;  ///< relativistic W^2 + l/R^2 cap
};

struct DatumCertificate {
    SystemKind kind = SystemKind::VP;
    InitialDatum datum;
    double dt = 0.0;
    long steps = 0;

    double t0_measured = 0.0;
    double t0_lower = 0.0;
    double t0_upper = std::numeric_limits<double>::infinity(); ///< RVP only
    bool t0_ok = false;

    /// Minimum over samples t < T0 of (upper_sq + tol) - R^2, scaled by 1/r^2.
    double upper_margin = std::numeric_limits<double>::infinity();
    /// Minimum over samples t < T0 - dt of R - (lower - tol), scaled by 1/r.
    double lower_margin = std::numeric_limits<double>::infinity();
    /// RVP: minimum of (cap + tol) - (W^2 + l/R^2).
    double kinetic_margin = std::numeric_limits<double>::infinity();
    long samples_checked = 0;
    /// Sign changes of W over [0, 2 T0]; uniqueness of the turning point means exactly 1.
    int sign_changes = 0;

    bool pass() const
    {
        return t0_ok && upper_margin >= 0.0 && lower_margin >= 0.0 && kinetic_margin >= 0.0 && sign_changes == 1;
    }
};

/// Random datum for property suites: r log-uniform in [0.1, 10], |w| log-uniform in [0.1, 10] with
/// w < 0, l log-uniform in [1e-3, 10], and M = 0 for half the draws, otherwise uniform in (0, 10].
InitialDatum random_datum(std::mt19937_64& rng);

/// Integrates the datum under ConstantMass{M} until past twice its turning time and checks
/// every applicable bound conclusion at every sample.
DatumCertificate certify_datum(SystemKind kind, const InitialDatum& datum, const CertifyOptions& options = {});

} // namespace vpfocus
