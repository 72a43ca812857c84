#pragma once

// RK4 evolution of shell ensembles under the self-consistent radial field, and of single
// characteristics under prescribed enclosed-mass profiles.

#include <functional>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "vpfocus/ensemble.hpp"

namespace vpfocus {

/// m(t, r) computed from the ensemble itself (half-self convention).
struct SelfConsistent {};
/// m(t, r) = M everywhere.
struct ConstantMass {
    double M = 0.0;
};
struct ZeroMass {};
/// User profile m(t, r); every value must lie in [0, total].
struct CustomMass {
    std::function<double(double, double)> m;
    double total = 0.0;
};

using MassProfile = std::variant<SelfConsistent, ConstantMass, ZeroMass, CustomMass>;

struct IntegratorConfig {
    double dt = 1e-3;            ///< signed; negative integrates backwards
    long max_steps = 200'000'000;
    double r_min = 1e-9;         ///< radius guard
    long snapshot_stride = 0;    ///< 0 disables snapshots
};

/// Enclosed charge per shell: all lighter-radius weight plus half of every shell at the same
/// radius (including itself). Sorting is O(n log n); the solver keeps its last ordering and
/// re-sorts adaptively, which is cheap when shells barely move between calls.
class EnclosedMassSolver {
public:
    const Eigen::ArrayXd& compute(const Eigen::ArrayXd& r, const Eigen::ArrayXd& mu);
    /// Shell indices sorted by (radius, index) from the last compute().
    const std::vector<Eigen::Index>& order() const { return order_; }

private:
    void sort_order(const Eigen::ArrayXd& r);

    std::vector<Eigen::Index> order_;
    Eigen::ArrayXd m_;
};

Eigen::ArrayXd enclosed_mass(const Ensemble& ens);

/// One classical RK4 step of size cfg.dt. The enclosed mass is recomputed at every stage.
Ensemble step(const Ensemble& ens, const IntegratorConfig& cfg, const MassProfile& profile = SelfConsistent{});

struct Snapshot {
    double t = 0.0;
    Eigen::ArrayXd r;
    Eigen::ArrayXd w;
    Eigen::ArrayXd m_enclosed;
};

struct EvolveResult {
    Ensemble ensemble;
    std::vector<Snapshot> snapshots;
    long steps = 0;
};

/// Called after every completed step with the current state and step count.
using StepObserver = std::function<void(const Ensemble&, long)>;

/// Steps to exactly t_end (the last step may be partial). With snapshot_stride > 0 snapshots are
/// taken at the start, every stride steps, and at t_end.
EvolveResult evolve(const Ensemble& ens, double t_end, const IntegratorConfig& cfg,
                    const MassProfile& profile = SelfConsistent{}, const StepObserver& observer = {});

struct TrajectorySample {
    double t = 0.0;
    PhasePoint point;
};

using Trajectory = std::vector<TrajectorySample>;

/// Streams every RK4 sample (including t = 0) of a single characteristic to `visit`; stops early
/// when `visit` returns false. Uses the scalar phase-space right-hand side.
void for_each_trajectory_sample(SystemKind kind, const PhasePoint& p, const MassProfile& profile, double t_end,
                                const IntegratorConfig& cfg,
                                const std::function<bool(const TrajectorySample&)>& visit);

/// Every RK4 step of a single characteristic under a prescribed (non self-consistent) profile.
Trajectory single_trajectory(SystemKind kind, const PhasePoint& p, const MassProfile& profile, double t_end,
                             const IntegratorConfig& cfg);

/// First zero of W, by linear interpolation between the bracketing samples. Throws NotFoundError
/// when W never changes sign and DomainError when W starts non-negative.
double turning_time(const Trajectory& traj);

/// Kinetic (VP: mu (w^2 + l/r^2)/2, RVP: mu * gamma) plus pairwise mu_i mu_j / max(R_i, R_j)
/// plus self mu_i^2 / (2 R_i).
double total_energy(const Ensemble& ens);

} // namespace vpfocus
