#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "vpfocus/phase.hpp"

namespace vpfocus {

/// A spherical charge shell: a phase point carrying charge weight mu > 0.
struct Shell {
    PhasePoint point;
    double mu = 0.0;
};

/// Weighted shell set standing in for f(t). Columns are stored as Eigen arrays; shell i has
/// identity i for its whole life (evolution never reorders).
struct Ensemble {
    SystemKind kind = SystemKind::VP;
    double t = 0.0;
    Eigen::ArrayXd r;
    Eigen::ArrayXd w;
    Eigen::ArrayXd l;
    Eigen::ArrayXd mu;

    Ensemble() = default;
    Ensemble(SystemKind k, const std::vector<Shell>& shells, double time = 0.0);

    Eigen::Index size() const { return r.size(); }
    bool empty() const { return r.size() == 0; }
    Shell shell(Eigen::Index i) const { return {{r[i], w[i], l[i]}, mu[i]}; }
    double total_weight() const { return mu.sum(); }

    /// Throws DomainError if columns disagree in size, a radius is <= 0, l < 0 or mu <= 0.
    void validate() const;
};

} // namespace vpfocus
