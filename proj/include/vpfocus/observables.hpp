#pragma once

// Radial density and field reconstructed from a shell ensemble.

#include <vector>

#include <Eigen/Core>

#include "vpfocus/ensemble.hpp"

namespace vpfocus {

struct RadialBinning {
    double r_lo = 0.0;
    double r_hi = 1.0;
    int n_bins = 64;

    /// Window [lo, hi] cut into bins of exactly `width`; hi is extended to a whole number of bins.
    static RadialBinning with_width(double lo, double hi, double width);
};

struct FieldSample {
    double r = 0.0;
    double E = 0.0;
};

struct Observables {
    Eigen::ArrayXd bin_edges;  ///< n_bins + 1 edges
    Eigen::ArrayXd rho;        ///< mean density per bin
    Eigen::ArrayXd bin_mass;
    std::vector<FieldSample> field; ///< at shell radii from above and at bin edges, sorted by r
    double linf_rho = 0.0;
    double linf_field = 0.0;
    double r_min = 0.0;
    double r_max = 0.0;
    double total_mass = 0.0;

    Eigen::ArrayXd bin_mid() const;
};

/// Throws DomainError listing the escaping shells if the window misses any shell.
Observables measure(const Ensemble& ens, const RadialBinning& binning);

/// m(r)/r^2 with m(r) = weight strictly inside r plus half the weight at radius exactly r.
double field_at(const Ensemble& ens, double r);

} // namespace vpfocus
