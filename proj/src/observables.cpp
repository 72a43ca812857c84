#include "vpfocus/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "vpfocus/errors.hpp"

namespace vpfocus {

using Eigen::ArrayXd;
using Eigen::Index;

RadialBinning RadialBinning::with_width(double lo, double hi, double width)
{
    if (!(width > 0.0) || !(hi > lo))
        throw DomainError("binning needs hi > lo and a positive width");
    const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / width - 1e-9)));
    return {lo, lo + n * width, n};
}

ArrayXd Observables::bin_mid() const
{
    const Index n = rho.size();
    return 0.5 * (bin_edges.head(n) + bin_edges.tail(n));
}

Observables measure(const Ensemble& ens, const RadialBinning& binning)
{
    if (ens.empty())
        throw DomainError("cannot measure an empty ensemble");
    if (!(binning.r_hi > binning.r_lo) || !(binning.r_lo >= 0.0) || binning.n_bins < 1)
        throw DomainError("invalid radial binning");

    std::vector<Index> escapees;
    for (Index i = 0; i < ens.size(); ++i)
        if (ens.r[i] < binning.r_lo || ens.r[i] > binning.r_hi)
            escapees.push_back(i);
    if (!escapees.empty()) {
        std::ostringstream os;
        os.precision(17);
        os << escapees.size() << " shell(s) outside the binning window [" << binning.r_lo << ", " << binning.r_hi
           << "]:";
        for (std::size_t k = 0; k < std::min<std::size_t>(escapees.size(), 10); ++k)
            os << " " << escapees[k] << "(r=" << ens.r[escapees[k]] << ")";
        throw DomainError(os.str());
    }

    Observables obs;
    const int n = binning.n_bins;
    const double width = (binning.r_hi - binning.r_lo) / n;
    obs.bin_edges = ArrayXd::LinSpaced(n + 1, binning.r_lo, binning.r_hi);
    obs.bin_mass = ArrayXd::Zero(n);
    for (Index i = 0; i < ens.size(); ++i) {
        auto b = static_cast<int>((ens.r[i] - binning.r_lo) / width);
        b = std::clamp(b, 0, n - 1);
        obs.bin_mass[b] += ens.mu[i];
    }
    const ArrayXd lo = obs.bin_edges.head(n);
    const ArrayXd hi = obs.bin_edges.tail(n);
    obs.rho = obs.bin_mass / ((4.0 * std::numbers::pi / 3.0) * (hi.cube() - lo.cube()));
    obs.linf_rho = obs.rho.maxCoeff();

    std::vector<Index> order(static_cast<std::size_t>(ens.size()));
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(),
              [&](Index a, Index b) { return ens.r[a] < ens.r[b] || (ens.r[a] == ens.r[b] && a < b); });

    // From above at each distinct shell radius: all weight up to and including that radius.
    std::vector<FieldSample> at_shells;
    double inside = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        inside += ens.mu[order[k]];
        const double r = ens.r[order[k]];
        if (k + 1 < order.size() && ens.r[order[k + 1]] == r)
            continue;
        at_shells.push_back({r, inside / (r * r)});
    }
    obs.total_mass = inside;
    obs.r_min = ens.r[order.front()];
    obs.r_max = ens.r[order.back()];

    std::vector<FieldSample> at_edges;
    for (Index e = 0; e <= n; ++e) {
        const double r = obs.bin_edges[e];
        if (r > 0.0)
            at_edges.push_back({r, field_at(ens, r)});
    }
    obs.field.reserve(at_shells.size() + at_edges.size());
    std::merge(at_shells.begin(), at_shells.end(), at_edges.begin(), at_edges.end(), std::back_inserter(obs.field),
               [](const FieldSample& x, const FieldSample& y) { return x.r < y.r; });
    for (const auto& s : obs.field)
        obs.linf_field = std::max(obs.linf_field, s.E);
    return obs;
}

double field_at(const Ensemble& ens, double r)
{
    if (!(r > 0.0) || !std::isfinite(r))
        throw DomainError("field_at needs a positive finite radius");
    double m = 0.0;
    for (Index i = 0; i < ens.size(); ++i) {
        if (ens.r[i] < r)
            m += ens.mu[i];
        else if (ens.r[i] == r)
            m += 0.5 * ens.mu[i];
    }
    return m / (r * r);
}

} // namespace vpfocus
