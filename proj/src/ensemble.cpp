#include "vpfocus/ensemble.hpp"

#include <string>

#include "vpfocus/errors.hpp"

namespace vpfocus {

Ensemble::Ensemble(SystemKind k, const std::vector<Shell>& shells, double time)
    : kind(k), t(time)
{
    const auto n = static_cast<Eigen::Index>(shells.size());
    r.resize(n);
    w.resize(n);
    l.resize(n);
    mu.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& s = shells[static_cast<std::size_t>(i)];
        r[i] = s.point.r;
        w[i] = s.point.w;
        l[i] = s.point.l;
        mu[i] = s.mu;
    }
    validate();
}

void Ensemble::validate() const
{
    const auto n = r.size();
    if (w.size() != n || l.size() != n || mu.size() != n)
        throw DomainError("ensemble columns have mismatched sizes");
    if (!r.allFinite() || !w.allFinite() || !l.allFinite() || !mu.allFinite())
        throw DomainError("ensemble contains non-finite values");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(r[i] > 0.0))
            throw DomainError("shell " + std::to_string(i) + " has non-positive radius");
        if (l[i] < 0.0)
            throw DomainError("shell " + std::to_string(i) + " has negative l");
        if (!(mu[i] > 0.0))
            throw DomainError("shell " + std::to_string(i) + " has non-positive weight");
    }
}

} // namespace vpfocus
