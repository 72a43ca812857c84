#pragma once

// Reduced phase space (r, w, l) of a spherically symmetric Vlasov-Poisson
// system and the right-hand sides of its characteristic ODEs.

#include <cmath>
#include <string>
#include <string_view>

#include "vpfocus/errors.hpp"

namespace vpfocus {

enum class SystemKind { VP, RVP };

inline std::string_view to_string(SystemKind kind)
{
    return kind == SystemKind::VP ? "vp" : "rvp";
}

inline SystemKind parse_kind(std::string_view s)
{
    if (s == "vp" || s == "VP")
        return SystemKind::VP;
    if (s == "rvp" || s == "RVP")
        return SystemKind::RVP;
    throw DomainError("unknown system kind '" + std::string(s) + "' (expected vp or rvp)");
}

/// One characteristic: radius r > 0, radial momentum w, squared angular momentum l >= 0.
template <typename Scalar>
struct BasicPhasePoint {
    Scalar r{1};
    Scalar w{0};
    Scalar l{0};
};

template <typename Scalar>
struct BasicPhaseDerivative {
    Scalar dr{0};
    Scalar dw{0};
    Scalar dl{0};
};

using PhasePoint = BasicPhasePoint<double>;
using PhaseDerivative = BasicPhaseDerivative<double>;

namespace detail {
template <typename Scalar>
void require_phase_domain(const BasicPhasePoint<Scalar>& p)
{
    using std::isfinite;
    if (!isfinite(p.r) || !isfinite(p.w) || !isfinite(p.l))
        throw DomainError("phase point has non-finite component");
    if (!(p.r > Scalar(0)))
        throw DomainError("phase point radius must be positive");
    if (p.l < Scalar(0))
        throw DomainError("squared angular momentum must be non-negative");
}
} // namespace detail

/// sqrt(1 + w^2 + l/r^2): the Lorentz factor of the full velocity |v|^2 = w^2 + l/r^2.
template <typename Scalar>
Scalar lorentz_root(const BasicPhasePoint<Scalar>& p)
{
    detail::require_phase_domain(p);
    using std::sqrt;
    return sqrt(Scalar(1) + p.w * p.w + p.l / (p.r * p.r));
}

/// Characteristic vector field. The field term +m/r^2 is repulsive.
template <typename Scalar>
BasicPhaseDerivative<Scalar> rhs(SystemKind kind, const BasicPhasePoint<Scalar>& p, Scalar enclosed)
{
    detail::require_phase_domain(p);
    if (!(enclosed >= Scalar(0)))
        throw DomainError("enclosed charge must be non-negative");
    const Scalar r2 = p.r * p.r;
    const Scalar centrifugal = p.l / (r2 * p.r);
    const Scalar field = enclosed / r2;
    if (kind == SystemKind::VP)
        return {p.w, centrifugal + field, Scalar(0)};
    const Scalar gamma = lorentz_root(p);
    return {p.w / gamma, centrifugal / gamma + field, Scalar(0)};
}

} // namespace vpfocus
