#pragma once

// Closed-form characteristic bounds: turning time and radius envelopes for the
// classical and relativistic systems, and the concentration lower bounds.

#include <cmath>
#include <numbers>

#include "vpfocus/errors.hpp"

namespace vpfocus {

/// Bound hypotheses: r > 0, w < 0, l > 0, M >= 0 (M is the total mass bounding m).
template <typename Scalar>
struct BasicInitialDatum {
    Scalar r{1};
    Scalar w{-1};
    Scalar l{1};
    Scalar M{0};
};

using InitialDatum = BasicInitialDatum<double>;

template <typename Scalar>
struct Envelope {
    Scalar upper_sq{0}; ///< upper bound on R(t)^2
    Scalar lower{0};    ///< lower bound on R(t)
};

template <typename Scalar>
struct RvpEnvelope {
    Scalar upper_sq{0};
    Scalar lower{0};
    Scalar kinetic_cap{0}; ///< bound on W(t)^2 + l R(t)^-2
};

template <typename Scalar>
struct TimeBracket {
    Scalar lower{0};
    Scalar upper{0};
};

template <typename Scalar>
struct ConcentrationBounds {
    Scalar rho_lb{0};
    Scalar field_lb{0};
};

namespace detail {
template <typename Scalar>
void require_datum(const BasicInitialDatum<Scalar>& d)
{
    using std::isfinite;
    if (!isfinite(d.r) || !isfinite(d.w) || !isfinite(d.l) || !isfinite(d.M))
        throw DomainError("initial datum has a non-finite entry");
    if (!(d.r > Scalar(0)) || !(d.M >= Scalar(0)) || d.l < Scalar(0))
        throw DomainError("initial datum needs r > 0, l >= 0, M >= 0");
}

template <typename Scalar>
Scalar gamma_sq(const BasicInitialDatum<Scalar>& d)
{
    return Scalar(1) + d.w * d.w + d.l / (d.r * d.r);
}
} // namespace detail

/// r/|w| - sqrt(l + M r)/w^2. May be negative (vacuous).
template <typename Scalar>
Scalar vp_t0_lower(const BasicInitialDatum<Scalar>& d)
{
    detail::require_datum(d);
    using std::abs;
    using std::sqrt;
    return d.r / abs(d.w) - sqrt(d.l + d.M * d.r) / (d.w * d.w);
}

/// Valid for t in [0, T0): R^2 <= (r + w t)^2 + (l/r^2 + M/r) t^2, R >= (l/2) t^2 / r^3 + w t + r.
template <typename Scalar>
Envelope<Scalar> vp_envelope(Scalar t, const BasicInitialDatum<Scalar>& d)
{
    detail::require_datum(d);
    const Scalar free = d.r + d.w * t;
    const Scalar r3 = d.r * d.r * d.r;
    return {free * free + (d.l / (d.r * d.r) + d.M / d.r) * t * t, d.l / (Scalar(2) * r3) * t * t + d.w * t + d.r};
}

/// D = l + M r sqrt(1 + w^2 + l/r^2).
template <typename Scalar>
Scalar rvp_aux(const BasicInitialDatum<Scalar>& d)
{
    detail::require_datum(d);
    using std::sqrt;
    return d.l + d.M * d.r * sqrt(detail::gamma_sq(d));
}

template <typename Scalar>
TimeBracket<Scalar> rvp_t0_bounds(const BasicInitialDatum<Scalar>& d)
{
    detail::require_datum(d);
    if (!(d.l > Scalar(0)))
        throw DomainError("the relativistic turning-time upper bound needs l > 0");
    using std::sqrt;
    const Scalar D = rvp_aux(d);
    const Scalar lower = d.r * (Scalar(1) - sqrt(D / (d.r * d.r * d.w * d.w + D)));
    const Scalar upper = -d.w * d.r * d.r * d.r * sqrt(detail::gamma_sq(d)) / d.l;
    return {lower, upper};
}

template <typename Scalar>
RvpEnvelope<Scalar> rvp_envelope(Scalar t, const BasicInitialDatum<Scalar>& d)
{
    detail::require_datum(d);
    using std::abs;
    using std::sqrt;
    const Scalar g2 = detail::gamma_sq(d);
    const Scalar g = sqrt(g2);
    const Scalar D = rvp_aux(d);
    const Scalar drift = d.r - abs(d.w) / g * t;
    const Scalar r2 = d.r * d.r;
    RvpEnvelope<Scalar> e;
    e.upper_sq = drift * drift + D / (r2 * g2) * t * t;
    e.lower = d.l / (Scalar(2) * r2 * d.r * g2) * t * t + d.w / g * t + d.r;
    e.kinetic_cap = d.w * d.w + d.l / r2;
    return e;
}

/// Lower bounds on sup rho and sup |E| once all mass M sits in a <= R <= b.
template <typename Scalar>
ConcentrationBounds<Scalar> concentration_bounds(Scalar M, Scalar a, Scalar b)
{
    using std::isfinite;
    if (!isfinite(M) || !isfinite(a) || !isfinite(b) || !(a > Scalar(0)) || !(b > a) || !(M >= Scalar(0)))
        throw DomainError("concentration bounds need b > a > 0 and M >= 0");
    const Scalar pi = std::numbers::pi_v<Scalar>;
    return {Scalar(3) * M / (Scalar(4) * pi * (b * b * b - a * a * a)), M / (b * b)};
}

} // namespace vpfocus
