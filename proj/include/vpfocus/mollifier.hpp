#pragma once

// Compactly supported smooth profiles used to assemble the initial datum:
// the radial bump H (supp H = [0, 1]) and the plateau cutoff chi.

#include <cmath>

#include "vpfocus/errors.hpp"

namespace vpfocus {

/// exp(-1/(1-s)) on [0, 1), zero elsewhere. Unnormalized bump shape.
template <typename Scalar>
Scalar bump_shape(Scalar s)
{
    using std::exp;
    if (s < Scalar(0) || s >= Scalar(1))
        return Scalar(0);
    return exp(-Scalar(1) / (Scalar(1) - s));
}

/// exp(-1/t) for t > 0, zero otherwise.
template <typename Scalar>
Scalar smooth_onset(Scalar t)
{
    using std::exp;
    return t > Scalar(0) ? exp(-Scalar(1) / t) : Scalar(0);
}

/// C-infinity step: 0 for t <= 0, 1 for t >= 1.
template <typename Scalar>
Scalar smooth_step(Scalar t)
{
    const Scalar up = smooth_onset(t);
    const Scalar down = smooth_onset(Scalar(1) - t);
    return up / (up + down);
}

/// Cutoff equal to 1 on [center - width/2, center + width/2] and 0 outside (center - width, center + width).
template <typename Scalar>
Scalar plateau_cutoff(Scalar r, Scalar center, Scalar width)
{
    using std::abs;
    return smooth_step((width - abs(r - center)) / (width / Scalar(2)));
}

/// 4*pi * int_0^1 u^2 bump_shape(u^2) du, i.e. the integral of bump_shape(|u|^2) over R^3.
double bump_moment();

/// Rescaled bump H_delta(s) = delta^-3 H(s / delta^2) with H = c * bump_shape and c chosen so
/// that the integral of H(|u|^2) over R^3 equals `mass`. The integral is invariant under
/// the delta rescaling.
class ScaledBump {
public:
    ScaledBump() = default;
    ScaledBump(double delta, double mass)
        : delta_(delta), mass_(mass), coefficient_(mass / bump_moment())
    {
        if (!(delta > 0.0) || !std::isfinite(delta))
            throw DomainError("bump width delta must be positive and finite");
        if (!(mass > 0.0))
            throw DomainError("bump normalization must be positive");
        inv_delta2_ = 1.0 / (delta * delta);
        peak_ = coefficient_ * inv_delta2_ / delta;
    }

    double operator()(double s) const { return peak_ * bump_shape(s * inv_delta2_); }

    double delta() const { return delta_; }
    double mass() const { return mass_; }
    /// Prefactor of bump_shape in the unscaled H.
    double coefficient() const { return coefficient_; }

private:
    double delta_ = 1.0;
    double mass_ = 1.0;
    double coefficient_ = 1.0;
    double inv_delta2_ = 1.0;
    double peak_ = 1.0;
};

} // namespace vpfocus
