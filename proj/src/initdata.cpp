#include "vpfocus/initdata.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "vpfocus/errors.hpp"

namespace vpfocus {

namespace {

constexpr double pi = std::numbers::pi;
constexpr std::size_t max_listed_violations = 32;

// The integrand is C-infinity, so a shallow adaptive rule converges fast. The tolerance sits above
// the rounding noise of rebuilding (w, l) from (u, q): for RVP d ~ a0^3, so u + d - r loses ~10 digits.
double integrate(const auto& f, double lo, double hi)
{
    if (!(hi > lo))
        return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 6, 1e-9);
}

} // namespace

double support_argument(const ParameterSet& params, const PhasePoint& p)
{
    const double centrifugal = p.l / (p.r * p.r);
    if (params.kind == SystemKind::VP) {
        const double u = p.r - params.d + params.T * p.w;
        return u * u + params.T * params.T * centrifugal;
    }
    const double u = p.r + params.d + p.w;
    return u * u + centrifugal;
}

ScaledBump initial_bump(const ParameterSet& params)
{
    return ScaledBump(params.delta, params.bump_mass());
}

double initial_cutoff(const ParameterSet& params, double r)
{
    return plateau_cutoff(r, params.a0, params.eps);
}

double f0_eval(const ParameterSet& params, const PhasePoint& p)
{
    detail::require_phase_domain(p);
    const double chi = initial_cutoff(params, p.r);
    if (chi == 0.0)
        return 0.0;
    // Bump construction is cheap next to the exp; the moment is cached.
    return initial_bump(params)(support_argument(params, p)) * chi;
}

double rho0_radial(const ParameterSet& params, double r)
{
    if (!(r > 0.0) || !std::isfinite(r))
        throw DomainError("rho0_radial needs a positive finite radius");
    if (initial_cutoff(params, r) == 0.0)
        return 0.0;
    const double delta = params.delta;
    const bool vp = params.kind == SystemKind::VP;
    const double T = params.T;
    // VP: u = r - d + T w, q = T^2 l / r^2; RVP: u = r + d + w, q = l / r^2.
    auto point = [&](double u, double q) -> PhasePoint {
        if (vp)
            return {r, (u + params.d - r) / T, q * r * r / (T * T)};
        return {r, u - r - params.d, q * r * r};
    };
    auto outer = [&](double u) {
        const double q_hi = delta * delta - u * u;
        return integrate([&](double q) { return f0_eval(params, point(u, q)); }, 0.0, q_hi);
    };
    const double integral = integrate(outer, -delta, delta);
    return vp ? pi * integral / (T * T * T) : pi * integral;
}

PhaseBox support_box(const ParameterSet& p)
{
    PhaseBox box;
    box.r_lo = p.a0 - p.eps;
    box.r_hi = p.a0 + p.eps;
    if (p.kind == SystemKind::VP) {
        box.w_lo = (p.d - p.delta - box.r_hi) / p.T;
        box.w_hi = (p.d + p.delta - box.r_lo) / p.T;
    } else {
        box.w_lo = -p.d - box.r_hi - p.delta;
        box.w_hi = -p.d - box.r_lo + p.delta;
    }
    box.l_lo = 0.0;
    box.l_hi = p.l_max;
    return box;
}

SampledEnsemble sample_ensemble(const ParameterSet& params, const SamplingGrid& grid,
                                const SamplingOptions& options)
{
    if (grid.n_r < 2 || grid.n_w < 2 || grid.n_l < 2)
        throw DomainError("sampling grid needs at least 2 cells per dimension");
    if (!(options.weight_floor >= 0.0))
        throw DomainError("weight floor must be non-negative");

    const PhaseBox box = support_box(params);
    const double dr = (box.r_hi - box.r_lo) / grid.n_r;
    const double dw = (box.w_hi - box.w_lo) / grid.n_w;
    const double dl = (box.l_hi - box.l_lo) / grid.n_l;
    const double cell = 4.0 * pi * pi * dr * dw * dl;
    const ScaledBump bump = initial_bump(params);

    std::vector<Shell> cells;
    for (int i = 0; i < grid.n_r; ++i) {
        const double r = box.r_lo + (i + 0.5) * dr;
        const double chi = initial_cutoff(params, r);
        if (chi == 0.0)
            continue;
        for (int j = 0; j < grid.n_w; ++j) {
            const double w = box.w_lo + (j + 0.5) * dw;
            for (int k = 0; k < grid.n_l; ++k) {
                const PhasePoint p{r, w, box.l_lo + (k + 0.5) * dl};
                const double f = bump(support_argument(params, p)) * chi;
                if (f > 0.0)
                    cells.push_back({p, f * cell});
            }
        }
    }
    if (cells.empty())
        throw SamplingError("no grid cell intersects the support of f0");

    SampledEnsemble out;
    out.nonzero_cells = static_cast<long>(cells.size());
    for (const auto& s : cells)
        out.grid_mass += s.mu;
    const double floor = options.weight_floor * out.grid_mass;
    std::vector<Shell> kept;
    kept.reserve(cells.size());
    for (const auto& s : cells) {
        if (s.mu < floor) {
            out.truncated_mass += s.mu;
            ++out.dropped_cells;
        } else {
            kept.push_back(s);
        }
    }
    if (kept.empty())
        throw SamplingError("every sampled shell fell below the weight floor");
    out.ensemble = Ensemble(params.kind, kept, 0.0);
    return out;
}

namespace {

class WindowScan {
public:
    WindowScan(std::string name, double lower, double upper, bool strict, bool gating)
    {
        check_.name = std::move(name);
        check_.lower = lower;
        check_.upper = upper;
        check_.gating = gating;
        check_.worst_margin = std::numeric_limits<double>::infinity();
        strict_ = strict;
    }

    bool add(double value)
    {
        const double margin = std::min(value - check_.lower, check_.upper - value);
        check_.worst_margin = std::min(check_.worst_margin, margin);
        const bool inside = strict_ ? margin > 0.0 : margin >= 0.0;
        if (!inside)
            ++check_.violations;
        return inside;
    }

    const WindowCheck& result() const { return check_; }

private:
    WindowCheck check_;
    bool strict_ = false;
};

} // namespace

InitialValidation validate_initial(const Ensemble& ens, const ParameterSet& p)
{
    const double inf = std::numeric_limits<double>::infinity();
    const double a = p.targets.a;
    std::vector<WindowScan> scans;
    scans.emplace_back("radius", p.a0 - p.eps, p.a0 + p.eps, true, true);
    if (p.kind == SystemKind::VP) {
        scans.emplace_back("velocity", (a - p.a0 + p.eps) / p.T, (p.sqrt_k_b() - p.a0 - p.eps) / p.T, false, true);
        // l > 0 is required; the upper end is the support bound delta^2 r^2 / T^2.
        scans.emplace_back("angular_momentum", 0.0, p.l_max, true, true);
    } else {
        const double a03 = p.a0 * p.a0 * p.a0;
        scans.emplace_back("velocity", -a03 - p.h * p.a0, -a03 + p.h * p.a0, true, true);
        scans.emplace_back("angular_momentum", -inf, p.l_max, false, true);
        // Stated window l < delta (a0 - eps)^2; the bump support reaches delta^2 r^2, so this is
        // informational only.
        scans.emplace_back("angular_momentum_stated", -inf,
                           p.delta * (p.a0 - p.eps) * (p.a0 - p.eps), true, false);
    }

    InitialValidation out;
    for (Eigen::Index i = 0; i < ens.size(); ++i) {
        const double values[] = {ens.r[i], ens.w[i], ens.l[i], ens.l[i]};
        bool ok = true;
        for (std::size_t s = 0; s < scans.size(); ++s) {
            const bool inside = scans[s].add(values[s]);
            if (scans[s].result().gating)
                ok = ok && inside;
        }
        if (!ok && out.violating_shells.size() < max_listed_violations)
            out.violating_shells.push_back(static_cast<long>(i));
    }
    for (const auto& s : scans) {
        out.checks.push_back(s.result());
        if (s.result().gating && !s.result().pass())
            out.pass = false;
    }
    if (ens.empty())
        out.pass = false;
    return out;
}

} // namespace vpfocus
