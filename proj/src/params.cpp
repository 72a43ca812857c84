#include "vpfocus/params.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "vpfocus/errors.hpp"

namespace vpfocus {

namespace {

constexpr double pi = std::numbers::pi;

std::string describe(const char* what, double value)
{
    std::ostringstream os;
    os.precision(17);
    os << what << " (" << value << ")";
    return os.str();
}

double term_max(const std::vector<NamedTerm>& terms)
{
    double m = terms.front().value;
    for (const auto& t : terms)
        m = std::max(m, t.value);
    return m;
}

double min_bound(const ParameterSet& p, double l)
{
    const auto bounds = vp_time_bounds(p, l);
    double m = bounds.front().value;
    for (const auto& b : bounds)
        m = std::min(m, b.value);
    return m;
}

void derive_vp_time(ParameterSet& p, const DeriveOptions& options)
{
    // l_max depends on T through the support inequality (r - d + T w)^2 + T^2 l / r^2 <= delta^2,
    // so T solves T = g(T) with g = min of the bounds at l = lmax_scale / T^2. Every bound is
    // increasing in T with g(T)/T strictly decreasing, so the root of g(T)/T - 1 is unique and
    // bracketed by (0, g(infinity)].
    const double lmax_scale = p.delta * p.delta * (p.a0 + p.eps) * (p.a0 + p.eps);
    auto excess = [&](double T) { return min_bound(p, lmax_scale / (T * T)) / T - 1.0; };

    const double hi = min_bound(p, 0.0);
    if (!(hi > 0.0) || !std::isfinite(hi))
        throw InfeasibleError("vp_time_positive", describe("time bound is not positive", hi));
    double lo = hi;
    int halvings = 0;
    while (!(excess(lo) > 0.0)) {
        if (++halvings > 1000)
            throw InfeasibleError("vp_time_fixed_point", "no positive T satisfies T <= bound(l_max(T))");
        lo *= 0.5;
    }
    double T = lo;
    std::uintmax_t iterations = static_cast<std::uintmax_t>(options.max_fixed_point_iterations);
    if (lo < hi) {
        const auto root = boost::math::tools::toms748_solve(excess, lo, hi, excess(lo), excess(hi),
                                                            boost::math::tools::eps_tolerance<double>(50), iterations);
        if (iterations >= static_cast<std::uintmax_t>(options.max_fixed_point_iterations))
            throw InfeasibleError("vp_time_fixed_point",
                                  "T / l_max root solve did not converge within "
                                      + std::to_string(options.max_fixed_point_iterations) + " iterations");
        T = root.first; // lower end of the bracket: excess(T) >= 0
    } else {
        iterations = 0;
    }
    // Step slightly inside the root so the post-check holds despite rounding.
    T *= 1.0 - 1e-9;
    p.T = T;
    p.l_max = lmax_scale / (T * T);
    p.fixed_point_iterations = static_cast<int>(iterations) + halvings;
    p.T_terms = vp_time_bounds(p, p.l_max);
    for (const auto& b : p.T_terms)
        if (p.T > b.value)
            throw InfeasibleError("vp_time_post_check", describe(("T exceeds " + b.name).c_str(), b.value));
}

void derive_rvp_interval(ParameterSet& p)
{
    const double a = p.targets.a;
    const double skb = p.sqrt_k_b();
    const double inner = p.a0 + p.eps - skb;
    if (!(inner > 0.0))
        throw InfeasibleError("rvp_N_denominator", describe("a0 + eps - sqrt(k) b must be positive", inner));
    const double outer = p.a0 - p.eps - a;
    p.N = outer / inner;
    // N - 1 = (sqrt(k) b - a - 2 eps) / (a0 + eps - sqrt(k) b), without cancellation.
    const double n_minus_1 = (skb - a - 2.0 * p.eps) / inner;
    if (!(n_minus_1 > 0.0))
        throw InfeasibleError("rvp_N_gt_1", describe("N must exceed 1", p.N));
    const double sqrt_n = std::sqrt(p.N);
    const double sqrt_n_minus_1 = n_minus_1 / (sqrt_n + 1.0);
    const double a02 = p.a0 * p.a0;
    const double h_cap = std::min(n_minus_1 / (2.0 * (p.N + 1.0)) * a02, sqrt_n_minus_1 / (1.0 + sqrt_n) * a02);
    p.h = 0.5 * h_cap;
    p.delta = p.h * p.a0 - p.eps;
    if (!(p.delta > 0.0))
        throw InfeasibleError("rvp_delta_positive", describe("delta = h a0 - eps must be positive", p.delta));
    const double a03 = p.a0 * a02;
    p.d = a03 - p.a0;
    const double fast = a03 + p.h * p.a0;
    const double slow = a03 - p.h * p.a0;
    if (!(slow > 0.0))
        throw InfeasibleError("rvp_slow_speed", describe("a0^3 - h a0 must be positive", slow));
    const double t_lo = inner * std::sqrt(2.0 + fast * fast) / slow;
    const double t_hi = outer * std::sqrt(1.0 + slow * slow) / fast;
    p.T_terms = {{"T_lower", t_lo}, {"T_upper", t_hi}};
    if (!(t_lo <= t_hi))
        throw InfeasibleError("rvp_time_interval", describe("empty T interval, width", t_hi - t_lo));
    p.T = 0.5 * (t_lo + t_hi);
    p.l_max = p.delta * p.delta * (p.a0 + p.eps) * (p.a0 + p.eps);
}

} // namespace

void TargetSpec::validate() const
{
    for (double v : {C1, C2, a, b, c})
        if (!std::isfinite(v))
            throw DomainError("target spec has a non-finite entry");
    if (!(C1 > 0.0) || !(C2 > 0.0))
        throw DomainError("C1 and C2 must be positive");
    if (!(a > 0.0 && b > a && c > b))
        throw DomainError("radii must satisfy c > b > a > 0");
}

double ParameterSet::sqrt_k_b() const
{
    return std::sqrt(k) * targets.b;
}

double ParameterSet::bump_mass() const
{
    return kind == SystemKind::VP ? T * T * T / (2.0 * a0) : 1.0 / (2.0 * a0);
}

double ParameterSet::mass_lower_bound() const
{
    return 2.0 * pi * a0 * eps + pi / 6.0 * eps * eps * eps / a0;
}

double ParameterSet::mass_upper_bound() const
{
    return 8.0 * pi * a0 * eps + 8.0 * pi / 3.0 * eps * eps * eps / a0;
}

std::vector<NamedTerm> a0_term_list(SystemKind kind, const TargetSpec& t)
{
    t.validate();
    const double s = std::sqrt(t.a * t.a + t.b * t.b) - std::sqrt(2.0) * t.a;
    const double cube_gap = t.b * t.b * t.b - t.a * t.a * t.a;
    if (kind == SystemKind::VP) {
        const double eps = s / (8.0 * std::sqrt(2.0));
        return {
            {"eps_plus_c", eps + t.c},
            {"inv_C1", 1.0 / t.C1},
            {"field_linear", 3.0 * std::sqrt(2.0) * pi * s / t.C1},
            {"field_cubic", std::pow(2.0, -11.0 / 6.0) * std::cbrt(pi) * s / std::cbrt(t.C1)},
            {"density_target", 16.0 * std::sqrt(2.0) * cube_gap * t.C2 / (3.0 * s)},
            {"field_target", 4.0 * std::sqrt(2.0) * t.b * t.b * t.C2 / (pi * s)},
        };
    }
    const double eps = s / (4.0 * std::sqrt(2.0));
    const double k = (t.a * t.a + t.b * t.b) / (2.0 * t.b * t.b);
    return {
        {"eps_plus_c", eps + t.c},
        {"inv_C1", 1.0 / t.C1},
        {"field_linear", 6.0 * std::sqrt(2.0) * pi * s / t.C1},
        {"field_cubic", std::pow(2.0, 5.0 / 6.0) * std::cbrt(pi) * s / std::cbrt(t.C1)},
        {"eps_cubed", eps * eps * eps},
        {"turning_time", std::pow(std::sqrt(86.0 * pi) / t.a, 3.0)},
        {"two_eps", 2.0 * eps},
        {"upper_envelope", std::pow(344.0 * pi / ((1.0 - k) * t.b * t.b), 1.5)},
        {"density_target", 8.0 * std::sqrt(2.0) * cube_gap * t.C2 / (3.0 * s)},
        {"field_target", 2.0 * std::sqrt(2.0) * t.b * t.b * t.C2 / (pi * s)},
    };
}

std::vector<NamedTerm> vp_time_bounds(const ParameterSet& p, double l)
{
    const double a = p.targets.a;
    const double b = p.targets.b;
    const double a0 = p.a0;
    const double eps = p.eps;
    const double inner = a0 - eps;
    const double reach = std::abs(p.sqrt_k_b() - a0 - eps);
    // The mass term of the first bound is printed with eps where the mass estimate has eps^3.
    const double mass_lo_eps = 2.0 * pi * a0 * eps + pi / 6.0 * eps / a0;
    const double mass_lo_eps3 = 2.0 * pi * a0 * eps + pi / 6.0 * eps * eps * eps / a0;
    const double mass_hi = 8.0 * pi * a0 * eps + 8.0 * pi / 3.0 * eps * eps * eps / a0;
    return {
        {"turning_eps_reading", a * reach / std::sqrt(l + mass_lo_eps * inner)},
        {"turning_eps3_reading", a * reach / std::sqrt(l + mass_lo_eps3 * inner)},
        {"upper_envelope", std::sqrt((1.0 - p.k) / (l / (inner * inner) + mass_hi / inner)) * b},
    };
}

ParameterSet derive_parameters(SystemKind kind, const TargetSpec& spec, const DeriveOptions& options)
{
    spec.validate();
    if (!(options.safety_factor >= 1.0) || !std::isfinite(options.safety_factor))
        throw DomainError("safety factor must be a finite number >= 1");

    ParameterSet p;
    p.kind = kind;
    p.targets = spec;
    p.safety_factor = options.safety_factor;
    const double a = spec.a;
    const double b = spec.b;
    p.k = (a * a + b * b) / (2.0 * b * b);
    const double s = std::sqrt(a * a + b * b) - std::sqrt(2.0) * a;
    p.eps = kind == SystemKind::VP ? s / (8.0 * std::sqrt(2.0)) : s / (4.0 * std::sqrt(2.0));
    p.a0_terms = a0_term_list(kind, spec);
    p.a0 = options.safety_factor * term_max(p.a0_terms);

    if (kind == SystemKind::VP) {
        if (!(vp_velocity_window_margin(p) > 0.0))
            throw InfeasibleError("vp_velocity_window", "eps >= (sqrt(k) b - a)/2: empty velocity window");
        p.d = 0.5 * (a + p.sqrt_k_b());
        p.delta = 0.25 * (p.sqrt_k_b() - a);
        if (!(p.d <= p.a0 - p.eps))
            throw InfeasibleError("vp_shift_inside", describe("d must not exceed a0 - eps", p.d));
        derive_vp_time(p, options);
    } else {
        derive_rvp_interval(p);
    }
    return p;
}

double vp_velocity_window_margin(const ParameterSet& p)
{
    return 0.5 * (p.sqrt_k_b() - p.targets.a) - p.eps;
}

RvpIntervalMargins rvp_interval_margins(const ParameterSet& p)
{
    const double fast = p.a0 * p.a0 * p.a0 + p.h * p.a0;
    const double slow = p.a0 * p.a0 * p.a0 - p.h * p.a0;
    return {std::sqrt(p.N) - fast / slow, p.N - (2.0 + fast * fast) / (1.0 + slow * slow)};
}

} // namespace vpfocus
