#include "vpfocus/certify.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "vpfocus/dynamics.hpp"
#include "vpfocus/errors.hpp"

namespace vpfocus {

namespace {

struct Pass {
    double dt = 0.0;
    double t_end = 0.0;
};

/// Step size and a generous first horizon from the free motion.
Pass plan(SystemKind kind, const InitialDatum& d, const CertifyOptions& options)
{
    const double v2 = d.w * d.w + d.l / (d.r * d.r);
    const double v = std::sqrt(v2);
    const double gamma = std::sqrt(1.0 + v2);
    const double speed = kind == SystemKind::VP ? v : v / gamma;
    const double perihelion = std::sqrt(d.l) / v;
    const double free_turn = d.r * std::abs(d.w) / v2 * (kind == SystemKind::VP ? 1.0 : gamma);
    return {perihelion / speed / options.steps_per_timescale, 3.0 * free_turn};
}

double log_uniform(std::mt19937_64& rng, double lo, double hi)
{
    return std::exp(std::uniform_real_distribution<double>(std::log(lo), std::log(hi))(rng));
}

} // namespace

InitialDatum random_datum(std::mt19937_64& rng)
{
    InitialDatum d;
    d.r = log_uniform(rng, 0.1, 10.0);
    d.w = -log_uniform(rng, 0.1, 10.0);
    d.l = log_uniform(rng, 1e-3, 10.0);
    const bool massless = std::uniform_int_distribution<int>(0, 1)(rng) == 0;
    d.M = massless ? 0.0 : 10.0 * (1.0 - std::uniform_real_distribution<double>(0.0, 1.0)(rng));
    return d;
}

DatumCertificate certify_datum(SystemKind kind, const InitialDatum& d, const CertifyOptions& options)
{
    if (!(d.w < 0.0) || !(d.l > 0.0))
        throw DomainError("certification needs w < 0 and l > 0");
    DatumCertificate cert;
    cert.kind = kind;
    cert.datum = d;
    if (kind == SystemKind::VP) {
        cert.t0_lower = vp_t0_lower(d);
    } else {
        const auto bracket = rvp_t0_bounds(d);
        cert.t0_lower = bracket.lower;
        cert.t0_upper = bracket.upper;
    }

    Pass pass = plan(kind, d, options);
    IntegratorConfig cfg;
    cfg.dt = pass.dt;
    cfg.max_steps = options.max_steps;
    cfg.r_min = 1e-12;
    cert.dt = cfg.dt;

    // Pass 1: locate T0, extending the horizon if needed.
    std::optional<double> t0;
    for (int attempt = 0; attempt < 8 && !t0; ++attempt, pass.t_end *= 2.0) {
        TrajectorySample prev;
        bool first = true;
        for_each_trajectory_sample(kind, {d.r, d.w, d.l}, ConstantMass{d.M}, pass.t_end, cfg,
                                   [&](const TrajectorySample& s) {
                                       if (!first && prev.point.w < 0.0 && s.point.w >= 0.0) {
                                           t0 = turning_time(Trajectory{prev, s});
                                           return false;
                                       }
                                       first = false;
                                       prev = s;
                                       return true;
                                   });
    }
    if (!t0)
        throw NotFoundError("no turning point found for the datum");
    cert.t0_measured = *t0;
    cert.t0_ok = cert.t0_measured >= cert.t0_lower - cfg.dt && cert.t0_measured <= cert.t0_upper + cfg.dt;

    // Pass 2: bounds on [0, T0) and sign changes over [0, 2 T0].
    const double tol_r = options.envelope_rel_tol * d.r;
    const double r2 = d.r * d.r;
    double prev_w = d.w;
    for_each_trajectory_sample(kind, {d.r, d.w, d.l}, ConstantMass{d.M}, 2.0 * cert.t0_measured, cfg,
                               [&](const TrajectorySample& s) {
                                   ++cert.steps;
                                   if ((prev_w < 0.0) != (s.point.w < 0.0))
                                       ++cert.sign_changes;
                                   prev_w = s.point.w;
                                   if (s.t >= cert.t0_measured)
                                       return true;
                                   ++cert.samples_checked;
                                   const double R = s.point.r;
                                   double upper_sq = 0.0;
                                   double lower = 0.0;
                                   if (kind == SystemKind::VP) {
                                       const auto env = vp_envelope(s.t, d);
                                       upper_sq = env.upper_sq;
                                       lower = env.lower;
                                   } else {
                                       const auto env = rvp_envelope(s.t, d);
                                       upper_sq = env.upper_sq;
                                       lower = env.lower;
                                       const double level = s.point.w * s.point.w + d.l / (R * R);
                                       cert.kinetic_margin = std::min(
                                           cert.kinetic_margin, env.kinetic_cap + options.kinetic_abs_tol - level);
                                   }
                                   // R^2 <= upper_sq + tol, with tol taken on R: (sqrt(upper_sq) + tol_r)^2.
                                   const double cap = std::sqrt(upper_sq) + tol_r;
                                   cert.upper_margin = std::min(cert.upper_margin, (cap * cap - R * R) / r2);
                                   if (s.t < cert.t0_measured - cfg.dt)
                                       cert.lower_margin = std::min(cert.lower_margin, (R - lower + tol_r) / d.r);
                                   return true;
                               });
    return cert;
}

} // namespace vpfocus
