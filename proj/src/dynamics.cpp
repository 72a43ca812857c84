#include "vpfocus/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "vpfocus/errors.hpp"

namespace vpfocus {

namespace {

using Eigen::ArrayXd;
using Eigen::Index;

[[noreturn]] void singular(Index shell, double radius, double t)
{
    std::ostringstream os;
    os.precision(17);
    os << "shell " << shell << " reached radius " << radius << " at t = " << t << " (r_min guard)";
    throw SingularityError(static_cast<long>(shell), radius, os.str());
}

void guard_radii(const ArrayXd& r, double r_min, double t)
{
    if ((r > r_min).all() && r.allFinite())
        return;
    for (Index i = 0; i < r.size(); ++i)
        if (!(r[i] > r_min))
            singular(i, r[i], t);
}

/// Shared stage evaluation for the ensemble integrator.
class ShellField {
public:
    ShellField(SystemKind kind, const ArrayXd& l, const ArrayXd& mu, const MassProfile& profile, double r_min)
        : kind_(kind), l_(l), mu_(mu), profile_(profile), r_min_(r_min) {}

    double r_min() const { return r_min_; }

    void operator()(double t, const ArrayXd& r, const ArrayXd& w, ArrayXd& dr, ArrayXd& dw)
    {
        guard_radii(r, r_min_, t);
        const ArrayXd& m = enclosed(t, r);
        const ArrayXd inv_r = r.inverse();
        const ArrayXd inv_r2 = inv_r.square();
        if (kind_ == SystemKind::VP) {
            dr = w;
            dw = l_ * inv_r2 * inv_r + m * inv_r2;
        } else {
            const ArrayXd gamma = (1.0 + w.square() + l_ * inv_r2).sqrt();
            dr = w / gamma;
            dw = l_ * inv_r2 * inv_r / gamma + m * inv_r2;
        }
    }

private:
    const ArrayXd& enclosed(double t, const ArrayXd& r)
    {
        return std::visit(
            [&](const auto& p) -> const ArrayXd& {
                using P = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<P, SelfConsistent>) {
                    return solver_.compute(r, mu_);
                } else if constexpr (std::is_same_v<P, ConstantMass>) {
                    if (!(p.M >= 0.0))
                        throw DomainError("constant mass profile needs M >= 0");
                    m_.setConstant(r.size(), p.M);
                    return m_;
                } else if constexpr (std::is_same_v<P, ZeroMass>) {
                    m_.setZero(r.size());
                    return m_;
                } else {
                    m_.resize(r.size());
                    for (Index i = 0; i < r.size(); ++i) {
                        const double v = p.m(t, r[i]);
                        if (!(v >= 0.0 && v <= p.total))
                            throw DomainError("custom mass profile returned a value outside [0, M]");
                        m_[i] = v;
                    }
                    return m_;
                }
            },
            profile_);
    }

    SystemKind kind_;
    const ArrayXd& l_;
    const ArrayXd& mu_;
    const MassProfile& profile_;
    double r_min_;
    EnclosedMassSolver solver_;
    ArrayXd m_;
};

class Rk4 {
public:
    Rk4(SystemKind kind, const ArrayXd& l, const ArrayXd& mu, const MassProfile& profile, double r_min)
        : field_(kind, l, mu, profile, r_min) {}

    void advance(double t, double h, ArrayXd& r, ArrayXd& w)
    {
        field_(t, r, w, kr1_, kw1_);
        field_(t + 0.5 * h, r + 0.5 * h * kr1_, w + 0.5 * h * kw1_, kr2_, kw2_);
        field_(t + 0.5 * h, r + 0.5 * h * kr2_, w + 0.5 * h * kw2_, kr3_, kw3_);
        field_(t + h, r + h * kr3_, w + h * kw3_, kr4_, kw4_);
        r += (h / 6.0) * (kr1_ + 2.0 * kr2_ + 2.0 * kr3_ + kr4_);
        w += (h / 6.0) * (kw1_ + 2.0 * kw2_ + 2.0 * kw3_ + kw4_);
        guard_radii(r, field_.r_min(), t + h);
    }

private:
    ShellField field_;
    ArrayXd kr1_, kw1_, kr2_, kw2_, kr3_, kw3_, kr4_, kw4_;
};

/// Number of steps and the time after step k, landing exactly on t_end.
struct StepPlan {
    double t0 = 0.0;
    double t_end = 0.0;
    double dt = 0.0;
    long n = 0;

    double time_after(long k) const { return k + 1 >= n ? t_end : t0 + static_cast<double>(k + 1) * dt; }
};

StepPlan plan_steps(double t0, double t_end, const IntegratorConfig& cfg)
{
    if (!std::isfinite(cfg.dt) || cfg.dt == 0.0)
        throw DomainError("integrator step must be finite and non-zero");
    if (!(cfg.r_min > 0.0))
        throw DomainError("r_min guard must be positive");
    if (!std::isfinite(t_end))
        throw DomainError("end time must be finite");
    StepPlan plan{t0, t_end, cfg.dt, 0};
    const double span = t_end - t0;
    if (span == 0.0)
        return plan;
    if ((span > 0.0) != (cfg.dt > 0.0))
        throw DomainError("step sign does not point towards the end time");
    const double ratio = span / cfg.dt;
    const double n = std::ceil(ratio - 1e-9 * std::max(1.0, ratio));
    if (n > static_cast<double>(cfg.max_steps))
        throw DomainError("evolution needs more steps than max_steps allows");
    plan.n = std::max(1L, static_cast<long>(n));
    return plan;
}

Snapshot take_snapshot(const Ensemble& ens)
{
    return {ens.t, ens.r, ens.w, enclosed_mass(ens)};
}

} // namespace

void EnclosedMassSolver::sort_order(const ArrayXd& r)
{
    const auto n = static_cast<std::size_t>(r.size());
    auto less = [&r](Index a, Index b) { return r[a] < r[b] || (r[a] == r[b] && a < b); };
    if (order_.size() != n) {
        order_.resize(n);
        std::iota(order_.begin(), order_.end(), Index{0});
        std::sort(order_.begin(), order_.end(), less);
        return;
    }
    // Insertion sort from the previous ordering; fall back once it stops paying off.
    const std::size_t cap = 16 * n + 64;
    std::size_t moves = 0;
    for (std::size_t i = 1; i < n; ++i) {
        const Index x = order_[i];
        std::size_t j = i;
        while (j > 0 && less(x, order_[j - 1])) {
            order_[j] = order_[j - 1];
            --j;
            ++moves;
        }
        order_[j] = x;
        if (moves > cap) {
            std::sort(order_.begin(), order_.end(), less);
            return;
        }
    }
}

const ArrayXd& EnclosedMassSolver::compute(const ArrayXd& r, const ArrayXd& mu)
{
    if (r.size() != mu.size())
        throw DomainError("radius and weight arrays differ in size");
    sort_order(r);
    m_.resize(r.size());
    const auto n = order_.size();
    double below = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        double group = 0.0;
        const double radius = r[order_[i]];
        while (j < n && r[order_[j]] == radius)
            group += mu[order_[j++]];
        const double m = below + 0.5 * group;
        for (std::size_t k = i; k < j; ++k)
            m_[order_[k]] = m;
        below += group;
        i = j;
    }
    return m_;
}

ArrayXd enclosed_mass(const Ensemble& ens)
{
    EnclosedMassSolver solver;
    return solver.compute(ens.r, ens.mu);
}

Ensemble step(const Ensemble& ens, const IntegratorConfig& cfg, const MassProfile& profile)
{
    if (!std::isfinite(cfg.dt) || cfg.dt == 0.0)
        throw DomainError("integrator step must be finite and non-zero");
    Ensemble out = ens;
    Rk4 rk(ens.kind, out.l, out.mu, profile, cfg.r_min);
    rk.advance(ens.t, cfg.dt, out.r, out.w);
    out.t = ens.t + cfg.dt;
    return out;
}

EvolveResult evolve(const Ensemble& ens, double t_end, const IntegratorConfig& cfg, const MassProfile& profile,
                    const StepObserver& observer)
{
    const StepPlan plan = plan_steps(ens.t, t_end, cfg);
    EvolveResult result{ens, {}, 0};
    Ensemble& cur = result.ensemble;
    const bool snapshots = cfg.snapshot_stride > 0;
    if (snapshots)
        result.snapshots.push_back(take_snapshot(cur));
    Rk4 rk(cur.kind, cur.l, cur.mu, profile, cfg.r_min);
    for (long k = 0; k < plan.n; ++k) {
        const double t_next = plan.time_after(k);
        rk.advance(cur.t, t_next - cur.t, cur.r, cur.w);
        cur.t = t_next;
        ++result.steps;
        if (observer)
            observer(cur, result.steps);
        if (snapshots && (result.steps % cfg.snapshot_stride == 0 || k + 1 == plan.n))
            result.snapshots.push_back(take_snapshot(cur));
    }
    return result;
}

namespace {

double prescribed_mass(const MassProfile& profile, double t, double r)
{
    return std::visit(
        [&](const auto& p) -> double {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, SelfConsistent>) {
                throw DomainError("a single trajectory needs a prescribed mass profile");
            } else if constexpr (std::is_same_v<P, ConstantMass>) {
                if (!(p.M >= 0.0))
                    throw DomainError("constant mass profile needs M >= 0");
                return p.M;
            } else if constexpr (std::is_same_v<P, ZeroMass>) {
                return 0.0;
            } else {
                const double v = p.m(t, r);
                if (!(v >= 0.0 && v <= p.total))
                    throw DomainError("custom mass profile returned a value outside [0, M]");
                return v;
            }
        },
        profile);
}

PhaseDerivative point_rhs(SystemKind kind, const MassProfile& profile, double t, const PhasePoint& p,
                          double r_min)
{
    if (!(p.r > r_min))
        singular(0, p.r, t);
    return rhs(kind, p, prescribed_mass(profile, t, p.r));
}

PhasePoint shifted(const PhasePoint& p, const PhaseDerivative& k, double h)
{
    return {p.r + h * k.dr, p.w + h * k.dw, p.l};
}

} // namespace

void for_each_trajectory_sample(SystemKind kind, const PhasePoint& p, const MassProfile& profile, double t_end,
                                const IntegratorConfig& cfg,
                                const std::function<bool(const TrajectorySample&)>& visit)
{
    if (std::holds_alternative<SelfConsistent>(profile))
        throw DomainError("a single trajectory needs a prescribed mass profile");
    detail::require_phase_domain(p);
    const StepPlan plan = plan_steps(0.0, t_end, cfg);
    if (!visit({0.0, p}))
        return;
    PhasePoint cur = p;
    double t = 0.0;
    for (long k = 0; k < plan.n; ++k) {
        const double t_next = plan.time_after(k);
        const double h = t_next - t;
        const auto k1 = point_rhs(kind, profile, t, cur, cfg.r_min);
        const auto k2 = point_rhs(kind, profile, t + 0.5 * h, shifted(cur, k1, 0.5 * h), cfg.r_min);
        const auto k3 = point_rhs(kind, profile, t + 0.5 * h, shifted(cur, k2, 0.5 * h), cfg.r_min);
        const auto k4 = point_rhs(kind, profile, t + h, shifted(cur, k3, h), cfg.r_min);
        cur.r += h / 6.0 * (k1.dr + 2.0 * k2.dr + 2.0 * k3.dr + k4.dr);
        cur.w += h / 6.0 * (k1.dw + 2.0 * k2.dw + 2.0 * k3.dw + k4.dw);
        if (!(cur.r > cfg.r_min))
            singular(0, cur.r, t_next);
        t = t_next;
        if (!visit({t, cur}))
            return;
    }
}

Trajectory single_trajectory(SystemKind kind, const PhasePoint& p, const MassProfile& profile, double t_end,
                             const IntegratorConfig& cfg)
{
    Trajectory traj;
    for_each_trajectory_sample(kind, p, profile, t_end, cfg, [&traj](const TrajectorySample& s) {
        traj.push_back(s);
        return true;
    });
    return traj;
}

double turning_time(const Trajectory& traj)
{
    if (traj.empty() || !(traj.front().point.w < 0.0))
        throw DomainError("turning time needs a trajectory starting with w < 0");
    for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
        const auto& lo = traj[k];
        const auto& hi = traj[k + 1];
        if (lo.point.w < 0.0 && hi.point.w >= 0.0) {
            const double frac = -lo.point.w / (hi.point.w - lo.point.w);
            return lo.t + frac * (hi.t - lo.t);
        }
    }
    throw NotFoundError("W does not change sign within the trajectory");
}

double total_energy(const Ensemble& ens)
{
    const ArrayXd inv_r2 = ens.r.inverse().square();
    double kinetic = 0.0;
    if (ens.kind == SystemKind::VP)
        kinetic = 0.5 * (ens.mu * (ens.w.square() + ens.l * inv_r2)).sum();
    else
        kinetic = (ens.mu * (1.0 + ens.w.square() + ens.l * inv_r2).sqrt()).sum();

    std::vector<Index> order(static_cast<std::size_t>(ens.size()));
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(),
              [&](Index a, Index b) { return ens.r[a] < ens.r[b] || (ens.r[a] == ens.r[b] && a < b); });
    double inside = 0.0;
    double potential = 0.0;
    for (Index i : order) {
        potential += ens.mu[i] * (inside + 0.5 * ens.mu[i]) / ens.r[i];
        inside += ens.mu[i];
    }
    return kinetic + potential;
}

} // namespace vpfocus
