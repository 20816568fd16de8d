#include "vlp/space.hpp"

#include "vlp/error.hpp"
#include "vlp/norm.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace vlp {

namespace {

constexpr double kNormTol = 1e-9;
constexpr double kStableDrift = 0.05;
constexpr double kClosedFloor = 1e-3;
constexpr double kReplayTarget = 1e-4;

double norm(const Func& f, const Exponent& p, const QuadConfig& cfg) { return luxemburg_norm(f, p, kNormTol, cfg).value; }

/// Largest |f'| over all polynomial segments.
double lipschitz(const Func& f)
{
    double L = 0.0;
    for (const auto& s : f.segments()) {
        if (!s.polynomial())
            throw UnsupportedError("Lipschitz bound needs polynomial segments");
        if (s.hi.t > s.lo.t)
            L = std::max(L, s.poly.derivative().max_abs(s.lo.t, s.hi.t).value);
    }
    return L;
}

struct Pair {
    Func x;
    Func y;
};

/// Sample i: i = 0 pairs with y = 0, i = 1 (when `with_zero_x`) with x = 0.
Pair draw_pair(const Exponent& p, std::uint64_t seed, int i, bool with_zero_x)
{
    Rng rng = Rng(seed).fork(static_cast<std::uint64_t>(i));
    Func x = random_continuous(rng);
    Func y = random_simple_on_level(p, rng);
    if (i == 0)
        y = Func::constant(0.0);
    else if (i == 1 && with_zero_x)
        x = Func::constant(0.0);
    return {std::move(x), std::move(y)};
}

} // namespace

std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::Closed:
        return "closed";
    case Verdict::NotClosed:
        return "not_closed";
    case Verdict::Inconclusive:
        break;
    }
    return "inconclusive";
}

Verdict closedness_verdict(const std::vector<double>& running_min)
{
    const std::size_t n = running_min.size();
    if (n < 3)
        return Verdict::Inconclusive;
    auto drop = [&](std::size_t k) { return 1.0 - running_min[k] / running_min[k - 1]; };
    if (drop(n - 1) > kStableDrift && drop(n - 2) > kStableDrift)
        return Verdict::NotClosed;
    if (drop(n - 1) < kStableDrift && running_min[n - 1] > kClosedFloor)
        return Verdict::Closed;
    return Verdict::Inconclusive;
}

Func random_continuous(Rng& rng, int max_breaks)
{
    if (max_breaks < 2)
        throw DomainError("continuous samples need at least two knots");
    const int knots = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_breaks - 1)));
    std::vector<double> t{0.0};
    for (int i = 1; i + 1 < knots; ++i)
        t.push_back(rng.uniform(0.02, 0.98));
    t.push_back(1.0);
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    std::vector<double> v;
    double top = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        v.push_back(rng.uniform(-1.0, 1.0));
        top = std::max(top, std::abs(v.back()));
    }
    if (top == 0.0)
        v.assign(v.size(), 1.0), top = 1.0;
    std::vector<Poly> pieces;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        const double slope = (v[i + 1] - v[i]) / (t[i + 1] - t[i]) / top;
        pieces.push_back(Poly{v[i] / top - slope * t[i], slope});
    }
    return Func::piecewise_poly(t, pieces, true).relabeled("sample(continuous)");
}

Func random_simple_on_level(const Exponent& p, Rng& rng)
{
    static constexpr int kLevels[] = {2, 4, 8, 16, 32};
    const int n = kLevels[rng.below(5)];
    std::vector<double> breaks;
    std::vector<Poly> pieces;
    for (int k = 0; k <= 16; ++k)
        breaks.push_back(k / 16.0);
    for (int k = 0; k < 16; ++k)
        pieces.push_back(Poly::constant((static_cast<double>(rng.below(33)) - 16.0) / 8.0));
    const Func cells = Func::piecewise_poly(breaks, pieces);
    return Func::masked(cells, p.level_set(n)).relabeled(fmt::format("mask(sample(simple), omega({}))", n));
}

ClosednessReport closedness_constants(const Exponent& p, int grid_depth, int sample_count, std::uint64_t seed,
                                      const QuadConfig& cfg)
{
    if (grid_depth < 3 || grid_depth > 14)
        throw DomainError(fmt::format("closedness grid depth must lie in [3,14], got {}", grid_depth));
    if (sample_count < 1)
        throw DomainError("closedness needs at least one continuous sample");
    ClosednessReport r;
    r.grid_depth = grid_depth;
    r.samples = sample_count;
    double running = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= grid_depth; ++k) {
        const long cells = 1L << k;
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (long i = 0; i < cells; ++i) {
            const double a = std::ldexp(static_cast<double>(i), -k), b = std::ldexp(static_cast<double>(i + 1), -k);
            const double v = norm(Func::indicator(a, b), p, cfg);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        r.level_min.push_back(lo);
        r.level_max.push_back(hi);
        running = std::min(running, lo);
        r.running_min.push_back(running);
        r.C_est = std::max(r.C_est, hi);
    }
    r.c_est = running;

    Rng rng(seed);
    r.c1_est = std::numeric_limits<double>::infinity();
    for (int i = 0; i < sample_count; ++i) {
        Rng sub = rng.fork(static_cast<std::uint64_t>(i));
        const Func x = i == 0 ? Func::constant(1.0) : random_continuous(sub);
        const double v = norm(x, p, cfg);
        r.c1_est = std::min(r.c1_est, v);
        r.c2_est = std::max(r.c2_est, v);
    }
    r.delta_est = r.c_est / (2.0 * r.c2_est);
    r.verdict = closedness_verdict(r.running_min);
    r.caveat = "dyadic probes only: any interval contains a dyadic one of at least a quarter of its length";
    return r;
}

SeparationReport separation_delta(const Exponent& p, const ClosednessReport& report, int samples, std::uint64_t seed,
                                  const QuadConfig& cfg)
{
    if (report.verdict != Verdict::Closed)
        throw DomainError("separation needs a closed verdict");
    SeparationReport out;
    out.samples = samples;
    out.delta_bound = report.delta_est;
    out.min_observed = std::numeric_limits<double>::infinity();
    const MeasSet omega = p.level_set(out.replay_level);
    for (int i = 0; i < samples; ++i) {
        auto [raw, y] = draw_pair(p, seed, i, false);
        const Func x = Func::scaled(raw, 1.0 / norm(raw, p, cfg));
        const double d = norm(x - y, p, cfg);
        out.min_observed = std::min(out.min_observed, d);
        if (d < out.delta_bound)
            ++out.violations;

        // Replay: a neighbourhood O of the maximiser small enough that the truncation
        // barely sees it, then shrunk until |x| >= |x(t0)|/2 on O.
        const SupNorm top = sup_norm_argmax(x);
        const Func xn = Func::masked(x, omega);
        auto window = [&](double eps) {
            return MeasSet::interval(std::max(0.0, top.t0 - eps), std::min(1.0, top.t0 + eps));
        };
        auto seen = [&](double eps) { return norm(Func::masked(xn, window(eps)), p, cfg); };
        double lo = -80.0, hi = 0.0; // log2 eps
        if (seen(std::ldexp(1.0, static_cast<int>(lo))) > kReplayTarget) {
            ++out.replay_failures;
            continue;
        }
        for (int it = 0; it < 60 && hi - lo > 1e-3; ++it) {
            const double mid = 0.5 * (lo + hi);
            (seen(std::exp2(mid)) <= kReplayTarget ? lo : hi) = mid;
        }
        double eps = std::exp2(lo);
        const double L = lipschitz(x);
        if (L > 0.0)
            eps = std::min(eps, 0.5 * top.value / L);
        out.max_replay_norm = std::max(out.max_replay_norm, seen(eps));
        const MeasSet O = window(eps);
        const double lhs = norm(Func::masked(x, O), p, cfg);
        const double rhs = 0.5 * top.value * norm(Func::indicator(O), p, cfg);
        if (lhs < rhs - kNormTol)
            ++out.replay_failures;
    }
    return out;
}

DirectSumReport direct_sum_check(const Exponent& p, double delta, int samples, std::uint64_t seed,
                                 const QuadConfig& cfg)
{
    if (!(delta > 0.0))
        throw DomainError("direct sum check needs delta > 0");
    DirectSumReport out;
    out.samples = samples;
    out.projection_bound = 1.0 / delta;
    for (int i = 0; i < samples; ++i) {
        const auto [x, y] = draw_pair(p, seed, i, true);
        const double nx = norm(x, p, cfg), ny = norm(y, p, cfg), ns = norm(x + y, p, cfg);
        const double big = std::max(nx, ny);
        if (ns > 2.0 * big + 2.0 * kNormTol)
            ++out.triangle_failures;
        if (big > (1.0 + out.projection_bound) * ns + kNormTol)
            ++out.projection_failures;
        if (ns > 0.0)
            out.worst_projection_ratio = std::max(out.worst_projection_ratio, big / ns);
    }
    return out;
}

ProximinalityReport proximinality_check(const Func& f, const Exponent& p, double tol, const QuadConfig& cfg)
{
    const DistanceTrace trace = distance_to_E(f, p, default_schedule(), tol, cfg);
    if (!trace.converged)
        throw InconclusiveError(fmt::format("distance trace for {} did not settle by level {}", f.label(),
                                            trace.levels.back()));
    ProximinalityReport r;
    r.d_value = trace.limit_estimate;
    r.witness_level = trace.best_level;
    r.witness = truncate_to_level(f, p, static_cast<int>(trace.best_level));
    r.witness_distance = norm(f - r.witness, p, cfg);
    r.gap = r.witness_distance - r.d_value;
    r.theta = trace.theta_crosscheck;
    r.germ_ok = r.witness_distance >= r.theta - tol;
    return r;
}

double FunctionalSpec::cstar_norm() const
{
    double total = 0.0;
    for (const auto& a : atoms)
        total += std::abs(a.weight);
    if (density)
        total += integrate_abs(*density);
    return total;
}

double FunctionalSpec::operator()(const Func& x) const
{
    double total = 0.0;
    for (const auto& a : atoms)
        total += a.weight * x(a.t);
    if (density)
        total += integrate_product(*density, x);
    return total;
}

std::string FunctionalSpec::describe() const
{
    std::string s;
    for (const auto& a : atoms)
        s += fmt::format("{}{}*delta({})", s.empty() ? "" : " + ", a.weight, a.t);
    if (density)
        s += fmt::format("{}integral({})", s.empty() ? "" : " + ", density->label());
    return s.empty() ? "0" : s;
}

ExtensionReport extension_bound(const FunctionalSpec& psi, const Exponent& p, const ClosednessReport& report,
                                int samples, std::uint64_t seed, const QuadConfig& cfg)
{
    if (report.verdict != Verdict::Closed)
        throw DomainError("extension bound needs a closed verdict");
    for (const auto& a : psi.atoms)
        if (!(a.t >= 0.0 && a.t <= 1.0))
            throw DomainError(fmt::format("point mass at {} outside [0,1]", a.t));
    ExtensionReport out;
    out.cstar_norm = psi.cstar_norm();
    out.bound = out.cstar_norm / (report.c1_est * report.delta_est);
    out.samples = samples;
    out.note = "extension beyond C + E is non-constructive, out of scope";
    for (int i = 0; i < samples; ++i) {
        const auto [x, y] = draw_pair(p, seed, i, false);
        const double value = std::abs(psi(x));
        const double ns = norm(x + y, p, cfg);
        if (value > out.bound * ns + kNormTol)
            ++out.violations;
        if (ns > 0.0)
            out.worst_ratio = std::max(out.worst_ratio, value / ns);
    }
    return out;
}

LinftyReport linfty_separation_check(const Exponent& p, const ClosednessReport& report, int samples,
                                     std::uint64_t seed, const QuadConfig& cfg)
{
    if (!(report.delta_est > 0.0))
        throw DomainError("sup-norm separation needs delta > 0");
    LinftyReport out;
    out.samples = samples;
    out.separation_floor = report.delta_est * report.c1_est;
    for (int i = 0; i < samples; ++i) {
        const auto [x, y] = draw_pair(p, seed, i, false);
        const Func z = x - y;
        const double sup = sup_norm_argmax(z).value;
        if (sup < norm(z, p, cfg) - kNormTol)
            ++out.lattice_violations;
        if (sup < out.separation_floor)
            ++out.separation_violations;
    }
    return out;
}

LatticeReport lattice_bound_check(const Exponent& p, int samples, std::uint64_t seed, double tol, const QuadConfig& cfg)
{
    LatticeReport out;
    out.samples = samples;
    for (int i = 0; i < samples; ++i) {
        Rng rng = Rng(seed).fork(static_cast<std::uint64_t>(i));
        const Func z = i % 2 == 0 ? Func::scaled(random_continuous(rng), rng.uniform(0.1, 5.0))
                                  : random_simple_on_level(p, rng);
        const double sup = sup_norm_argmax(z).value;
        const double n = norm(z, p, cfg);
        if (n > sup + tol)
            ++out.violations;
        if (sup > 0.0)
            out.max_ratio = std::max(out.max_ratio, n / sup);
    }
    return out;
}

} // namespace vlp
