#include "vlp/norm.hpp"

#include "vlp/error.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace vlp {

namespace {

bool is_zero(const Func& f)
{
    return std::all_of(f.segments().begin(), f.segments().end(), [](const Segment& s) { return s.is_zero(); });
}

/// Smallest lambda of the form sup|f| * 2^k with rho(f/lambda) finite and <= `bound`.
double upper_scale(const Func& f, const Exponent& p, const QuadConfig& cfg, double bound)
{
    double hi = f.bounded() ? sup_norm_argmax(f).value : 1.0;
    if (f.bounded())
        return hi;
    for (int i = 0; i < 64; ++i, hi *= 2.0) {
        const auto r = modular_scaled(f, p, hi, cfg);
        if (r.finite() && r.value <= bound)
            return hi;
    }
    throw InconclusiveError(fmt::format("no finite scaling of {} found under {}", f.label(), p.label()));
}

bool within_unit_ball(const ModularResult& r) { return r.finite() && r.value + r.error_bound <= 1.0; }

} // namespace

NormResult luxemburg_norm(const Func& f, const Exponent& p, double tol, const QuadConfig& cfg)
{
    if (!(tol > 0.0))
        throw DomainError("norm tolerance must be positive");
    NormResult out;
    if (is_zero(f)) {
        out.diagnostics = "zero function";
        return out;
    }
    double lo = 0.0;
    double hi = upper_scale(f, p, cfg, 1.0);
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (within_unit_ball(modular_scaled(f, p, mid, cfg)))
            hi = mid;
        else
            lo = mid;
        ++out.iterations;
    }
    out.value = hi;
    out.lo = lo;
    out.hi = hi;
    out.diagnostics = fmt::format("bisection on rho(f/lambda) <= 1, {} steps", out.iterations);
    return out;
}

NormResult theta(const Func& f, const Exponent& p, double tol, const QuadConfig& cfg)
{
    if (!(tol > 0.0))
        throw DomainError("theta tolerance must be positive");
    NormResult out;
    if (is_zero(f) || std::isfinite(p.ess_sup_on(f.support()))) {
        out.diagnostics = "exponent bounded on the support";
        return out;
    }
    double hi = upper_scale(f, p, cfg, std::numeric_limits<double>::infinity());
    const double scale = hi;
    double lo = tol * scale;
    if (modular_scaled(f, p, lo, cfg).finite()) {
        out.hi = lo;
        out.diagnostics = fmt::format("modular finite down to lambda = {:.3g}", lo);
        return out;
    }
    while (hi - lo > tol * scale) {
        const double mid = 0.5 * (lo + hi);
        if (modular_scaled(f, p, mid, cfg).finite())
            hi = mid;
        else
            lo = mid;
        ++out.iterations;
    }
    out.lo = lo;
    out.hi = hi;
    out.value = 0.5 * (lo + hi);
    out.diagnostics = fmt::format("finite/divergent boundary bracketed in {} steps", out.iterations);
    return out;
}

std::vector<long> default_schedule()
{
    std::vector<long> s;
    for (long n = 2; n <= 256; n *= 2)
        s.push_back(n);
    return s;
}

DistanceTrace distance_to_E(const Func& f, const Exponent& p, std::vector<long> schedule, double tol,
                            const QuadConfig& cfg, long max_level)
{
    if (schedule.empty())
        throw DomainError("distance schedule is empty");
    for (std::size_t i = 0; i < schedule.size(); ++i)
        if (schedule[i] < 1 || (i > 0 && schedule[i] <= schedule[i - 1]))
            throw DomainError("distance schedule must be strictly increasing and >= 1");
    if (!(tol > 0.0))
        throw DomainError("distance tolerance must be positive");

    DistanceTrace trace;
    trace.theta_crosscheck = theta(f, p, std::min(1e-6, tol), cfg).value;
    const double norm_tol = std::min(1e-9, tol * 1e-3);
    auto level_norm = [&](long n) {
        if (n > std::numeric_limits<int>::max())
            throw DomainError("level beyond representable range");
        const MeasSet outside = p.level_set(static_cast<int>(n)).complement();
        const Func rest = Func::masked(f, outside).relabeled(fmt::format("{} - mask({}, omega({}))", f.label(), f.label(), n));
        trace.levels.push_back(n);
        trace.values.push_back(luxemburg_norm(rest, p, norm_tol, cfg).value);
    };
    auto settled = [&] {
        const auto& v = trace.values;
        return v.size() >= 2 && std::abs(v[v.size() - 1] - v[v.size() - 2]) < tol;
    };
    for (long n : schedule)
        level_norm(n);
    for (long n = schedule.back() * 2; !settled() && n <= max_level; n *= 2)
        level_norm(n);

    trace.converged = settled();
    trace.limit_estimate = trace.values.back();
    trace.best_level = trace.levels.back();
    if (trace.converged && std::abs(trace.limit_estimate - trace.theta_crosscheck) > 10.0 * tol)
        throw ConsistencyError(fmt::format("distance limit {:.9g} and theta {:.9g} disagree beyond {:.3g} for {} under {}",
                                           trace.limit_estimate, trace.theta_crosscheck, 10.0 * tol, f.label(),
                                           p.label()));
    return trace;
}

namespace {

/// mu * w(p) * a^{p'} with a = |v| / (mu p): the Lagrange profile x = a^{1/(p-1)}
/// and its modular (w = 1), pairing with v (w = p) and duality slack (w = p - 1).
class ProfileKernel final : public Kernel {
public:
    enum class Weight { Modular, Pairing, Slack };
    ProfileKernel(double mu, Weight w) : mu_(mu), w_(w) {}

    double point(double v, double p) const override
    {
        const double x = std::abs(v);
        if (x == 0.0)
            return 0.0;
        const double pc = std::max(p, 1.0 + kDualClip);
        return std::exp(log_term(x, pc));
    }

    double cell(double c, double p, double log_len) const override
    {
        const double x = std::abs(c);
        if (x == 0.0 || log_len == -std::numeric_limits<double>::infinity())
            return 0.0;
        const double pc = std::max(p, 1.0 + kDualClip);
        return std::exp(log_len + log_term(x, pc));
    }

private:
    double log_term(double x, double pc) const
    {
        const double q = pc / (pc - 1.0);
        double lw = 0.0;
        if (w_ == Weight::Pairing)
            lw = std::log(mu_ * pc);
        else if (w_ == Weight::Slack)
            lw = std::log(mu_ * (pc - 1.0));
        return lw + q * std::log(x / (mu_ * pc));
    }

    double mu_;
    Weight w_;
};

double profile_integral(const Func& v, const Exponent& p, double mu, ProfileKernel::Weight w, const QuadConfig& cfg)
{
    const auto r = integrate_over_exponent(v, p, ProfileKernel(mu, w), cfg);
    return r.finite() ? r.value : std::numeric_limits<double>::infinity();
}

} // namespace

NormResult orlicz_norm(const Func& v, const Exponent& p, double tol, const QuadConfig& cfg)
{
    if (!(tol > 0.0))
        throw DomainError("norm tolerance must be positive");
    NormResult out;
    if (is_zero(v)) {
        out.diagnostics = "zero functional";
        return out;
    }
    if (!v.bounded())
        throw DomainError("orlicz norm needs a bounded density");
    using W = ProfileKernel::Weight;
    double mu_hi = sup_norm_argmax(v).value;
    double mu_lo = mu_hi;
    int guard = 0;
    while (profile_integral(v, p, mu_lo, W::Modular, cfg) <= 1.0) {
        mu_lo *= 0.5;
        if (++guard > 200)
            throw InconclusiveError("Lagrange multiplier bracket not found");
    }
    double primal = 0.0, dual = std::numeric_limits<double>::infinity();
    auto refresh = [&] {
        primal = profile_integral(v, p, mu_hi, W::Pairing, cfg);
        dual = std::min(dual, mu_hi + profile_integral(v, p, mu_hi, W::Slack, cfg));
    };
    refresh();
    while (dual - primal > tol * std::max(1.0, primal) && out.iterations < 400) {
        const double mid = std::sqrt(mu_lo * mu_hi);
        if (!(mid > mu_lo && mid < mu_hi) || mu_hi / mu_lo - 1.0 < 1e-13)
            break;
        if (profile_integral(v, p, mid, W::Modular, cfg) <= 1.0) {
            mu_hi = mid;
            refresh();
        } else {
            mu_lo = mid;
        }
        ++out.iterations;
    }
    if (dual - primal > std::max(tol * std::max(1.0, primal), 1e-12 * primal))
        throw InconclusiveError(fmt::format("orlicz norm bracket [{:.12g}, {:.12g}] did not close", primal, dual));
    out.value = primal;
    out.lo = primal;
    out.hi = dual;
    out.diagnostics = fmt::format("Lagrange multiplier {:.12g} after {} steps", mu_hi, out.iterations);
    return out;
}

NormResult dual_norm(const Func& v, const Exponent& p, double tol, const QuadConfig& cfg)
{
    return luxemburg_norm(v, p.dual(), tol, cfg);
}

HolderCheck holder_check(const Func& x, const Func& v, const Exponent& p, const QuadConfig& cfg)
{
    HolderCheck h;
    h.lhs = integrate_abs_product(x, v);
    if (!std::isfinite(h.lhs))
        throw DomainError("int |x v| diverges");
    h.rhs = 2.0 * luxemburg_norm(x, p, 1e-9, cfg).value * dual_norm(v, p, 1e-9, cfg).value;
    h.ratio = h.rhs > 0.0 ? h.lhs / h.rhs : 0.0;
    return h;
}

} // namespace vlp
