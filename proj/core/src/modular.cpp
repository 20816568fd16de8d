#include "vlp/modular.hpp"

#include "vlp/error.hpp"
#include "vlp/quadrature.hpp"

#include <algorithm>
#include <climits>
#include <cmath>

#include <fmt/format.h>

namespace vlp {

namespace {

constexpr double kLn2 = 0.693147180559945309417232121458176568;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr long kInfLevel = LONG_MAX;
// Below this point the log exponent is handled by the graded ladder.
constexpr double kLogSplit = 0.0625;
// Past e^{-45} (resp. 64 tail cells) a polynomial equals its value at 0 in double precision.
constexpr double kAsymptoticU = 45.0;
constexpr long kAsymptoticCells = 64;
// Where ladders stop when the asymptotic remainder is disabled.
constexpr double kLadderMaxU = 700.0;
constexpr long kTailHorizon = 1070;

long cell_of(double log_t) { return static_cast<long>(std::ceil(-log_t / kLn2 - 1e-9)); }
long cell_below(double log_t) { return static_cast<long>(std::floor(-log_t / kLn2 + 1e-9)) + 1; }

double log_expm1(double y) { return y > 30.0 ? y : std::log(std::expm1(y)); }

class Engine {
public:
    Engine(const Exponent& p, const Kernel& k, const QuadConfig& cfg) : p_(p), k_(k), cfg_(cfg) {}

    ModularResult run(const Func& f)
    {
        for (const auto& s : f.segments()) {
            if (s.is_zero())
                continue;
            dispatch(s);
            if (divergent_)
                break;
        }
        ModularResult r;
        if (divergent_) {
            r.status = ModularStatus::Divergent;
            r.value = kInf;
            r.error_bound = 0.0;
            r.divergence_witness = witness_;
            r.closed_form = closed_;
            return r;
        }
        if (!std::isfinite(value_)) {
            // finite integral beyond double range
            r.value = kInf;
            r.closed_form = closed_;
            return r;
        }
        const double tol = std::max(cfg_.abs_tol, cfg_.rel_tol * std::abs(value_));
        if (inconclusive_ || !(error_ <= tol))
            throw InconclusiveError(fmt::format("modular of {} under {}: error estimate {:.3g} exceeds tolerance {:.3g} "
                                                "after {} subdivisions{}",
                                                label_, p_.label(), error_, tol, used_, inconclusive_ ? note_ : ""));
        r.value = value_;
        r.error_bound = error_;
        r.closed_form = closed_;
        return r;
    }

    void set_label(std::string l) { label_ = std::move(l); }

private:
    void add_closed(double v)
    {
        value_ += v;
        error_ += 4.0 * kEps * std::abs(v);
    }

    void diverge(std::string witness)
    {
        divergent_ = true;
        witness_ = std::move(witness);
    }

    template <class F>
    double gk(F&& integrand, double a, double b)
    {
        closed_ = false;
        const std::size_t budget = cfg_.max_subdivisions > used_ ? cfg_.max_subdivisions - used_ : 0;
        auto r = integrate_adaptive(integrand, a, b, cfg_.abs_tol * (b - a), cfg_.rel_tol, budget);
        used_ += r.subdivisions;
        if (!std::isfinite(r.value)) {
            value_ = kInf;
            return kInf;
        }
        value_ += r.value;
        error_ += r.error;
        return r.value;
    }

    /// Roots of a polynomial segment inside (a,b) are kinks of |f|; integrate between them.
    template <class F>
    double gk_split(const Segment& s, F&& integrand, double a, double b)
    {
        std::vector<double> cuts{a};
        if (s.polynomial())
            for (double r : s.poly.roots_in(a, b))
                if (r > cuts.back() && r < b)
                    cuts.push_back(r);
        cuts.push_back(b);
        double total = 0.0;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
            total += gk(integrand, cuts[i], cuts[i + 1]);
        return total;
    }

    double piece(const Segment& s, double a, double b, double q)
    {
        if (!(b > a))
            return 0.0;
        if (cfg_.closed_forms && s.polynomial()) {
            if (s.poly.degree() <= 0) {
                const double v = k_.cell(s.poly.coeff(0), q, std::log(b - a));
                add_closed(v);
                return v;
            }
            if (s.poly.degree() == 1) {
                if (auto v = k_.linear(s.poly, a, b, q)) {
                    add_closed(*v);
                    return *v;
                }
            }
        }
        return gk_split(s, [&](double t) { return k_.point(s(t), q); }, a, b);
    }

    void dispatch(const Segment& s)
    {
        if (auto c = p_.as_constant()) {
            piece(s, s.lo.t, s.hi.t, c->value);
        } else if (auto l = p_.as_log()) {
            if (l->dual) {
                log_dual(s, s.lo.t, s.hi.t);
                return;
            }
            if (s.hi.t > kLogSplit)
                log_regular(s, std::max(s.lo.t, kLogSplit), s.hi.t);
            const Abscissa split = Abscissa::at(kLogSplit);
            if (s.lo < split)
                log_ladder(s, s.lo, s.hi < split ? s.hi : split);
        } else {
            const auto& rep = *p_.as_step();
            const double te = rep.tail ? rep.tail->end() : 0.0;
            if (s.hi.t > std::max(s.lo.t, te))
                for (const auto& pc : p_.explicit_pieces(s.lo.t, s.hi.t))
                    piece(s, pc.lo, pc.hi, pc.value);
            if (rep.tail) {
                const Abscissa end = Abscissa::at(te);
                if (s.lo < end)
                    step_tail(s, s.lo, s.hi < end ? s.hi : end, *rep.tail);
            }
        }
    }

    void log_regular(const Segment& s, double a, double b)
    {
        if (!(b > a))
            return;
        if (cfg_.closed_forms && s.polynomial() && s.poly.degree() <= 0) {
            if (auto tl = k_.log_constant(s.poly.coeff(0), -std::log(b), -std::log(a))) {
                add_closed(tl->value);
                return;
            }
        }
        gk_split(s, [&](double t) { return k_.point(s(t), 1.0 - std::log(t)); }, a, b);
    }

    void log_dual(const Segment& s, double a, double b)
    {
        std::vector<double> cuts{a};
        for (int k = 1; k <= 52; ++k) {
            const double g = 1.0 - std::ldexp(1.0, -k);
            if (g > cuts.back() && g < b)
                cuts.push_back(g);
        }
        cuts.push_back(b);
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
            gk_split(s, [&](double t) { return k_.point(s(t), conjugate_exponent(1.0 - std::log(t))); },
                     cuts[i], cuts[i + 1]);
    }

    /// Rule (b): past the cap with the last three refinements non-decreasing.
    bool ladder_diverges(const std::vector<double>& rungs, double partial) const
    {
        const std::size_t n = rungs.size();
        if (!(partial > cfg_.divergence_cap) || n < 4)
            return false;
        return rungs[n - 4] <= rungs[n - 3] && rungs[n - 3] <= rungs[n - 2] && rungs[n - 2] <= rungs[n - 1];
    }

    /// Geometric remainder of a ladder that was cut off, or an inconclusive mark.
    void extrapolate(const std::vector<double>& rungs, const std::string& where)
    {
        const std::size_t n = rungs.size();
        if (n >= 4 && rungs[n - 1] == 0.0)
            return;
        if (n >= 4) {
            double ratio = 0.0;
            bool ok = true;
            for (std::size_t i = n - 3; i < n; ++i) {
                if (!(rungs[i - 1] > 0.0)) {
                    ok = false;
                    break;
                }
                ratio = std::max(ratio, rungs[i] / rungs[i - 1]);
            }
            if (ok && ratio < 1.0) {
                const double rem = rungs[n - 1] * ratio / (1.0 - ratio);
                value_ += rem;
                error_ += rem;
                return;
            }
        }
        inconclusive_ = true;
        note_ = fmt::format("; ladder toward {} neither converged nor exceeded the divergence cap", where);
    }

    void log_ladder(const Segment& s, Abscissa lo, Abscissa hi)
    {
        const double u_top = -hi.log_t;
        const double u_bot = -lo.log_t;
        if (cfg_.closed_forms && s.polynomial() && s.poly.degree() <= 0) {
            if (auto tl = k_.log_constant(s.poly.coeff(0), u_top, u_bot)) {
                if (tl->divergent) {
                    diverge(fmt::format("[0, {:.6g}): constant {} against p(t)=1-ln t gives |c|^(1+u) e^(-u) "
                                        "with ln|c| >= 1, non-integrable at t=0",
                                        hi.t, s.poly.coeff(0)));
                    return;
                }
                add_closed(tl->value);
                return;
            }
        }
        const double width = -std::log(cfg_.endpoint_grading);
        const double u_stop = cfg_.asymptotic_tail ? std::max(u_top, kAsymptoticU) : kLadderMaxU;
        std::vector<double> rungs;
        double partial = 0.0;
        double u1 = u_top;
        auto integrand = [&](double t) { return k_.point(s(t), 1.0 - std::log(t)); };
        while (u1 < u_bot && u1 < u_stop) {
            const double u2 = std::min({u1 + width, u_bot, u_stop});
            const double r = gk_split(s, integrand, std::exp(-u2), std::exp(-u1));
            rungs.push_back(r);
            partial += r;
            if (ladder_diverges(rungs, partial)) {
                diverge(fmt::format("[0, {:.6g}): graded ladder toward t=0 passed the cap {:.3g} with "
                                    "non-decreasing rung contributions",
                                    std::exp(-u2), cfg_.divergence_cap));
                return;
            }
            u1 = u2;
        }
        if (!(u1 < u_bot))
            return;
        if (!cfg_.asymptotic_tail) {
            extrapolate(rungs, "t=0");
            return;
        }
        const double c = std::abs(s(0.0));
        closed_ = false;
        if (auto tl = k_.log_constant(c, u1, u_bot)) {
            if (tl->divergent) {
                diverge(fmt::format("[0, {:.6g}): |f(0)| = {:.6g} against p(t)=1-ln t, non-integrable at t=0",
                                    std::exp(-u1), c));
                return;
            }
            value_ += tl->value;
            error_ += 4.0 * kEps * std::abs(tl->value);
        } else {
            const double mass = std::exp(-u1) - std::exp(-u_bot);
            const double v = mass * k_.point(c, 1.0 + u1);
            value_ += v;
            error_ += std::abs(v);
        }
    }

    static double cell_log_len(long j, const Abscissa& lo, const Abscissa& hi)
    {
        const double top = std::min((1.0 - static_cast<double>(j)) * kLn2, hi.log_t);
        const double bot = std::max(-static_cast<double>(j) * kLn2, lo.log_t);
        if (!(top > bot))
            return -kInf;
        return top + std::log(-std::expm1(bot - top));
    }

    /// Sum of full cells j1..j2 (j2 may be kInfLevel) for constant c.
    Kernel::Tail full_cells(double c, const GeometricTail& tail, long j1, long j2)
    {
        if (j1 > j2)
            return {};
        if (auto tl = k_.tail_sum(c, tail, j1, j2))
            return *tl;
        Kernel::Tail out;
        for (long j = j1; j <= std::min(j2, kTailHorizon); ++j)
            out.value += k_.cell(c, tail.value(j), -static_cast<double>(j) * kLn2);
        return out;
    }

    void step_tail(const Segment& s, Abscissa lo, Abscissa hi, const GeometricTail& tail)
    {
        const long j_a = hi.t >= tail.end() ? tail.first_level : std::max<long>(cell_below(hi.log_t), tail.first_level);
        const long j_b = lo.log_t == -kInf ? kInfLevel : cell_of(lo.log_t);
        if (j_a > j_b)
            return;
        auto diverged_tail = [&](double c) {
            diverge(fmt::format("[0, {:.6g}): geometric tail cells 2^-j carry |f| = {:.6g} to the power "
                                "max({}, {}*j); the cell series has ratio >= 1",
                                hi.t, c, tail.base, tail.slope));
        };

        if (cfg_.closed_forms && s.polynomial() && s.poly.degree() <= 0) {
            const double c = s.poly.coeff(0);
            double v = k_.cell(c, tail.value(j_a), cell_log_len(j_a, lo, hi));
            if (j_b != kInfLevel && j_b > j_a)
                v += k_.cell(c, tail.value(j_b), cell_log_len(j_b, lo, hi));
            const long mid_end = j_b == kInfLevel ? kInfLevel : j_b - 1;
            auto mid = full_cells(c, tail, j_a + 1, mid_end);
            if (mid.divergent) {
                diverged_tail(c);
                return;
            }
            add_closed(v + mid.value);
            return;
        }

        const long explicit_end = cfg_.asymptotic_tail ? j_a + kAsymptoticCells : kTailHorizon;
        std::vector<double> rungs;
        double partial = 0.0;
        long j = j_a;
        for (; j <= j_b && j < explicit_end; ++j) {
            const double a = std::max(std::ldexp(1.0, static_cast<int>(-j)), lo.t);
            const double b = std::min(std::ldexp(1.0, static_cast<int>(1 - j)), hi.t);
            const double r = piece(s, a, b, tail.value(j));
            rungs.push_back(r);
            partial += r;
            if (ladder_diverges(rungs, partial)) {
                diverge(fmt::format("[0, {:.6g}): tail cells passed the cap {:.3g} with non-decreasing contributions",
                                    b, cfg_.divergence_cap));
                return;
            }
        }
        if (j > j_b)
            return;
        if (!cfg_.asymptotic_tail) {
            extrapolate(rungs, "t=0");
            return;
        }
        closed_ = false;
        const double c = std::abs(s(0.0));
        double v = 0.0;
        long last = j_b;
        if (j_b != kInfLevel) {
            v += k_.cell(c, tail.value(j_b), cell_log_len(j_b, lo, hi));
            last = j_b - 1;
        }
        auto rest = full_cells(c, tail, j, last);
        if (rest.divergent) {
            diverged_tail(c);
            return;
        }
        value_ += v + rest.value;
        error_ += 4.0 * kEps * std::abs(v + rest.value);
    }

    const Exponent& p_;
    const Kernel& k_;
    const QuadConfig& cfg_;
    std::string label_;
    double value_ = 0.0;
    double error_ = 0.0;
    std::size_t used_ = 0;
    bool closed_ = true;
    bool divergent_ = false;
    bool inconclusive_ = false;
    std::string witness_;
    std::string note_;
};

} // namespace

void QuadConfig::validate() const
{
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
        throw DomainError("quadrature tolerances must be positive");
    if (!(divergence_cap > 1.0))
        throw DomainError("divergence cap must exceed 1");
    if (!(endpoint_grading > 0.0 && endpoint_grading < 1.0))
        throw DomainError("endpoint grading must lie in (0,1)");
    if (max_subdivisions < 1)
        throw DomainError("subdivision budget must be positive");
}

double Kernel::cell(double c, double p, double log_len) const
{
    if (log_len == -kInf)
        return 0.0;
    return std::exp(log_len) * point(c, p);
}

double PowerKernel::point(double v, double p) const
{
    const double x = std::abs(scale_ * v);
    return x == 0.0 ? 0.0 : std::pow(x, p);
}

double PowerKernel::cell(double c, double p, double log_len) const
{
    const double x = std::abs(scale_ * c);
    if (x == 0.0 || log_len == -kInf)
        return 0.0;
    return std::exp(log_len + p * std::log(x));
}

std::optional<double> PowerKernel::linear(const Poly& lin, double a, double b, double p) const
{
    const double alpha = scale_ * lin.coeff(0);
    const double beta = scale_ * lin.coeff(1);
    if (beta == 0.0)
        return cell(lin.coeff(0), p, std::log(b - a));
    std::vector<double> cuts{a};
    const double root = -alpha / beta;
    if (root > a && root < b)
        cuts.push_back(root);
    cuts.push_back(b);
    const double q1 = p + 1.0;
    const double log_denominator = std::log(q1 * std::abs(beta));
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double x1 = cuts[i], x2 = cuts[i + 1];
        const double hi = std::max(std::abs(alpha + beta * x1), std::abs(alpha + beta * x2));
        if (hi == 0.0)
            continue;
        const double ratio = std::max(-1.0, -std::abs(beta) * (x2 - x1) / hi);
        const double frac = -std::expm1(q1 * std::log1p(ratio)); // 1 - (lo/hi)^{p+1}
        if (!(frac > 0.0))
            continue;
        total += std::exp(q1 * std::log(hi) + std::log(frac) - log_denominator);
    }
    return total;
}

std::optional<Kernel::Tail> PowerKernel::log_constant(double c, double u1, double u2) const
{
    const double x = std::abs(scale_ * c);
    if (x == 0.0 || !(u2 > u1))
        return Tail{};
    const double L = std::log(x);
    const double k = L - 1.0;
    if (std::isinf(u2)) {
        if (k >= 0.0)
            return Tail{kInf, true};
        return Tail{std::exp(L + u1 * k - std::log(-k)), false};
    }
    const double span = u2 - u1;
    if (k == 0.0)
        return Tail{x * span, false};
    if (k > 0.0)
        return Tail{std::exp(L + u1 * k + log_expm1(span * k) - std::log(k)), false};
    return Tail{std::exp(L + u1 * k) * (-std::expm1(span * k)) / (-k), false};
}

std::optional<Kernel::Tail> PowerKernel::tail_sum(double c, const GeometricTail& tail, long j1, long j2) const
{
    const double x = std::abs(scale_ * c);
    Tail out;
    if (x == 0.0 || j1 > j2)
        return out;
    const double lx = std::log(x);
    if (tail.dual) {
        for (long j = j1; j <= std::min(j2, kTailHorizon); ++j)
            out.value += std::exp(-static_cast<double>(j) * kLn2 + tail.value(j) * lx);
        return out;
    }
    long j = j1;
    for (; j <= j2 && tail.slope * static_cast<double>(j) <= tail.base; ++j)
        out.value += std::exp(-static_cast<double>(j) * kLn2 + tail.base * lx);
    if (j > j2)
        return out;
    // remaining terms r^j with log r = g
    const double g = tail.slope * lx - kLn2;
    const double jd = static_cast<double>(j);
    if (j2 == kInfLevel) {
        if (g >= 0.0)
            return Tail{kInf, true};
        out.value += std::exp(jd * g - std::log(-std::expm1(g)));
        return out;
    }
    const double n = static_cast<double>(j2 - j + 1);
    if (g == 0.0) {
        out.value += n;
    } else if (g > 0.0) {
        out.value += std::exp(jd * g + log_expm1(n * g) - std::log(std::expm1(g)));
    } else {
        out.value += std::exp(jd * g) * (-std::expm1(n * g)) / (-std::expm1(g));
    }
    return out;
}

ModularResult integrate_over_exponent(const Func& f, const Exponent& p, const Kernel& kernel, const QuadConfig& cfg)
{
    cfg.validate();
    Engine engine(p, kernel, cfg);
    engine.set_label(f.label());
    return engine.run(f);
}

ModularResult modular(const Func& f, const Exponent& p, const QuadConfig& cfg)
{
    return integrate_over_exponent(f, p, PowerKernel(1.0), cfg);
}

ModularResult modular_scaled(const Func& f, const Exponent& p, double lambda, const QuadConfig& cfg)
{
    if (!(lambda > 0.0) || std::isinf(lambda))
        throw DomainError(fmt::format("scaling lambda = {} must be positive and finite", lambda));
    return integrate_over_exponent(f, p, PowerKernel(1.0 / lambda), cfg);
}

} // namespace vlp
