#include "vlp/func.hpp"

#include "vlp/error.hpp"
#include "vlp/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace vlp {

namespace {

bool same_content(const Segment& a, const Segment& b) { return a.poly == b.poly && a.analytic == b.analytic; }

std::vector<Segment> merged(std::vector<Segment> segs)
{
    std::vector<Segment> out;
    for (auto& s : segs) {
        if (!(s.lo < s.hi))
            continue;
        if (!out.empty() && same_content(out.back(), s))
            out.back().hi = s.hi;
        else
            out.push_back(std::move(s));
    }
    return out;
}

Segment scaled_segment(const Segment& s, double factor)
{
    Segment r{s.lo, s.hi, s.poly * factor, {}};
    if (factor != 0.0)
        for (const auto& a : s.analytic)
            r.analytic.push_back(a.scaled(factor));
    return r;
}

template <class Op>
std::vector<Segment> overlay(const std::vector<Segment>& A, const std::vector<Segment>& B, Op op)
{
    std::vector<Segment> out;
    std::size_t i = 0, j = 0;
    Abscissa cursor = Abscissa::zero();
    while (i < A.size() && j < B.size()) {
        const Abscissa hi = B[j].hi < A[i].hi ? B[j].hi : A[i].hi;
        if (cursor < hi) {
            Segment s = op(A[i], B[j]);
            s.lo = cursor;
            s.hi = hi;
            out.push_back(std::move(s));
            cursor = hi;
        }
        if (!(hi < A[i].hi))
            ++i;
        if (!(hi < B[j].hi))
            ++j;
    }
    return merged(std::move(out));
}

std::vector<Segment> mask_segments(const MeasSet& set)
{
    std::vector<Segment> out;
    Abscissa cursor = Abscissa::zero();
    for (const auto& iv : set.intervals()) {
        if (cursor < iv.lo)
            out.push_back({cursor, iv.lo, Poly{}, {}});
        out.push_back({iv.lo, iv.hi, Poly::constant(1.0), {}});
        cursor = iv.hi;
    }
    if (cursor < Abscissa::one())
        out.push_back({cursor, Abscissa::one(), Poly{}, {}});
    return out;
}

std::string fmt_set(const MeasSet& set)
{
    if (set.intervals().size() == 1) {
        const auto& iv = set.intervals()[0];
        return fmt::format("{},{}", iv.lo.t, iv.hi.t);
    }
    return set.describe();
}

} // namespace

double AnalyticTerm::operator()(double t) const
{
    switch (tag) {
    case Tag::Sin:
        return a * std::sin(b * t + c);
    case Tag::Exp:
        return a * std::exp(b * t);
    case Tag::Pow:
        return a == 0.0 ? 0.0 : a * std::pow(t, b);
    }
    return 0.0;
}

AnalyticTerm AnalyticTerm::scaled(double s) const
{
    AnalyticTerm r = *this;
    r.a *= s;
    return r;
}

std::string AnalyticTerm::describe() const
{
    switch (tag) {
    case Tag::Sin:
        return fmt::format("sin({},{},{})", a, b, c);
    case Tag::Exp:
        return fmt::format("exp({},{})", a, b);
    case Tag::Pow:
        return fmt::format("pow({},{})", a, b);
    }
    return {};
}

double Segment::operator()(double t) const
{
    double v = poly(t);
    for (const auto& a : analytic)
        v += a(t);
    return v;
}

Func::Func(Kind k, std::vector<Segment> segs, std::string label, bool continuous)
    : kind_(k), segments_(merged(std::move(segs))), label_(std::move(label)), continuous_(continuous)
{
    if (segments_.empty())
        segments_.push_back({Abscissa::zero(), Abscissa::one(), Poly{}, {}});
}

Func Func::indicator(MeasSet set)
{
    const double m = set.measure();
    return Func(Kind::Indicator, mask_segments(set), fmt::format("indicator({})", fmt_set(set)), m == 0.0 || m == 1.0);
}

Func Func::indicator(double a, double b)
{
    if (!(0.0 <= a && a < b && b <= 1.0))
        throw DomainError(fmt::format("indicator({}, {}) needs 0 <= a < b <= 1", a, b));
    return indicator(MeasSet::interval(a, b));
}

Func Func::constant(double c)
{
    return Func(Kind::PiecewisePoly, {{Abscissa::zero(), Abscissa::one(), Poly::constant(c), {}}},
                fmt::format("const({})", c), true);
}

Func Func::piecewise_poly(std::vector<double> breaks, std::vector<Poly> pieces, bool continuous)
{
    if (breaks.size() < 2 || breaks.front() != 0.0 || breaks.back() != 1.0)
        throw DomainError("polynomial breaks must start at 0 and end at 1");
    if (pieces.size() + 1 != breaks.size())
        throw DomainError(fmt::format("{} breaks need {} pieces, got {}", breaks.size(), breaks.size() - 1, pieces.size()));
    std::vector<Segment> segs;
    std::string label = "poly(";
    for (std::size_t i = 0; i < breaks.size(); ++i)
        label += fmt::format("{}{}", i ? "," : "", breaks[i]);
    label += ";";
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        if (!(breaks[i] < breaks[i + 1]))
            throw DomainError("polynomial breaks must be strictly increasing");
        if (pieces[i].degree() > 3)
            throw DomainError(fmt::format("piece {} has degree {} > 3", i, pieces[i].degree()));
        if (continuous && i > 0) {
            const double t = breaks[i];
            const double l = pieces[i - 1](t), r = pieces[i](t);
            // evaluation rounding scales with sum |c_k| t^k, not with the value itself
            auto scale = [t](const Poly& q) {
                double s = 0.0;
                for (int k = 0; k <= q.degree(); ++k)
                    s += std::abs(q.coeff(k)) * std::pow(t, k);
                return s;
            };
            if (std::abs(l - r) > 1e-12 * std::max({1.0, scale(pieces[i - 1]), scale(pieces[i])}))
                throw DomainError(fmt::format("continuous polynomial jumps at t = {}: {} vs {}", breaks[i], l, r));
        }
        segs.push_back({Abscissa::at(breaks[i]), Abscissa::at(breaks[i + 1]), pieces[i], {}});
        if (i)
            label += "/";
        for (int k = 0; k <= std::max(0, pieces[i].degree()); ++k)
            label += fmt::format("{}{}", k ? " " : "", pieces[i].coeff(k));
    }
    label += ")";
    return Func(Kind::PiecewisePoly, std::move(segs), label, continuous);
}

Func Func::analytic(AnalyticTerm term)
{
    const bool ok = term.bounded_near_zero();
    return Func(Kind::NamedAnalytic, {{Abscissa::zero(), Abscissa::one(), Poly{}, {term}}}, term.describe(), ok);
}

Func Func::scaled(const Func& inner, double factor)
{
    std::vector<Segment> segs;
    for (const auto& s : inner.segments_)
        segs.push_back(scaled_segment(s, factor));
    return Func(Kind::Scaled, std::move(segs), fmt::format("scale({}, {})", factor, inner.label_), inner.continuous_);
}

Func Func::sum(const std::vector<Func>& terms)
{
    if (terms.empty())
        return constant(0.0);
    std::vector<Segment> acc = terms.front().segments_;
    std::string label = "sum(" + terms.front().label_;
    bool cont = terms.front().continuous_;
    for (std::size_t k = 1; k < terms.size(); ++k) {
        acc = overlay(acc, terms[k].segments_, [](const Segment& a, const Segment& b) {
            Segment s{{}, {}, a.poly + b.poly, a.analytic};
            s.analytic.insert(s.analytic.end(), b.analytic.begin(), b.analytic.end());
            return s;
        });
        label += ", " + terms[k].label_;
        cont = cont && terms[k].continuous_;
    }
    return Func(Kind::Sum, std::move(acc), label + ")", cont);
}

Func Func::masked(const Func& inner, const MeasSet& mask)
{
    auto segs = overlay(inner.segments_, mask_segments(mask), [](const Segment& a, const Segment& m) {
        return m.poly.is_zero() ? Segment{} : a;
    });
    const double measure = mask.measure();
    return Func(Kind::Masked, std::move(segs), fmt::format("mask({}, {})", inner.label_, fmt_set(mask)),
                inner.continuous_ && measure == 1.0);
}

Func Func::relabeled(std::string label) const
{
    Func f = *this;
    f.label_ = std::move(label);
    return f;
}

double Func::operator()(double t) const
{
    if (!(t >= 0.0 && t <= 1.0))
        throw DomainError(fmt::format("t = {} outside [0,1]", t));
    auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                               [](double x, const Segment& s) { return x < s.lo.t; });
    if (it != segments_.begin())
        --it;
    return (*it)(t);
}

MeasSet Func::support() const
{
    std::vector<Interval> out;
    for (const auto& s : segments_)
        if (!s.is_zero())
            out.push_back({s.lo, s.hi});
    return MeasSet(std::move(out));
}

bool Func::bounded() const
{
    for (const auto& s : segments_)
        for (const auto& a : s.analytic)
            if (!a.bounded_near_zero() && s.lo.t == 0.0)
                return false;
    return true;
}

double eval_func(const Func& f, double t) { return f(t); }

Func truncate_to_level(const Func& f, const Exponent& p, int n)
{
    return Func::masked(f, p.level_set(n)).relabeled(fmt::format("mask({}, omega({}))", f.label(), n));
}

SupNorm sup_norm_argmax(const Func& f)
{
    if (!f.bounded())
        throw DomainError(fmt::format("{} is unbounded; no supremum", f.label()));
    SupNorm best{-1.0, 0.0};
    auto consider = [&](double v, double t) {
        if (v > best.value + 1e-15 * std::max(1.0, best.value))
            best = {v, t};
    };
    for (const auto& s : f.segments()) {
        const double a = s.lo.t, b = s.hi.t;
        if (!(b > a)) {
            // stretch below the smallest double: f equals its value at 0 there
            if (s.lo < s.hi)
                consider(std::abs(s(a)), a);
            continue;
        }
        if (s.polynomial()) {
            auto e = s.poly.max_abs(a, b);
            consider(e.value, e.at);
            continue;
        }
        // dense scan, then golden-section refinement around the best sample
        constexpr int n = 4096;
        const double h = (b - a) / n;
        int arg = 0;
        double top = -1.0;
        for (int i = 0; i <= n; ++i) {
            const double v = std::abs(s(a + i * h));
            if (v > top) {
                top = v;
                arg = i;
            }
        }
        double lo = a + std::max(0, arg - 1) * h, hi = a + std::min(n, arg + 1) * h;
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
            const double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
            if (std::abs(s(x1)) >= std::abs(s(x2)))
                hi = x2;
            else
                lo = x1;
        }
        const double tm = 0.5 * (lo + hi);
        const double vm = std::abs(s(tm));
        if (vm > top)
            consider(vm, tm);
        else
            consider(top, a + arg * h);
    }
    return best.value < 0.0 ? SupNorm{0.0, 0.0} : best;
}

namespace {

double product_integral(const Func& f, const Func& g, bool absolute)
{
    std::vector<double> cuts{0.0};
    for (const auto* h : {&f, &g})
        for (const auto& s : h->segments())
            cuts.push_back(s.hi.t);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    auto locate = [](const Func& h, double mid) -> const Segment& {
        const auto& v = h.segments();
        auto it = std::upper_bound(v.begin(), v.end(), mid, [](double x, const Segment& q) { return x < q.lo.t; });
        return *std::prev(it);
    };
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        const double mid = 0.5 * (a + b);
        const Segment& sf = locate(f, mid);
        const Segment& sg = locate(g, mid);
        if (sf.is_zero() || sg.is_zero())
            continue;
        if (sf.polynomial() && sg.polynomial()) {
            const Poly prod = sf.poly * sg.poly;
            if (!absolute) {
                total += prod.integrate(a, b);
                continue;
            }
            double prev = a;
            auto roots = prod.roots_in(a, b);
            roots.push_back(b);
            for (double r : roots) {
                if (r > prev)
                    total += std::abs(prod.integrate(prev, r));
                prev = std::max(prev, r);
            }
        } else {
            auto h = [&](double t) {
                const double v = sf(t) * sg(t);
                return absolute ? std::abs(v) : v;
            };
            total += integrate_adaptive(h, a, b, 1e-14, 1e-13, 4096).value;
        }
    }
    return total;
}

} // namespace

double integrate_product(const Func& f, const Func& g) { return product_integral(f, g, false); }

double integrate_abs_product(const Func& f, const Func& g) { return product_integral(f, g, true); }

double integrate_abs(const Func& f)
{
    double total = 0.0;
    for (const auto& s : f.segments()) {
        const double a = s.lo.t, b = s.hi.t;
        if (!(b > a) || s.is_zero())
            continue;
        if (s.polynomial()) {
            double prev = a;
            auto roots = s.poly.roots_in(a, b);
            roots.push_back(b);
            for (double r : roots) {
                if (r > prev)
                    total += std::abs(s.poly.integrate(prev, r));
                prev = std::max(prev, r);
            }
        } else {
            total += integrate_adaptive([&](double t) { return std::abs(s(t)); }, a, b, 1e-14, 1e-13, 4096).value;
        }
    }
    return total;
}

} // namespace vlp
