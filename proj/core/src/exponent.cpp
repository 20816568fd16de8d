#include "vlp/exponent.hpp"

#include "vlp/error.hpp"
#include "vlp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

namespace vlp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = 0.693147180559945309417232121458176568;
// Past this level a tail cell has vanished below the smallest subnormal.
constexpr long kTailHorizon = 1100;

Abscissa dyadic(long j) { return {std::ldexp(1.0, static_cast<int>(-j)), -static_cast<double>(j) * kLn2}; }

/// Tail cell containing t > 0 (cells are [2^{-j}, 2^{1-j})).
long cell_of(double log_t) { return static_cast<long>(std::ceil(-log_t / kLn2 - 1e-9)); }

/// Tail cell containing points just below t.
long cell_below(double log_t) { return static_cast<long>(std::floor(-log_t / kLn2 + 1e-9)) + 1; }

void merge_equal(Exponent::StepRep& rep)
{
    std::vector<double> breaks{rep.breaks.front()};
    std::vector<double> values;
    for (std::size_t i = 0; i < rep.values.size(); ++i) {
        if (!(rep.breaks[i + 1] > breaks.back()))
            continue;
        if (!values.empty() && values.back() == rep.values[i]) {
            breaks.back() = rep.breaks[i + 1];
        } else {
            values.push_back(rep.values[i]);
            breaks.push_back(rep.breaks[i + 1]);
        }
    }
    rep.breaks = std::move(breaks);
    rep.values = std::move(values);
}

void check_t(double t)
{
    if (!(t >= 0.0 && t <= 1.0))
        throw DomainError(fmt::format("t = {} outside [0,1]", t));
}

} // namespace

double conjugate_exponent(double p)
{
    if (std::isinf(p))
        return 1.0;
    const double q = std::max(p, 1.0 + kDualClip);
    return q / (q - 1.0);
}

double GeometricTail::value(long j) const
{
    const double v = std::max(base, slope * static_cast<double>(j));
    return dual ? conjugate_exponent(v) : v;
}

double GeometricTail::end() const { return std::ldexp(1.0, 1 - first_level); }

Exponent Exponent::constant(double p)
{
    if (!(p >= 1.0) || std::isinf(p))
        throw DomainError(fmt::format("constant exponent {} must be finite and >= 1", p));
    return Exponent(Kind::Constant, ConstantRep{p}, fmt::format("constant({})", p));
}

Exponent Exponent::piecewise(std::vector<double> breaks, std::vector<double> values)
{
    if (breaks.size() < 2 || breaks.front() != 0.0 || breaks.back() != 1.0)
        throw DomainError("piecewise exponent breaks must start at 0 and end at 1");
    if (values.size() + 1 != breaks.size())
        throw DomainError(fmt::format("piecewise exponent has {} breaks but {} values", breaks.size(), values.size()));
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
        if (!(breaks[i] < breaks[i + 1]))
            throw DomainError("piecewise exponent breaks must be strictly increasing");
    for (double v : values)
        if (!(v >= 1.0) || std::isinf(v))
            throw DomainError(fmt::format("exponent value {} must be finite and >= 1", v));
    std::string label = "piecewise(";
    for (std::size_t i = 0; i < breaks.size(); ++i)
        label += fmt::format("{}{}", i ? "," : "", breaks[i]);
    label += ";";
    for (std::size_t i = 0; i < values.size(); ++i)
        label += fmt::format("{}{}", i ? "," : "", values[i]);
    label += ")";
    return Exponent(Kind::PiecewiseConstant, StepRep{std::move(breaks), std::move(values), std::nullopt}, label);
}

Exponent Exponent::log_family() { return Exponent(Kind::LogFamily, LogRep{false}, "log"); }

Exponent Exponent::spiked(int levels, double slope, double base)
{
    if (levels < 1 || levels > 16)
        throw DomainError(fmt::format("spiked exponent needs 1 <= J <= 16, got {}", levels));
    if (!(slope > 0.0) || !(base > 1.0) || std::isinf(slope) || std::isinf(base))
        throw DomainError("spiked exponent needs slope > 0 and base > 1");

    const double period = std::ldexp(1.0, -levels);
    StepRep rep;
    rep.breaks.push_back(period);
    const std::size_t periods = std::size_t{1} << levels;
    for (std::size_t m = 1; m < periods; ++m) {
        double cursor = static_cast<double>(m) * period;
        for (int j = 1; j <= levels; ++j) {
            cursor += std::ldexp(1.0, -j - levels);
            rep.breaks.push_back(cursor);
            rep.values.push_back(std::max(base, slope * j));
        }
        rep.breaks.push_back(static_cast<double>(m + 1) * period);
        rep.values.push_back(base);
    }
    rep.breaks.back() = 1.0;
    rep.tail = GeometricTail{levels + 1, slope, base, false};
    merge_equal(rep);
    Exponent e(Kind::Spiked, std::move(rep), fmt::format("spiked({},{},{})", levels, slope, base));
    e.spike_ = SpikeParams{levels, slope, base};
    return e;
}

Exponent Exponent::step(StepRep rep, std::string label)
{
    if (rep.breaks.size() != rep.values.size() + 1 || rep.breaks.back() != 1.0)
        throw DomainError("malformed step exponent");
    const double front = rep.tail ? rep.tail->end() : 0.0;
    if (rep.breaks.front() != front)
        throw DomainError("step exponent must start where its tail ends");
    merge_equal(rep);
    const Kind k = rep.tail ? Kind::Step : Kind::PiecewiseConstant;
    return Exponent(k, std::move(rep), std::move(label));
}

double Exponent::operator()(double t) const
{
    check_t(t);
    if (auto c = as_constant())
        return c->value;
    if (auto l = as_log()) {
        if (t == 0.0) {
            if (!l->dual)
                throw UnboundedPointError("log exponent is +infinity at t = 0");
            return 1.0;
        }
        const double p = 1.0 - std::log(t);
        return l->dual ? conjugate_exponent(p) : p;
    }
    const auto& s = *as_step();
    if (t < s.breaks.front()) {
        if (t == 0.0) {
            if (!s.tail->dual)
                throw UnboundedPointError("spiked tail is +infinity at t = 0");
            return 1.0;
        }
        int e;
        std::frexp(t, &e); // t in [2^{e-1}, 2^e)
        return s.tail->value(1 - e);
    }
    auto it = std::upper_bound(s.breaks.begin(), s.breaks.end(), t);
    auto idx = static_cast<std::size_t>(it - s.breaks.begin()) - 1;
    return s.values[std::min(idx, s.values.size() - 1)];
}

bool Exponent::singular_at_zero() const
{
    if (auto l = as_log())
        return !l->dual;
    if (auto s = as_step())
        return s->tail && !s->tail->dual;
    return false;
}

double Exponent::ess_sup() const
{
    if (singular_at_zero())
        return kInf;
    if (auto c = as_constant())
        return c->value;
    if (as_log())
        return conjugate_exponent(1.0);
    const auto& s = *as_step();
    double m = *std::max_element(s.values.begin(), s.values.end());
    if (s.tail)
        m = std::max(m, s.tail->value(s.tail->first_level));
    return m;
}

double Exponent::ess_sup_on(const MeasSet& set) const
{
    double m = -kInf;
    for (const auto& iv : set.intervals()) {
        if (auto c = as_constant()) {
            m = std::max(m, c->value);
        } else if (auto l = as_log()) {
            if (!l->dual)
                m = std::max(m, 1.0 - iv.lo.log_t);
            else
                m = std::max(m, conjugate_exponent(1.0 - iv.hi.log_t));
        } else {
            const auto& s = *as_step();
            for (const auto& piece : explicit_pieces(iv.lo.t, iv.hi.t))
                if (piece.hi > piece.lo)
                    m = std::max(m, piece.value);
            if (s.tail && iv.lo.t < s.tail->end()) {
                if (!s.tail->dual) {
                    if (iv.lo.log_t == -kInf)
                        return kInf;
                    m = std::max(m, s.tail->value(std::max<long>(cell_of(iv.lo.log_t), s.tail->first_level)));
                } else {
                    long j = iv.hi.t >= s.tail->end() ? s.tail->first_level : cell_below(iv.hi.log_t);
                    m = std::max(m, s.tail->value(j));
                }
            }
        }
    }
    return m;
}

Exponent Exponent::dual() const
{
    const std::string label = fmt::format("dual({})", label_);
    if (auto c = as_constant())
        return Exponent(Kind::Constant, ConstantRep{conjugate_exponent(c->value)}, label);
    if (auto l = as_log())
        return Exponent(l->dual ? Kind::LogFamily : Kind::LogFamilyDual, LogRep{!l->dual}, l->dual ? "log" : label);
    StepRep s = *as_step();
    for (auto& v : s.values)
        v = conjugate_exponent(v);
    if (s.tail)
        s.tail->dual = !s.tail->dual;
    return Exponent(s.tail ? Kind::Step : Kind::PiecewiseConstant, std::move(s), label);
}

MeasSet Exponent::level_set(int n) const
{
    if (n < 1)
        throw DomainError(fmt::format("level set index must be >= 1, got {}", n));
    const double level = n;
    if (auto c = as_constant())
        return c->value <= level ? MeasSet::full() : MeasSet{};
    if (auto l = as_log()) {
        if (n == 1)
            return {};
        if (!l->dual)
            return MeasSet::interval(Abscissa::from_log(1.0 - level), Abscissa::one());
        return MeasSet::interval(Abscissa::zero(), Abscissa::from_log(-1.0 / (level - 1.0)));
    }
    const auto& s = *as_step();
    std::vector<Interval> out;
    for (std::size_t i = 0; i < s.values.size(); ++i)
        if (s.values[i] <= level)
            out.push_back({Abscissa::at(s.breaks[i]), Abscissa::at(s.breaks[i + 1])});
    if (s.tail) {
        const auto& tail = *s.tail;
        const Abscissa tail_end = dyadic(tail.first_level - 1);
        if (!tail.dual) {
            if (tail.base <= level) {
                auto j_max = static_cast<long>(std::floor(level / tail.slope));
                while (tail.slope * static_cast<double>(j_max + 1) <= level)
                    ++j_max;
                while (j_max > 0 && tail.slope * static_cast<double>(j_max) > level)
                    --j_max;
                if (j_max >= tail.first_level)
                    out.push_back({dyadic(j_max), tail_end});
            }
        } else {
            for (long j = tail.first_level; j < kTailHorizon; ++j) {
                if (tail.value(j) <= level) {
                    out.push_back({Abscissa::zero(), dyadic(j - 1)});
                    break;
                }
            }
        }
    }
    return MeasSet(std::move(out));
}

double Exponent::distribution(double y) const
{
    if (auto c = as_constant())
        return c->value > y ? 1.0 : 0.0;
    if (auto l = as_log()) {
        if (y < 1.0)
            return 1.0;
        if (!l->dual)
            return std::exp(1.0 - y);
        return y == 1.0 ? 1.0 : -std::expm1(-1.0 / (y - 1.0));
    }
    const auto& s = *as_step();
    double m = 0.0;
    for (std::size_t i = 0; i < s.values.size(); ++i)
        if (s.values[i] > y)
            m += s.breaks[i + 1] - s.breaks[i];
    if (s.tail) {
        const auto& tail = *s.tail;
        if (!tail.dual) {
            if (tail.base > y) {
                m += tail.end();
            } else {
                auto j = static_cast<long>(std::floor(y / tail.slope)) + 1;
                while (j > 1 && tail.slope * static_cast<double>(j - 1) > y)
                    --j;
                while (tail.slope * static_cast<double>(j) <= y)
                    ++j;
                m += std::ldexp(1.0, static_cast<int>(1 - std::max<long>(j, tail.first_level)));
            }
        } else {
            for (long j = tail.first_level; j < kTailHorizon; ++j)
                if (tail.value(j) > y)
                    m += std::ldexp(1.0, static_cast<int>(-j));
        }
    }
    return m;
}

Exponent Exponent::rearranged() const
{
    if (as_constant())
        return *this;
    if (auto l = as_log()) {
        if (l->dual)
            throw UnsupportedError("decreasing rearrangement of the dual log exponent is not supported");
        return *this;
    }
    const auto& s = *as_step();
    std::optional<GeometricTail> tail = s.tail;
    if (tail && tail->dual)
        throw UnsupportedError("decreasing rearrangement of a dual geometric tail is not supported");

    struct Block {
        double value, length;
    };
    std::vector<Block> blocks;
    for (std::size_t i = 0; i < s.values.size(); ++i)
        blocks.push_back({s.values[i], s.breaks[i + 1] - s.breaks[i]});
    if (tail) {
        const double top = std::max_element(blocks.begin(), blocks.end(),
                                            [](auto& a, auto& b) { return a.value < b.value; })->value;
        while (tail->value(tail->first_level) < top) {
            if (tail->first_level > 1000)
                throw UnsupportedError("tail never dominates the explicit part");
            blocks.push_back({tail->value(tail->first_level), std::ldexp(1.0, -tail->first_level)});
            ++tail->first_level;
        }
    }
    std::stable_sort(blocks.begin(), blocks.end(), [](const Block& a, const Block& b) { return a.value > b.value; });

    StepRep out;
    out.tail = tail;
    double cursor = tail ? tail->end() : 0.0;
    out.breaks.push_back(cursor);
    for (const auto& b : blocks) {
        cursor += b.length;
        out.breaks.push_back(std::min(cursor, 1.0));
        out.values.push_back(b.value);
    }
    out.breaks.back() = 1.0;
    return step(std::move(out), fmt::format("rearranged({})", label_));
}

Exponent Exponent::discretized(int depth) const
{
    if (depth < 0 || depth > 24)
        throw DomainError(fmt::format("discretization depth {} outside [0,24]", depth));
    const std::size_t cells = std::size_t{1} << depth;
    const double h = std::ldexp(1.0, -depth);
    StepRep rep;
    rep.breaks.push_back(0.0);
    for (std::size_t i = 0; i < cells; ++i) {
        rep.values.push_back((*this)((static_cast<double>(i) + 0.5) * h));
        rep.breaks.push_back(static_cast<double>(i + 1) * h);
    }
    return step(std::move(rep), fmt::format("discretize({},{})", label_, depth));
}

Exponent Exponent::shuffled(std::span<const std::size_t> perm, int depth) const
{
    if (depth < 0 || depth > 30)
        throw DomainError(fmt::format("shuffle depth {} outside [0,30]", depth));
    const std::size_t cells = std::size_t{1} << depth;
    if (perm.size() != cells)
        throw DomainError(fmt::format("permutation has {} entries, expected {}", perm.size(), cells));
    std::vector<bool> seen(cells, false);
    for (auto k : perm) {
        if (k >= cells || seen[k])
            throw DomainError("cell map is not a permutation, so it is not measure-preserving");
        seen[k] = true;
    }
    if (as_constant())
        return *this;
    if (as_log())
        throw UnsupportedError("shuffle needs a piecewise-constant exponent; discretize the log exponent first");

    const auto& s = *as_step();
    const double h = std::ldexp(1.0, -depth);
    if (s.tail && (h < s.tail->end() || perm[0] != 0))
        throw DomainError("shuffle must keep the cell holding the singular tail fixed");

    StepRep out;
    out.tail = s.tail;
    out.breaks.push_back(s.breaks.front());
    for (std::size_t i = 0; i < cells; ++i) {
        const std::size_t k = perm[i];
        const double shift = (static_cast<double>(i) - static_cast<double>(k)) * h;
        for (const auto& piece : explicit_pieces(static_cast<double>(k) * h, static_cast<double>(k + 1) * h)) {
            if (!(piece.hi > piece.lo))
                continue;
            out.values.push_back(piece.value);
            out.breaks.push_back(std::max(out.breaks.back(), piece.hi + shift));
        }
    }
    out.breaks.back() = 1.0;
    return step(std::move(out), fmt::format("shuffle({},{})", label_, depth));
}

std::vector<Exponent::Piece> Exponent::explicit_pieces(double a, double b) const
{
    if (auto c = as_constant())
        return {{a, b, c->value}};
    if (as_log())
        throw UnsupportedError("the log exponent has no constant pieces");
    const auto& s = *as_step();
    std::vector<Piece> out;
    a = std::max(a, s.breaks.front());
    if (!(a < b))
        return out;
    auto it = std::upper_bound(s.breaks.begin(), s.breaks.end(), a);
    auto i = static_cast<std::size_t>(it - s.breaks.begin()) - 1;
    for (; i < s.values.size() && s.breaks[i] < b; ++i)
        out.push_back({std::max(a, s.breaks[i]), std::min(b, s.breaks[i + 1]), s.values[i]});
    return out;
}

double eval_exponent(const Exponent& p, double t) { return p(t); }
Exponent dual_exponent(const Exponent& p) { return p.dual(); }
MeasSet level_set(const Exponent& p, int n) { return p.level_set(n); }
Exponent decreasing_rearrangement(const Exponent& p) { return p.rearranged(); }
Exponent build_spiked_exponent(int levels, double slope, double base) { return Exponent::spiked(levels, slope, base); }

Exponent shuffle_exponent(const Exponent& p, std::span<const std::size_t> perm, int depth)
{
    return p.shuffled(perm, depth);
}

KozvResult kozv_criterion(const Exponent& p, int grid_depth, double threshold)
{
    if (grid_depth < 2)
        throw DomainError("kozv criterion needs grid depth >= 2");
    const Exponent pstar = p.rearranged();
    KozvResult r;
    for (int k = 1; k <= grid_depth; ++k)
        r.ratios.push_back(pstar(std::ldexp(1.0, -k)) / (1.0 + k * kLn2));
    auto window_max = [&](int lo, int hi) { // k in (lo, hi]
        double m = 0.0;
        for (int k = lo + 1; k <= hi; ++k)
            m = std::max(m, r.ratios[k - 1]);
        return m;
    };
    r.tail_max = window_max(grid_depth / 2, grid_depth);
    r.half_tail_max = window_max(grid_depth / 4, grid_depth / 2);
    r.verdict = r.tail_max > threshold && r.tail_max >= 0.9 * r.half_tail_max;
    return r;
}

std::vector<std::size_t> seeded_dyadic_permutation(std::uint64_t seed, int depth, bool fix_first)
{
    const std::size_t cells = std::size_t{1} << depth;
    std::vector<std::size_t> perm(cells);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng(seed);
    const std::size_t start = fix_first ? 1 : 0;
    for (std::size_t i = cells; i > start + 1; --i) {
        auto j = start + static_cast<std::size_t>(rng.below(i - start));
        std::swap(perm[i - 1], perm[j]);
    }
    return perm;
}

} // namespace vlp
