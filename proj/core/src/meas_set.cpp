#include "vlp/meas_set.hpp"

#include "vlp/error.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace vlp {

MeasSet::MeasSet(std::vector<Interval> intervals)
{
    for (const auto& iv : intervals) {
        if (iv.lo.t < 0.0 || iv.hi.t > 1.0 || std::isnan(iv.lo.t) || std::isnan(iv.hi.t))
            throw DomainError(fmt::format("interval [{}, {}] not within [0,1]", iv.lo.t, iv.hi.t));
    }
    std::erase_if(intervals, [](const Interval& iv) { return iv.empty(); });
    std::sort(intervals.begin(), intervals.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    for (const auto& iv : intervals) {
        if (!intervals_.empty() && !(intervals_.back().hi < iv.lo)) {
            if (intervals_.back().hi < iv.hi)
                intervals_.back().hi = iv.hi;
        } else {
            intervals_.push_back(iv);
        }
    }
}

MeasSet MeasSet::full() { return MeasSet({{Abscissa::zero(), Abscissa::one()}}); }

MeasSet MeasSet::interval(double a, double b) { return MeasSet({{Abscissa::at(a), Abscissa::at(b)}}); }

MeasSet MeasSet::interval(Abscissa a, Abscissa b) { return MeasSet({{a, b}}); }

double MeasSet::measure() const
{
    double m = 0.0;
    for (const auto& iv : intervals_)
        m += iv.length();
    return m;
}

bool MeasSet::contains(double t) const
{
    auto it = std::upper_bound(intervals_.begin(), intervals_.end(), t,
                               [](double x, const Interval& iv) { return x < iv.lo.t; });
    if (it == intervals_.begin())
        return false;
    --it;
    // half-open, except that 1 belongs to a set reaching 1
    return t < it->hi.t || (t == 1.0 && it->hi.t == 1.0);
}

MeasSet MeasSet::complement() const
{
    std::vector<Interval> out;
    Abscissa cursor = Abscissa::zero();
    for (const auto& iv : intervals_) {
        if (cursor < iv.lo)
            out.push_back({cursor, iv.lo});
        cursor = iv.hi;
    }
    if (cursor < Abscissa::one())
        out.push_back({cursor, Abscissa::one()});
    return MeasSet(std::move(out));
}

MeasSet MeasSet::intersect(const MeasSet& other) const
{
    std::vector<Interval> out;
    std::size_t i = 0, j = 0;
    const auto& a = intervals_;
    const auto& b = other.intervals_;
    while (i < a.size() && j < b.size()) {
        Abscissa lo = std::max(a[i].lo, b[j].lo, [](auto& x, auto& y) { return x < y; });
        Abscissa hi = std::min(a[i].hi, b[j].hi, [](auto& x, auto& y) { return x < y; });
        if (lo < hi)
            out.push_back({lo, hi});
        if (a[i].hi < b[j].hi)
            ++i;
        else
            ++j;
    }
    return MeasSet(std::move(out));
}

MeasSet MeasSet::unite(const MeasSet& other) const
{
    std::vector<Interval> all(intervals_.begin(), intervals_.end());
    all.insert(all.end(), other.intervals_.begin(), other.intervals_.end());
    return MeasSet(std::move(all));
}

bool MeasSet::subset_of(const MeasSet& other) const { return intersect(other.complement()).empty(); }

std::string MeasSet::describe() const
{
    if (intervals_.empty())
        return "{}";
    std::string s;
    for (const auto& iv : intervals_) {
        if (!s.empty())
            s += " u ";
        if (iv.lo.t == 0.0 && iv.lo.log_t > -std::numeric_limits<double>::infinity())
            s += fmt::format("[exp({:.6g}), {:.6g}]", iv.lo.log_t, iv.hi.t);
        else
            s += fmt::format("[{:.6g}, {:.6g}]", iv.lo.t, iv.hi.t);
    }
    return s;
}

} // namespace vlp
