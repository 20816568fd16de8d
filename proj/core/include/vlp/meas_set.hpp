#pragma once

#include <cmath>
#include <compare>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace vlp {

/// A point of [0,1] that also carries its natural logarithm exactly, so that
/// endpoints such as e^{-40000} remain distinguishable from 0 after the
/// linear coordinate underflows.
struct Abscissa {
    double t = 0.0;
    double log_t = -std::numeric_limits<double>::infinity();

    static Abscissa at(double t) { return {t, t > 0.0 ? std::log(t) : -std::numeric_limits<double>::infinity()}; }
    static Abscissa from_log(double log_t) { return {std::exp(log_t), log_t}; }
    static Abscissa zero() { return at(0.0); }
    static Abscissa one() { return {1.0, 0.0}; }

    friend bool operator==(const Abscissa& a, const Abscissa& b) { return a.t == b.t && a.log_t == b.log_t; }
    friend std::partial_ordering operator<=>(const Abscissa& a, const Abscissa& b)
    {
        if (auto c = a.t <=> b.t; c != 0)
            return c;
        return a.log_t <=> b.log_t;
    }
};

struct Interval {
    Abscissa lo;
    Abscissa hi;

    double length() const { return hi.t - lo.t; }
    bool empty() const { return !(lo < hi); }
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Finite disjoint union of subintervals of [0,1], kept sorted and merged.
/// Endpoint openness is not tracked; everything is up to null sets.
class MeasSet {
public:
    MeasSet() = default;
    explicit MeasSet(std::vector<Interval> intervals);

    static MeasSet full();
    static MeasSet interval(double a, double b);
    static MeasSet interval(Abscissa a, Abscissa b);

    std::span<const Interval> intervals() const { return intervals_; }
    bool empty() const { return intervals_.empty(); }
    double measure() const;
    bool contains(double t) const;

    MeasSet complement() const;
    MeasSet intersect(const MeasSet& other) const;
    MeasSet unite(const MeasSet& other) const;
    bool subset_of(const MeasSet& other) const;

    std::string describe() const;

    friend bool operator==(const MeasSet&, const MeasSet&) = default;

private:
    std::vector<Interval> intervals_;
};

} // namespace vlp
