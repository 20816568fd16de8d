#pragma once

#include "vlp/exponent.hpp"
#include "vlp/meas_set.hpp"
#include "vlp/poly.hpp"

#include <memory>
#include <string>
#include <vector>

namespace vlp {

/// Named closed-form term: sin -> a*sin(b t + c), exp -> a*exp(b t), pow -> a*t^b.
struct AnalyticTerm {
    enum class Tag { Sin, Exp, Pow };
    Tag tag;
    double a = 1.0, b = 0.0, c = 0.0;

    double operator()(double t) const;
    AnalyticTerm scaled(double s) const;
    /// Unbounded only for pow with negative power near t = 0.
    bool bounded_near_zero() const { return tag != Tag::Pow || b >= 0.0 || a == 0.0; }
    std::string describe() const;
    friend bool operator==(const AnalyticTerm&, const AnalyticTerm&) = default;
};

/// Maximal stretch of [0,1] on which a Func is one polynomial plus analytic terms.
struct Segment {
    Abscissa lo, hi;
    Poly poly;
    std::vector<AnalyticTerm> analytic;

    double operator()(double t) const;
    bool is_zero() const { return poly.is_zero() && analytic.empty(); }
    bool polynomial() const { return analytic.empty(); }
    /// Value as t -> lo from the right, evaluated at the exact left end.
    double at_left() const { return (*this)(lo.t); }
};

/// Finitely described function on [0,1]. Immutable; every variant is reduced at
/// construction to a sorted segment list covering [0,1].
class Func {
public:
    enum class Kind { Indicator, PiecewisePoly, NamedAnalytic, Scaled, Sum, Masked };

    static Func indicator(MeasSet set);
    static Func indicator(double a, double b);
    static Func constant(double c);
    /// `pieces[i]` lives on [breaks[i], breaks[i+1]]; degree <= 3. With `continuous`
    /// set, one-sided limits must agree at every interior break.
    static Func piecewise_poly(std::vector<double> breaks, std::vector<Poly> pieces, bool continuous = false);
    static Func analytic(AnalyticTerm term);
    static Func scaled(const Func& inner, double factor);
    static Func sum(const std::vector<Func>& terms);
    static Func masked(const Func& inner, const MeasSet& mask);

    Kind kind() const { return kind_; }
    const std::string& label() const { return label_; }
    bool continuous() const { return continuous_; }
    const std::vector<Segment>& segments() const { return segments_; }

    double operator()(double t) const;
    /// Where the function may be nonzero.
    MeasSet support() const;
    bool bounded() const;

    Func relabeled(std::string label) const;

    Func operator-(const Func& o) const { return sum({*this, scaled(o, -1.0)}); }
    Func operator+(const Func& o) const { return sum({*this, o}); }

private:
    Func(Kind k, std::vector<Segment> segs, std::string label, bool continuous);

    Kind kind_;
    std::vector<Segment> segments_;
    std::string label_;
    bool continuous_;
};

double eval_func(const Func& f, double t);

/// x^{(n)} = x * chi_{Omega_n}.
Func truncate_to_level(const Func& f, const Exponent& p, int n);

struct SupNorm {
    double value;
    double t0; // leftmost point attaining the supremum
};

/// Essential sup of |f| with its leftmost maximiser; exact for polynomial pieces.
SupNorm sup_norm_argmax(const Func& f);

/// Exact integral of f*g over [0,1] (adaptive quadrature on analytic parts).
double integrate_product(const Func& f, const Func& g);

/// Integral of |f*g| over [0,1].
double integrate_abs_product(const Func& f, const Func& g);

/// Exact integral of |f| over [0,1].
double integrate_abs(const Func& f);

} // namespace vlp
