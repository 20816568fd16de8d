#pragma once

#include <initializer_list>
#include <vector>

namespace vlp {

/// Real polynomial in the global coordinate t, coefficients in ascending powers.
class Poly {
public:
    Poly() = default;
    Poly(std::initializer_list<double> c) : coeffs_(c) { trim(); }
    explicit Poly(std::vector<double> c) : coeffs_(std::move(c)) { trim(); }

    static Poly constant(double c) { return Poly({c}); }

    /// -1 for the zero polynomial.
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const { return coeffs_.empty(); }
    const std::vector<double>& coeffs() const { return coeffs_; }
    double coeff(int k) const { return k < static_cast<int>(coeffs_.size()) ? coeffs_[k] : 0.0; }

    double operator()(double t) const;
    Poly derivative() const;
    /// Exact integral over [a,b] via the antiderivative.
    double integrate(double a, double b) const;

    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const { return *this + o * -1.0; }
    Poly operator*(double s) const;
    Poly operator*(const Poly& o) const;

    /// Real roots in [a,b], sorted; empty for the zero polynomial.
    std::vector<double> roots_in(double a, double b) const;

    struct Extremum {
        double value; // max |p| on [a,b]
        double at;    // leftmost maximiser
    };
    Extremum max_abs(double a, double b) const;

    friend bool operator==(const Poly&, const Poly&) = default;

private:
    void trim();
    std::vector<double> coeffs_;
};

} // namespace vlp
