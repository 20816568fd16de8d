#include "vlp/poly.hpp"

#include <algorithm>
#include <cmath>

namespace vlp {

void Poly::trim()
{
    while (!coeffs_.empty() && coeffs_.back() == 0.0)
        coeffs_.pop_back();
}

double Poly::operator()(double t) const
{
    double v = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
        v = v * t + *it;
    return v;
}

Poly Poly::derivative() const
{
    std::vector<double> d;
    for (std::size_t k = 1; k < coeffs_.size(); ++k)
        d.push_back(coeffs_[k] * static_cast<double>(k));
    return Poly(std::move(d));
}

double Poly::integrate(double a, double b) const
{
    // antiderivative evaluated by Horner at both ends
    auto anti = [this](double t) {
        double v = 0.0;
        for (std::size_t k = coeffs_.size(); k-- > 0;)
            v = v * t + coeffs_[k] / static_cast<double>(k + 1);
        return v * t;
    };
    return anti(b) - anti(a);
}

Poly Poly::operator+(const Poly& o) const
{
    std::vector<double> c(std::max(coeffs_.size(), o.coeffs_.size()), 0.0);
    for (std::size_t k = 0; k < c.size(); ++k)
        c[k] = coeff(static_cast<int>(k)) + o.coeff(static_cast<int>(k));
    return Poly(std::move(c));
}

Poly Poly::operator*(double s) const
{
    std::vector<double> c = coeffs_;
    for (auto& x : c)
        x *= s;
    return Poly(std::move(c));
}

Poly Poly::operator*(const Poly& o) const
{
    if (is_zero() || o.is_zero())
        return {};
    std::vector<double> c(coeffs_.size() + o.coeffs_.size() - 1, 0.0);
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
        for (std::size_t j = 0; j < o.coeffs_.size(); ++j)
            c[i + j] += coeffs_[i] * o.coeffs_[j];
    return Poly(std::move(c));
}

namespace {

double bisect_root(const Poly& p, double lo, double hi)
{
    double flo = p(lo);
    for (int it = 0; it < 200 && hi > lo; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        double fm = p(mid);
        if (fm == 0.0)
            return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

std::vector<double> Poly::roots_in(double a, double b) const
{
    std::vector<double> out;
    if (degree() < 1)
        return out;
    if (degree() == 1) {
        double r = -coeffs_[0] / coeffs_[1];
        if (r >= a && r <= b)
            out.push_back(r);
        return out;
    }
    // monotone between consecutive critical points
    std::vector<double> knots{a};
    for (double c : derivative().roots_in(a, b))
        if (c > knots.back())
            knots.push_back(c);
    if (b > knots.back())
        knots.push_back(b);
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        double lo = knots[i], hi = knots[i + 1];
        double flo = (*this)(lo), fhi = (*this)(hi);
        double r;
        if (flo == 0.0)
            r = lo;
        else if (fhi == 0.0)
            r = hi;
        else if ((flo < 0.0) != (fhi < 0.0))
            r = bisect_root(*this, lo, hi);
        else
            continue;
        if (out.empty() || r > out.back())
            out.push_back(r);
    }
    return out;
}

Poly::Extremum Poly::max_abs(double a, double b) const
{
    std::vector<double> cand{a};
    for (double c : derivative().roots_in(a, b))
        cand.push_back(c);
    cand.push_back(b);
    Extremum best{-1.0, a};
    for (double t : cand) {
        // values equal up to rounding count as a tie and keep the leftmost point
        double v = std::abs((*this)(t));
        if (v > best.value + 1e-15 * std::max(1.0, best.value))
            best = {v, t};
    }
    return best;
}

} // namespace vlp
