#pragma once

// Reference computations that do not go through the library's integration engine.

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

namespace oracle {

inline double log_family_constant(double lambda) { return (1.0 / lambda) / (1.0 + std::log(lambda)); }

/// rho(c) for spiked(J,s,b), summed cell by cell from the construction.
inline double spiked_constant_series(int J, double s, double b, double c)
{
    auto v = [&](long j) { return std::max(b, s * static_cast<double>(j)); };
    double per_cell = std::ldexp(1.0, -2 * J) * std::pow(c, b);
    for (int j = 1; j <= J; ++j)
        per_cell += std::ldexp(1.0, -j - J) * std::pow(c, v(j));
    double total = (std::ldexp(1.0, J) - 1.0) * per_cell;
    for (long j = J + 1; j < 10000000; ++j) {
        const double term = std::exp(-static_cast<double>(j) * std::numbers::ln2 + v(j) * std::log(c));
        total += term;
        if (term < 1e-18 * total)
            break;
    }
    return total;
}

/// Root of a decreasing function on [lo, hi] to about machine precision.
inline double solve_decreasing(const std::function<double(double)>& g, double lo, double hi)
{
    std::uintmax_t iters = 200;
    auto r = boost::math::tools::toms748_solve(g, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
    return 0.5 * (r.first + r.second);
}

/// Norm of the indicator of a level-k dyadic interval away from 0 under spiked(J,s,b), k <= J:
/// the interval is 2^{J-k} copies of one level-J cell.
inline double spiked_block_norm(int J, double s, double b, int k)
{
    auto rho = [=](double l) {
        double cell = std::ldexp(1.0, -2 * J) * std::pow(l, -b);
        for (int j = 1; j <= J; ++j)
            cell += std::ldexp(1.0, -j - J) * std::pow(l, -std::max(b, s * j));
        return std::ldexp(cell, J - k) - 1.0;
    };
    return solve_decreasing(rho, 1e-3, 1.0);
}

/// Norm of chi_{p > n} under spiked(J,s,b), s*(J+1) > b: level-j spikes fill (2^J - 1) 2^{-j-J}
/// for j <= J, the base fills (2^J - 1) 4^{-J}, and the tail j >= j0 sums in closed form.
inline double spiked_excess_norm(int J, double s, double b, long n)
{
    std::vector<std::pair<double, double>> pieces; // (log mass, exponent)
    const double regular = std::log(std::ldexp(1.0, J) - 1.0);
    if (b > static_cast<double>(n))
        pieces.push_back({regular - 2.0 * J * std::numbers::ln2, b});
    for (int j = 1; j <= J; ++j)
        if (std::max(b, s * j) > static_cast<double>(n))
            pieces.push_back({regular - (j + J) * std::numbers::ln2, std::max(b, s * j)});
    const double j0 = std::max<double>(J + 1, std::floor(static_cast<double>(n) / s) + 1);
    auto log_rho = [&](double l) {
        // sum_{j >= j0} 2^{-j} l^{-sj} = r^{j0} / (1 - r), r = l^{-s} / 2
        const double log_r = -s * std::log(l) - std::numbers::ln2;
        double top = j0 * log_r - std::log(-std::expm1(log_r));
        std::vector<double> terms{top};
        for (auto [m, v] : pieces)
            terms.push_back(m - v * std::log(l));
        top = *std::max_element(terms.begin(), terms.end());
        double sum = 0.0;
        for (double t : terms)
            sum += std::exp(t - top);
        return top + std::log(sum);
    };
    return solve_decreasing(log_rho, std::pow(2.0, -1.0 / s) * (1.0 + 1e-12), 4.0);
}

/// Norm of chi_[0, e^{1-n}) under 1 - ln t: solves (1/l) e^{(1-n)(1+ln l)} / (1+ln l) = 1.
inline double log_family_tail_norm(long n)
{
    const double m = static_cast<double>(n - 1);
    auto g = [m](double l) {
        const double k = 1.0 + std::log(l);
        return -std::log(l) - m * k - std::log(k); // log of the modular
    };
    return solve_decreasing(g, std::exp(-1.0) * (1.0 + 1e-15), 1.0);
}

/// Norm of chi_[0, 2^{-m}) under a spiked tail of slope 4 (cells j > m, all above base).
inline double spiked_tail_norm(long m)
{
    // sum_{j>m} 2^{-j} l^{-4j} = r^{m+1}/(1-r) with r = l^{-4}/2
    auto g = [m](double l) {
        const double lr = -4.0 * std::log(l) - std::numbers::ln2;
        return static_cast<double>(m + 1) * lr - std::log(-std::expm1(lr));
    };
    return solve_decreasing(g, std::pow(2.0, -0.25) * (1.0 + 1e-15), 2.0);
}

/// (int_a^b |f|^q)^{1/q} for a smooth f, split at the given kinks.
inline double lp_norm(const std::function<double(double)>& f, std::vector<double> cuts, double q)
{
    std::sort(cuts.begin(), cuts.end());
    boost::math::quadrature::tanh_sinh<double> rule;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (!(cuts[i + 1] > cuts[i]))
            continue;
        auto h = [&](double t) { return std::pow(std::abs(f(t)), q); };
        total += rule.integrate(h, cuts[i], cuts[i + 1], 1e-13);
    }
    return std::pow(total, 1.0 / q);
}

/// One variable of the discretised dual problem: value |v| on mass `m` with exponent `p`.
struct Atom {
    double v;
    double m;
    double p;
};

/// max sum m_i v_i x_i subject to sum m_i x_i^{p_i} <= 1, by projected ascent with
/// growing steps. Each projection is exact: y_i + (nu/2) p_i y_i^{p_i-1} = z_i.
inline double discrete_orlicz(const std::vector<Atom>& atoms)
{
    auto solve_coord = [](double z, double half_nu, double p) {
        if (z <= 0.0)
            return 0.0;
        double lo = 0.0, hi = z;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
            const double y = 0.5 * (lo + hi);
            (y + half_nu * p * std::pow(y, p - 1.0) > z ? hi : lo) = y;
        }
        return 0.5 * (lo + hi);
    };
    auto modular = [&](const std::vector<double>& y) {
        double s = 0.0;
        for (std::size_t i = 0; i < atoms.size(); ++i)
            s += atoms[i].m * std::pow(y[i], atoms[i].p);
        return s;
    };
    auto project = [&](const std::vector<double>& z) {
        std::vector<double> y(z.size());
        for (std::size_t i = 0; i < z.size(); ++i)
            y[i] = std::max(z[i], 0.0);
        if (modular(y) <= 1.0)
            return y;
        double lo = 0.0, hi = 1.0;
        auto at = [&](double nu) {
            for (std::size_t i = 0; i < z.size(); ++i)
                y[i] = solve_coord(z[i], 0.5 * nu, atoms[i].p);
            return modular(y);
        };
        while (at(hi) > 1.0)
            hi *= 2.0;
        for (int it = 0; it < 100 && hi - lo > 1e-14 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (at(mid) > 1.0 ? lo : hi) = mid;
        }
        at(hi);
        return y;
    };
    auto objective = [&](const std::vector<double>& x) {
        double s = 0.0;
        for (std::size_t i = 0; i < atoms.size(); ++i)
            s += atoms[i].m * atoms[i].v * x[i];
        return s;
    };
    std::vector<double> x(atoms.size(), 0.0);
    double best = 0.0;
    double step = 1.0;
    for (int k = 0; k < 60; ++k, step *= 2.0) {
        std::vector<double> z(x);
        for (std::size_t i = 0; i < z.size(); ++i)
            z[i] += step * atoms[i].v;
        x = project(z);
        const double value = objective(x);
        if (k > 10 && std::abs(value - best) < 1e-13 * value) {
            best = std::max(best, value);
            break;
        }
        best = std::max(best, value);
    }
    return best;
}

/// Atoms of spiked(J,s,b) restricted to the 64 cells of a piecewise constant v.
inline std::vector<Atom> spiked_atoms(int J, double s, double b, const std::vector<double>& v)
{
    const int cells = static_cast<int>(v.size());
    std::vector<Atom> atoms;
    const long per = (1L << J) / cells;
    for (int k = 0; k < cells; ++k) {
        const double a = std::abs(v[static_cast<std::size_t>(k)]);
        long regular = per;
        if (k == 0) {
            --regular;
            for (long j = J + 1; j <= J + 60; ++j)
                atoms.push_back({a, std::ldexp(1.0, static_cast<int>(-j)), std::max(b, s * static_cast<double>(j))});
        }
        for (int j = 1; j <= J; ++j)
            atoms.push_back({a, static_cast<double>(regular) * std::ldexp(1.0, -j - J), std::max(b, s * j)});
        atoms.push_back({a, static_cast<double>(regular) * std::ldexp(1.0, -2 * J), b});
    }
    return atoms;
}

/// Atoms of a per-cell exponent (one value per cell).
inline std::vector<Atom> cell_atoms(const std::vector<double>& p, const std::vector<double>& v)
{
    std::vector<Atom> atoms;
    for (std::size_t k = 0; k < v.size(); ++k)
        atoms.push_back({std::abs(v[k]), 1.0 / static_cast<double>(v.size()), p[k]});
    return atoms;
}

} // namespace oracle
