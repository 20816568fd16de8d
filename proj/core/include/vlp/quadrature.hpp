#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <vector>

namespace vlp {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    std::size_t subdivisions = 0;
    bool converged = true;
};

namespace detail {

struct GKEstimate {
    double value, error;
};

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15 tables).
template <class F>
GKEstimate gk15(F& f, double a, double b)
{
    static constexpr double xgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                      0.207784955007898467600689403773245, 0.0};
    static constexpr double wgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    static constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                     0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double resk = fc * wgk[7];
    double resg = fc * wg[3];
    double resabs = std::abs(resk);
    double fv1[7], fv2[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * xgk[j];
        fv1[j] = f(center - dx);
        fv2[j] = f(center + dx);
        const double s = fv1[j] + fv2[j];
        resk += wgk[j] * s;
        resabs += wgk[j] * (std::abs(fv1[j]) + std::abs(fv2[j]));
        if (j % 2 == 1)
            resg += wg[j / 2] * s;
    }
    const double mean = resk * 0.5;
    double resasc = wgk[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j)
        resasc += wgk[j] * (std::abs(fv1[j] - mean) + std::abs(fv2[j] - mean));

    const double scale = std::abs(half);
    double err = std::abs((resk - resg) * half);
    resasc *= scale;
    resabs *= scale;
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double roundoff = 50.0 * std::numeric_limits<double>::epsilon() * resabs;
    if (resabs > std::numeric_limits<double>::min() / (50.0 * std::numeric_limits<double>::epsilon()))
        err = std::max(err, roundoff);
    return {resk * half, err};
}

} // namespace detail

/// Globally adaptive Gauss-Kronrod integration over [a,b]: the interval with the
/// largest error estimate is bisected until the summed error meets
/// max(abs_tol, rel_tol*|value|) or `max_subdivisions` is spent.
template <class F>
QuadResult integrate_adaptive(F&& f, double a, double b, double abs_tol, double rel_tol, std::size_t max_subdivisions)
{
    struct Cell {
        double a, b, value, error;
        bool operator<(const Cell& o) const { return error < o.error; }
    };
    QuadResult r;
    if (!(b > a))
        return r;
    auto first = detail::gk15(f, a, b);
    std::priority_queue<Cell> heap;
    heap.push({a, b, first.value, first.error});
    double value = first.value, error = first.error;
    while (error > std::max(abs_tol, rel_tol * std::abs(value))) {
        if (r.subdivisions >= max_subdivisions || !std::isfinite(value)) {
            r.converged = false;
            break;
        }
        Cell c = heap.top();
        const double mid = 0.5 * (c.a + c.b);
        if (!(mid > c.a && mid < c.b)) { // cannot resolve further in floating point
            r.converged = false;
            break;
        }
        heap.pop();
        auto left = detail::gk15(f, c.a, mid);
        auto right = detail::gk15(f, mid, c.b);
        value += left.value + right.value - c.value;
        error += left.error + right.error - c.error;
        heap.push({c.a, mid, left.value, left.error});
        heap.push({mid, c.b, right.value, right.error});
        ++r.subdivisions;
    }
    // re-sum to shed the drift of incremental updates
    value = 0.0;
    error = 0.0;
    std::vector<Cell> cells;
    cells.reserve(heap.size());
    while (!heap.empty()) {
        cells.push_back(heap.top());
        heap.pop();
    }
    std::sort(cells.begin(), cells.end(), [](const Cell& x, const Cell& y) { return x.a < y.a; });
    for (const auto& c : cells) {
        value += c.value;
        error += c.error;
    }
    r.value = value;
    r.error = error;
    return r;
}

} // namespace vlp
