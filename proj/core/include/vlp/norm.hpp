#pragma once

#include "vlp/exponent.hpp"
#include "vlp/func.hpp"
#include "vlp/modular.hpp"

#include <string>
#include <vector>

namespace vlp {

struct NormResult {
    double value = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    int iterations = 0;
    std::string diagnostics;
};

/// inf{lambda > 0 : rho(f/lambda) <= 1}; `value` is the upper end of the final
/// bracket, for which rho(f/value) <= 1 has been certified.
NormResult luxemburg_norm(const Func& f, const Exponent& p, double tol = 1e-9, const QuadConfig& cfg = {});

/// inf{lambda > 0 : rho(f/lambda) < infinity}, bisected to relative tolerance.
NormResult theta(const Func& f, const Exponent& p, double tol = 1e-6, const QuadConfig& cfg = {});

struct DistanceTrace {
    std::vector<long> levels;
    std::vector<double> values; // ||f - f^(n)||
    double limit_estimate = 0.0;
    double theta_crosscheck = 0.0;
    bool converged = false;
    long best_level = 0; // level whose truncation realises limit_estimate
};

/// Doubling schedule 2, 4, ..., 256.
std::vector<long> default_schedule();

/// Norms of f - f^(n) along `schedule`. When the schedule ends before successive
/// values agree within `tol`, doubling continues up to `max_level`.
DistanceTrace distance_to_E(const Func& f, const Exponent& p, std::vector<long> schedule = default_schedule(),
                            double tol = 1e-4, const QuadConfig& cfg = {}, long max_level = 1L << 20);

/// sup{ int v x : rho(x) <= 1 } through the pointwise Lagrange profile. The
/// bracket is [primal value, weak-duality bound].
NormResult orlicz_norm(const Func& v, const Exponent& p, double tol = 1e-7, const QuadConfig& cfg = {});

/// Luxemburg norm of v under the conjugate exponent.
NormResult dual_norm(const Func& v, const Exponent& p, double tol = 1e-9, const QuadConfig& cfg = {});

struct HolderCheck {
    double lhs;   // int |x v|
    double rhs;   // 2 ||x||_p ||v||_p'
    double ratio; // lhs / rhs
};

HolderCheck holder_check(const Func& x, const Func& v, const Exponent& p, const QuadConfig& cfg = {});

} // namespace vlp
