#pragma once

#include "vlp/exponent.hpp"
#include "vlp/func.hpp"

#include <cstddef>
#include <limits>
#include <optional>
#include <string>

namespace vlp {

struct QuadConfig {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    std::size_t max_subdivisions = std::size_t{1} << 20;
    double divergence_cap = 1e12;
    /// Ratio between consecutive rungs of the ladder toward a singular endpoint.
    double endpoint_grading = 0.5;
    /// Use exact closed forms where the integrand admits one.
    bool closed_forms = true;
    /// Replace the ladder by the closed-form asymptotic remainder once f has
    /// settled to f(0) in double precision.
    bool asymptotic_tail = true;

    void validate() const;
};

enum class ModularStatus { Finite, Divergent };

struct ModularResult {
    ModularStatus status = ModularStatus::Finite;
    double value = 0.0; // +inf when finite but beyond double range
    double error_bound = 0.0;
    std::string divergence_witness;
    bool closed_form = true;

    bool finite() const { return status == ModularStatus::Finite; }
};

/// rho_p(f) = int_0^1 |f(t)|^{p(t)} dt. Throws InconclusiveError when the budget
/// runs out without meeting tolerance and without divergence evidence.
ModularResult modular(const Func& f, const Exponent& p, const QuadConfig& cfg = {});

/// rho_p(f / lambda).
ModularResult modular_scaled(const Func& f, const Exponent& p, double lambda, const QuadConfig& cfg = {});

/// Integrand h(f(t), p(t)) with optional closed forms. The engine below walks
/// the segment structure of f against the piece structure of p.
class Kernel {
public:
    virtual ~Kernel() = default;

    virtual double point(double v, double p) const = 0;
    /// exp(log_len) * h(c, p) without intermediate overflow.
    virtual double cell(double c, double p, double log_len) const;
    /// int_a^b h(alpha + beta t, p) dt for a linear polynomial.
    virtual std::optional<double> linear(const Poly&, double, double, double) const { return std::nullopt; }

    struct Tail {
        double value = 0.0;
        bool divergent = false;
    };
    /// int_{u1}^{u2} h(c, 1 + u) e^{-u} du (u2 may be +inf): constant f against 1 - ln t.
    virtual std::optional<Tail> log_constant(double, double, double) const { return std::nullopt; }
    /// sum_{j=j1}^{j2} 2^{-j} h(c, tail.value(j)), j2 = LONG_MAX for an infinite run.
    virtual std::optional<Tail> tail_sum(double, const GeometricTail&, long, long) const { return std::nullopt; }
};

/// |scale * v|^p.
class PowerKernel final : public Kernel {
public:
    explicit PowerKernel(double scale) : scale_(scale) {}
    double point(double v, double p) const override;
    double cell(double c, double p, double log_len) const override;
    std::optional<double> linear(const Poly& lin, double a, double b, double p) const override;
    std::optional<Tail> log_constant(double c, double u1, double u2) const override;
    std::optional<Tail> tail_sum(double c, const GeometricTail& tail, long j1, long j2) const override;

private:
    double scale_;
};

/// int_0^1 h(f(t), p(t)) dt under the modular's quadrature policy.
ModularResult integrate_over_exponent(const Func& f, const Exponent& p, const Kernel& kernel, const QuadConfig& cfg);

} // namespace vlp
