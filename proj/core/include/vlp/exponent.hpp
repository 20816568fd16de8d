#pragma once

#include "vlp/meas_set.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace vlp {

/// Exponent values are clipped to at least 1 + kDualClip wherever 1/(p-1) is formed.
inline constexpr double kDualClip = 1e-6;

/// p/(p-1) with the clip applied.
double conjugate_exponent(double p);

/// Countable run of dyadic cells [2^{-j}, 2^{1-j}), j >= first_level, accumulating
/// at t = 0, carrying value max(base, slope*j) (or its conjugate when `dual`).
struct GeometricTail {
    int first_level = 1;
    double slope = 1.0;
    double base = 1.0;
    bool dual = false;

    double value(long j) const;
    double end() const; // 2^{1-first_level}
    /// Values are non-decreasing in j unless dual.
    bool increasing() const { return !dual; }
};

struct SpikeParams {
    int levels;
    double slope;
    double base;
};

/// Exponent function p: [0,1] -> [1, inf).
class Exponent {
public:
    enum class Kind { Constant, PiecewiseConstant, LogFamily, LogFamilyDual, Spiked, Step };

    struct ConstantRep {
        double value;
    };
    /// p(t) = 1 - ln t, or its pointwise conjugate when `dual`.
    struct LogRep {
        bool dual = false;
    };
    /// Piecewise constant on `breaks` (front = tail end or 0, back = 1), with an
    /// optional geometric tail below breaks.front().
    struct StepRep {
        std::vector<double> breaks;
        std::vector<double> values;
        std::optional<GeometricTail> tail;
    };

    static Exponent constant(double p);
    static Exponent piecewise(std::vector<double> breaks, std::vector<double> values);
    static Exponent log_family();
    static Exponent spiked(int levels, double slope, double base);
    static Exponent step(StepRep rep, std::string label);

    Kind kind() const { return kind_; }
    const std::string& label() const { return label_; }
    const std::optional<SpikeParams>& spike_params() const { return spike_; }

    const ConstantRep* as_constant() const { return std::get_if<ConstantRep>(&rep_); }
    const LogRep* as_log() const { return std::get_if<LogRep>(&rep_); }
    const StepRep* as_step() const { return std::get_if<StepRep>(&rep_); }

    double operator()(double t) const;
    /// True iff p is unbounded near t = 0; no representation is unbounded elsewhere.
    bool singular_at_zero() const;
    double ess_sup() const;
    /// Essential supremum of p over a set (infinity if the set reaches the singular point).
    double ess_sup_on(const MeasSet& set) const;

    Exponent dual() const;
    MeasSet level_set(int n) const;
    /// measure{t : p(t) > y}
    double distribution(double y) const;
    Exponent rearranged() const;
    Exponent discretized(int depth) const;
    /// Output cell i receives the content of input cell perm[i] at dyadic depth `depth`.
    Exponent shuffled(std::span<const std::size_t> perm, int depth) const;

    /// Pieces of constant value intersecting [a,b], clipped; tail cells are not included.
    struct Piece {
        double lo, hi, value;
    };
    std::vector<Piece> explicit_pieces(double a, double b) const;

private:
    using Rep = std::variant<ConstantRep, LogRep, StepRep>;
    Exponent(Kind k, Rep rep, std::string label) : kind_(k), rep_(std::move(rep)), label_(std::move(label)) {}

    Kind kind_;
    Rep rep_;
    std::string label_;
    std::optional<SpikeParams> spike_;
};

// Free-function surface mirroring the operation names of the toolkit.

double eval_exponent(const Exponent& p, double t);
Exponent dual_exponent(const Exponent& p);
MeasSet level_set(const Exponent& p, int n);
Exponent decreasing_rearrangement(const Exponent& p);
Exponent build_spiked_exponent(int levels, double slope, double base);
Exponent shuffle_exponent(const Exponent& p, std::span<const std::size_t> perm, int depth);

struct KozvResult {
    std::vector<double> ratios; // p*(2^{-k}) / ln(e 2^k), k = 1..depth
    double tail_max = 0.0;      // max over k in (depth/2, depth]
    double half_tail_max = 0.0; // max over k in (depth/4, depth/2]
    bool verdict = false;
};

KozvResult kozv_criterion(const Exponent& p, int grid_depth, double threshold = 1e-3);

/// Seeded permutation of 2^depth cells; keeps cell 0 fixed when the exponent
/// has a singular point at 0.
std::vector<std::size_t> seeded_dyadic_permutation(std::uint64_t seed, int depth, bool fix_first);

} // namespace vlp
