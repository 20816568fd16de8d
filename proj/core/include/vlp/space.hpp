#pragma once

#include "vlp/exponent.hpp"
#include "vlp/func.hpp"
#include "vlp/modular.hpp"
#include "vlp/rng.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vlp {

enum class Verdict { Closed, NotClosed, Inconclusive };
std::string to_string(Verdict v);

struct ClosednessReport {
    double c_est = 0.0;  // inf of ||chi_I|| over probed dyadic I
    double C_est = 0.0;  // sup of the same
    double c1_est = 0.0; // min ||x||_p over sampled continuous x with ||x||_C = 1
    double c2_est = 0.0; // max of the same
    double delta_est = 0.0;
    int grid_depth = 0;
    int samples = 0;
    std::vector<double> level_min; // min over the 2^k intervals of level k, k = 0..grid_depth
    std::vector<double> level_max;
    std::vector<double> running_min; // c_est truncated at depth k
    Verdict verdict = Verdict::Inconclusive;
    std::string caveat;
};

/// Dyadic probes to depth `grid_depth` (3..14) and `sample_count` continuous samples.
ClosednessReport closedness_constants(const Exponent& p, int grid_depth, int sample_count, std::uint64_t seed = 1,
                                      const QuadConfig& cfg = {});

/// Verdict rule applied to a running minimum of c_est over depths.
Verdict closedness_verdict(const std::vector<double>& running_min);

/// Seeded continuous piecewise-linear function with 2..max_breaks knots and ||x||_C = 1.
Func random_continuous(Rng& rng, int max_breaks = 16);

/// Seeded bounded simple function on 16 dyadic cells, values on the grid k/8 in [-2,2],
/// masked to Omega_n with n drawn from {2,4,8,16,32}.
Func random_simple_on_level(const Exponent& p, Rng& rng);

struct SeparationReport {
    int samples = 0;
    double min_observed = 0.0;
    double delta_bound = 0.0;
    int violations = 0;
    int replay_failures = 0;      // samples where ||x chi_O|| < |x(t0)|/2 ||chi_O||
    double max_replay_norm = 0.0; // largest ||x^(n) chi_O|| reached by the eps search
    int replay_level = 2;
};

SeparationReport separation_delta(const Exponent& p, const ClosednessReport& report, int samples,
                                  std::uint64_t seed = 1, const QuadConfig& cfg = {});

struct DirectSumReport {
    int samples = 0;
    int triangle_failures = 0;
    int projection_failures = 0;
    double projection_bound = 0.0;
    double worst_projection_ratio = 0.0; // max(||x||,||y||) / ||x+y||
    bool K_lower_ok() const { return projection_failures == 0; }
    bool K_upper_ok() const { return triangle_failures == 0; }
};

DirectSumReport direct_sum_check(const Exponent& p, double delta, int samples, std::uint64_t seed = 1,
                                 const QuadConfig& cfg = {});

struct ProximinalityReport {
    double d_value = 0.0;
    Func witness = Func::constant(0.0);
    long witness_level = 0;
    double witness_distance = 0.0;
    double gap = 0.0;
    double theta = 0.0;
    bool germ_ok = false; // ||f - witness|| >= theta - tol
};

ProximinalityReport proximinality_check(const Func& f, const Exponent& p, double tol = 1e-4,
                                        const QuadConfig& cfg = {});

/// Bounded functional on C([0,1]): point masses plus an absolutely continuous part.
struct FunctionalSpec {
    struct PointMass {
        double t;
        double weight;
    };
    std::vector<PointMass> atoms;
    std::optional<Func> density;

    double cstar_norm() const;
    double operator()(const Func& x) const;
    std::string describe() const;
};

struct ExtensionReport {
    double cstar_norm = 0.0;
    double bound = 0.0;
    int samples = 0;
    int violations = 0;
    double worst_ratio = 0.0; // |psi(x)| / ||x+y|| over samples
    std::string note;
};

ExtensionReport extension_bound(const FunctionalSpec& psi, const Exponent& p, const ClosednessReport& report,
                                int samples, std::uint64_t seed = 1, const QuadConfig& cfg = {});

struct LinftyReport {
    int samples = 0;
    int lattice_violations = 0;    // ||x-y||_inf < ||x-y||_p
    int separation_violations = 0; // ||x-y||_inf < delta * c1
    double separation_floor = 0.0;
    int violations() const { return lattice_violations + separation_violations; }
};

LinftyReport linfty_separation_check(const Exponent& p, const ClosednessReport& report, int samples,
                                     std::uint64_t seed = 1, const QuadConfig& cfg = {});

struct LatticeReport {
    int samples = 0;
    int violations = 0;
    double max_ratio = 0.0; // ||z||_p / ||z||_inf
};

/// ||z||_p <= ||z||_inf on seeded z (continuous and simple alternately).
LatticeReport lattice_bound_check(const Exponent& p, int samples, std::uint64_t seed = 1, double tol = 1e-9,
                                  const QuadConfig& cfg = {});

} // namespace vlp
