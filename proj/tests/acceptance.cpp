// One PASS/FAIL line per acceptance criterion. A criterion passes only when every
// check holds and the wall time stays under its budget.

#include "oracles.hpp"

#include "vlp/config.hpp"
#include "vlp/experiment.hpp"
#include "vlp/grammar.hpp"
#include "vlp/modular.hpp"
#include "vlp/norm.hpp"
#include "vlp/space.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace vlp;

namespace {

class Checks {
public:
    void expect(bool ok, std::string what)
    {
        if (!ok)
            failures_.push_back(std::move(what));
    }
    void near(double got, double want, double tol, const std::string& what)
    {
        expect(std::abs(got - want) <= tol, fmt::format("{}: got {} want {} tol {}", what, got, want, tol));
    }
    void note(std::string s) { notes_.push_back(std::move(s)); }
    const std::vector<std::string>& failures() const { return failures_; }
    std::string summary() const
    {
        std::string out;
        for (const auto& s : notes_)
            out += (out.empty() ? "" : "; ") + s;
        return out;
    }

private:
    std::vector<std::string> failures_;
    std::vector<std::string> notes_;
};

struct Criterion {
    int id;
    std::string name;
    double budget_s;
    std::function<void(Checks&)> body;
};

/// Piecewise polynomial with 1..5 pieces of degree <= 3 and values of order one.
Func seeded_piecewise_poly(Rng& rng)
{
    const int pieces = 1 + static_cast<int>(rng.below(5));
    std::vector<double> breaks{0.0};
    for (int i = 1; i < pieces; ++i)
        breaks.push_back(rng.uniform(breaks.back() + 0.02, 1.0 - 0.02 * (pieces - i)));
    breaks.push_back(1.0);
    std::vector<Poly> polys;
    for (int i = 0; i < pieces; ++i) {
        const double c = 0.5 * (breaks[i] + breaks[i + 1]);
        // expand sum a_k (t - c)^k into global coefficients
        const double a0 = rng.uniform(-2, 2), a1 = rng.uniform(-3, 3), a2 = rng.uniform(-4, 4), a3 = rng.uniform(-4, 4);
        polys.push_back(Poly{a0 - a1 * c + a2 * c * c - a3 * c * c * c, a1 - 2 * a2 * c + 3 * a3 * c * c,
                             a2 - 3 * a3 * c, a3});
    }
    return Func::piecewise_poly(breaks, polys);
}

std::vector<double> kinks(const Func& f)
{
    std::vector<double> cuts{0.0, 1.0};
    for (const auto& s : f.segments()) {
        cuts.push_back(s.lo.t);
        for (double r : s.poly.roots_in(s.lo.t, s.hi.t))
            cuts.push_back(r);
    }
    return cuts;
}

Func seeded_cell_function(Rng& rng, std::vector<double>& values)
{
    std::vector<double> breaks;
    std::vector<Poly> pieces;
    values.clear();
    for (int k = 0; k <= 64; ++k)
        breaks.push_back(k / 64.0);
    for (int k = 0; k < 64; ++k) {
        values.push_back(rng.uniform(-2.0, 2.0));
        pieces.push_back(Poly{values.back()});
    }
    return Func::piecewise_poly(breaks, pieces);
}

void constant_exponent_equivalence(Checks& c)
{
    Rng rng(1001);
    std::vector<Func> fs;
    for (int i = 0; i < 20; ++i)
        fs.push_back(seeded_piecewise_poly(rng));
    double worst = 0.0;
    for (double q : {1.5, 2.0, 4.0})
        for (std::size_t i = 0; i < fs.size(); ++i) {
            const Func& f = fs[i];
            const double want = oracle::lp_norm([&](double t) { return f(t); }, kinks(f), q);
            const double got = luxemburg_norm(f, Exponent::constant(q), 1e-12 * want).value;
            const double rel = std::abs(got - want) / want;
            worst = std::max(worst, rel);
            c.expect(rel <= 1e-6, fmt::format("p={} f#{}: {} vs {}", q, i, got, want));
        }
    c.note(fmt::format("60 norms, worst relative error {:.2e}", worst));
}

void log_family_closed_forms(Checks& c)
{
    const auto log = Exponent::log_family();
    QuadConfig quad;
    quad.closed_forms = false;
    quad.asymptotic_tail = false;
    quad.rel_tol = 1e-11;
    quad.abs_tol = 1e-13;
    double worst = 0.0;
    for (double lambda : {0.5, 0.75, 1.0, 2.0}) {
        const auto r = modular_scaled(Func::constant(1.0), log, lambda, quad);
        const double want = oracle::log_family_constant(lambda);
        c.expect(!r.closed_form, "quadrature path was not taken");
        c.expect(r.finite(), fmt::format("lambda={} not finite", lambda));
        worst = std::max(worst, std::abs(r.value - want) / want);
        c.expect(std::abs(r.value - want) <= 1e-8 * want, fmt::format("rho(1/{}) = {} want {}", lambda, r.value, want));
    }
    const auto unit = luxemburg_norm(Func::constant(1.0), log);
    c.near(unit.value, 1.0, 1e-6, "||1||");
    const auto th = theta(Func::constant(1.0), log);
    c.near(th.value, 1.0 / std::numbers::e, 1e-5, "theta(1)");
    const auto e = modular(Func::constant(std::numbers::e), log);
    c.expect(!e.finite(), "modular of constant e was not certified divergent");
    c.note(fmt::format("worst modular rel error {:.2e}; ||1|| = {:.9f}; theta = {:.7f}; e divergent", worst,
                       unit.value, th.value));
}

void distance_identity(Checks& c)
{
    const Func one = Func::constant(1.0);
    const auto lg = distance_to_E(one, Exponent::log_family());
    c.expect(std::abs(lg.limit_estimate - lg.theta_crosscheck) <= 1e-3, "log: |limit - theta| > 1e-3");
    c.near(lg.limit_estimate, 1.0 / std::numbers::e, 1e-3, "log limit");
    c.expect(lg.converged, "log trace did not converge");

    const auto sp = distance_to_E(one, Exponent::spiked(10, 4, 2), default_schedule(), 2e-5);
    const double series = std::pow(2.0, -0.25);
    c.expect(std::abs(sp.limit_estimate - sp.theta_crosscheck) <= 1e-3, "spiked: |limit - theta| > 1e-3");
    c.near(sp.limit_estimate, series, 1e-4, "spiked limit");
    c.near(sp.theta_crosscheck, series, 1e-4, "spiked theta");
    // every trace entry against the independent tail-norm oracle
    for (std::size_t i = 0; i < sp.levels.size(); ++i)
        c.near(sp.values[i], oracle::spiked_excess_norm(10, 4, 2, sp.levels[i]), 1e-6,
               fmt::format("spiked trace at n={}", sp.levels[i]));
    c.note(fmt::format("log {:.6f} at n={}; spiked {:.6f} at n={}", lg.limit_estimate, lg.levels.back(),
                       sp.limit_estimate, sp.levels.back()));
}

void closedness_verdicts(Checks& c)
{
    const auto two = closedness_constants(Exponent::constant(2.0), 10, 20);
    c.expect(two.verdict == Verdict::NotClosed, "p=2 verdict " + to_string(two.verdict));
    for (int k = 0; k <= 10; ++k)
        c.near(two.level_min[k], std::pow(2.0, -k / 2.0), 1e-8, fmt::format("p=2 level {}", k));
    const auto log = closedness_constants(Exponent::log_family(), 10, 20);
    c.expect(log.verdict == Verdict::NotClosed, "log verdict " + to_string(log.verdict));
    const auto sp = closedness_constants(Exponent::spiked(10, 4, 2), 10, 20);
    c.expect(sp.verdict == Verdict::Closed, "spiked verdict " + to_string(sp.verdict));
    c.expect(sp.c_est >= 0.5, fmt::format("spiked c_est {} < 1/2", sp.c_est));
    for (int k = 1; k <= 10; ++k)
        c.expect(sp.level_min[k] <= oracle::spiked_block_norm(10, 4, 2, k) + 1e-8,
                 fmt::format("spiked level {} above block oracle", k));
    c.note(fmt::format("p=2 c={:.5f} {}; log c={:.2e} {}; spiked c={:.4f} {}", two.c_est, to_string(two.verdict),
                       log.c_est, to_string(log.verdict), sp.c_est, to_string(sp.verdict)));
}

void theorem_skeleton(Checks& c)
{
    const auto p = Exponent::spiked(10, 4, 2);
    const auto r = closedness_constants(p, 10, 100);
    c.expect(r.verdict == Verdict::Closed, "not closed");
    const auto sep = separation_delta(p, r, 100, 11);
    c.expect(sep.violations == 0, fmt::format("{} separation violations", sep.violations));
    c.expect(sep.replay_failures == 0, fmt::format("{} replay failures", sep.replay_failures));
    c.expect(sep.min_observed >= r.c_est / (2.0 * r.c2_est), "min observed distance below c/(2 c2)");
    const auto ds = direct_sum_check(p, r.delta_est, 100, 12);
    c.expect(ds.K_lower_ok() && ds.K_upper_ok(),
             fmt::format("direct sum failures {}/{}", ds.triangle_failures, ds.projection_failures));
    c.near(ds.projection_bound, 1.0 / r.delta_est, 1e-15, "projection bound");
    int ext_violations = 0;
    for (const char* spec : {"delta(0.5)", "integral(const(1))", "delta(0.5) - delta(0.25)"}) {
        const auto e = extension_bound(parse_functional(spec), p, r, 100, 13);
        ext_violations += e.violations;
        c.expect(e.violations == 0, fmt::format("extension {}: {} violations", spec, e.violations));
    }
    c.note(fmt::format("delta={:.4f}; 100 pairs each: separation min {:.4f}, direct sum worst {:.3f}, "
                       "extension violations {}",
                       r.delta_est, sep.min_observed, ds.worst_projection_ratio, ext_violations));
}

void duality(Checks& c)
{
    Rng rng(2002);
    std::vector<double> pv;
    for (int k = 0; k < 64; ++k)
        pv.push_back(Exponent::log_family()((k + 0.5) / 64.0));
    const auto log6 = Exponent::log_family().discretized(6);
    const auto spiked = Exponent::spiked(10, 4, 2);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        std::vector<double> v;
        const Func vf = seeded_cell_function(rng, v);
        for (int which = 0; which < 2; ++which) {
            const Exponent& p = which == 0 ? log6 : spiked;
            const double got = orlicz_norm(vf, p).value;
            const double want = which == 0 ? oracle::discrete_orlicz(oracle::cell_atoms(pv, v))
                                           : oracle::discrete_orlicz(oracle::spiked_atoms(10, 4, 2, v));
            worst = std::max(worst, std::abs(got - want));
            c.near(got, want, 1e-3, fmt::format("orlicz v#{} under {}", i, p.label()));
            const double lux = dual_norm(vf, p).value;
            c.expect(lux <= got + 1e-7 && got <= 2.0 * lux + 1e-7,
                     fmt::format("sandwich v#{} under {}: {} {}", i, p.label(), lux, got));
        }
    }
    double worst_ratio = 0.0;
    Rng pairs(2003);
    for (int i = 0; i < 100; ++i) {
        const Exponent& p = i % 2 == 0 ? Exponent::log_family() : spiked;
        const Func x = random_continuous(pairs);
        const Func v = i % 4 < 2 ? random_continuous(pairs) : random_simple_on_level(spiked, pairs);
        const auto h = holder_check(x, v, p);
        worst_ratio = std::max(worst_ratio, h.ratio);
        c.expect(h.ratio <= 1.0, fmt::format("holder pair {} ratio {}", i, h.ratio));
    }
    c.note(fmt::format("orlicz worst gap {:.2e}; holder worst ratio {:.4f}", worst, worst_ratio));
}

void remark_two(Checks& c)
{
    const auto p = Exponent::spiked(10, 4, 2);
    const auto lat = lattice_bound_check(p, 50, 21, 1e-9);
    c.expect(lat.violations == 0, fmt::format("{} lattice violations", lat.violations));
    const auto r = closedness_constants(p, 10, 20);
    const auto lin = linfty_separation_check(p, r, 100, 22);
    c.expect(lin.violations() == 0, fmt::format("{} linfty violations", lin.violations()));
    c.note(fmt::format("lattice max ratio {:.4f}; linfty floor {:.4f}", lat.max_ratio, lin.separation_floor));
}

void kozv(Checks& c)
{
    const auto lg = kozv_criterion(Exponent::log_family(), 20);
    c.near(lg.ratios.back(), 1.0, 1e-3, "log ratio at depth 20");
    c.expect(lg.verdict, "log verdict false");
    for (const char* spec : {"constant(2)", "piecewise(0,0.5,1;6,1.5)", "discretize(log,10)"}) {
        const auto r = kozv_criterion(parse_exponent(spec), 24);
        c.expect(!r.verdict, fmt::format("bounded {} verdict true", spec));
    }
    const auto sp = kozv_criterion(Exponent::spiked(12, 4, 2), 20);
    const double target = 4.0 / std::numbers::ln2;
    c.expect(std::abs(sp.tail_max - target) <= 0.1 * target, fmt::format("spiked tail ratio {}", sp.tail_max));
    c.expect(sp.verdict, "spiked verdict false");
    c.note(fmt::format("log {:.6f}; spiked tail {:.3f} vs {:.3f}", lg.ratios.back(), sp.tail_max, target));
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void determinism(Checks& c)
{
    const auto cfg = parse_config(R"(seed: 99
exponent: spiked(10,4,2)
functions:
  one: const(1)
  v: poly(0, 0.5, 1; 1 -2 / 0.5 1)
operations:
  - op: dist
    function: one
  - op: dual-norm
    function: v
  - op: closedness
    depth: 9
    samples: 8
  - op: verify
    claim: remark2
    depth: 9
    samples: 8
  - op: extension
    functional: delta(0.5) - delta(0.25)
    depth: 9
    samples: 8
)");
    namespace fs = std::filesystem;
    const fs::path root = fs::temp_directory_path() / "vlp_acceptance_determinism";
    fs::remove_all(root);
    write_bundle(run_experiment(cfg), cfg, root / "a");
    write_bundle(run_experiment(cfg), cfg, root / "b");
    int files = 0;
    for (const auto& entry : fs::directory_iterator(root / "a")) {
        ++files;
        const auto other = root / "b" / entry.path().filename();
        c.expect(fs::exists(other) && slurp(entry.path()) == slurp(other),
                 fmt::format("{} differs", entry.path().filename().string()));
    }
    c.expect(files == 4, fmt::format("expected 4 files, found {}", files));
    fs::remove_all(root);
    c.note(fmt::format("{} files byte-identical across two runs", files));
}

} // namespace

int main(int argc, char** argv)
{
    const std::vector<Criterion> criteria{
        {1, "constant-exponent equivalence", 10, constant_exponent_equivalence},
        {2, "log family closed forms", 5, log_family_closed_forms},
        {3, "distance to E equals theta", 30, distance_identity},
        {4, "closedness verdicts", 60, closedness_verdicts},
        {5, "separation, direct sum and extension on spiked", 120, theorem_skeleton},
        {6, "duality and Holder", 60, duality},
        {7, "lattice and sup-norm separation", 20, remark_two},
        {8, "KoZv criterion", 10, kozv},
        {9, "determinism", 60, determinism},
    };
    std::vector<int> only;
    for (int i = 1; i < argc; ++i)
        only.push_back(std::stoi(argv[i]));

    int failed = 0;
    for (const auto& cr : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), cr.id) == only.end())
            continue;
        Checks checks;
        const auto start = std::chrono::steady_clock::now();
        try {
            cr.body(checks);
        } catch (const std::exception& e) {
            checks.expect(false, fmt::format("exception: {}", e.what()));
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        checks.expect(secs < cr.budget_s, fmt::format("runtime {:.1f} s over budget {:.0f} s", secs, cr.budget_s));
        const bool ok = checks.failures().empty();
        failed += !ok;
        fmt::print("{} [{}] {} ({:.2f} s / {:.0f} s): {}\n", ok ? "PASS" : "FAIL", cr.id, cr.name, secs, cr.budget_s,
                   checks.summary());
        for (const auto& f : checks.failures())
            fmt::print("      - {}\n", f);
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
