#include "vlp/experiment.hpp"

#include "vlp/error.hpp"
#include "vlp/grammar.hpp"
#include "vlp/norm.hpp"
#include "vlp/space.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <cmath>
#include <fstream>
#include <future>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace vlp {

namespace {

constexpr const char* kClosedForm = "closed-form";
constexpr const char* kQuadrature = "quadrature";
constexpr const char* kSampled = "sampled";

std::string file_safe(std::string s)
{
    for (char& c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_')
            c = '_';
    return s;
}

class Runner {
public:
    Runner(const ExperimentConfig& cfg, QuadConfig quad, ReportBundle& out)
        : cfg_(cfg), quad_(quad), base_(parse_exponent(cfg.exponent)), out_(out)
    {
        for (const auto& [name, spec] : cfg.functions)
            funcs_.emplace(name, parse_func(spec, &base_));
    }

    void run(const Operation& op, std::size_t index)
    {
        op_ = &op;
        name_ = op.get_string("name", fmt::format("{}{}", op.op, index + 1));
        primary_ = std::nullopt;
        category_.clear();
        const std::size_t first_row = out_.rows.size();
        try {
            p_.emplace(op.get("exponent") ? parse_exponent(*op.get("exponent")) : base_);
            dispatch(op.op);
            apply_expectation(first_row);
        } catch (const Error& e) {
            out_.rows.push_back({name_ + ".error", std::nan(""), std::nan(""), "inconclusive", kQuadrature, e.what()});
        }
    }

private:
    const Exponent& p() const { return *p_; }

    const Func& func(const char* key, const char* fallback_spec = nullptr)
    {
        const auto name = op_->get(key);
        if (!name) {
            if (!fallback_spec)
                throw ParseError(fmt::format("line {}: operation '{}' needs '{}'", op_->line, op_->op, key));
            auto [it, _] = scratch_.insert_or_assign(fallback_spec, parse_func(fallback_spec, &base_));
            return it->second;
        }
        auto it = funcs_.find(*name);
        if (it == funcs_.end())
            throw ParseError(fmt::format("line {}: undefined function '{}'", op_->line, *name));
        return it->second;
    }

    std::uint64_t seed() const
    {
        const long s = op_->get_long("seed", static_cast<long>(cfg_.seed));
        if (s < 0)
            throw ParseError(fmt::format("line {}: seed must be non-negative", op_->line));
        return static_cast<std::uint64_t>(s);
    }

    int count(const char* key, long fallback) const
    {
        const long v = op_->get_long(key, fallback);
        if (v < 1 || v > 100000)
            throw DomainError(fmt::format("'{}' = {} out of range", key, v));
        return static_cast<int>(v);
    }

    std::size_t row(std::string qty, double value, double tol, std::string verdict, std::string provenance,
                    std::string note = {})
    {
        out_.rows.push_back(
            {name_ + "." + qty, value, tol, std::move(verdict), std::move(provenance), std::move(note)});
        return out_.rows.size() - 1;
    }

    std::size_t measure(std::string qty, double value, double tol, std::string provenance)
    {
        return row(std::move(qty), value, tol, "n/a", std::move(provenance));
    }

    std::size_t check(std::string qty, double value, double tol, bool ok, std::string provenance)
    {
        return row(std::move(qty), value, tol, ok ? "pass" : "fail", std::move(provenance));
    }

    /// `expect` compares against the primary row, or against the categorical outcome.
    void apply_expectation(std::size_t first_row)
    {
        const auto expect = op_->get("expect");
        if (!expect)
            return;
        double target = 0.0;
        auto [ptr, ec] = std::from_chars(expect->data(), expect->data() + expect->size(), target);
        const bool numeric = ec == std::errc() && ptr == expect->data() + expect->size();
        if (numeric) {
            if (!primary_ || *primary_ < first_row)
                throw ParseError(fmt::format("line {}: operation '{}' has no numeric result to expect", op_->line, op_->op));
            auto& r = out_.rows[*primary_];
            const double tol = op_->get_double("expect_tol", 1e-6);
            r.tolerance = tol;
            r.verdict = std::abs(r.value - target) <= tol ? "pass" : "fail";
            r.note = fmt::format("expected {}", *expect);
            return;
        }
        if (category_.empty())
            throw ParseError(fmt::format("line {}: operation '{}' has no categorical outcome", op_->line, op_->op));
        const bool ok = *expect == category_;
        const std::string provenance = out_.rows.back().provenance;
        row(fmt::format("expect:{}", *expect), ok ? 1.0 : 0.0, 0.0, ok ? "pass" : "fail", provenance,
            fmt::format("observed {}", category_));
    }

    void dispatch(const std::string& op)
    {
        if (op == "modular")
            modular_op();
        else if (op == "norm")
            norm_op();
        else if (op == "theta")
            theta_op();
        else if (op == "dist")
            dist_op(func("function"), op_->get_double("tol", 1e-4));
        else if (op == "dual-norm")
            dual_norm_op();
        else if (op == "holder")
            holder_op();
        else if (op == "closedness")
            closedness_op();
        else if (op == "kozv")
            kozv_op();
        else if (op == "rearrange")
            rearrange_op();
        else if (op == "verify")
            verify_op();
        else if (op == "extension")
            extension_op(closedness_quiet());
        else if (op == "proximinality")
            proximinality_op();
        else
            throw ParseError(fmt::format("unknown operation '{}'", op));
    }

    const char* provenance_at(const Func& f, double lambda) const
    {
        if (!(lambda > 0.0))
            return kClosedForm;
        const auto r = modular_scaled(f, p(), lambda, quad_);
        return r.closed_form ? kClosedForm : kQuadrature;
    }

    void modular_op()
    {
        const Func& f = func("function");
        const double lambda = op_->get_double("lambda", 1.0);
        const auto r = modular_scaled(f, p(), lambda, quad_);
        category_ = r.finite() ? "finite" : "divergent";
        primary_ = measure("rho", r.finite() ? r.value : std::numeric_limits<double>::infinity(), r.error_bound,
                           r.closed_form ? kClosedForm : kQuadrature);
        if (!r.finite())
            out_.rows.back().note = r.divergence_witness;
    }

    void norm_op()
    {
        const Func& f = func("function");
        const auto r = luxemburg_norm(f, p(), op_->get_double("tol", 1e-9), quad_);
        primary_ = measure("norm", r.value, r.hi - r.lo, provenance_at(f, r.value));
    }

    void theta_op()
    {
        const Func& f = func("function");
        const auto r = theta(f, p(), op_->get_double("tol", 1e-6), quad_);
        primary_ = measure("theta", r.value, r.hi - r.lo, r.value == 0.0 ? kClosedForm : provenance_at(f, r.hi));
    }

    std::vector<long> schedule() const
    {
        const auto text = op_->get("schedule");
        if (!text)
            return default_schedule();
        std::vector<long> s;
        std::stringstream items(*text);
        for (std::string item; std::getline(items, item, ',');) {
            long v = 0;
            auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
            if (ec != std::errc() || ptr != item.data() + item.size())
                throw ParseError(fmt::format("line {}: schedule entry '{}' is not an integer", op_->line, item));
            s.push_back(v);
        }
        return s;
    }

    void dist_op(const Func& f, double tol)
    {
        const auto trace = distance_to_E(f, p(), schedule(), tol, quad_);
        const char* prov = provenance_at(f, trace.theta_crosscheck > 0 ? trace.theta_crosscheck * 1.01 : 0.0);
        primary_ = measure("limit", trace.limit_estimate, tol, prov);
        measure("theta", trace.theta_crosscheck, tol, prov);
        const double gap = std::abs(trace.limit_estimate - trace.theta_crosscheck);
        check("limit_minus_theta", gap, 10.0 * tol, gap <= 10.0 * tol, prov);
        row("converged_at_level", static_cast<double>(trace.levels.back()), tol, trace.converged ? "pass" : "inconclusive",
            prov);
        PlotSeries s{file_safe(name_), "n", "distance", {}, trace.values};
        for (long n : trace.levels)
            s.x.push_back(static_cast<double>(n));
        out_.plots.push_back(std::move(s));
    }

    void dual_norm_op()
    {
        const Func& v = func("function");
        const double tol = op_->get_double("tol", 1e-7);
        const auto orl = orlicz_norm(v, p(), tol, quad_);
        const auto lux = dual_norm(v, p(), std::min(tol, 1e-9), quad_);
        primary_ = measure("orlicz", orl.value, orl.hi - orl.lo, kQuadrature);
        measure("dual_luxemburg", lux.value, lux.hi - lux.lo, kQuadrature);
        const double ratio = orl.value / lux.value;
        check("orlicz_over_dual", ratio, tol, lux.value <= orl.value + tol && orl.value <= 2.0 * lux.value + tol,
              kQuadrature);
    }

    void holder_op()
    {
        const auto h = holder_check(func("x"), func("v"), p(), quad_);
        measure("lhs", h.lhs, 0.0, kQuadrature);
        measure("rhs", h.rhs, 0.0, kQuadrature);
        primary_ = check("ratio", h.ratio, 0.0, h.ratio <= 1.0, kQuadrature);
    }

    ClosednessReport closedness_quiet()
    {
        return closedness_constants(p(), count("depth", 10), count("samples", 20), seed(), quad_);
    }

    ClosednessReport closedness_rows(const ClosednessReport& r)
    {
        primary_ = measure("c_est", r.c_est, 1e-9, kQuadrature);
        measure("C_est", r.C_est, 1e-9, kQuadrature);
        measure("c1_est", r.c1_est, 1e-9, kSampled);
        check("c2_est", r.c2_est, 1e-6, r.c2_est <= 1.0 + 1e-6, kSampled);
        check("delta_est", r.delta_est, 0.0, r.delta_est == r.c_est / (2.0 * r.c2_est), kQuadrature);
        const double last = r.running_min.back();
        const double prev = r.running_min[r.running_min.size() - 2];
        measure("last_depth_drift", 1.0 - last / prev, 0.05, kQuadrature);
        measure("verdict:" + to_string(r.verdict), 1.0, 0.0, kQuadrature);
        category_ = to_string(r.verdict);
        PlotSeries s{file_safe(name_), "depth", "c_est", {}, r.running_min};
        for (std::size_t k = 0; k < r.running_min.size(); ++k)
            s.x.push_back(static_cast<double>(k));
        out_.plots.push_back(std::move(s));
        return r;
    }

    void closedness_op() { closedness_rows(closedness_quiet()); }

    void kozv_op()
    {
        const int depth = count("depth", 20);
        const auto r = kozv_criterion(p(), depth);
        primary_ = measure("tail_max", r.tail_max, 1e-3, kClosedForm);
        measure("half_tail_max", r.half_tail_max, 1e-3, kClosedForm);
        measure(fmt::format("verdict:{}", r.verdict), r.verdict ? 1.0 : 0.0, 0.0, kClosedForm);
        category_ = r.verdict ? "true" : "false";
        PlotSeries s{file_safe(name_), "k", "ratio", {}, r.ratios};
        for (int k = 1; k <= depth; ++k)
            s.x.push_back(static_cast<double>(k));
        out_.plots.push_back(std::move(s));
    }

    void rearrange_op()
    {
        const int depth = count("depth", 10);
        if (depth > 20)
            throw DomainError("rearrange depth must be at most 20");
        const Exponent star = p().rearranged();
        double gap = 0.0;
        for (double y = 1.0; y <= 128.0; y += 0.25)
            gap = std::max(gap, std::abs(p().distribution(y) - star.distribution(y)));
        primary_ = check("equimeasurability_gap", gap, 1e-12, gap <= 1e-12, kClosedForm);
        PlotSeries s{file_safe(name_), "t", "p_star", {}, {}};
        bool monotone = true;
        const long cells = 1L << depth;
        for (long k = 0; k < cells; ++k) {
            const double t = (static_cast<double>(k) + 0.5) / static_cast<double>(cells);
            s.x.push_back(t);
            s.y.push_back(star(t));
            if (k > 0 && s.y[k] > s.y[k - 1])
                monotone = false;
        }
        check("non_increasing", monotone ? 1.0 : 0.0, 0.0, monotone, kClosedForm);
        out_.plots.push_back(std::move(s));
    }

    void verify_op()
    {
        const std::string claim = op_->get_string("claim", "");
        if (claim == "prop21") {
            dist_op(func("function", "const(1)"), op_->get_double("tol", 1e-4));
        } else if (claim == "thm11") {
            const auto r = closedness_rows(closedness_quiet());
            check("closed", r.verdict == Verdict::Closed ? 1.0 : 0.0, 0.0, r.verdict == Verdict::Closed, kQuadrature);
            if (r.verdict != Verdict::Closed)
                return;
            const int n = count("samples", 100);
            const auto sep = separation_delta(p(), r, n, seed(), quad_);
            measure("separation_min_observed", sep.min_observed, 1e-9, kSampled);
            measure("separation_delta_bound", sep.delta_bound, 0.0, kQuadrature);
            check("separation_violations", sep.violations, 0.0, sep.violations == 0, kSampled);
            check("replay_failures", sep.replay_failures, 0.0, sep.replay_failures == 0, kSampled);
            const auto ds = direct_sum_check(p(), r.delta_est, n, seed(), quad_);
            check("direct_sum_triangle_failures", ds.triangle_failures, 0.0, ds.K_upper_ok(), kSampled);
            check("direct_sum_projection_failures", ds.projection_failures, 0.0, ds.K_lower_ok(), kSampled);
            measure("projection_bound", ds.projection_bound, 0.0, kQuadrature);
            extension_op(r, false);
        } else if (claim == "remark2") {
            const auto r = closedness_quiet();
            const auto lat = lattice_bound_check(p(), count("samples", 50), seed(), 1e-9, quad_);
            check("lattice_violations", lat.violations, 1e-9, lat.violations == 0, kSampled);
            measure("lattice_max_ratio", lat.max_ratio, 1e-9, kSampled);
            const auto lin = linfty_separation_check(p(), r, count("samples", 100), seed(), quad_);
            measure("separation_floor", lin.separation_floor, 0.0, kQuadrature);
            check("linfty_violations", lin.violations(), 0.0, lin.violations() == 0, kSampled);
        } else {
            throw ParseError(fmt::format("line {}: verify needs claim prop21, thm11 or remark2", op_->line));
        }
    }

    void extension_op(const ClosednessReport& r, bool primary = true)
    {
        const FunctionalSpec psi = parse_functional(op_->get_string("functional", "delta(0.5)"));
        const auto e = extension_bound(psi, p(), r, count("samples", 100), seed(), quad_);
        const auto at = measure("cstar_norm", e.cstar_norm, 0.0, kClosedForm);
        if (primary)
            primary_ = at;
        measure("extension_bound", e.bound, 0.0, kQuadrature);
        measure("extension_worst_ratio", e.worst_ratio, 0.0, kSampled);
        const auto v = check("extension_violations", e.violations, 0.0, e.violations == 0, kSampled);
        out_.rows[v].note = e.note;
    }

    void proximinality_op()
    {
        const double tol = op_->get_double("tol", 1e-4);
        const auto r = proximinality_check(func("function"), p(), tol, quad_);
        primary_ = measure("d_value", r.d_value, tol, kQuadrature);
        check("gap", r.gap, tol, r.gap >= -1e-9 && r.gap <= tol, kQuadrature);
        measure("witness_level", static_cast<double>(r.witness_level), 0.0, kQuadrature);
        check("germ_bound", r.witness_distance - r.theta, tol, r.germ_ok, kQuadrature);
    }

    const ExperimentConfig& cfg_;
    QuadConfig quad_;
    Exponent base_;
    std::optional<Exponent> p_;
    std::map<std::string, Func> funcs_;
    std::map<std::string, Func> scratch_;
    ReportBundle& out_;
    const Operation* op_ = nullptr;
    std::string name_;
    std::optional<std::size_t> primary_;
    std::string category_;
};

nlohmann::json number_json(double v)
{
    if (std::isfinite(v))
        return v;
    return format_number(v);
}

} // namespace

bool ReportBundle::ok() const
{
    return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.verdict == "pass" || r.verdict == "n/a"; });
}

std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    return fmt::format("{}", v);
}

std::string report_csv(const ReportBundle& bundle)
{
    std::string out = "quantity,value,tolerance,verdict,provenance\n";
    for (const auto& r : bundle.rows)
        out += fmt::format("{},{},{},{},{}\n", r.quantity, format_number(r.value), format_number(r.tolerance), r.verdict,
                           r.provenance);
    return out;
}

std::string report_json(const ReportBundle& bundle, const ExperimentConfig& cfg)
{
    nlohmann::ordered_json j;
    j["seed"] = cfg.seed;
    j["exponent"] = cfg.exponent;
    auto& rows = j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : bundle.rows) {
        nlohmann::ordered_json o;
        o["quantity"] = r.quantity;
        o["value"] = number_json(r.value);
        o["tolerance"] = number_json(r.tolerance);
        o["verdict"] = r.verdict;
        o["provenance"] = r.provenance;
        if (!r.note.empty())
            o["note"] = r.note;
        rows.push_back(std::move(o));
    }
    auto& plots = j["plots"] = nlohmann::ordered_json::array();
    for (const auto& s : bundle.plots)
        plots.push_back("plotdata_" + s.name + ".csv");
    j["ok"] = bundle.ok();
    return j.dump(2) + "\n";
}

std::string plot_csv(const PlotSeries& series)
{
    if (series.x.empty() || series.x.size() != series.y.size())
        throw DomainError(fmt::format("plot series '{}' is empty or ragged", series.name));
    for (std::size_t i = 1; i < series.x.size(); ++i)
        if (!(series.x[i] > series.x[i - 1]))
            throw DomainError(fmt::format("plot series '{}' has a non-increasing first column", series.name));
    std::string out = fmt::format("{},{}\n", series.x_label, series.y_label);
    for (std::size_t i = 0; i < series.x.size(); ++i)
        out += fmt::format("{},{}\n", format_number(series.x[i]), format_number(series.y[i]));
    return out;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(fmt::format("cannot write '{}'", path.string()));
    out << text;
    if (!out)
        throw Error(fmt::format("write to '{}' failed", path.string()));
}

} // namespace

void emit_plot_data(const PlotSeries& series, const std::filesystem::path& path) { write_file(path, plot_csv(series)); }

ReportBundle run_experiment(const ExperimentConfig& cfg, const QuadOverrides& overrides)
{
    QuadConfig quad;
    cfg.quadrature.apply(quad);
    overrides.apply(quad);
    quad.validate();
    std::vector<std::future<ReportBundle>> pending;
    for (std::size_t i = 0; i < cfg.operations.size(); ++i)
        pending.push_back(std::async(std::launch::async, [&cfg, quad, i] {
            ReportBundle part;
            Runner(cfg, quad, part).run(cfg.operations[i], i);
            return part;
        }));
    ReportBundle bundle;
    for (auto& f : pending) {
        auto part = f.get();
        std::move(part.rows.begin(), part.rows.end(), std::back_inserter(bundle.rows));
        std::move(part.plots.begin(), part.plots.end(), std::back_inserter(bundle.plots));
    }
    return bundle;
}

void write_bundle(const ReportBundle& bundle, const ExperimentConfig& cfg, const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw Error(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
    write_file(dir / "report.csv", report_csv(bundle));
    write_file(dir / "report.json", report_json(bundle, cfg));
    for (const auto& s : bundle.plots)
        emit_plot_data(s, dir / ("plotdata_" + s.name + ".csv"));
}

} // namespace vlp
