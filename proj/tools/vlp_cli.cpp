#include "vlp/config.hpp"
#include "vlp/error.hpp"
#include "vlp/experiment.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>
#include <optional>
#include <string>

namespace {

struct Options {
    vlp::QuadOverrides quad;
    std::optional<std::uint64_t> seed;
    std::optional<long> depth;
    std::optional<long> samples;
    std::string out;

    std::string exponent = "log";
    std::string function = "const(1)";
    std::optional<double> lambda;
    std::optional<double> tol;
    std::string schedule;
    std::string functional;
    std::string claim;
    std::string config_path;
};

void add_param(vlp::Operation& op, const char* key, const std::optional<double>& v)
{
    if (v)
        op.params.emplace_back(key, vlp::format_number(*v));
}

void add_param(vlp::Operation& op, const char* key, const std::optional<long>& v)
{
    if (v)
        op.params.emplace_back(key, std::to_string(*v));
}

void add_param(vlp::Operation& op, const char* key, const std::string& v)
{
    if (!v.empty())
        op.params.emplace_back(key, v);
}

vlp::ExperimentConfig single_op_config(const std::string& kind, const Options& o)
{
    vlp::ExperimentConfig cfg;
    cfg.seed = o.seed.value_or(1);
    cfg.exponent = o.exponent;
    cfg.output = o.out;
    vlp::Operation op{kind, {}, 0};
    const bool takes_function = kind == "norm" || kind == "modular" || kind == "theta" || kind == "dist" ||
                                kind == "dual-norm" || kind == "verify";
    if (takes_function) {
        cfg.functions.emplace_back("f", o.function);
        op.params.emplace_back("function", "f");
    }
    add_param(op, "claim", o.claim);
    add_param(op, "lambda", o.lambda);
    add_param(op, "tol", o.tol);
    add_param(op, "schedule", o.schedule);
    add_param(op, "functional", o.functional);
    add_param(op, "depth", o.depth);
    add_param(op, "samples", o.samples);
    if (o.seed)
        op.params.emplace_back("seed", std::to_string(*o.seed));
    cfg.operations.push_back(std::move(op));
    return cfg;
}

int execute(const vlp::ExperimentConfig& cfg, const Options& o)
{
    const auto bundle = vlp::run_experiment(cfg, o.quad);
    std::fputs(vlp::report_csv(bundle).c_str(), stdout);
    const std::string dir = o.out.empty() ? cfg.output : o.out;
    if (!dir.empty())
        vlp::write_bundle(bundle, cfg, dir);
    return bundle.ok() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Numerical experiments in variable-exponent Lebesgue spaces on [0,1]"};
    app.require_subcommand(1);
    Options o;

    app.add_option("--abs-tol", o.quad.abs_tol, "Absolute quadrature tolerance");
    app.add_option("--rel-tol", o.quad.rel_tol, "Relative quadrature tolerance");
    app.add_option("--max-subdiv", o.quad.max_subdivisions, "Adaptive subdivision budget");
    app.add_option("--div-cap", o.quad.divergence_cap, "Partial-sum cap for the divergence rule");
    app.add_option("--seed", o.seed, "Seed for sampled checks");
    app.add_option("--depth", o.depth, "Dyadic grid depth");
    app.add_option("--samples", o.samples, "Number of seeded samples");
    app.add_option("--out", o.out, "Directory for report.csv, report.json and plot data");

    std::string kind;
    auto with_exponent = [&](CLI::App* sub) {
        sub->add_option("-e,--exponent", o.exponent, "Exponent spec, e.g. log, spiked(10,4,2)");
        sub->fallthrough();
        sub->callback([&kind, sub] { kind = sub->get_name(); });
        return sub;
    };
    auto with_function = [&](CLI::App* sub) {
        with_exponent(sub)->add_option("-f,--function", o.function, "Function spec, e.g. const(1)");
        return sub;
    };

    auto* norm = with_function(app.add_subcommand("norm", "Luxemburg norm"));
    norm->add_option("--tol", o.tol);
    auto* modular = with_function(app.add_subcommand("modular", "Modular of f/lambda"));
    modular->add_option("--lambda", o.lambda);
    auto* theta = with_function(app.add_subcommand("theta", "Finiteness threshold of the modular"));
    theta->add_option("--tol", o.tol);
    auto* dist = with_function(app.add_subcommand("dist", "Distance to the order-continuous part"));
    dist->add_option("--tol", o.tol);
    dist->add_option("--schedule", o.schedule, "Comma-separated truncation levels");
    auto* dual = with_function(app.add_subcommand("dual-norm", "Orlicz norm against the Luxemburg dual norm"));
    dual->add_option("--tol", o.tol);
    with_exponent(app.add_subcommand("closedness", "Closedness constants on a dyadic grid"));
    with_exponent(app.add_subcommand("kozv", "Growth of the decreasing rearrangement against ln(e/t)"));
    with_exponent(app.add_subcommand("rearrange", "Decreasing rearrangement"));
    auto* verify = with_function(app.add_subcommand("verify", "Run a named property check"));
    verify->add_option("claim", o.claim, "prop21, thm11 or remark2")
        ->required()
        ->check(CLI::IsMember({"prop21", "thm11", "remark2"}));
    verify->add_option("--tol", o.tol);
    verify->add_option("--functional", o.functional);
    auto* extension = with_exponent(app.add_subcommand("extension", "Norm-controlled extension of a functional"));
    extension->add_option("--functional", o.functional, "e.g. delta(0.5) - delta(0.25)");
    auto* run = app.add_subcommand("run", "Run a YAML experiment file");
    run->add_option("config", o.config_path)->required()->check(CLI::ExistingFile);
    run->fallthrough();
    run->callback([&kind] { kind = "run"; });

    CLI11_PARSE(app, argc, argv);

    try {
        if (kind == "run") {
            auto cfg = vlp::load_config(o.config_path);
            if (o.seed)
                cfg.seed = *o.seed;
            return execute(cfg, o);
        }
        return execute(single_op_config(kind, o), o);
    } catch (const vlp::ParseError& e) {
        fmt::print(stderr, "parse error: {}\n", e.what());
        return 2;
    } catch (const vlp::Error& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 3;
    }
}
