#include "vlp/config.hpp"

#include "vlp/error.hpp"
#include "vlp/grammar.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

namespace vlp {

namespace {

const std::vector<std::string> kCommon = {"op", "name", "exponent", "expect", "expect_tol"};

const std::map<std::string, std::vector<std::string>, std::less<>>& key_table()
{
    static const std::map<std::string, std::vector<std::string>, std::less<>> table = [] {
        std::map<std::string, std::vector<std::string>, std::less<>> t = {
            {"modular", {"function", "lambda"}},
            {"norm", {"function", "tol"}},
            {"theta", {"function", "tol"}},
            {"dist", {"function", "tol", "schedule"}},
            {"dual-norm", {"function", "tol"}},
            {"holder", {"x", "v"}},
            {"closedness", {"depth", "samples", "seed"}},
            {"kozv", {"depth"}},
            {"rearrange", {"depth"}},
            {"verify", {"claim", "function", "tol", "depth", "samples", "seed", "functional"}},
            {"extension", {"functional", "depth", "samples", "seed"}},
            {"proximinality", {"function", "tol"}},
        };
        for (auto& [op, keys] : t)
            keys.insert(keys.begin(), kCommon.begin(), kCommon.end());
        return t;
    }();
    return table;
}

int line_of(const YAML::Node& n) { return n.Mark().line + 1; }

[[noreturn]] void fail_at(const YAML::Node& n, const std::string& what)
{
    throw ParseError(fmt::format("line {}: {}", line_of(n), what));
}

double to_double(std::string_view s, const YAML::Node& where, std::string_view key)
{
    double v = 0.0;
    const char* first = s.data();
    if (!s.empty() && s.front() == '+')
        ++first;
    auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        fail_at(where, fmt::format("field '{}' expects a number, got '{}'", key, s));
    return v;
}

std::string scalar(const YAML::Node& n, std::string_view key)
{
    if (!n.IsScalar())
        fail_at(n, fmt::format("field '{}' expects a scalar", key));
    return n.Scalar();
}

/// Schedules and similar lists are kept as comma-joined text.
std::string scalar_or_list(const YAML::Node& n, std::string_view key)
{
    if (!n.IsSequence())
        return scalar(n, key);
    std::string out;
    for (const auto& item : n)
        out += (out.empty() ? "" : ",") + scalar(item, key);
    return out;
}

void check_keys(const YAML::Node& map, const std::vector<std::string>& allowed, std::string_view where)
{
    for (const auto& kv : map) {
        const std::string key = kv.first.as<std::string>();
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            fail_at(kv.first, fmt::format("unknown key '{}' in {}", key, where));
    }
}

} // namespace

std::optional<std::string> Operation::get(std::string_view key) const
{
    for (const auto& [k, v] : params)
        if (k == key)
            return v;
    return std::nullopt;
}

double Operation::get_double(std::string_view key, double fallback) const
{
    const auto v = get(key);
    if (!v)
        return fallback;
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc() || ptr != v->data() + v->size())
        throw ParseError(fmt::format("line {}: field '{}' expects a number, got '{}'", line, key, *v));
    return out;
}

long Operation::get_long(std::string_view key, long fallback) const
{
    const double v = get_double(key, static_cast<double>(fallback));
    if (v != std::floor(v))
        throw ParseError(fmt::format("line {}: field '{}' expects an integer", line, key));
    return static_cast<long>(v);
}

std::string Operation::get_string(std::string_view key, std::string fallback) const
{
    auto v = get(key);
    return v ? *v : std::move(fallback);
}

void QuadOverrides::apply(QuadConfig& cfg) const
{
    if (abs_tol)
        cfg.abs_tol = *abs_tol;
    if (rel_tol)
        cfg.rel_tol = *rel_tol;
    if (max_subdivisions)
        cfg.max_subdivisions = *max_subdivisions;
    if (divergence_cap)
        cfg.divergence_cap = *divergence_cap;
    if (endpoint_grading)
        cfg.endpoint_grading = *endpoint_grading;
}

const std::vector<std::string>& operation_keys(std::string_view op)
{
    const auto& t = key_table();
    auto it = t.find(op);
    if (it == t.end())
        throw ParseError(fmt::format("unknown operation '{}'", op));
    return it->second;
}

ExperimentConfig parse_config(std::string_view text)
{
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::Exception& e) {
        throw ParseError(fmt::format("line {}: {}", e.mark.line + 1, e.msg));
    }
    if (!root.IsMap())
        throw ParseError("config must be a mapping at top level");
    check_keys(root, {"seed", "exponent", "functions", "quadrature", "output", "operations"}, "config");

    ExperimentConfig cfg;
    if (auto n = root["seed"]) {
        const double s = to_double(scalar(n, "seed"), n, "seed");
        if (s < 0 || s != std::floor(s) || s > 9.0e18)
            fail_at(n, "field 'seed' expects a non-negative integer");
        cfg.seed = static_cast<std::uint64_t>(s);
    }
    const YAML::Node exp = root["exponent"];
    if (!exp)
        throw ParseError("missing required key 'exponent'");
    cfg.exponent = scalar(exp, "exponent");
    std::optional<Exponent> p;
    try {
        p = parse_exponent(cfg.exponent);
    } catch (const ParseError& e) {
        fail_at(exp, fmt::format("field 'exponent': {}", e.what()));
    }

    if (auto fns = root["functions"]) {
        if (!fns.IsMap())
            fail_at(fns, "field 'functions' expects a mapping of name to function spec");
        for (const auto& kv : fns) {
            const std::string name = kv.first.as<std::string>();
            const std::string spec = scalar(kv.second, name);
            try {
                parse_func(spec, &*p);
            } catch (const ParseError& e) {
                fail_at(kv.second, fmt::format("function '{}': {}", name, e.what()));
            }
            cfg.functions.emplace_back(name, spec);
        }
    }

    if (auto q = root["quadrature"]) {
        if (!q.IsMap())
            fail_at(q, "field 'quadrature' expects a mapping");
        check_keys(q, {"abs_tol", "rel_tol", "max_subdivisions", "divergence_cap", "endpoint_grading"}, "quadrature");
        auto num = [&](const char* key) -> std::optional<double> {
            if (auto n = q[key])
                return to_double(scalar(n, key), n, key);
            return std::nullopt;
        };
        cfg.quadrature.abs_tol = num("abs_tol");
        cfg.quadrature.rel_tol = num("rel_tol");
        if (auto m = num("max_subdivisions")) {
            if (*m < 1 || *m != std::floor(*m))
                fail_at(q["max_subdivisions"], "field 'max_subdivisions' expects a positive integer");
            cfg.quadrature.max_subdivisions = static_cast<std::size_t>(*m);
        }
        cfg.quadrature.divergence_cap = num("divergence_cap");
        cfg.quadrature.endpoint_grading = num("endpoint_grading");
        QuadConfig check;
        cfg.quadrature.apply(check);
        try {
            check.validate();
        } catch (const Error& e) {
            fail_at(q, e.what());
        }
    }

    if (auto out = root["output"])
        cfg.output = scalar(out, "output");

    const YAML::Node ops = root["operations"];
    if (!ops)
        throw ParseError("missing required key 'operations'");
    if (!ops.IsSequence())
        fail_at(ops, "field 'operations' expects a list");
    for (const auto& entry : ops) {
        if (!entry.IsMap() || !entry["op"])
            fail_at(entry, "each operation needs an 'op' field");
        Operation op;
        op.line = line_of(entry);
        op.op = scalar(entry["op"], "op");
        if (!key_table().contains(op.op))
            fail_at(entry["op"], fmt::format("unknown operation '{}'", op.op));
        check_keys(entry, operation_keys(op.op), fmt::format("operation '{}'", op.op));
        for (const auto& kv : entry) {
            const std::string key = kv.first.as<std::string>();
            if (key != "op")
                op.params.emplace_back(key, scalar_or_list(kv.second, key));
        }
        for (const char* ref : {"function", "x", "v"}) {
            if (auto name = op.get(ref)) {
                const bool known = std::any_of(cfg.functions.begin(), cfg.functions.end(),
                                               [&](const auto& f) { return f.first == *name; });
                if (!known)
                    fail_at(entry[ref], fmt::format("operation '{}' refers to undefined function '{}'", op.op, *name));
            }
        }
        cfg.operations.push_back(std::move(op));
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError(fmt::format("cannot read config '{}'", path));
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& cfg)
{
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "seed" << YAML::Value << cfg.seed;
    out << YAML::Key << "exponent" << YAML::Value << YAML::DoubleQuoted << cfg.exponent;
    if (!cfg.functions.empty()) {
        out << YAML::Key << "functions" << YAML::Value << YAML::BeginMap;
        for (const auto& [name, spec] : cfg.functions)
            out << YAML::Key << name << YAML::Value << YAML::DoubleQuoted << spec;
        out << YAML::EndMap;
    }
    if (!cfg.quadrature.empty()) {
        out << YAML::Key << "quadrature" << YAML::Value << YAML::BeginMap;
        auto put = [&](const char* key, const auto& v) {
            if (v)
                out << YAML::Key << key << YAML::Value << fmt::format("{}", *v);
        };
        put("abs_tol", cfg.quadrature.abs_tol);
        put("rel_tol", cfg.quadrature.rel_tol);
        put("max_subdivisions", cfg.quadrature.max_subdivisions);
        put("divergence_cap", cfg.quadrature.divergence_cap);
        put("endpoint_grading", cfg.quadrature.endpoint_grading);
        out << YAML::EndMap;
    }
    if (!cfg.output.empty())
        out << YAML::Key << "output" << YAML::Value << YAML::DoubleQuoted << cfg.output;
    out << YAML::Key << "operations" << YAML::Value << YAML::BeginSeq;
    for (const auto& op : cfg.operations) {
        out << YAML::BeginMap << YAML::Key << "op" << YAML::Value << op.op;
        for (const auto& [k, v] : op.params) {
            out << YAML::Key << k << YAML::Value;
            if (k == "schedule") {
                out << YAML::Flow << YAML::BeginSeq;
                std::stringstream items(v);
                for (std::string item; std::getline(items, item, ',');)
                    out << item;
                out << YAML::EndSeq;
            } else {
                out << YAML::DoubleQuoted << v;
            }
        }
        out << YAML::EndMap;
    }
    out << YAML::EndSeq << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

} // namespace vlp
