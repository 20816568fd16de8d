#pragma once

#include "vlp/modular.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vlp {

/// One entry of the operation list. Parameters keep their source text so that
/// serialisation reproduces them verbatim.
struct Operation {
    std::string op;
    std::vector<std::pair<std::string, std::string>> params;
    int line = 0; // 1-based source line, 0 when built in code

    std::optional<std::string> get(std::string_view key) const;
    double get_double(std::string_view key, double fallback) const;
    long get_long(std::string_view key, long fallback) const;
    std::string get_string(std::string_view key, std::string fallback) const;

    friend bool operator==(const Operation& a, const Operation& b) { return a.op == b.op && a.params == b.params; }
};

struct QuadOverrides {
    std::optional<double> abs_tol;
    std::optional<double> rel_tol;
    std::optional<std::size_t> max_subdivisions;
    std::optional<double> divergence_cap;
    std::optional<double> endpoint_grading;

    void apply(QuadConfig& cfg) const;
    bool empty() const { return !abs_tol && !rel_tol && !max_subdivisions && !divergence_cap && !endpoint_grading; }
    friend bool operator==(const QuadOverrides&, const QuadOverrides&) = default;
};

struct ExperimentConfig {
    std::uint64_t seed = 1;
    std::string exponent;
    std::vector<std::pair<std::string, std::string>> functions; // name -> function spec, in file order
    QuadOverrides quadrature;
    std::string output;
    std::vector<Operation> operations;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Parses YAML text; unknown keys and malformed values raise ParseError naming the
/// key and its line. Operation parameters are checked against the operation kind.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);

/// Parameter names accepted by an operation kind (including the common ones).
const std::vector<std::string>& operation_keys(std::string_view op);

} // namespace vlp
