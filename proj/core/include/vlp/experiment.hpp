#pragma once

#include "vlp/config.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace vlp {

struct ReportRow {
    std::string quantity;
    double value = 0.0;
    double tolerance = 0.0;
    std::string verdict;    // pass | fail | inconclusive | n/a
    std::string provenance; // closed-form | quadrature | sampled
    std::string note;       // JSON mirror only
};

/// Two-column series written as plotdata_<name>.csv.
struct PlotSeries {
    std::string name;
    std::string x_label = "x";
    std::string y_label = "y";
    std::vector<double> x;
    std::vector<double> y;
};

struct ReportBundle {
    std::vector<ReportRow> rows;
    std::vector<PlotSeries> plots;

    /// True iff every verdict is pass or n/a.
    bool ok() const;
};

/// Shortest round-trip decimal; nan and inf spelled out.
std::string format_number(double v);

std::string report_csv(const ReportBundle& bundle);
std::string report_json(const ReportBundle& bundle, const ExperimentConfig& cfg);
std::string plot_csv(const PlotSeries& series);

/// Writes one series; rejects empty series and non-increasing first columns.
void emit_plot_data(const PlotSeries& series, const std::filesystem::path& path);

/// Executes the operation list in order. `overrides` take precedence over the
/// config's quadrature table.
ReportBundle run_experiment(const ExperimentConfig& cfg, const QuadOverrides& overrides = {});

/// report.csv, report.json and every plotdata_*.csv under `dir`.
void write_bundle(const ReportBundle& bundle, const ExperimentConfig& cfg, const std::filesystem::path& dir);

} // namespace vlp
