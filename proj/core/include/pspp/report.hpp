#pragma once

#include <string>
#include <vector>

#include "pspp/config.hpp"
#include "pspp/filter.hpp"
#include "pspp/simulate.hpp"

namespace pspp {

enum class ReportFormat { Json, Csv, Both };

ReportFormat report_format_from_name(const std::string& name);

// Everything a run wants to persist; emitted deterministically so the same
// run produces byte-identical files.
struct Report {
    std::string config_echo;  // canonical serialized config
    std::uint64_t seed = 0;

    // experiment output (reproduce-tables)
    std::vector<ExperimentResult> experiments;

    // filter-session output: per-step series
    std::vector<StepReport> series;
    std::optional<ForecastMetrics> series_metrics;
};

// Writes <stem>.json and/or <stem>_metrics.csv, <stem>_snapshots.csv,
// <stem>_series.csv next to it; returns the paths written.  The JSON top
// level carries config, seed, metrics, snapshots, series.
std::vector<std::string> emit_report(const Report& report,
                                     const std::string& stem,
                                     ReportFormat format);

}  // namespace pspp
