#include "pspp/report.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "pspp/csv.hpp"

namespace pspp {

using nlohmann::json;
using nlohmann::ordered_json;

ReportFormat report_format_from_name(const std::string& name) {
    if (name == "json") return ReportFormat::Json;
    if (name == "csv") return ReportFormat::Csv;
    if (name == "both") return ReportFormat::Both;
    throw config_error("unknown report format '" + name + "'");
}

namespace {

ordered_json to_json(const Vector& v) {
    ordered_json arr = ordered_json::array();
    for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

ordered_json to_json(const ForecastMetrics& fm) {
    ordered_json j;
    j["msse"] = to_json(fm.msse);
    j["mse"] = to_json(fm.mse);
    j["mae"] = to_json(fm.mae);
    j["me"] = to_json(fm.me);
    return j;
}

const char* model_name(ModelKind m) {
    return m == ModelKind::DLM1 ? "DLM1" : "DLM3";
}

// vech labels V11, V21, ..., for the series export header
std::vector<std::string> vhat_labels(Index p) {
    std::vector<std::string> labels;
    for (Index j = 0; j < p; ++j) {
        for (Index i = j; i < p; ++i) {
            labels.push_back("vhat" + std::to_string(i + 1) +
                             std::to_string(j + 1));
        }
    }
    return labels;
}

}  // namespace

std::vector<std::string> emit_report(const Report& report,
                                     const std::string& stem,
                                     ReportFormat format) {
    std::vector<std::string> written;
    const bool want_json =
        format == ReportFormat::Json || format == ReportFormat::Both;
    const bool want_csv =
        format == ReportFormat::Csv || format == ReportFormat::Both;

    const TableReport tables = aggregate_tables(report.experiments);

    // series columns (shared by JSON and CSV so both agree exactly)
    const bool have_series = !report.series.empty();
    const Index p = have_series ? report.series.front().e.size() : 0;
    std::vector<std::string> series_header;
    std::vector<Vector> series_rows;
    if (have_series) {
        series_header.push_back("t");
        for (Index i = 0; i < p; ++i) {
            series_header.push_back("f" + std::to_string(i + 1));
        }
        for (Index i = 0; i < p; ++i) {
            series_header.push_back("e" + std::to_string(i + 1));
        }
        for (Index i = 0; i < p; ++i) {
            series_header.push_back("estd" + std::to_string(i + 1));
        }
        const bool have_vhat = report.series.front().v_hat.rows() == p;
        if (have_vhat) {
            for (const auto& l : vhat_labels(p)) series_header.push_back(l);
            if (p == 2) series_header.push_back("corr");
        }
        for (std::size_t t = 0; t < report.series.size(); ++t) {
            const StepReport& s = report.series[t];
            std::vector<double> row;
            row.push_back(static_cast<double>(t + 1));
            for (Index i = 0; i < p; ++i) row.push_back(s.f[i]);
            for (Index i = 0; i < p; ++i) row.push_back(s.e[i]);
            for (Index i = 0; i < p; ++i) row.push_back(s.e_std[i]);
            if (have_vhat) {
                const Vector vh = vech(s.v_hat);
                for (Index i = 0; i < vh.size(); ++i) row.push_back(vh[i]);
                if (p == 2) {
                    row.push_back(s.v_hat(0, 1) /
                                  std::sqrt(s.v_hat(0, 0) * s.v_hat(1, 1)));
                }
            }
            Vector r(static_cast<Index>(row.size()));
            for (std::size_t i = 0; i < row.size(); ++i) {
                r[static_cast<Index>(i)] = row[i];
            }
            series_rows.push_back(std::move(r));
        }
    }

    if (want_json) {
        ordered_json j;
        j["config"] = report.config_echo;
        j["seed"] = report.seed;

        ordered_json metrics = ordered_json::object();
        for (const auto& row : tables.metric_rows) {
            metrics[std::string(family_name(row.family)) + "." +
                    model_name(row.model)] = to_json(row.metrics);
        }
        if (report.series_metrics) {
            metrics["series"] = to_json(*report.series_metrics);
        }
        j["metrics"] = metrics;

        ordered_json snaps = ordered_json::array();
        for (const auto& row : tables.snapshot_rows) {
            ordered_json s;
            s["family"] = family_name(row.family);
            s["entry"] = row.entry;
            s["truth"] = row.truth;
            s["times"] = row.times;
            s["estimates"] = row.estimates;
            snaps.push_back(s);
        }
        j["snapshots"] = snaps;

        ordered_json series = ordered_json::object();
        if (have_series) {
            for (std::size_t c = 0; c < series_header.size(); ++c) {
                ordered_json col = ordered_json::array();
                for (const auto& row : series_rows) {
                    col.push_back(row[static_cast<Index>(c)]);
                }
                series[series_header[c]] = col;
            }
        }
        j["series"] = series;

        const std::string path = stem + ".json";
        write_file_atomic(path, j.dump(2) + "\n");
        written.push_back(path);
    }

    if (want_csv) {
        if (!tables.metric_rows.empty()) {
            std::ostringstream os;
            os << "family,model,msse1,msse2,mse1,mse2,mae1,mae2,me1,me2\n";
            for (const auto& row : tables.metric_rows) {
                os << family_name(row.family) << ',' << model_name(row.model);
                const ForecastMetrics& fm = row.metrics;
                for (const Vector* v : {&fm.msse, &fm.mse, &fm.mae, &fm.me}) {
                    for (Index i = 0; i < v->size(); ++i) {
                        os << ',' << format_double((*v)[i]);
                    }
                }
                os << '\n';
            }
            const std::string path = stem + "_metrics.csv";
            write_file_atomic(path, os.str());
            written.push_back(path);
        }
        if (!tables.snapshot_rows.empty()) {
            std::ostringstream os;
            os << "family,entry,truth";
            for (int t : tables.snapshot_rows.front().times) {
                os << ",t" << t;
            }
            os << '\n';
            for (const auto& row : tables.snapshot_rows) {
                os << family_name(row.family) << ',' << row.entry << ','
                   << format_double(row.truth);
                for (double e : row.estimates) os << ',' << format_double(e);
                os << '\n';
            }
            const std::string path = stem + "_snapshots.csv";
            write_file_atomic(path, os.str());
            written.push_back(path);
        }
        if (have_series) {
            const std::string path = stem + "_series.csv";
            write_csv(path, series_header, series_rows);
            written.push_back(path);
        }
    }
    return written;
}

}  // namespace pspp
