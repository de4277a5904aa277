#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace starbsde {

/// One reported quantity of an experiment. Deterministic for a fixed config
/// and seed; wall_ms is 0 unless timing collection is switched on, so that
/// report files are byte-identical across runs.
struct ReportRow {
    std::string experiment_id;
    std::string task;
    std::string quantity;
    double value = 0.0;
    double tolerance = 0.0;  // 0 for purely informational rows
    bool pass = true;
    std::int64_t wall_ms = 0;
};

/// CSV schema: experiment_id,task,quantity,value,tolerance,pass,wall_ms.
/// Header always present; '.' decimal point, '\n' newlines, doubles with 17
/// significant digits (exact round trip).
std::string report_to_csv(const std::vector<ReportRow>& rows);

/// Aligned table with a PASS/FAIL column.
std::string report_to_human(const std::vector<ReportRow>& rows);

/// Shortest-exact formatting used for the value and tolerance columns.
std::string format_double(double v);

} // namespace starbsde
