#include "starbsde/report.hpp"

#include <cstdio>
#include <sstream>

namespace starbsde {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string report_to_csv(const std::vector<ReportRow>& rows) {
    std::string out = "experiment_id,task,quantity,value,tolerance,pass,wall_ms\n";
    for (const ReportRow& r : rows) {
        out += r.experiment_id;
        out += ',';
        out += r.task;
        out += ',';
        out += r.quantity;
        out += ',';
        out += format_double(r.value);
        out += ',';
        out += format_double(r.tolerance);
        out += ',';
        out += r.pass ? '1' : '0';
        out += ',';
        out += std::to_string(r.wall_ms);
        out += '\n';
    }
    return out;
}

std::string report_to_human(const std::vector<ReportRow>& rows) {
    std::size_t id_w = 13, task_w = 4, qty_w = 8;
    for (const ReportRow& r : rows) {
        id_w = std::max(id_w, r.experiment_id.size());
        task_w = std::max(task_w, r.task.size());
        qty_w = std::max(qty_w, r.quantity.size());
    }
    std::ostringstream os;
    char line[512];
    std::snprintf(line, sizeof(line), "%-*s  %-*s  %-*s  %22s  %12s  %6s  %8s\n",
                  static_cast<int>(id_w), "experiment_id", static_cast<int>(task_w), "task",
                  static_cast<int>(qty_w), "quantity", "value", "tolerance", "status",
                  "wall_ms");
    os << line;
    for (const ReportRow& r : rows) {
        std::snprintf(line, sizeof(line), "%-*s  %-*s  %-*s  %22s  %12s  %6s  %8lld\n",
                      static_cast<int>(id_w), r.experiment_id.c_str(),
                      static_cast<int>(task_w), r.task.c_str(), static_cast<int>(qty_w),
                      r.quantity.c_str(), format_double(r.value).c_str(),
                      format_double(r.tolerance).c_str(), r.pass ? "PASS" : "FAIL",
                      static_cast<long long>(r.wall_ms));
        os << line;
    }
    return os.str();
}

} // namespace starbsde
