#include "pairlearn/csv_io.hpp"

#include <cstdio>
#include <fstream>

#include "pairlearn/error.hpp"

namespace pairlearn {

void write_metrics_csv(const MetricsReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FormatError("metrics CSV: cannot open '" + path + "' for writing");
    out << "epoch,loss,accuracy,nmi\n";
    char buf[160];
    for (const MetricsRow& row : report.rows) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", row.epoch, row.loss,
                      row.accuracy, row.nmi_value);
        out << buf;
    }
    if (!out) throw FormatError("metrics CSV: write failed for '" + path + "'");
}

} // namespace pairlearn
