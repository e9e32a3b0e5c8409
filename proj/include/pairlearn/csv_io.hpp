#pragma once

#include <string>
#include <vector>

namespace pairlearn {

struct MetricsRow {
    int epoch = 0;
    double loss = 0.0;
    double accuracy = 0.0;  // NaN when no labels were available
    double nmi_value = 0.0; // NaN when no labels were available
};

// Per-epoch training metrics, serialized with header "epoch,loss,accuracy,nmi".
struct MetricsReport {
    std::vector<MetricsRow> rows;
};

void write_metrics_csv(const MetricsReport& report, const std::string& path);

} // namespace pairlearn
