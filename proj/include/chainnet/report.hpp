#pragma once

#include <map>
#include <string>
#include <vector>

namespace chainnet {

// Canonical numeric formatting for all report files; NaN prints as "nan".
std::string format_double(double v);

struct MetricRow {
    int year = 0;
    std::string metric;
    std::string variant;  // empty for scalar metrics
    double value = 0.0;
};

// Accumulates per-year metric rows and writes them sorted by
// (year, metric, variant), so emission order never depends on compute order.
class MetricsReport {
public:
    void add(int year, std::string metric, std::string variant, double value);
    void set_phase(int year, std::string phase);

    const std::vector<MetricRow>& rows() const { return rows_; }
    const std::string& phase(int year) const;

    void write_csv(const std::string& path) const;
    void write_json(const std::string& path) const;

private:
    std::vector<MetricRow> sorted_rows() const;

    std::vector<MetricRow> rows_;
    std::map<int, std::string> phases_;
};

}  // namespace chainnet
