#include "chainnet/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <json.hpp>

#include "chainnet/error.hpp"

namespace chainnet {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void MetricsReport::add(int year, std::string metric, std::string variant,
                        double value) {
    rows_.push_back({year, std::move(metric), std::move(variant), value});
}

void MetricsReport::set_phase(int year, std::string phase) {
    phases_[year] = std::move(phase);
}

const std::string& MetricsReport::phase(int year) const {
    auto it = phases_.find(year);
    if (it == phases_.end())
        throw std::invalid_argument("no phase recorded for year " +
                                    std::to_string(year));
    return it->second;
}

std::vector<MetricRow> MetricsReport::sorted_rows() const {
    std::vector<MetricRow> rows = rows_;
    std::sort(rows.begin(), rows.end(), [](const MetricRow& a, const MetricRow& b) {
        if (a.year != b.year) return a.year < b.year;
        if (a.metric != b.metric) return a.metric < b.metric;
        return a.variant < b.variant;
    });
    return rows;
}

void MetricsReport::write_csv(const std::string& path) const {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw IoError("cannot open " + path + " for writing");
    std::fputs("year,metric,variant,value,phase\n", f);
    for (const MetricRow& r : sorted_rows()) {
        auto ph = phases_.find(r.year);
        std::string line = std::to_string(r.year) + "," + r.metric + "," + r.variant +
                           "," + format_double(r.value) + "," +
                           (ph == phases_.end() ? "" : ph->second) + "\n";
        std::fputs(line.c_str(), f);
    }
    if (std::fclose(f) != 0) throw IoError("write error on " + path);
}

void MetricsReport::write_json(const std::string& path) const {
    nlohmann::ordered_json doc;
    for (const MetricRow& r : sorted_rows()) {
        std::string year = std::to_string(r.year);
        if (!doc.contains(year)) {
            auto ph = phases_.find(r.year);
            doc[year]["phase"] = ph == phases_.end() ? "" : ph->second;
            doc[year]["metrics"] = nlohmann::ordered_json::object();
        }
        std::string key = r.variant.empty() ? r.metric : r.metric + "." + r.variant;
        if (std::isnan(r.value))
            doc[year]["metrics"][key] = nullptr;
        else
            doc[year]["metrics"][key] = r.value;
    }
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw IoError("cannot open " + path + " for writing");
    std::string text = doc.dump(2);
    text.push_back('\n');
    std::fputs(text.c_str(), f);
    if (std::fclose(f) != 0) throw IoError("write error on " + path);
}

}  // namespace chainnet
