#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "chainnet/flow.hpp"
#include "chainnet/money.hpp"
#include "chainnet/snapshot.hpp"

namespace chainnet {

struct RunConfig {
    std::vector<std::string> inputs;
    std::string out_dir;
    int year_min = 0;  // 0 on both bounds: derive the range from the data
    int year_max = 0;
    Quanta dust_threshold = kDustThresholdQuanta;
    bool filter = true;
    bool strip_self_loops = true;
    std::size_t top_k = 10;
    double top_percent = 0.01;
    std::size_t clustering_sample = 0;  // 0: exact
    std::uint64_t clustering_seed = 42;
    std::string labels_path;
    std::string dict_path;  // optional persistent address dictionary
    unsigned threads = 1;

    void validate() const;  // throws ConfigError
};

// 2009-2011 / 2012-2014 / 2015 onward. Throws std::invalid_argument before
// 2009.
std::string phase_of_year(int year);

// One year of ingested material: the unfiltered loop-preserving aggregation
// plus per-address fee debits and coinbase credits.
struct YearData {
    int year = 0;
    YearSnapshot raw_loops;
    std::vector<std::pair<NodeId, Quanta>> fees;      // sorted by address
    std::vector<std::pair<NodeId, Quanta>> coinbase;  // sorted by address
};

// Routes assembled transactions into per-year aggregations. Years outside
// the configured bounds are skipped (a bound of 0 is open).
class YearCollector {
public:
    YearCollector(int year_min = 0, int year_max = 0);
    ~YearCollector();

    void consume(const TransactionGroup& g);
    std::map<int, YearData> finish();

private:
    struct YearState;
    int year_min_, year_max_;
    std::map<int, std::unique_ptr<YearState>> years_;
    bool finished_ = false;
};

// Full run: ingest -> flows -> snapshots -> metrics -> ledgers -> bundle in
// cfg.out_dir. Output bytes depend only on the inputs and the non-concurrency
// configuration, never on cfg.threads.
void run_pipeline(const RunConfig& cfg);

}  // namespace chainnet
