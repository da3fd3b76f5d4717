#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chainnet/error.hpp"
#include "chainnet/log.hpp"
#include "chainnet/money.hpp"
#include "chainnet/pipeline.hpp"
#include "chainnet/synth.hpp"

namespace {

using namespace chainnet;

void parse_year_range(const std::string& text, int& lo, int& hi) {
    if (text.empty()) return;
    auto dash = text.find('-');
    auto to_year = [&](const std::string& part) {
        if (part.empty() || part.size() > 5)
            throw ConfigError("cannot parse year range '" + text + "'");
        int v = 0;
        for (char c : part) {
            if (c < '0' || c > '9')
                throw ConfigError("cannot parse year range '" + text + "'");
            v = v * 10 + (c - '0');
        }
        return v;
    };
    if (dash == std::string::npos) {
        lo = hi = to_year(text);
    } else {
        lo = to_year(text.substr(0, dash));
        hi = to_year(text.substr(dash + 1));
    }
}

int run_main(int argc, char** argv) {
    CLI::App app{"chainnet: address-network analysis for UTXO chain extracts"};
    app.require_subcommand(1);
    // must precede the subcommand name on the command line
    app.set_config("--config", "",
                   "key=value file with [run] / [synth] sections; command line wins");

    RunConfig rc;
    std::string years_arg;
    std::int64_t dust = static_cast<std::int64_t>(kDustThresholdQuanta);
    bool no_filter = false, keep_loops = false;

    auto* run = app.add_subcommand("run", "ingest extracts and write a report bundle");
    run->add_option("--input,-i", rc.inputs,
                    "input extract file(s), plain or gzip CSV/TSV")
        ->delimiter(',')
        ->required();
    run->add_option("--out,-o", rc.out_dir, "output bundle directory")->required();
    run->add_option("--years", years_arg,
                    "calendar year range, e.g. 2009-2012 (default: from data)");
    run->add_option("--dust-threshold", dust,
                    "dust filter threshold in quanta (1e-4 satoshi)");
    run->add_flag("--no-filter", no_filter, "skip the dust filter");
    run->add_flag("--keep-self-loops", keep_loops,
                  "keep self-loops in graph snapshots");
    run->add_option("--top-k", rc.top_k, "rich-set size");
    run->add_option("--top-percent", rc.top_percent, "top node fraction for shares");
    run->add_option("--clustering-sample", rc.clustering_sample,
                    "clustering node sample size (0: exact)");
    run->add_option("--seed", rc.clustering_seed, "clustering sample seed");
    run->add_option("--labels", rc.labels_path, "address label file (id<TAB>name)");
    run->add_option("--dict", rc.dict_path, "persistent address dictionary file");
    run->add_option("--threads", rc.threads, "worker threads for per-year metrics");

    SynthConfig sc;
    std::string mode_name = "preferential";
    std::string synth_out;
    std::int64_t reward = sc.initial_reward_sats;

    auto* synth = app.add_subcommand("synth", "generate a synthetic chain extract");
    synth->add_option("--out,-o", synth_out, "output CSV path")->required();
    synth->add_option("--seed", sc.seed, "generator seed");
    synth->add_option("--start-year", sc.start_year, "first calendar year");
    synth->add_option("--years", sc.years, "number of years");
    synth->add_option("--tx-per-year", sc.tx_per_year, "spend transactions per year");
    synth->add_option("--blocks-per-year", sc.blocks_per_year, "blocks per year");
    synth->add_option("--mode", mode_name, "receiver wiring: uniform | preferential");
    synth->add_option("--pool", sc.initial_pool, "initial address pool size");
    synth->add_option("--growth", sc.pool_growth, "target yearly pool growth rate");
    synth->add_option("--dust-fraction", sc.dust_fraction,
                      "share of spends that are one-off dust sends");
    synth->add_option("--fee-per-mille", sc.fee_per_mille,
                      "fee rate in thousandths of the spend");
    synth->add_option("--reward-sats", reward, "initial block reward in satoshi");
    synth->add_option("--halving-blocks", sc.halving_interval_blocks,
                      "blocks between reward halvings");
    synth->add_option("--miners", sc.miner_count, "miner address count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (run->parsed()) {
        parse_year_range(years_arg, rc.year_min, rc.year_max);
        rc.dust_threshold = static_cast<Quanta>(dust);
        rc.filter = !no_filter;
        rc.strip_self_loops = !keep_loops;
        run_pipeline(rc);
        return 0;
    }

    if (mode_name == "uniform") {
        sc.mode = SynthConfig::Mode::uniform;
    } else if (mode_name == "preferential") {
        sc.mode = SynthConfig::Mode::preferential;
    } else {
        throw ConfigError("unknown synth mode '" + mode_name + "'");
    }
    sc.initial_reward_sats = reward;
    auto stats = write_chain_csv(sc, synth_out);
    log_info("synth: " + std::to_string(stats.blocks) + " blocks, " +
             std::to_string(stats.transactions) + " spends, " +
             std::to_string(stats.addresses) + " addresses -> " + synth_out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_main(argc, argv);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const IoError& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return 2;
    } catch (const DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
