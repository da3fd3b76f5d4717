#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include <sys/wait.h>

#include "testutil.hpp"

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args, const std::string& log_path) {
    std::string cmd = std::string(CHAINNET_CLI_PATH) + " " + args + " > " +
                      log_path + " 2>&1";
    int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("help and bad invocations use the expected exit codes") {
    TempDir tmp("chainnet_cli");
    std::string log = tmp.file("log");

    CHECK_EQ(run_cli("--help", log), 0);
    std::string help = read_file(log);
    CHECK(help.find("run") != std::string::npos);
    CHECK(help.find("synth") != std::string::npos);

    CHECK_EQ(run_cli("", log), 1);                     // subcommand required
    CHECK_EQ(run_cli("run --bogus-flag x", log), 1);   // unknown option
    CHECK_EQ(run_cli("run", log), 1);                  // missing required options
}

TEST_CASE("synth then run produces a bundle") {
    TempDir tmp("chainnet_cli");
    std::string log = tmp.file("log");
    std::string chain = tmp.file("chain.csv");

    int rc = run_cli("synth --out " + chain +
                         " --seed 9 --years 2 --tx-per-year 250"
                         " --blocks-per-year 30 --pool 80",
                     log);
    CHECK_EQ(rc, 0);
    CHECK(read_file(log).find("synth:") != std::string::npos);
    CHECK(fs::exists(chain));

    std::string out = tmp.file("bundle");
    rc = run_cli("run --input " + chain + " --out " + out + " --top-k 5", log);
    CHECK_EQ(rc, 0);
    for (const char* name : {"metrics.csv", "metrics.json", "coverage.csv",
                             "rich_sets.csv", "union_growth.csv", "run_config.txt",
                             "ledger_2009.csv", "ledger_2010.csv"}) {
        CHECK(fs::exists(out + "/" + std::string(name)));
    }
    std::string echo = read_file(out + "/run_config.txt");
    CHECK(echo.find("top_k=5") != std::string::npos);
    CHECK(echo.find("years_observed=2009-2010") != std::string::npos);

    // a single-year bound restricts the bundle
    std::string out10 = tmp.file("bundle10");
    rc = run_cli("run --input " + chain + " --out " + out10 + " --years 2010", log);
    CHECK_EQ(rc, 0);
    CHECK(fs::exists(out10 + "/ledger_2010.csv"));
    CHECK_FALSE(fs::exists(out10 + "/ledger_2009.csv"));
}

TEST_CASE("error kinds map to distinct exit codes") {
    TempDir tmp("chainnet_cli");
    std::string log = tmp.file("log");
    std::string chain = tmp.file("chain.csv");
    REQUIRE_EQ(run_cli("synth --out " + chain + " --seed 3 --years 1"
                       " --tx-per-year 50 --blocks-per-year 10 --pool 30",
                       log),
               0);

    // config error: empty year range
    int rc = run_cli("run --input " + chain + " --out " + tmp.file("o1") +
                         " --years 2011-2010",
                     log);
    CHECK_EQ(rc, 1);
    CHECK(read_file(log).find("config error:") != std::string::npos);

    // config error: unparseable year range
    rc = run_cli("run --input " + chain + " --out " + tmp.file("o2") +
                     " --years 20xx",
                 log);
    CHECK_EQ(rc, 1);

    // io error: missing input
    rc = run_cli("run --input " + tmp.file("absent.csv") + " --out " +
                     tmp.file("o3"),
                 log);
    CHECK_EQ(rc, 2);
    CHECK(read_file(log).find("i/o error:") != std::string::npos);

    // data error: malformed row
    std::string bad = tmp.file("bad.csv");
    write_file(bad,
               "block_number,transaction_id,is_coinbase,input_address_id,"
               "output_address_id,value,timestamp\n"
               "1,t1,0,A,B,notanumber,2009-01-01 00:00:00\n");
    rc = run_cli("run --input " + bad + " --out " + tmp.file("o4"), log);
    CHECK_EQ(rc, 3);
    CHECK(read_file(log).find("data error:") != std::string::npos);

    // config error: unknown synth mode
    rc = run_cli("synth --out " + tmp.file("c2.csv") + " --mode sideways", log);
    CHECK_EQ(rc, 1);
    CHECK(read_file(log).find("config error:") != std::string::npos);
}

TEST_CASE("a config file seeds options and the command line overrides it") {
    TempDir tmp("chainnet_cli");
    std::string log = tmp.file("log");
    std::string chain = tmp.file("chain.csv");
    REQUIRE_EQ(run_cli("synth --out " + chain + " --seed 4 --years 1"
                       " --tx-per-year 100 --blocks-per-year 12 --pool 40",
                       log),
               0);

    std::string ini = tmp.file("run.ini");
    write_file(ini, "[run]\ninput=" + chain + "\nout=" + tmp.file("fromcfg") +
                        "\ntop-k=3\n");
    int rc = run_cli("--config " + ini + " run", log);
    CHECK_EQ(rc, 0);
    std::string echo = read_file(tmp.file("fromcfg") + "/run_config.txt");
    CHECK(echo.find("top_k=3") != std::string::npos);

    rc = run_cli("--config " + ini + " run --out " + tmp.file("override") +
                     " --top-k 7",
                 log);
    CHECK_EQ(rc, 0);
    echo = read_file(tmp.file("override") + "/run_config.txt");
    CHECK(echo.find("top_k=7") != std::string::npos);
}
