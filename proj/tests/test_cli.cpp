// Drives the installed command-line binary end to end; the path comes in
// through the PSPP_CLI environment variable set by CTest.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include <pspp/config.hpp>
#include <pspp/csv.hpp>

namespace fs = std::filesystem;

namespace {

std::string cli() {
    const char* path = std::getenv("PSPP_CLI");
    REQUIRE(path != nullptr);
    return path;
}

int run(const std::string& args) {
    const std::string command = cli() + " " + args + " > /dev/null 2>&1";
    const int status = std::system(command.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct TempDir {
    fs::path dir;
    TempDir() : dir(fs::temp_directory_path() / "pspp_cli_test") {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~TempDir() { fs::remove_all(dir); }
    std::string operator/(const std::string& name) const {
        return (dir / name).string();
    }
};

}  // namespace

TEST_CASE("simulate is reproducible and feeds filter") {
    TempDir tmp;
    const std::string csv_a = tmp / "a.csv";
    const std::string csv_b = tmp / "b.csv";
    CHECK(run("simulate --family LL --length 60 --seed 11 --out " + csv_a) ==
          0);
    CHECK(run("simulate --family LL --length 60 --seed 11 --out " + csv_b) ==
          0);
    CHECK(slurp(csv_a) == slurp(csv_b));

    const auto rows = pspp::ingest_csv(csv_a);
    CHECK(rows.size() == 60);
    CHECK(rows.front().size() == 2);

    const std::string stem = tmp / "run";
    CHECK(run("filter --data " + csv_a + " --mode matrix --format both --out " +
              stem) == 0);
    CHECK(fs::exists(stem + ".json"));
    CHECK(fs::exists(stem + "_series.csv"));

    // byte-identical when the identical run is repeated
    const std::string json_first = slurp(stem + ".json");
    const std::string series_first = slurp(stem + "_series.csv");
    CHECK(run("filter --data " + csv_a + " --mode matrix --format both --out " +
              stem) == 0);
    CHECK(slurp(stem + ".json") == json_first);
    CHECK(slurp(stem + "_series.csv") == series_first);
}

TEST_CASE("flags override config which overrides defaults") {
    TempDir tmp;
    const std::string cfg_path = tmp / "run.cfg";
    {
        std::ofstream out(cfg_path);
        out << "[model]\nfamily = LL\n[run]\nseed = 1\nlength = 30\n";
    }
    const std::string csv = tmp / "series.csv";
    CHECK(run("simulate --config " + cfg_path + " --seed 2 --out " + csv) ==
          0);

    // the same series regenerated without the config but with the same
    // effective parameters
    const std::string csv2 = tmp / "series2.csv";
    CHECK(run("simulate --family LL --length 30 --seed 2 --out " + csv2) == 0);
    CHECK(slurp(csv) == slurp(csv2));
}

TEST_CASE("exit codes distinguish config, data and numerical failures") {
    TempDir tmp;
    CHECK(run("simulate") == 2);  // no family
    CHECK(run("filter --data " + (tmp / "missing.csv")) == 2);

    const std::string bad_csv = tmp / "bad.csv";
    {
        std::ofstream out(bad_csv);
        out << "y1,y2\n1,2\nnope,4\n";
    }
    CHECK(run("filter --data " + bad_csv) == 3);

    const std::string bad_cfg = tmp / "bad.cfg";
    {
        std::ofstream out(bad_cfg);
        out << "[model]\ndiscounts = [1.5]\n";
    }
    CHECK(run("simulate --config " + bad_cfg) == 2);
}

TEST_CASE("reproduce-tables emits a machine-readable report") {
    TempDir tmp;
    const std::string stem = tmp / "tables";
    CHECK(run("reproduce-tables --families LL --replications 4 --length 40 "
              "--snapshots 20 40 --seed 9 --format json --out " +
              stem) == 0);
    const auto j = nlohmann::json::parse(slurp(stem + ".json"));
    CHECK(j["metrics"].contains("LL.DLM1"));
    CHECK(j["metrics"].contains("LL.DLM3"));
    CHECK(j["snapshots"].size() == 3);
    CHECK(j["seed"] == 9);

    // repeating the identical experiment reproduces the bytes
    const std::string first = slurp(stem + ".json");
    CHECK(run("reproduce-tables --families LL --replications 4 --length 40 "
              "--snapshots 20 40 --seed 9 --format json --out " +
              stem) == 0);
    CHECK(slurp(stem + ".json") == first);
    // the echoed config reproduces the run configuration
    const pspp::RunConfig echoed =
        pspp::parse_config(j["config"].get<std::string>());
    CHECK(echoed.replications == 4);
    CHECK(echoed.length == 40);
}

TEST_CASE("discount-mode trend filter over a CSV runs end to end") {
    TempDir tmp;
    const std::string csv = tmp / "trend.csv";
    CHECK(run("simulate --family LT --length 50 --seed 23 --out " + csv) == 0);

    const std::string cfg_path = tmp / "trend.cfg";
    {
        std::ofstream out(cfg_path);
        out << "[model]\n"
               "family = LT\n"
               "discounts = [0.7, 0.9]\n"
               "[priors]\n"
               "m0 = [0, 0]\n"
               "p0 = [[1, 0], [0, 1]]\n"
               "v0 = [[1, 0], [0, 1]]\n"
               "eta0 = 8\n"
               "[output]\n"
               "format = both\n";
    }
    const std::string stem = tmp / "trend_run";
    CHECK(run("filter --config " + cfg_path + " --data " + csv + " --out " +
              stem) == 0);
    CHECK(fs::exists(stem + ".json"));
    const auto j = nlohmann::json::parse(slurp(stem + ".json"));
    CHECK(j["series"]["vhat11"].size() == 50);
}

TEST_CASE("postulate-check and sop-compare run clean") {
    CHECK(run("postulate-check --example gaussian --draws 8000 --bins 4 "
              "--seed 3") == 0);
    CHECK(run("sop-compare --cases 50 --seed 3") == 0);
}
