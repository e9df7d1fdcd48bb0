#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "cfisac/config.hpp"
#include "cfisac/csv.hpp"

using namespace cfisac;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& content) {
        static int counter = 0;
        path = "cfisac_test_cfg_" + std::to_string(counter++) + ".tmp";
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("empty config file yields all defaults") {
    TempFile f("");
    const auto cfg = load_config(f.path);
    CHECK(cfg.fc_hz == 4e9);
    CHECK(cfg.delta_f_hz == 15e3);
    CHECK(cfg.m_subcarriers == 512);
    CHECK(cfg.n_symbols == 128);
    CHECK(cfg.n_tx_aps == 100);
    CHECK(cfg.n_rx_aps == 2);
    CHECK(cfg.n_users == 15);
    CHECK(cfg.antennas_per_ap == 4);
    CHECK(cfg.paths_per_link == 9);
    CHECK(cfg.max_speed_kmh == 300.0);
    CHECK(cfg.tau_max_s == 2.5e-6);
    CHECK(cfg.gamma_s_db == 3.0);
    CHECK(cfg.noise_figure_db == 7.0);
    CHECK(cfg.clutter_scaling == 0.3);
    CHECK(cfg.rcs_variance_m2 == 1.0);
    CHECK(cfg.ul_pilot_power_w == 0.2);
    CHECK(cfg.ul_power_coeff == 1.0);
    CHECK(cfg.dl_max_power_w == 1.0);
    CHECK(cfg.region_size_m == 1000.0);
    CHECK(cfg.hotspot_side_m == 15.0);
}

TEST_CASE("unknown keys are rejected by name") {
    TempFile f("foo = 3\n");
    try {
        load_config(f.path);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("foo") != std::string::npos);
    }
}

TEST_CASE("key-value parsing") {
    TempFile f(
        "# comment line\n"
        "m_subcarriers = 16\n"
        "n_symbols = 8   # trailing comment\n"
        "distinct_delays = false\n"
        "gamma_sweep_db = -10, -5, 0\n"
        "seed = 42\n");
    const auto cfg = load_config(f.path);
    CHECK(cfg.m_subcarriers == 16);
    CHECK(cfg.n_symbols == 8);
    CHECK_FALSE(cfg.distinct_delays);
    REQUIRE(cfg.gamma_sweep_db.size() == 3);
    CHECK(cfg.gamma_sweep_db[1] == -5.0);
    CHECK(cfg.seed == 42);
}

TEST_CASE("malformed values name the key") {
    TempFile f("m_subcarriers = lots\n");
    CHECK_THROWS_AS(load_config(f.path), ConfigError);
    TempFile g("shadowing = maybe\n");
    CHECK_THROWS_AS(load_config(g.path), ConfigError);
    TempFile h("m_subcarriers = 16.5\n");
    CHECK_THROWS_AS(load_config(h.path), ConfigError);
}

TEST_CASE("manifest round trip reproduces the resolved config") {
    TempFile f(
        "m_subcarriers = 32\n"
        "delta_f_hz = 30e3\n"
        "n_users = 4\n"
        "perfect_csi = true\n");
    const auto cfg = load_config(f.path);
    TempFile manifest(make_manifest(cfg, "test"));
    const auto cfg2 = load_config(manifest.path);
    CHECK(cfg.echo() == cfg2.echo());
}

TEST_CASE("config validation") {
    ExperimentConfig cfg;
    cfg.corr_coeff = 1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = ExperimentConfig{};
    cfg.pilot_len_sweep = {1, 2};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = ExperimentConfig{};
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("CSV quoting follows RFC 4180") {
    CHECK(csv::escape("plain") == "plain");
    CHECK(csv::escape("with,comma") == "\"with,comma\"");
    CHECK(csv::escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv::escape("line\nbreak") == "\"line\nbreak\"");
    csv::Writer w({"a", "b"});
    w.append_row({"1,5", "x"});
    CHECK(w.str() == "a,b\n\"1,5\",x\n");
}
