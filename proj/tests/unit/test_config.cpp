#include <doctest.h>

#include <string>

#include "ehsim/config.hpp"
#include "ehsim/errors.hpp"
#include "ehsim/presets.hpp"

using namespace ehsim;

TEST_CASE("empty config gives the documented defaults") {
    const ExperimentConfig cfg = parse_config_text("");
    CHECK(cfg.nodes == 50);
    CHECK(cfg.subspace_dim == 6);
    CHECK(cfg.amplitude == 1.0);
    CHECK(cfg.noise_var == 1e-4);
    CHECK(cfg.radio.slot_s == 1e-3);
    CHECK(cfg.radio.max_bits == 4);
    CHECK(cfg.radio.ber == 1e-4);
    CHECK(cfg.radio.noise_figure == 10.0);
    CHECK(cfg.radio.system_const == 1e-3);
    CHECK(cfg.radio.carrier_hz == 1e7);
    CHECK(cfg.worst_bmse_db == -2.0);
    CHECK(cfg.emax_percentile == 0.05);
}

TEST_CASE("errors name the key and line") {
    try {
        parse_config_text("[sim]\nhorizon = -1\n");
        FAIL("expected config_error");
    } catch (const config_error& e) {
        const std::string what = e.what();
        CHECK(what.find("horizon") != std::string::npos);
        CHECK(what.find("line 2") != std::string::npos);
    }

    try {
        parse_config_text("[sim]\n\nmystery_key = 3\n");
        FAIL("expected config_error");
    } catch (const config_error& e) {
        const std::string what = e.what();
        CHECK(what.find("mystery_key") != std::string::npos);
        CHECK(what.find("line 3") != std::string::npos);
    }

    CHECK_THROWS_AS(parse_config_text("[radio]\nber = nope\n"), config_error);
    CHECK_THROWS_AS(parse_config_text("[radio]\nber = 2.0\n"), config_error);
    CHECK_THROWS_AS(parse_config_text("no_equals_sign\n"), config_error);
}

TEST_CASE("comments and blank lines are ignored") {
    const ExperimentConfig cfg = parse_config_text(
        "# leading comment\n"
        "[network]\n"
        "nodes = 12   # trailing comment\n"
        "\n"
        "; alt comment style\n"
        "subspace_dim = 4\n");
    CHECK(cfg.nodes == 12);
    CHECK(cfg.subspace_dim == 4);
}

TEST_CASE("config round-trips through its text form") {
    ExperimentConfig cfg = parse_config_text("");
    cfg.nodes = 10;
    cfg.subspace_dim = 3;
    cfg.controller = ControllerKind::alg3;
    cfg.gamma_db = -15.5;
    cfg.mu_norm = 0.321;
    cfg.rmax_scale = 3.75;
    cfg.arrival_kind = ArrivalProcess::Kind::on_off;
    cfg.seed = 123456789;
    cfg.horizon = 777;
    cfg.burn_in = 111;
    cfg.battery_init = ExperimentConfig::BatteryInit::vartheta_half;
    cfg.radio.rayleigh_fading = false;

    const ExperimentConfig back = parse_config_text(config_text(cfg));
    CHECK(config_text(back) == config_text(cfg));
    CHECK(back.nodes == cfg.nodes);
    CHECK(back.gamma_db == cfg.gamma_db);
    CHECK(back.mu_norm == cfg.mu_norm);
    CHECK(back.seed == cfg.seed);
    CHECK(back.arrival_kind == cfg.arrival_kind);
    CHECK(back.battery_init == cfg.battery_init);
}

TEST_CASE("cross-field validation") {
    CHECK_THROWS_AS(parse_config_text("[network]\nnodes = 4\nsubspace_dim = 5\n"),
                    config_error);
    CHECK_THROWS_AS(parse_config_text("[sim]\nhorizon = 10\nburn_in = 11\n"), config_error);
    CHECK_THROWS_AS(parse_config_file("/nonexistent/path.cfg"), config_error);
}

TEST_CASE("preset catalog is complete and named as documented") {
    const auto& cat = preset_catalog();
    CHECK(cat.size() == 10);
    for (const char* name :
         {"fig1_bmse_vs_v", "fig2_active_vs_v", "fig3_battery_vs_v", "fig4_onoff",
          "fig5_energy_vs_v", "fig6_active_vs_v_g", "fig7_battery_vs_t",
          "fig8_bmse_vs_t_alg2", "fig9_bmse_vs_t_alg3", "fig10_active_vs_t_mu"}) {
        CHECK(find_preset(name) != nullptr);
    }
    CHECK(find_preset("fig99_missing") == nullptr);
}
