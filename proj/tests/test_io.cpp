#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "lgmd/campaign.hpp"
#include "lgmd/errors.hpp"
#include "lgmd/io.hpp"

using namespace lgmd;

TEST_CASE("network config round-trips through JSON") {
    NetworkConfig cfg;
    cfg.variant = Variant::AP;
    cfg.params = ParamVector::reference(Variant::AP);
    cfg.topology = Topology::standard(16, 16, 4);
    cfg.clamp_c = 0.25;
    cfg.detector.threshold = 9;
    cfg.score.k = 2.0;

    const auto text = network_config_json(cfg);
    const auto back = parse_network_config(text);
    CHECK(back.variant == Variant::AP);
    CHECK(back.params == cfg.params);
    CHECK(back.topology.width == 16);
    CHECK(back.topology.ring_b.size() == 16);
    CHECK(back.clamp_c == 0.25);
    CHECK(back.detector.threshold == 9);
    CHECK(back.score.k == 2.0);
    CHECK(config_hash(back) == config_hash(cfg));
}

TEST_CASE("config hash tracks content") {
    NetworkConfig a, b;
    b.clamp_c = 0.75;
    CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("out-of-bounds literals load unclipped") {
    // The published adaptation values sit outside the optimisation bounds;
    // explicit configs must accept them as written.
    NetworkConfig cfg;
    cfg.variant = Variant::A;
    cfg.params = ParamVector::reference(Variant::A);
    const auto back = parse_network_config(network_config_json(cfg));
    CHECK(back.params.adaptation->a == 0.79);
    CHECK(back.params.adaptation->b == 14.51);
}

TEST_CASE("variant without its block is a config error") {
    NetworkConfig cfg;
    cfg.variant = Variant::P;
    cfg.params = ParamVector::reference(Variant::LGMD);
    CHECK_THROWS_AS(parse_network_config(network_config_json(cfg)), ConfigError);
}

TEST_CASE("malformed JSON is a config error") {
    CHECK_THROWS_AS(parse_network_config("{ not json"), ConfigError);
    CHECK_THROWS_AS(parse_network_config("{\"params\": {\"tau_e\": 1}}"), ConfigError);
}

TEST_CASE("report serialisation carries the provenance fields") {
    FitnessReport r;
    r.f_acc = 12.5;
    r.confusion = {5, 1, 4, 0};
    r.metrics = compute_metrics(r.confusion);
    const auto text = report_json(r, 42, "deadbeef");
    CHECK(text.find("\"seed\": 42") != std::string::npos);
    CHECK(text.find("deadbeef") != std::string::npos);
    CHECK(text.find("f_acc") != std::string::npos);

    const auto row = report_csv_row(r);
    CHECK(row.find("12.5") == 0);
    CHECK(report_csv_header().starts_with("f_acc"));
}

TEST_CASE("campaign CSV is byte-stable") {
    CampaignResult result;
    result.log.push_back({0, {1.0, 2.0}, -3.5, -3.5});
    result.log.push_back({1, {1.5, 2.5}, -1.25, -1.25});
    std::ostringstream a, b;
    write_campaign_csv(a, result, Method::Sade, 7, {"x", "y"}, "cafe");
    write_campaign_csv(b, result, Method::Sade, 7, {"x", "y"}, "cafe");
    CHECK(a.str() == b.str());
    CHECK(a.str().find("eval_index,method,seed,fitness,best_so_far,x,y") != std::string::npos);
}
