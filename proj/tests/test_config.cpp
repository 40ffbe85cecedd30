#include <doctest.h>

#include "tcgs/config.hpp"
#include "tcgs/report.hpp"

using namespace tcgs;
using nlohmann::json;

namespace {

json base_config()
{
    return json::parse(R"({
        "version": 1,
        "model": {"n": 2, "d": 2, "M": 4, "beta": 1.0,
                  "couplings": {"uniform": 0.2}},
        "filter": {"sigma_E": 1.0},
        "plan": {"L": 8, "S": 100, "delta": 0.1},
        "seed": 42
    })");
}

} // namespace

TEST_CASE("config accepts the documented schema")
{
    const ExperimentConfig cfg = ExperimentConfig::from_json(base_config());
    const ModelParams mp = cfg.model();
    CHECK(mp.n == 2);
    CHECK(mp.M == 4);
    CHECK(mp.couplings.get(0, 1) == 0.2);
    CHECK(cfg.filter().sigma_e == 1.0);
    CHECK(cfg.plan().L == 8);
    CHECK(cfg.seed() == 42);
    CHECK(cfg.config_hash != 0);
}

TEST_CASE("unknown keys are rejected with a pointer to the offender")
{
    json j = base_config();
    j["model"]["typo_key"] = 1;
    try {
        ExperimentConfig::from_json(j).model();
        FAIL("expected schema_error");
    } catch (const schema_error& err) {
        CHECK(std::string(err.what()).find("model.typo_key") != std::string::npos);
    }
    json root = base_config();
    root["unexpected"] = true;
    CHECK_THROWS_AS(ExperimentConfig::from_json(root), schema_error);
}

TEST_CASE("range violations name the offending key")
{
    json j = base_config();
    j["model"]["beta"] = -1.0;
    try {
        ExperimentConfig::from_json(j).model();
        FAIL("expected schema_error");
    } catch (const schema_error& err) {
        CHECK(std::string(err.what()).find("beta") != std::string::npos);
    }
    j = base_config();
    j["version"] = 7;
    CHECK_THROWS_AS(ExperimentConfig::from_json(j), schema_error);
    j = base_config();
    j["filter"]["sigma_E"] = "infinite";
    CHECK_THROWS_AS(ExperimentConfig::from_json(j).filter(), schema_error);
}

TEST_CASE("pair couplings and infinite sigma_E are parsed")
{
    json j = base_config();
    j["model"]["couplings"] = {{"pairs", json::array({json::array({0, 1, -0.3})})}};
    j["filter"]["sigma_E"] = "inf";
    const ExperimentConfig cfg = ExperimentConfig::from_json(j);
    CHECK(cfg.model().couplings.get(0, 1) == -0.3);
    CHECK(!cfg.filter().sigma_e_finite());
    CHECK(cfg.filter().sigma_w == 1.0);
}

TEST_CASE("guards reject oversized models")
{
    const ExperimentConfig cfg = ExperimentConfig::from_json(base_config());
    GuardSpec guards = cfg.guards();
    CHECK_NOTHROW(guards.check_hilbert(1500));
    CHECK_THROWS_AS(guards.check_hilbert(1501), guard_error);
    CHECK_THROWS_AS(guards.check_vectorized(101), guard_error);
    CHECK_NOTHROW(guards.check_vectorized(100));
}

TEST_CASE("csv writer emits stable full-precision rows")
{
    CsvWriter csv({"a", "b"});
    csv.append_row_numeric({1.0 / 3.0, 2.0});
    csv.append_row({"x", "y"});
    CHECK(csv.text() ==
          "a,b\n0.33333333333333331,2\nx,y\n");
    CHECK_THROWS_AS(csv.append_row({"only-one"}), std::invalid_argument);
}
