#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>

#include "morl/env.hpp"
#include "support/oracles.hpp"

using namespace morl;

namespace {

Dataset flat_dataset(int days, double demand, double renewable) {
    std::vector<HourlyRecord> recs;
    for (int d = 1; d <= days; ++d)
        for (int h = 0; h < 24; ++h) recs.push_back({d, h, demand, renewable});
    return Dataset(std::move(recs));
}

std::string write_temp(const std::string& name, const std::string& content) {
    std::ofstream out(name);
    out << content;
    return name;
}

}  // namespace

TEST_SUITE_BEGIN("env");

TEST_CASE("tariff windows") {
    EnvConfig cfg;
    CHECK(tariff_rate(cfg, 8) == doctest::Approx(0.3662));
    CHECK(tariff_rate(cfg, 22) == doctest::Approx(0.3662));
    CHECK(tariff_rate(cfg, 23) == doctest::Approx(0.1518));
    CHECK(tariff_rate(cfg, 0) == doctest::Approx(0.1518));
    CHECK(tariff_rate(cfg, 7) == doctest::Approx(0.1518));
    CHECK_THROWS_AS(tariff_rate(cfg, 24), std::invalid_argument);
}

TEST_CASE("reset state") {
    EnvConfig cfg;
    Dataset data = flat_dataset(2, 0.4, 0.7);
    const EnvState s = env_reset(data, cfg, 1);
    CHECK(s.hour == 0);
    CHECK(s.remaining_task_hours == 4);
    CHECK(s.renewable_kw == doctest::Approx(0.7));
    CHECK(s.background_demand_kw == doctest::Approx(0.4));

    const EnvState again = env_reset(data, cfg, 1);
    CHECK(again.hour == s.hour);
    CHECK(again.renewable_kw == s.renewable_kw);

    CHECK_THROWS_AS(env_reset(data, cfg, 9), DataError);
}

TEST_CASE("step arithmetic") {
    EnvConfig cfg;
    Dataset data = flat_dataset(1, 0.0, 0.0);

    SUBCASE("peak-hour appliance cost") {
        EnvState s = env_reset(data, cfg, 1);
        s.hour = 10;
        const Transition tr = env_step(data, cfg, s, 1, 1);
        CHECK(tr.reward.neg_cost == doctest::Approx(-1.5 * 0.3662).epsilon(1e-12));
        CHECK(tr.reward.comfort == 0.0);  // hour 10 outside the comfort window
        CHECK(tr.next_state.hour == 11);
    }
    SUBCASE("comfort accrues inside the window and decrements the task") {
        EnvState s = env_reset(data, cfg, 1);
        s.hour = 3;
        const Transition tr = env_step(data, cfg, s, 1, 1);
        CHECK(tr.reward.comfort == 1.0);
        CHECK(tr.next_state.remaining_task_hours == 3);
    }
    SUBCASE("off action earns nothing and costs only background") {
        EnvState s = env_reset(data, cfg, 1);
        s.hour = 3;
        const Transition tr = env_step(data, cfg, s, 0, 1);
        CHECK(tr.reward.comfort == 0.0);
        CHECK(tr.reward.neg_cost == doctest::Approx(0.0));
        CHECK(tr.next_state.remaining_task_hours == 4);
    }
    SUBCASE("surplus renewable clamps the grid draw at zero") {
        Dataset sunny = flat_dataset(1, 0.5, 5.0);
        EnvState s = env_reset(sunny, cfg, 1);
        s.hour = 12;
        const Transition tr = env_step(sunny, cfg, s, 1, 1);
        CHECK(tr.reward.neg_cost == doctest::Approx(0.0));
    }
    SUBCASE("running on an exhausted task costs money but earns no comfort") {
        EnvState s = env_reset(data, cfg, 1);
        s.hour = 2;
        s.remaining_task_hours = 0;
        const Transition tr = env_step(data, cfg, s, 1, 1);
        CHECK(tr.reward.comfort == 0.0);
        CHECK(tr.reward.neg_cost < 0.0);
        CHECK(tr.next_state.remaining_task_hours == 0);
    }
    SUBCASE("episode terminates after hour 23") {
        EnvState s = env_reset(data, cfg, 1);
        s.hour = 23;
        const Transition tr = env_step(data, cfg, s, 0, 1);
        CHECK(tr.done);
        CHECK(tr.next_state.hour == 0);
    }
    SUBCASE("invalid action") {
        EnvState s = env_reset(data, cfg, 1);
        CHECK_THROWS_AS(env_step(data, cfg, s, 2, 1), std::invalid_argument);
    }
}

TEST_CASE("appliance-scope billing nets renewable against the appliance only") {
    EnvConfig cfg;
    cfg.bill_scope = BillScope::Appliance;
    Dataset data = flat_dataset(1, 2.0, 0.5);
    EnvState s = env_reset(data, cfg, 1);
    s.hour = 10;
    const Transition on = env_step(data, cfg, s, 1, 1);
    CHECK(on.reward.neg_cost == doctest::Approx(-(1.5 - 0.5) * 0.3662).epsilon(1e-12));
    const Transition off = env_step(data, cfg, s, 0, 1);
    CHECK(off.reward.neg_cost == doctest::Approx(0.0));
}

TEST_CASE("csv loading") {
    SUBCASE("valid two-day file") {
        std::string body = "day,hour,background_demand_kw,renewable_kw\n";
        for (int d = 1; d <= 2; ++d)
            for (int h = 0; h < 24; ++h)
                body += std::to_string(d) + "," + std::to_string(h) + ",0.5,0.1\n";
        const std::string path = write_temp("env_valid.csv", body);
        const Dataset data = load_dataset(path);
        CHECK(data.records().size() == 48);
        CHECK(data.num_days() == 2);
        std::remove(path.c_str());
    }
    SUBCASE("missing hour names the day") {
        std::string body = "day,hour,background_demand_kw,renewable_kw\n";
        for (int d = 1; d <= 2; ++d)
            for (int h = 0; h < 24; ++h) {
                if (d == 2 && h == 13) continue;
                body += std::to_string(d) + "," + std::to_string(h) + ",0.5,0.1\n";
            }
        const std::string path = write_temp("env_gap.csv", body);
        try {
            load_dataset(path);
            FAIL("expected DataError");
        } catch (const DataError& e) {
            CHECK(std::string(e.what()).find("2") != std::string::npos);
        }
        std::remove(path.c_str());
    }
    SUBCASE("non-numeric field reports the row") {
        const std::string path = write_temp(
            "env_nan.csv", "day,hour,background_demand_kw,renewable_kw\n1,0,abc,0.1\n");
        try {
            load_dataset(path);
            FAIL("expected DataError");
        } catch (const DataError& e) {
            CHECK(std::string(e.what()).find("row 2") != std::string::npos);
        }
        std::remove(path.c_str());
    }
    SUBCASE("header mismatch") {
        const std::string path = write_temp("env_hdr.csv", "a,b,c,d\n1,0,0.5,0.1\n");
        CHECK_THROWS_AS(load_dataset(path), DataError);
        std::remove(path.c_str());
    }
}

TEST_CASE("synthetic year generator") {
    SUBCASE("stationary noise-free regime repeats the same day") {
        const Dataset data = synth_year(3, {{1, 1.0, 0.0}});
        CHECK(data.num_days() == 365);
        for (int d = 2; d <= 365; ++d)
            for (int h = 0; h < 24; ++h) {
                CHECK(data.at(d, h).renewable_kw == data.at(1, h).renewable_kw);
                CHECK(data.at(d, h).background_demand_kw == data.at(1, h).background_demand_kw);
            }
    }
    SUBCASE("scale doubling doubles the renewable profile at the boundary") {
        const Dataset data = synth_year(3, {{1, 1.0, 0.0}, {100, 2.0, 0.0}});
        double before = 0, after = 0;
        for (int h = 0; h < 24; ++h) {
            before += data.at(99, h).renewable_kw;
            after += data.at(100, h).renewable_kw;
        }
        CHECK(after == doctest::Approx(2.0 * before).epsilon(1e-12));
    }
    SUBCASE("same seed reproduces bit-identical data") {
        const Dataset a = synth_year(11, {{1, 1.0, 0.05}, {200, 0.5, 0.02}});
        const Dataset b = synth_year(11, {{1, 1.0, 0.05}, {200, 0.5, 0.02}});
        REQUIRE(a.records().size() == b.records().size());
        for (std::size_t i = 0; i < a.records().size(); ++i) {
            CHECK(a.records()[i].renewable_kw == b.records()[i].renewable_kw);
            CHECK(a.records()[i].background_demand_kw == b.records()[i].background_demand_kw);
        }
    }
    SUBCASE("bad regime lists are rejected") {
        CHECK_THROWS_AS(synth_year(1, {}), std::invalid_argument);
        CHECK_THROWS_AS(synth_year(1, {{5, 1.0, 0.0}}), std::invalid_argument);
        CHECK_THROWS_AS(synth_year(1, {{1, 1.0, 0.0}, {400, 1.0, 0.0}}),
                        std::invalid_argument);
        CHECK_THROWS_AS(synth_year(1, {{1, 1.0, 0.0}, {100, 1.0, 0.0}, {50, 1.0, 0.0}}),
                        std::invalid_argument);
    }
}

TEST_CASE("rule policies") {
    EnvState s;
    s.hour = 2;
    CHECK(rule_policy(1, s) == 1);
    CHECK(rule_policy(2, s) == 0);
    s.hour = 5;
    CHECK(rule_policy(1, s) == 0);
    CHECK(rule_policy(2, s) == 1);
    s.hour = 12;
    CHECK(rule_policy(1, s) == 0);
    CHECK(rule_policy(2, s) == 0);
    CHECK_THROWS_AS(rule_policy(3, s), std::invalid_argument);
}

TEST_CASE("episode accounting matches the hour-by-hour oracle") {
    const Dataset data = synth_year(21, {{1, 1.3, 0.15}});
    EnvConfig cfg;
    Rng rng(77);
    for (int rep = 0; rep < 1000; ++rep) {
        const int day = uniform_int(rng, 1, 365);
        std::vector<int> actions(24);
        for (int& a : actions) a = uniform_int(rng, 0, 1);
        EnvState s = env_reset(data, cfg, day);
        double cost = 0, comfort = 0;
        for (int h = 0; h < 24; ++h) {
            const Transition tr = env_step(data, cfg, s, actions[static_cast<std::size_t>(h)], day);
            cost += tr.reward.neg_cost;
            comfort += tr.reward.comfort;
            s = tr.next_state;
            if (h == 23) CHECK(tr.done);
        }
        CHECK(std::abs(-cost - oracles::episode_cost(data, cfg, day, actions)) < 1e-9);
        CHECK(comfort >= 0);
        CHECK(comfort <= cfg.task_hours);
    }
}

TEST_CASE("rule 1 on a dead-grid day earns exactly (-0.9108, 4)") {
    const Dataset data = flat_dataset(3, 0.0, 0.0);
    EnvConfig cfg;
    EnvState s = env_reset(data, cfg, 2);
    double cost = 0, comfort = 0;
    bool done = false;
    while (!done) {
        const Transition tr = env_step(data, cfg, s, rule_policy(1, s), 2);
        cost += tr.reward.neg_cost;
        comfort += tr.reward.comfort;
        s = tr.next_state;
        done = tr.done;
    }
    CHECK(cost == doctest::Approx(-0.9108).epsilon(1e-12));
    CHECK(comfort == doctest::Approx(4.0));
}

TEST_CASE("all-off episode cost is appliance-independent") {
    const Dataset data = synth_year(5, {{1, 0.8, 0.1}});
    EnvConfig small, big;
    small.appliance_kw = 0.5;
    big.appliance_kw = 9.5;
    for (int day : {1, 100, 300}) {
        double cs = 0, cb = 0;
        EnvState ss = env_reset(data, small, day), sb = env_reset(data, big, day);
        for (int h = 0; h < 24; ++h) {
            const Transition ts = env_step(data, small, ss, 0, day);
            const Transition tb = env_step(data, big, sb, 0, day);
            cs += ts.reward.neg_cost;
            cb += tb.reward.neg_cost;
            ss = ts.next_state;
            sb = tb.next_state;
        }
        CHECK(cs == doctest::Approx(cb).epsilon(1e-12));
    }
}

TEST_SUITE_END();
