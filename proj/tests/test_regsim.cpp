#include <cmath>
#include <string>

#include "aitk/regsim.hpp"
#include "doctest.h"

using namespace aitk;
using namespace aitk::regsim;

namespace {

Scenario scenario(const std::string& name) {
    return Scenario::from_config(KvConfig::load(std::string(AITK_DATA_DIR) + "/scenarios/" + name + ".cfg"));
}

double mean_extraction(const Trace& t, std::size_t rounds) {
    double s = 0.0;
    std::size_t n = 0;
    for (std::size_t r = 0; r < rounds && r < t.rounds.size(); ++r) {
        for (double e : t.rounds[r].extraction) {
            s += e;
            ++n;
        }
    }
    return n ? s / static_cast<double>(n) : 0.0;
}

Observation plain(double resource) { return {1, resource, resource, 100.0, std::nullopt}; }

}  // namespace

TEST_CASE("agent decisions") {
    AgentModel lazy;
    lazy.greed = 0.0;
    Agent a(lazy, 1, 0);
    for (int i = 0; i < 50; ++i) CHECK(a.decide(plain(100.0), 2.0) == 0.0);

    AgentModel point;
    point.target_mean = 0.7;
    point.target_sd = 0.0;
    Agent b(point, 5, 3);
    for (int i = 0; i < 50; ++i) CHECK(b.decide(plain(100.0), 2.0) == 0.7);

    AgentModel bad;
    bad.order = 3;
    CHECK_THROWS_AS(Agent(bad, 1, 0), Error);
}

TEST_CASE("a resource-modelling agent extracts less under monotone decline") {
    AgentModel naive_model, aware_model;
    aware_model.order = 1;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Agent naive(naive_model, seed, 0), aware(aware_model, seed, 0);
        double naive_total = 0.0, aware_total = 0.0;
        for (std::size_t t = 1; t <= 100; ++t) {
            const Observation obs{t, 100.0 - 0.8 * static_cast<double>(t), 100.0 - 0.8 * static_cast<double>(t - 1), 100.0,
                                  std::nullopt};
            naive_total += naive.decide(obs, 2.0);
            aware_total += aware.decide(obs, 2.0);
            naive.observe(obs, false);
            aware.observe(obs, false);
        }
        CHECK(aware.belief_mean() < 0.0);
        CHECK(aware_total / 100.0 < naive_total / 100.0);
    }
}

TEST_CASE("apply_law arithmetic") {
    Rng rng(1);
    const Law full{1.0, 0.0, 1.0, 3.0};
    auto out = apply_law(full, 2.0, rng);
    CHECK(out.allowed == 1.0);
    CHECK(out.penalty == 3.0);
    CHECK(out.inspected);
    out = apply_law(full, 0.5, rng);
    CHECK(out.allowed == 0.5);
    CHECK(out.penalty == 0.0);

    const Law slack{1.0, 0.5, 1.0, 2.0};
    out = apply_law(slack, 1.4, rng);
    CHECK(out.allowed == 1.4);
    out = apply_law(slack, 2.5, rng);
    CHECK(out.allowed == 1.5);
    CHECK(out.penalty == doctest::Approx(2.0));

    const Law lax{1.0, 0.0, 0.0, 9.0};
    for (int i = 0; i < 100; ++i) {
        out = apply_law(lax, 5.0, rng);
        CHECK(out.allowed == 5.0);
        CHECK(out.penalty == 0.0);
        CHECK_FALSE(out.inspected);
    }

    // one draw per call regardless of the law
    Rng x(7), y(7);
    apply_law(full, 0.1, x);
    apply_law(lax, 9.0, y);
    CHECK(x.uniform() == y.uniform());

    CHECK_THROWS_AS((Law{-1.0, 0.0, 0.0, 0.0}.validate()), Error);
    CHECK_THROWS_AS((Law{1.0, 1.5, 0.0, 0.0}.validate()), Error);
    CHECK_THROWS_AS((Law{1.0, 0.0, 1.5, 0.0}.validate()), Error);
}

TEST_CASE("monotone penalty") {
    Scenario s = scenario("baseline");
    s.game.outside_utility = -1e9;  // nobody exits, so only the penalty differs
    s.game.effort_cost = 0.5;
    Law law{0.4, 0.1, 0.6, 0.0};
    Trace previous;
    for (double beta : {0.0, 0.5, 1.0, 2.0, 5.0}) {
        law.penalty = beta;
        s.policy = PolicySpec::make("fixed", law);
        const Trace t = run_scenario(s, 3);
        if (!previous.rounds.empty()) {
            for (std::size_t r = 0; r < t.rounds.size(); ++r) {
                CHECK(t.rounds[r].resource == previous.rounds[r].resource);
                for (std::size_t i = 0; i < t.rounds[r].utility.size(); ++i) {
                    CHECK(t.rounds[r].utility[i] <= previous.rounds[r].utility[i]);
                }
            }
        }
        previous = t;
    }
}

TEST_CASE("zero enforcement matches the absent law") {
    Scenario s = scenario("baseline");
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        s.policy = PolicySpec::make("none", {});
        const Trace free = run_scenario(s, seed);
        s.policy = PolicySpec::make("fixed", Law{0.1, 0.0, 0.0, 5.0});
        const Trace lax = run_scenario(s, seed);
        REQUIRE(free.rounds.size() == lax.rounds.size());
        for (std::size_t r = 0; r < free.rounds.size(); ++r) {
            CHECK(free.rounds[r].resource == lax.rounds[r].resource);
            CHECK(free.rounds[r].extraction == lax.rounds[r].extraction);
            CHECK(free.rounds[r].utility == lax.rounds[r].utility);
            CHECK(free.rounds[r].member == lax.rounds[r].member);
        }
        CHECK(free.summary.welfare == lax.summary.welfare);
    }
}

TEST_CASE("logistic regrowth without extraction") {
    GameConfig g;
    g.rounds = 60;
    AgentModel idle;
    idle.greed = 0.0;
    g.outside_utility = -1.0;
    const Trace full = run_episode(g, PolicySpec::make("none", {}), {idle, idle});
    for (const auto& r : full.rounds) CHECK(r.resource == g.capacity);

    g.initial_resource = g.capacity / 2;
    const Trace half = run_episode(g, PolicySpec::make("none", {}), {idle, idle});
    double prev = g.initial_resource;
    for (const auto& r : half.rounds) {
        CHECK(r.resource > prev);
        CHECK(r.resource - prev <= g.regrowth * g.capacity / 4 + 1e-12);
        prev = r.resource;
    }
    CHECK(prev < g.capacity);
}

TEST_CASE("tragedy of the commons without a law") {
    const Scenario s = scenario("baseline");
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Trace t = run_scenario(s, seed);
        CHECK(t.summary.depletion_round >= 1);
        CHECK(t.summary.depletion_round <= 200);
        bool below = false;
        for (std::size_t r = 0; r < 200 && r < t.rounds.size(); ++r) below = below || t.rounds[r].resource < 0.05 * s.game.capacity;
        CHECK(below);
    }
}

TEST_CASE("empty horizon and determinism") {
    Scenario s = scenario("slack_a");
    s.game.rounds = 0;
    const Trace empty = run_scenario(s, 4);
    CHECK(empty.rounds.empty());
    CHECK(empty.summary.welfare == 0.0);
    CHECK(empty.csv().find("\n", empty.csv().find("round,")) == empty.csv().size() - 1);

    s = scenario("shock");
    CHECK(run_scenario(s, 8).csv() == run_scenario(s, 8).csv());
    CHECK(run_scenario(s, 8).csv() != run_scenario(s, 9).csv());
    CHECK(run_scenario(s, 8).csv().rfind("# seed=8\nround,resource,capacity,active,", 0) == 0);
}

TEST_CASE("resource stays in range with bounded growth") {
    for (const char* name : {"baseline", "permit", "slack_a", "enforcement", "shock"}) {
        const Scenario s = scenario(name);
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const Trace t = run_scenario(s, seed);
            double prev = s.game.initial_resource < 0 ? s.game.capacity : s.game.initial_resource;
            for (const auto& r : t.rounds) {
                CHECK(r.resource >= 0.0);
                CHECK(r.resource <= r.capacity);
                CHECK(r.resource - prev <= 0.25 * s.game.regrowth * r.capacity + 1e-9);
                for (double u : r.utility) CHECK(std::isfinite(u));
                prev = r.resource;
            }
        }
    }
}

TEST_CASE("exited agents take no further actions") {
    const Scenario s = scenario("baseline");
    std::size_t exits = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Trace t = run_scenario(s, seed);
        std::vector<bool> gone(s.game.agents, false);
        for (const auto& r : t.rounds) {
            for (std::size_t i = 0; i < gone.size(); ++i) {
                if (gone[i]) {
                    CHECK(r.extraction[i] == 0.0);
                    CHECK_FALSE(r.member[i]);
                }
                if (!r.member[i] && !gone[i]) {
                    gone[i] = true;
                    ++exits;
                }
            }
        }
    }
    CHECK(exits > 0);
}

TEST_CASE("excession events") {
    GameState st;
    st.resource = 80.0;
    st.capacity = 100.0;
    st.regrowth = 0.15;
    inject_excession(st, Event::parse("3:capacity:0.5"));
    CHECK(st.capacity == 50.0);
    CHECK(st.resource == 50.0);
    inject_excession(st, Event::parse("4:capacity:2"));
    CHECK(st.capacity == 100.0);
    CHECK(st.resource == 50.0);

    const GameState before = st;
    inject_excession(st, Event::parse("5:null"));
    CHECK(st.resource == before.resource);
    CHECK(st.capacity == before.capacity);
    CHECK(st.regrowth == before.regrowth);
    CHECK(st.agents.size() == before.agents.size());

    inject_excession(st, Event::parse("6:regrowth:2"));
    CHECK(st.regrowth == doctest::Approx(0.3));
    CHECK_THROWS_AS(inject_excession(st, Event::parse("7:regrowth:10")), Error);
    CHECK_THROWS_AS(Event::parse("8:meteor:1"), Error);
    CHECK_THROWS_AS(Event::parse("x:null"), Error);
    CHECK(Event::parse("12:capacity:0.5").render() == "12:capacity:0.5");

    Scenario s = scenario("baseline");
    s.events = {Event::parse("10:influx:3")};
    const Trace t = run_scenario(s, 1);
    CHECK(t.rounds[8].extraction.size() == 8);
    CHECK(t.rounds[9].extraction.size() == 11);
    CHECK(t.rounds[9].events.find("influx") != std::string::npos);
}

TEST_CASE("adaptive policy retains at least the frozen welfare after a capacity shock") {
    Scenario s = scenario("shock");
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const double adaptive = run_scenario(s, seed).summary.welfare;
        Scenario f = s;
        f.policy.family = "frozen";
        const double frozen = run_scenario(f, seed).summary.welfare;
        CHECK(adaptive >= frozen);
    }
}

TEST_CASE("optimizer edge cases") {
    Scenario s = scenario("slack_a");
    s.policy.lower = {0.25};
    s.policy.upper = {0.25};
    s.seeds = {1, 2};
    const auto r = optimize_slack(s);
    CHECK(r.converged);
    REQUIRE(r.best.params.size() == 1);
    CHECK(r.best.params[0] == 0.25);
    CHECK(r.welfare == mean_welfare(s, r.best));
}

TEST_CASE("optimal enforcement is interior when inspections cost welfare") {
    const Scenario s = scenario("enforcement");
    const auto scan = grid_scan(s, 21);
    std::size_t arg = 0;
    for (std::size_t i = 1; i < scan.size(); ++i) {
        if (scan[i].second > scan[arg].second) arg = i;
    }
    MESSAGE("scan argmax q = " << scan[arg].first);
    CHECK(arg > 0);
    CHECK(arg + 1 < scan.size());
    CHECK(scan[arg].second > scan.back().second);
}

TEST_CASE("scenario configuration errors") {
    CHECK_THROWS_AS(Scenario::from_config(KvConfig::parse("agents = 1\n")), Error);
    CHECK_THROWS_AS(Scenario::from_config(KvConfig::parse("regrowth = 1.5\n")), Error);
    CHECK_THROWS_AS(Scenario::from_config(KvConfig::parse("capacity = 0\n")), Error);
    CHECK_THROWS_AS(Scenario::from_config(KvConfig::parse("colour = red\n")), Error);
    CHECK_THROWS_AS(Scenario::from_config(KvConfig::parse("policy.family = tyranny\n")), Error);
    CHECK_THROWS_AS(Scenario::from_config(KvConfig::parse("law.slack = 2\npolicy.family = fixed\n")), Error);
    CHECK_THROWS_AS(Scenario::from_config(KvConfig::parse("event = 3:meteor\n")), Error);
    CHECK_THROWS_AS(Scenario::from_config(KvConfig::parse("agent.order = 5\n")), Error);
    CHECK_THROWS_AS(Scenario::from_config(KvConfig::parse("mode = sig(\n")), Error);
    CHECK_NOTHROW(Scenario::from_config(KvConfig::parse("")));
}
