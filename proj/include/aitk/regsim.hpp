#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aitk/kvconfig.hpp"
#include "aitk/rng.hpp"
#include "aitk/variational.hpp"

namespace aitk::regsim {

struct GameConfig {
    std::size_t agents = 8;
    double capacity = 100.0;
    double regrowth = 0.15;
    double outside_utility = 0.5;
    std::size_t rounds = 500;
    std::uint64_t seed = 1;
    double initial_resource = -1.0;  // negative: start at capacity
    double retention = 0.1;          // welfare bonus per retained agent-round
    double harvest_value = 2.0;      // utility per unit harvested
    double effort_cost = 0.0;        // quadratic harvesting cost coefficient
    double inspection_cost = 0.0;    // welfare cost per inspection
    std::size_t exit_window = 10;    // rounds of trailing utility used by the exit rule

    void validate() const;
};

struct AgentModel {
    int order = 0;
    double greed = 1.0;
    // decision distribution: target ~ Normal(target_mean, target_sd), clamped at 0
    double target_mean = 0.8;
    double target_sd = 0.2;
    // order >= 1: Gaussian belief over the per-round relative resource change
    double sensitivity = 5.0;
    double obs_sd = 0.05;
    double prior_sd = 0.1;
    // order 2: Beta belief over enforcement, centred on the announced rate
    double prior_strength = 10.0;

    void validate() const;
};

struct Law {
    double cap = 0.0;
    double slack = 0.0;
    double enforcement = 0.0;
    double penalty = 0.0;

    double threshold() const { return cap * (1.0 + slack); }
    void validate() const;
};

struct LawOutcome {
    double allowed = 0.0;
    double penalty = 0.0;
    bool inspected = false;
};

/// One enforcement draw is always consumed so the stream stays aligned
/// whatever the law.
LawOutcome apply_law(const Law& law, double extraction, Rng& rng);

struct Observation {
    std::size_t round = 0;
    double resource = 0.0;
    double previous_resource = 0.0;
    double capacity = 0.0;
    std::optional<Law> law;
};

class Agent {
public:
    Agent(AgentModel model, std::uint64_t seed, std::size_t id);

    double decide(const Observation& obs, double harvest_value);
    /// Feedback after the round: resource change and whether this agent was inspected.
    void observe(const Observation& obs, bool inspected);

    const AgentModel& model() const { return model_; }
    double belief_mean() const { return mean_; }
    double enforcement_belief(double announced) const;

private:
    AgentModel model_;
    Rng decisions_;
    double mean_ = 0.0;
    double var_ = 0.0;
    double inspected_ = 0.0;
    double uninspected_ = 0.0;
};

struct Summary {
    std::size_t round = 0;
    double resource = 0.0;
    double capacity = 0.0;
    double regrowth = 0.0;
    std::size_t active = 0;
    double mean_extraction = 0.0;
    double violation_rate = 0.0;
};

/// A policy family with its lever vector. Families: none, fixed, slack1d,
/// cap1d, enforce1d, full (cap, slack, enforcement, penalty), adaptive and
/// frozen (cap = theta * r * K / (4 * active), recomputed each round or
/// fixed at the first round).
struct PolicySpec {
    std::string family = "none";
    Vec params;
    Law base;
    Vec lower;
    Vec upper;

    static PolicySpec make(const std::string& family, const Law& base);
    static PolicySpec from_config(const KvConfig& cfg);

    std::vector<std::string> param_names() const;
    std::optional<Law> law_for(const Summary& stats, std::optional<Law> previous) const;
    std::string render() const;
};

struct Event {
    std::size_t round = 0;
    std::string kind;  // capacity, regrowth, influx, null
    double value = 0.0;

    static Event parse(const std::string& text);
    std::string render() const;
};

struct GameState {
    std::size_t round = 0;
    double resource = 0.0;
    double capacity = 0.0;
    double regrowth = 0.0;
    std::vector<Agent> agents;
    std::vector<bool> member;
    std::vector<std::vector<double>> recent_utility;
    AgentModel template_agent;
    std::uint64_t seed = 0;
};

/// Applies an external shock; returns the log text.
std::string inject_excession(GameState& state, const Event& event);

struct RoundRecord {
    std::size_t round = 0;
    double resource = 0.0;
    double capacity = 0.0;
    std::size_t active = 0;
    std::optional<Law> law;
    std::vector<double> extraction;
    std::vector<double> utility;
    std::vector<bool> member;
    std::size_t inspections = 0;
    std::string events;
};

struct WelfareSummary {
    double welfare = 0.0;
    double total_utility = 0.0;
    double retained_agent_rounds = 0.0;
    double enforcement_cost = 0.0;
    double final_resource = 0.0;
    double min_resource = 0.0;
    long long depletion_round = -1;  // first round with R < 0.05 K
    std::size_t final_active = 0;
};

struct Trace {
    std::vector<RoundRecord> rounds;
    WelfareSummary summary;
    std::uint64_t seed = 0;

    std::string csv() const;
};

struct Scenario {
    GameConfig game;
    AgentModel agent;
    PolicySpec policy;
    std::vector<Event> events;
    std::string mode;  // optional topology label, echoed only
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::size_t scan_points = 9;
    double tol = 1e-3;
    std::size_t max_iterations = 200;

    static Scenario from_config(const KvConfig& cfg);
};

Trace run_episode(const GameConfig& config, const PolicySpec& policy, const std::vector<AgentModel>& agents,
                  const std::vector<Event>& events = {});
Trace run_scenario(const Scenario& scenario, std::uint64_t seed);
double mean_welfare(const Scenario& scenario, const PolicySpec& policy);

struct OptimizeResult {
    PolicySpec best;
    double welfare = 0.0;
    double residual = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<std::pair<Vec, double>> scan;
    SolveResult solver;
};

/// Coarse scan for a start point, then solve_critical on the negative mean
/// welfare over the scenario's seeds inside the family box.
OptimizeResult optimize_slack(const Scenario& scenario);

/// Mean welfare at `points` evenly spaced values of a 1-D family's lever.
std::vector<std::pair<double, double>> grid_scan(const Scenario& scenario, std::size_t points);

}  // namespace aitk::regsim
