#include "aitk/regsim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "aitk/error.hpp"
#include "aitk/grove.hpp"

namespace aitk::regsim {

namespace {

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

void GameConfig::validate() const {
    if (agents < 2) throw config_error("agents must be at least 2");
    if (!(capacity > 0.0) || !std::isfinite(capacity)) throw config_error("capacity must be positive");
    if (!(regrowth > 0.0 && regrowth < 1.0)) throw config_error("regrowth must lie in (0, 1)");
    if (!std::isfinite(outside_utility)) throw config_error("outside_utility must be finite");
    if (initial_resource > capacity) throw config_error("initial_resource exceeds capacity");
    if (!(retention >= 0.0) || !(harvest_value >= 0.0) || !(effort_cost >= 0.0) || !(inspection_cost >= 0.0)) {
        throw config_error("retention, harvest_value, effort_cost and inspection_cost must be non-negative");
    }
    if (exit_window == 0) throw config_error("exit_window must be positive");
}

void AgentModel::validate() const {
    if (order < 0 || order > 2) throw config_error("agent order must be 0, 1 or 2");
    if (!(greed >= 0.0) || !std::isfinite(greed)) throw config_error("greed must be non-negative");
    if (!(target_sd >= 0.0) || !std::isfinite(target_mean)) throw config_error("bad target distribution");
    if (!(obs_sd > 0.0) || !(prior_sd > 0.0)) throw config_error("belief spreads must be positive");
    if (!(prior_strength > 0.0)) throw config_error("prior_strength must be positive");
    if (!std::isfinite(sensitivity)) throw config_error("sensitivity must be finite");
}

void Law::validate() const {
    if (!(cap >= 0.0) || !std::isfinite(cap)) throw invalid_argument("law cap must be non-negative");
    if (!in_unit(slack)) throw invalid_argument("law slack must lie in [0, 1]");
    if (!in_unit(enforcement)) throw invalid_argument("enforcement probability must lie in [0, 1]");
    if (!(penalty >= 0.0) || !std::isfinite(penalty)) throw invalid_argument("penalty must be non-negative");
}

LawOutcome apply_law(const Law& law, double extraction, Rng& rng) {
    const bool inspected = rng.uniform() < law.enforcement;
    const double limit = law.threshold();
    if (extraction <= limit || !inspected) return {extraction, 0.0, inspected};
    return {limit, law.penalty * (extraction - limit), true};
}

// ---------------------------------------------------------------------------

Agent::Agent(AgentModel model, std::uint64_t seed, std::size_t id)
    : model_(std::move(model)), decisions_(Rng::substream(seed, id, 0)), var_(model_.prior_sd * model_.prior_sd) {
    model_.validate();
}

double Agent::enforcement_belief(double announced) const {
    const double a = model_.prior_strength * announced + inspected_;
    const double b = model_.prior_strength * (1.0 - announced) + uninspected_;
    return a / (a + b);
}

double Agent::decide(const Observation& obs, double harvest_value) {
    // the draw is always taken so the stream does not depend on the branch
    const double target = std::max(0.0, model_.target_mean + model_.target_sd * decisions_.normal());
    double desired = model_.greed * target;
    if (model_.order >= 1) desired *= std::clamp(1.0 + model_.sensitivity * mean_, 0.0, 1.0);
    if (model_.order >= 2 && obs.law && desired > obs.law->threshold()) {
        const double q = enforcement_belief(obs.law->enforcement);
        // excess keeps its value unless inspected; inspected excess also pays the penalty
        if ((1.0 - q) * harvest_value <= q * obs.law->penalty) desired = obs.law->threshold();
    }
    return std::max(0.0, desired);
}

void Agent::observe(const Observation& obs, bool inspected) {
    if (model_.order >= 1) {
        const double change = (obs.resource - obs.previous_resource) / obs.capacity;
        const double noise = model_.obs_sd * model_.obs_sd;
        const double post = 1.0 / (1.0 / var_ + 1.0 / noise);
        mean_ = post * (mean_ / var_ + change / noise);
        var_ = post;
    }
    (inspected ? inspected_ : uninspected_) += 1.0;
}

// ---------------------------------------------------------------------------

PolicySpec PolicySpec::make(const std::string& family, const Law& base) {
    PolicySpec p;
    p.family = family;
    p.base = base;
    if (family == "none" || family == "fixed") {
    } else if (family == "slack1d" || family == "enforce1d") {
        p.lower = {0.0};
        p.upper = {1.0};
    } else if (family == "cap1d") {
        p.lower = {0.0};
        p.upper = {2.0};
    } else if (family == "adaptive" || family == "frozen") {
        p.lower = {0.0};
        p.upper = {2.0};
    } else if (family == "full") {
        p.lower = {0.0, 0.0, 0.0, 0.0};
        p.upper = {2.0, 1.0, 1.0, 10.0};
    } else {
        throw config_error("unknown policy family '" + family + "'");
    }
    p.params.resize(p.lower.size());
    for (std::size_t i = 0; i < p.params.size(); ++i) p.params[i] = 0.5 * (p.lower[i] + p.upper[i]);
    if (family == "slack1d") p.params = {base.slack};
    if (family == "cap1d") p.params = {base.cap};
    if (family == "enforce1d") p.params = {base.enforcement};
    if (family == "full") p.params = {base.cap, base.slack, base.enforcement, base.penalty};
    return p;
}

PolicySpec PolicySpec::from_config(const KvConfig& cfg) {
    Law base;
    base.cap = cfg.get_double("law.cap", 0.5);
    base.slack = cfg.get_double("law.slack", 0.0);
    base.enforcement = cfg.get_double("law.enforcement", 1.0);
    base.penalty = cfg.get_double("law.penalty", 0.0);
    try {
        base.validate();
    } catch (const Error& e) {
        throw config_error(e.what());
    }
    PolicySpec p = make(cfg.get_string("policy.family", "none"), base);
    p.lower = cfg.get_doubles("policy.lower", p.lower);
    p.upper = cfg.get_doubles("policy.upper", p.upper);
    if (p.lower.size() != p.params.size() || p.upper.size() != p.params.size()) {
        throw config_error("policy box does not match the family's lever count");
    }
    for (std::size_t i = 0; i < p.params.size(); ++i) {
        if (!(p.lower[i] <= p.upper[i])) throw config_error("policy box has lower > upper");
    }
    if (p.family == "adaptive" || p.family == "frozen") p.params = {cfg.get_double("policy.theta", 1.0)};
    p.params = cfg.get_doubles("policy.params", p.params);
    if (p.params.size() != p.lower.size()) throw config_error("policy.params has the wrong length");
    for (std::size_t i = 0; i < p.params.size(); ++i) {
        if (p.params[i] < p.lower[i] || p.params[i] > p.upper[i]) throw config_error("policy.params outside the box");
    }
    return p;
}

std::vector<std::string> PolicySpec::param_names() const {
    if (family == "slack1d") return {"slack"};
    if (family == "cap1d") return {"cap"};
    if (family == "enforce1d") return {"enforcement"};
    if (family == "full") return {"cap", "slack", "enforcement", "penalty"};
    if (family == "adaptive" || family == "frozen") return {"theta"};
    return {};
}

std::optional<Law> PolicySpec::law_for(const Summary& stats, std::optional<Law> previous) const {
    if (family == "none") return std::nullopt;
    Law law = base;
    if (family == "slack1d") law.slack = params.at(0);
    if (family == "cap1d") law.cap = params.at(0);
    if (family == "enforce1d") law.enforcement = params.at(0);
    if (family == "full") law = Law{params.at(0), params.at(1), params.at(2), params.at(3)};
    if (family == "frozen" && previous) return previous;
    if (family == "adaptive" || family == "frozen") {
        const double active = static_cast<double>(std::max<std::size_t>(stats.active, 1));
        law.cap = params.at(0) * stats.regrowth * stats.capacity / (4.0 * active);
    }
    law.cap = std::max(0.0, law.cap);
    law.slack = std::clamp(law.slack, 0.0, 1.0);
    law.enforcement = std::clamp(law.enforcement, 0.0, 1.0);
    law.penalty = std::max(0.0, law.penalty);
    return law;
}

std::string PolicySpec::render() const {
    std::string out = "policy.family = " + family + "\n";
    out += "law.cap = " + format_double(base.cap) + "\n";
    out += "law.slack = " + format_double(base.slack) + "\n";
    out += "law.enforcement = " + format_double(base.enforcement) + "\n";
    out += "law.penalty = " + format_double(base.penalty) + "\n";
    auto join = [](const Vec& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
        return s;
    };
    if (!params.empty()) {
        out += "policy.params = " + join(params) + "\n";
        out += "policy.lower = " + join(lower) + "\n";
        out += "policy.upper = " + join(upper) + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------

Event Event::parse(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.size() < 2 || parts.size() > 3) throw config_error("event must be round:kind[:value], got '" + text + "'");
    Event e;
    try {
        std::size_t used = 0;
        const std::string r = trim(parts[0]);
        const long long round = std::stoll(r, &used);
        if (used != r.size() || round < 1) throw std::invalid_argument(r);
        e.round = static_cast<std::size_t>(round);
        if (parts.size() == 3) {
            const std::string v = trim(parts[2]);
            e.value = std::stod(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
        }
    } catch (const std::exception&) {
        throw config_error("bad number in event '" + text + "'");
    }
    e.kind = trim(parts[1]);
    if (e.kind != "capacity" && e.kind != "regrowth" && e.kind != "influx" && e.kind != "null") {
        throw config_error("unknown event kind '" + e.kind + "'");
    }
    if (e.kind != "null" && parts.size() != 3) throw config_error("event '" + text + "' needs a value");
    if ((e.kind == "capacity" || e.kind == "regrowth") && !(e.value > 0.0)) {
        throw config_error("event factor must be positive");
    }
    if (e.kind == "influx" && (e.value < 0.0 || e.value != std::floor(e.value))) {
        throw config_error("influx must be a non-negative whole number of agents");
    }
    return e;
}

std::string Event::render() const {
    std::string out = std::to_string(round) + ":" + kind;
    if (kind != "null") out += ":" + format_double(value);
    return out;
}

std::string inject_excession(GameState& state, const Event& event) {
    if (event.kind == "capacity") {
        state.capacity *= event.value;
        state.resource = std::min(state.resource, state.capacity);
    } else if (event.kind == "regrowth") {
        const double r = state.regrowth * event.value;
        if (!(r > 0.0 && r < 1.0)) throw invalid_argument("regrowth event leaves (0, 1)");
        state.regrowth = r;
    } else if (event.kind == "influx") {
        const auto n = static_cast<std::size_t>(event.value);
        for (std::size_t i = 0; i < n; ++i) {
            state.agents.emplace_back(state.template_agent, state.seed, state.agents.size());
            state.member.push_back(true);
            state.recent_utility.emplace_back();
        }
    } else if (event.kind != "null") {
        throw invalid_argument("unknown event kind '" + event.kind + "'");
    }
    return event.render();
}

// ---------------------------------------------------------------------------

Trace run_episode(const GameConfig& config, const PolicySpec& policy, const std::vector<AgentModel>& agents,
                  const std::vector<Event>& events) {
    config.validate();
    if (agents.empty()) throw config_error("no agents");
    Trace trace;
    trace.seed = config.seed;

    GameState st;
    st.capacity = config.capacity;
    st.regrowth = config.regrowth;
    st.resource = config.initial_resource < 0.0 ? config.capacity : config.initial_resource;
    st.template_agent = agents.back();
    st.seed = config.seed;
    for (std::size_t i = 0; i < agents.size(); ++i) {
        st.agents.emplace_back(agents[i], config.seed, i);
        st.member.push_back(true);
        st.recent_utility.emplace_back();
    }
    std::vector<Rng> enforcement;

    WelfareSummary& sum = trace.summary;
    sum.min_resource = st.resource;
    sum.final_resource = st.resource;
    std::optional<Law> law;
    double mean_extraction = 0.0, violation_rate = 0.0;

    for (std::size_t t = 1; t <= config.rounds; ++t) {
        st.round = t;
        RoundRecord rec;
        rec.round = t;
        for (const auto& e : events) {
            if (e.round != t) continue;
            if (!rec.events.empty()) rec.events += ';';
            rec.events += inject_excession(st, e);
        }
        const std::size_t n = st.agents.size();
        while (enforcement.size() < n) enforcement.push_back(Rng::substream(config.seed, enforcement.size(), 1));

        Summary stats{t, st.resource, st.capacity, st.regrowth, 0, mean_extraction, violation_rate};
        for (bool m : st.member) stats.active += m ? 1 : 0;
        law = policy.law_for(stats, law);

        const double before = st.resource;
        Observation obs{t, st.resource, st.resource, st.capacity, law};
        std::vector<double> request(n, 0.0), allowed(n, 0.0), penalty(n, 0.0);
        std::vector<bool> inspected(n, false);
        std::size_t violations = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!st.member[i]) continue;
            request[i] = st.agents[i].decide(obs, config.harvest_value);
            LawOutcome out{request[i], 0.0, false};
            if (law) {
                out = apply_law(*law, request[i], enforcement[i]);
                if (request[i] > law->threshold()) ++violations;
            }
            allowed[i] = out.allowed;
            penalty[i] = out.penalty;
            inspected[i] = out.inspected;
        }

        const double demand = std::accumulate(allowed.begin(), allowed.end(), 0.0);
        const double scale = demand > st.resource && demand > 0.0 ? st.resource / demand : 1.0;
        rec.extraction.assign(n, 0.0);
        rec.utility.assign(n, 0.0);
        double harvested = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!st.member[i]) continue;
            const double h = allowed[i] * scale;
            rec.extraction[i] = h;
            harvested += h;
            rec.utility[i] = config.harvest_value * h - config.effort_cost * h * h - penalty[i];
            if (inspected[i]) ++rec.inspections;
        }
        double r = std::max(0.0, st.resource - harvested);
        r += st.regrowth * r * (1.0 - r / st.capacity);
        st.resource = std::clamp(r, 0.0, st.capacity);

        const double cost = config.inspection_cost * static_cast<double>(rec.inspections);
        sum.enforcement_cost += cost;
        sum.welfare -= cost;
        for (std::size_t i = 0; i < n; ++i) {
            if (!st.member[i]) continue;
            sum.total_utility += rec.utility[i];
            sum.retained_agent_rounds += 1.0;
            sum.welfare += rec.utility[i] + config.retention;
        }

        const Observation after{t, st.resource, before, st.capacity, law};
        for (std::size_t i = 0; i < n; ++i) {
            if (!st.member[i]) continue;
            st.agents[i].observe(after, inspected[i]);
            auto& recent = st.recent_utility[i];
            recent.push_back(rec.utility[i]);
            if (recent.size() > config.exit_window) recent.erase(recent.begin());
            if (recent.size() == config.exit_window) {
                const double mean = std::accumulate(recent.begin(), recent.end(), 0.0) / static_cast<double>(recent.size());
                if (mean < config.outside_utility) st.member[i] = false;
            }
        }

        mean_extraction = stats.active ? std::accumulate(request.begin(), request.end(), 0.0) / static_cast<double>(stats.active) : 0.0;
        violation_rate = stats.active ? static_cast<double>(violations) / static_cast<double>(stats.active) : 0.0;

        rec.resource = st.resource;
        rec.capacity = st.capacity;
        rec.law = law;
        rec.member = st.member;
        for (bool m : st.member) rec.active += m ? 1 : 0;
        sum.min_resource = std::min(sum.min_resource, st.resource);
        if (sum.depletion_round < 0 && st.resource < 0.05 * st.capacity) sum.depletion_round = static_cast<long long>(t);
        trace.rounds.push_back(std::move(rec));
    }
    sum.final_resource = st.resource;
    sum.final_active = 0;
    for (bool m : st.member) sum.final_active += m ? 1 : 0;
    if (config.rounds == 0) sum.welfare = 0.0;
    return trace;
}

std::string Trace::csv() const {
    std::size_t width = 0;
    for (const auto& r : rounds) width = std::max(width, r.extraction.size());
    std::string out = "# seed=" + std::to_string(seed) + "\n";
    out += "round,resource,capacity,active,law_cap,law_slack,law_enforcement,law_penalty,inspections,events";
    for (std::size_t i = 0; i < width; ++i) {
        const std::string id = std::to_string(i);
        out += ",extraction" + id + ",utility" + id + ",member" + id;
    }
    out += '\n';
    for (const auto& r : rounds) {
        out += std::to_string(r.round) + "," + format_double(r.resource) + "," + format_double(r.capacity) + "," +
               std::to_string(r.active);
        if (r.law) {
            out += "," + format_double(r.law->cap) + "," + format_double(r.law->slack) + "," +
                   format_double(r.law->enforcement) + "," + format_double(r.law->penalty);
        } else {
            out += ",,,,";
        }
        out += "," + std::to_string(r.inspections) + "," + r.events;
        for (std::size_t i = 0; i < width; ++i) {
            if (i < r.extraction.size()) {
                out += "," + format_double(r.extraction[i]) + "," + format_double(r.utility[i]) + "," +
                       (r.member[i] ? "1" : "0");
            } else {
                out += ",0,0,0";
            }
        }
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------

Scenario Scenario::from_config(const KvConfig& cfg) {
    cfg.require_known({"agents", "capacity", "regrowth", "outside_utility", "rounds", "seed", "initial_resource",
                       "retention", "harvest_value", "effort_cost", "inspection_cost", "exit_window", "agent.order",
                       "agent.greed", "agent.target_mean", "agent.target_sd", "agent.sensitivity", "agent.obs_sd",
                       "agent.prior_sd", "agent.prior_strength", "law.cap", "law.slack", "law.enforcement",
                       "law.penalty", "policy.family", "policy.params", "policy.lower", "policy.upper", "policy.theta",
                       "event", "mode", "optimize.seeds", "optimize.scan_points", "optimize.tol",
                       "optimize.max_iterations"});
    Scenario s;
    auto count = [&](const char* key, long long fallback, long long minimum) {
        const long long v = cfg.get_int(key, fallback);
        if (v < minimum) throw config_error(std::string(key) + " is out of range");
        return static_cast<std::size_t>(v);
    };
    GameConfig& g = s.game;
    g.agents = count("agents", 8, 0);
    g.capacity = cfg.get_double("capacity", g.capacity);
    g.regrowth = cfg.get_double("regrowth", g.regrowth);
    g.outside_utility = cfg.get_double("outside_utility", g.outside_utility);
    g.rounds = count("rounds", 500, 0);
    g.seed = count("seed", 1, 0);
    g.initial_resource = cfg.get_double("initial_resource", g.initial_resource);
    g.retention = cfg.get_double("retention", g.retention);
    g.harvest_value = cfg.get_double("harvest_value", g.harvest_value);
    g.effort_cost = cfg.get_double("effort_cost", g.effort_cost);
    g.inspection_cost = cfg.get_double("inspection_cost", g.inspection_cost);
    g.exit_window = count("exit_window", 10, 0);
    g.validate();

    AgentModel& a = s.agent;
    a.order = static_cast<int>(cfg.get_int("agent.order", a.order));
    a.greed = cfg.get_double("agent.greed", a.greed);
    a.target_mean = cfg.get_double("agent.target_mean", a.target_mean);
    a.target_sd = cfg.get_double("agent.target_sd", a.target_sd);
    a.sensitivity = cfg.get_double("agent.sensitivity", a.sensitivity);
    a.obs_sd = cfg.get_double("agent.obs_sd", a.obs_sd);
    a.prior_sd = cfg.get_double("agent.prior_sd", a.prior_sd);
    a.prior_strength = cfg.get_double("agent.prior_strength", a.prior_strength);
    a.validate();

    s.policy = PolicySpec::from_config(cfg);
    for (const auto& e : cfg.get_all("event")) {
        s.events.push_back(Event::parse(e));
        if (s.events.back().round > g.rounds) throw config_error("event round after the last round");
    }
    if (const auto m = cfg.get("mode")) {
        try {
            s.mode = render(canonicalize(parse(*m)));
        } catch (const Error& e) {
            throw config_error(std::string("mode is not a topology: ") + e.what());
        }
    }
    if (cfg.has("optimize.seeds")) {
        s.seeds.clear();
        for (double v : cfg.get_doubles("optimize.seeds", {})) {
            if (v < 0.0 || v != std::floor(v)) throw config_error("optimize.seeds must be whole numbers");
            s.seeds.push_back(static_cast<std::uint64_t>(v));
        }
        if (s.seeds.empty()) throw config_error("optimize.seeds is empty");
    }
    s.scan_points = count("optimize.scan_points", 9, 2);
    s.tol = cfg.get_double("optimize.tol", s.tol);
    if (!(s.tol > 0.0)) throw config_error("optimize.tol must be positive");
    s.max_iterations = count("optimize.max_iterations", 200, 1);
    return s;
}

Trace run_scenario(const Scenario& scenario, std::uint64_t seed) {
    GameConfig g = scenario.game;
    g.seed = seed;
    return run_episode(g, scenario.policy, std::vector<AgentModel>(g.agents, scenario.agent), scenario.events);
}

double mean_welfare(const Scenario& scenario, const PolicySpec& policy) {
    Scenario s = scenario;
    s.policy = policy;
    double total = 0.0;
    for (std::uint64_t seed : s.seeds) total += run_scenario(s, seed).summary.welfare;
    return total / static_cast<double>(s.seeds.size());
}

namespace {

PolicySpec with_params(const PolicySpec& base, const Vec& params) {
    PolicySpec p = base;
    p.params = params;
    for (std::size_t i = 0; i < params.size(); ++i) p.params[i] = std::clamp(params[i], p.lower[i], p.upper[i]);
    return p;
}

}  // namespace

std::vector<std::pair<double, double>> grid_scan(const Scenario& scenario, std::size_t points) {
    const PolicySpec& p = scenario.policy;
    if (p.params.size() != 1) throw invalid_argument("grid scan needs a one-lever family");
    if (points < 2) throw invalid_argument("grid scan needs at least 2 points");
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i < points; ++i) {
        const double x = p.lower[0] + (p.upper[0] - p.lower[0]) * static_cast<double>(i) / static_cast<double>(points - 1);
        out.emplace_back(x, mean_welfare(scenario, with_params(p, {x})));
    }
    return out;
}

OptimizeResult optimize_slack(const Scenario& scenario) {
    const PolicySpec& spec = scenario.policy;
    const std::size_t d = spec.params.size();
    OptimizeResult result;
    result.best = spec;

    bool degenerate = true;
    for (std::size_t i = 0; i < d; ++i) degenerate = degenerate && spec.lower[i] == spec.upper[i];
    if (degenerate) {
        result.best = with_params(spec, spec.lower.empty() ? spec.params : spec.lower);
        result.welfare = mean_welfare(scenario, result.best);
        result.converged = true;
        return result;
    }

    // coarse scan over the box for the start point
    const std::size_t per_axis = d == 1 ? scenario.scan_points : 3;
    std::size_t total = 1;
    for (std::size_t i = 0; i < d; ++i) total *= per_axis;
    Vec start = spec.params;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < total; ++k) {
        Vec x(d);
        std::size_t rest = k;
        for (std::size_t i = 0; i < d; ++i) {
            const std::size_t j = rest % per_axis;
            rest /= per_axis;
            x[i] = spec.lower[i] + (spec.upper[i] - spec.lower[i]) * static_cast<double>(j) / static_cast<double>(per_axis - 1);
        }
        const double w = mean_welfare(scenario, with_params(spec, x));
        result.scan.emplace_back(x, w);
        if (w > best) {
            best = w;
            start = x;
        }
    }

    const double scale = std::max(1.0, std::abs(best));
    Functional objective{[&](std::span<const double> theta) {
                             return -mean_welfare(scenario, with_params(spec, Vec(theta.begin(), theta.end()))) / scale;
                         },
                         "negative mean welfare / " + format_double(scale)};
    SolveOptions opt;
    opt.tol = scenario.tol;
    double width = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < d; ++i) {
        if (spec.upper[i] > spec.lower[i]) width = std::min(width, spec.upper[i] - spec.lower[i]);
    }
    opt.h = width / 256.0;
    opt.max_iterations = scenario.max_iterations;
    opt.seed = scenario.seeds.front();
    opt.lower = spec.lower;
    opt.upper = spec.upper;
    try {
        result.solver = solve_critical(objective, start, opt);
        result.converged = true;
    } catch (const NotConverged& e) {
        result.solver = e.best();
    }
    result.best = with_params(spec, result.solver.theta);
    result.welfare = -result.solver.value * scale;
    result.residual = result.solver.residual;
    result.iterations = result.solver.iterations;
    return result;
}

}  // namespace aitk::regsim
