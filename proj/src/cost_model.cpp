#include "aitk/cost_model.hpp"

#include <numeric>

#include "aitk/error.hpp"

namespace aitk {

namespace {

ExclusionRule pattern_rule(const std::string& text) {
    ExclusionRule r;
    r.source = text;
    r.pattern = parse_pattern(text);
    return r;
}

ExclusionRule profile_rule(const std::string& text) {
    ExclusionRule r;
    r.source = text;
    for (const auto& part : split(text, ',')) {
        if (part.empty()) throw config_error("empty entry in exclusion profile '" + text + "'");
        r.profile.push_back(static_cast<unsigned>(std::stoul(part)));
    }
    if (r.profile.size() < 2) throw config_error("exclusion profile needs at least ground and head weights");
    return r;
}

std::vector<unsigned> parse_caps(const std::string& text) {
    std::vector<unsigned> out;
    for (const auto& part : split(text, ',')) {
        try {
            out.push_back(static_cast<unsigned>(std::stoul(part)));
        } catch (const std::exception&) {
            throw config_error("bad cap entry '" + part + "'");
        }
    }
    return out;
}

std::string join(const std::vector<unsigned>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(v[i]);
    }
    return out;
}

}  // namespace

CostModel CostModel::shipped() {
    CostModel m;
    // Fibonacci schedules, ground to head.
    m.caps[0] = {1, 1};
    m.caps[1] = {2, 1, 1};
    m.caps[2] = {3, 2, 1, 1};

    m.exclusions.push_back(pattern_rule("sig(m1^(1))"));
    m.exclusions.push_back(pattern_rule("sig^(1) tau^(1)(*)"));
    m.exclusions.push_back(profile_rule("1,1,1,0"));
    m.exclusions.push_back(pattern_rule("sig tau (phi1, phi2, phi3)(*1)"));
    m.exclusions.push_back(pattern_rule("sig tau phi^(1)(*2)"));

    m.exceptions.emplace_back("sig tau phi(m1^(1), m2^(2))", "sig tau phi(m1^(1), m2^(1))");
    return m;
}

CostModel CostModel::from_config(const KvConfig& cfg) {
    cfg.require_known({"cost.lift", "cost.argument", "cost.insertion", "cost.map", "caps.", "exclude",
                       "exclude_profile", "map_substitution.max_depth", "insertion.min_depth",
                       "prune_singletons", "exception"});
    CostModel m;
    auto cost = [&](const char* key) {
        long long v = cfg.get_int(key, 1);
        if (v < 1) throw config_error(std::string(key) + " must be >= 1");
        return static_cast<unsigned>(v);
    };
    m.lift_cost = cost("cost.lift");
    m.argument_cost = cost("cost.argument");
    m.insertion_cost = cost("cost.insertion");
    m.map_cost = cost("cost.map");
    for (const auto& [k, v] : cfg.entries()) {
        if (k.rfind("caps.", 0) == 0) {
            int depth = 0;
            try {
                depth = std::stoi(k.substr(5));
            } catch (const std::exception&) {
                throw config_error("bad caps key '" + k + "'");
            }
            auto caps = parse_caps(v);
            if (depth < 0 || caps.size() != static_cast<std::size_t>(depth) + 2) {
                throw config_error("caps for depth " + std::to_string(depth) + " need " +
                                   std::to_string(depth + 2) + " entries");
            }
            m.caps[depth] = std::move(caps);
        }
    }
    for (const auto& [k, v] : cfg.entries()) {
        if (k == "exclude") m.exclusions.push_back(pattern_rule(v));
        if (k == "exclude_profile") m.exclusions.push_back(profile_rule(v));
    }
    m.map_substitution_max_depth = static_cast<int>(cfg.get_int("map_substitution.max_depth", 0));
    m.insertion_min_depth = static_cast<int>(cfg.get_int("insertion.min_depth", 1));
    m.prune_singletons = cfg.get_bool("prune_singletons", true);
    for (const auto& v : cfg.get_all("exception")) {
        auto arrow = v.find("=>");
        if (arrow == std::string::npos) throw config_error("exception needs 'reference => produced'");
        m.exceptions.emplace_back(trim(v.substr(0, arrow)), trim(v.substr(arrow + 2)));
    }
    return m;
}

CostModel CostModel::load(const std::string& path) { return from_config(KvConfig::load(path)); }

KvConfig CostModel::to_config() const {
    KvConfig cfg;
    cfg.set("cost.lift", std::to_string(lift_cost));
    cfg.set("cost.argument", std::to_string(argument_cost));
    cfg.set("cost.insertion", std::to_string(insertion_cost));
    cfg.set("cost.map", std::to_string(map_cost));
    for (const auto& [d, c] : caps) cfg.set("caps." + std::to_string(d), join(c));
    for (const auto& r : exclusions) cfg.set(r.pattern ? "exclude" : "exclude_profile", r.source);
    cfg.set("map_substitution.max_depth", std::to_string(map_substitution_max_depth));
    cfg.set("insertion.min_depth", std::to_string(insertion_min_depth));
    cfg.set("prune_singletons", prune_singletons ? "true" : "false");
    for (const auto& [ref, got] : exceptions) cfg.set("exception", ref + " => " + got);
    return cfg;
}

const std::vector<unsigned>& CostModel::caps_for(int depth) const {
    auto it = caps.find(depth);
    if (it == caps.end()) throw invalid_argument("cost model has no caps for depth " + std::to_string(depth));
    return it->second;
}

std::vector<unsigned> level_weights(const TopologyExpr& expr, const CostModel& model) {
    if (expr.is_trivial()) return {0};
    const int depth = expr.depth();
    // out[0] = ground, out[1] = innermost level ... out[depth + 1] = head
    std::vector<unsigned> out(static_cast<std::size_t>(depth) + 2, 0);
    for (int i = 0; i <= depth; ++i) {
        const Kind own = level_kind(i);
        unsigned& slot = out[static_cast<std::size_t>(depth - i + 1)];
        bool seen_own = false;
        for (const auto& s : expr.levels()[static_cast<std::size_t>(i)]) {
            if (s.kind == own) {
                if (seen_own) slot += model.insertion_cost;
                seen_own = true;
                slot += model.lift_cost * s.lift;
            } else {
                slot += model.insertion_cost;
                out[0] += model.lift_cost * s.lift;
            }
        }
    }
    const auto& args = expr.args();
    out[0] += model.argument_cost * static_cast<unsigned>(args.size() - 1);
    for (const auto& s : args) {
        out[0] += model.lift_cost * s.lift;
        if (s.kind == Kind::phi) out[0] += model.map_cost;
    }
    return out;
}

unsigned rank(const TopologyExpr& expr, const CostModel& model) {
    auto w = level_weights(expr, model);
    return std::accumulate(w.begin(), w.end(), 0u);
}

bool within_caps(const TopologyExpr& expr, const CostModel& model) {
    if (expr.is_trivial()) return true;
    auto it = model.caps.find(expr.depth());
    if (it == model.caps.end()) return false;
    auto w = level_weights(expr, model);
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] > it->second[i]) return false;
    }
    return true;
}

bool matches(const ExclusionRule& rule, const TopologyExpr& expr, const CostModel& model) {
    if (expr.is_trivial()) return false;
    if (!rule.pattern) {
        if (rule.profile.size() != static_cast<std::size_t>(expr.depth()) + 2) return false;
        return level_weights(expr, model) == rule.profile;
    }
    const TopologyPattern& p = *rule.pattern;
    if (p.depth() != expr.depth()) return false;
    TopologyExpr canon = canonicalize(expr);
    for (std::size_t i = 0; i < p.levels.size(); ++i) {
        if (p.levels[i] && *p.levels[i] != canon.levels()[i]) return false;
    }
    if (p.args && *p.args != canon.args()) return false;
    if (p.ground_weight && level_weights(canon, model)[0] != *p.ground_weight) return false;
    return true;
}

bool is_excluded(const TopologyExpr& expr, const CostModel& model) {
    for (const auto& r : model.exclusions) {
        if (matches(r, expr, model)) return true;
    }
    return false;
}

}  // namespace aitk
