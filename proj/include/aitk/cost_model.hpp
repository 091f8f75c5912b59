#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "aitk/grove.hpp"
#include "aitk/kvconfig.hpp"

namespace aitk {

/// A forbidden decoration combination. Either a level pattern (see
/// TopologyPattern) or a per-level weight profile listed ground to head.
struct ExclusionRule {
    std::string source;
    std::optional<TopologyPattern> pattern;
    std::vector<unsigned> profile;
};

/// Decoration costs, per-level weight caps and exclusion rules that drive
/// enumeration. The shipped instance is fitted so that enumeration reproduces
/// the reference tables.
struct CostModel {
    unsigned lift_cost = 1;
    unsigned argument_cost = 1;
    unsigned insertion_cost = 1;
    unsigned map_cost = 1;

    // depth -> caps listed ground to head (depth + 2 entries)
    std::map<int, std::vector<unsigned>> caps;
    std::vector<ExclusionRule> exclusions;

    // Map substitution (an argument replaced by a self-map, "sig(phi1)") is
    // only offered up to this depth; operator insertion from this depth on.
    int map_substitution_max_depth = 0;
    int insertion_min_depth = 1;

    // Multi-part partitions pare singleton parts down to zero weight.
    bool prune_singletons = true;

    // Reference-table substitutions (reference form -> enumerated form)
    // tolerated by verification.
    std::vector<std::pair<std::string, std::string>> exceptions;

    static CostModel shipped();
    static CostModel from_config(const KvConfig& cfg);
    static CostModel load(const std::string& path);
    KvConfig to_config() const;

    const std::vector<unsigned>& caps_for(int depth) const;
};

/// Weight charged to each level, ground first, then innermost operator level
/// out to the head. Lifts on a foreign operator inserted into a level (a phi
/// inside the tau level) are charged to ground since the map acts on points.
std::vector<unsigned> level_weights(const TopologyExpr& expr, const CostModel& model);

unsigned rank(const TopologyExpr& expr, const CostModel& model);

bool within_caps(const TopologyExpr& expr, const CostModel& model);
bool is_excluded(const TopologyExpr& expr, const CostModel& model);
bool matches(const ExclusionRule& rule, const TopologyExpr& expr, const CostModel& model);

}  // namespace aitk
