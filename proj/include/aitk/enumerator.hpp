#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aitk/cost_model.hpp"
#include "aitk/grove.hpp"

namespace aitk {

struct PartitionSpec {
    std::vector<unsigned> parts;  // non-increasing, positive

    unsigned total() const;
    std::string render() const;
    static PartitionSpec parse(std::string_view text);
};

/// All partitions of n, each non-increasing, in reverse lexicographic order
/// ({n} first, {1,...,1} last).
std::vector<PartitionSpec> integer_partitions(unsigned n);

struct Grove {
    std::vector<TopologyExpr> trees;  // one per part

    std::string render() const;
    friend auto operator<=>(const Grove&, const Grove&) = default;
};

/// Canonical expressions of the given depth whose rank equals `budget`,
/// respecting caps and exclusions. Sorted by rendered text.
std::vector<TopologyExpr> enumerate_rank(int depth, unsigned budget, const CostModel& model);

/// Allowed topologies for a single-part partition {depth + 1}.
std::vector<TopologyExpr> enumerate_topologies(int depth, const PartitionSpec& partition, const CostModel& model);

/// Groves for any partition; singleton parts of a multi-part partition are
/// pared to weight zero when the model prunes.
std::vector<Grove> enumerate_groves(const PartitionSpec& partition, const CostModel& model);

std::size_t count_by_rank(unsigned rank, const CostModel& model);
std::size_t total_multiplicity(int depth, const CostModel& model);

struct EnumerationReport {
    int depth = 0;
    PartitionSpec partition;
    std::vector<std::string> produced;
    std::optional<std::vector<std::string>> expected;
    std::vector<std::string> missing;  // expected but not produced
    std::vector<std::string> extra;    // produced but not expected
    std::vector<std::pair<std::string, std::string>> exceptions_applied;
    bool confined_to_exceptions = false;

    bool exact() const { return missing.empty() && extra.empty(); }
    bool acceptable() const { return exact() || confined_to_exceptions; }
};

/// Reference tables: 0 is the zeroth-order list (depth 0), 1 and 2 the
/// depth-1 and depth-2 tables. `reference` holds one expression per line.
EnumerationReport verify_against_table(int table, const CostModel& model,
                                       const std::vector<std::string>& reference, bool apply_exceptions);

std::vector<std::string> read_table_file(const std::string& path);

}  // namespace aitk
