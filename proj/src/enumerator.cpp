#include "aitk/enumerator.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <set>

#include "aitk/error.hpp"

namespace aitk {

unsigned PartitionSpec::total() const {
    unsigned s = 0;
    for (auto p : parts) s += p;
    return s;
}

std::string PartitionSpec::render() const {
    std::string out = "{";
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(parts[i]);
    }
    return out + "}";
}

PartitionSpec PartitionSpec::parse(std::string_view text) {
    std::string body = trim(text);
    if (!body.empty() && body.front() == '{') body.erase(body.begin());
    if (!body.empty() && body.back() == '}') body.pop_back();
    PartitionSpec p;
    for (const auto& item : split(body, ',')) {
        if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos) {
            throw invalid_argument("bad partition '" + std::string(text) + "'");
        }
        unsigned v = static_cast<unsigned>(std::stoul(item));
        if (v == 0) throw invalid_argument("partition parts must be positive");
        p.parts.push_back(v);
    }
    if (!std::is_sorted(p.parts.rbegin(), p.parts.rend())) {
        throw invalid_argument("partition parts must be non-increasing");
    }
    return p;
}

std::vector<PartitionSpec> integer_partitions(unsigned n) {
    std::vector<PartitionSpec> out;
    std::vector<unsigned> cur;
    std::function<void(unsigned, unsigned)> rec = [&](unsigned remaining, unsigned max_part) {
        if (remaining == 0) {
            out.push_back({cur});
            return;
        }
        for (unsigned p = std::min(remaining, max_part); p >= 1; --p) {
            cur.push_back(p);
            rec(remaining - p, p);
            cur.pop_back();
        }
    };
    if (n > 0) rec(n, n);
    return out;
}

std::string Grove::render() const {
    std::string out;
    for (std::size_t i = 0; i < trees.size(); ++i) {
        if (i) out += " | ";
        out += aitk::render(trees[i]);
    }
    return out;
}

namespace {

// Non-decreasing lift sequences of length `size` with sum <= max_sum.
void lift_multisets(unsigned size, unsigned max_sum, std::vector<std::vector<unsigned>>& out) {
    std::vector<unsigned> cur;
    std::function<void(unsigned, unsigned)> rec = [&](unsigned min_lift, unsigned left) {
        if (cur.size() == size) {
            out.push_back(cur);
            return;
        }
        for (unsigned l = min_lift; l <= left; ++l) {
            cur.push_back(l);
            rec(l, left - l);
            cur.pop_back();
        }
    };
    rec(0, max_sum);
}

void append(Tuple& t, Kind kind, const std::vector<unsigned>& lifts) {
    for (unsigned l : lifts) t.push_back(Symbol{kind, static_cast<unsigned>(t.size()) + 1, l});
}

// Candidate tuples for a non-head operator level. Inserted operators take the
// first kind not yet used as a level; once every kind is a level, insertion
// duplicates the level's own kind.
std::vector<Tuple> level_candidates(int depth, int level, unsigned budget, const CostModel& model) {
    const Kind own = level_kind(level);
    const bool insertion = depth >= model.insertion_min_depth;
    const Kind inserted = depth < kMaxDepth ? level_kind(depth + 1) : own;
    const unsigned max_extra = insertion ? budget / model.insertion_cost : 0;
    const unsigned max_lift = budget / model.lift_cost;

    std::vector<Tuple> out;
    if (inserted == own) {
        for (unsigned n = 1; n <= max_extra + 1; ++n) {
            std::vector<std::vector<unsigned>> ms;
            lift_multisets(n, max_lift, ms);
            for (const auto& lifts : ms) {
                Tuple t;
                append(t, own, lifts);
                out.push_back(std::move(t));
            }
        }
        return out;
    }
    for (unsigned a = 0; a <= max_lift; ++a) {
        for (unsigned n = 0; n <= max_extra; ++n) {
            std::vector<std::vector<unsigned>> ms;
            lift_multisets(n, max_lift, ms);
            for (const auto& lifts : ms) {
                Tuple t{Symbol{own, 1, a}};
                append(t, inserted, lifts);
                out.push_back(std::move(t));
            }
        }
    }
    return out;
}

std::vector<Tuple> arg_candidates(int depth, unsigned budget, const CostModel& model) {
    const unsigned max_lift = budget / model.lift_cost;
    const unsigned max_points = budget / model.argument_cost + 1;
    const unsigned max_maps = depth <= model.map_substitution_max_depth ? budget / model.map_cost : 0;
    std::vector<Tuple> out;
    for (unsigned maps = 0; maps <= max_maps; ++maps) {
        for (unsigned points = 0; points <= max_points; ++points) {
            if (points + maps == 0) continue;
            std::vector<std::vector<unsigned>> pm, mm;
            lift_multisets(points, max_lift, pm);
            lift_multisets(maps, max_lift, mm);
            for (const auto& pl : pm) {
                for (const auto& ml : mm) {
                    Tuple t;
                    append(t, Kind::point, pl);
                    append(t, Kind::phi, ml);
                    out.push_back(std::move(t));
                }
            }
        }
    }
    return out;
}

bool by_text(const TopologyExpr& a, const TopologyExpr& b) { return render(a) < render(b); }

}  // namespace

std::vector<TopologyExpr> enumerate_rank(int depth, unsigned budget, const CostModel& model) {
    if (depth < 0 || depth > kMaxDepth) throw invalid_argument("unsupported depth " + std::to_string(depth));
    (void)model.caps_for(depth);

    std::vector<std::vector<Tuple>> choices;
    {
        std::vector<Tuple> head;
        for (unsigned a = 0; a <= budget / model.lift_cost; ++a) head.push_back({Symbol{Kind::sigma, 1, a}});
        choices.push_back(std::move(head));
    }
    for (int i = 1; i <= depth; ++i) choices.push_back(level_candidates(depth, i, budget, model));

    const auto args = arg_candidates(depth, budget, model);
    std::set<TopologyExpr> seen;
    std::vector<Tuple> pick(choices.size());
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == choices.size()) {
            for (const auto& a : args) {
                TopologyExpr e(pick, a);
                if (rank(e, model) != budget) continue;
                if (!within_caps(e, model) || is_excluded(e, model)) continue;
                seen.insert(canonicalize(e));
            }
            return;
        }
        for (const auto& t : choices[i]) {
            pick[i] = t;
            rec(i + 1);
        }
    };
    rec(0);

    std::vector<TopologyExpr> out(seen.begin(), seen.end());
    std::sort(out.begin(), out.end(), by_text);
    return out;
}

std::vector<TopologyExpr> enumerate_topologies(int depth, const PartitionSpec& partition, const CostModel& model) {
    if (depth < 0 || depth > kMaxDepth) throw invalid_argument("unsupported depth " + std::to_string(depth));
    if (partition.parts.size() != 1 || partition.parts[0] != static_cast<unsigned>(depth) + 1) {
        throw invalid_argument("partition " + partition.render() + " is inconsistent with depth " +
                               std::to_string(depth) + " (expected {" + std::to_string(depth + 1) + "})");
    }
    return enumerate_rank(depth, partition.parts[0], model);
}

std::vector<Grove> enumerate_groves(const PartitionSpec& partition, const CostModel& model) {
    if (partition.parts.empty()) throw invalid_argument("empty partition");
    const bool multi = partition.parts.size() > 1;
    std::vector<std::vector<TopologyExpr>> per_part;
    for (unsigned part : partition.parts) {
        const int depth = static_cast<int>(part) - 1;
        if (depth > kMaxDepth) throw invalid_argument("part " + std::to_string(part) + " exceeds the supported depth");
        const unsigned budget = (multi && model.prune_singletons && part == 1) ? 0 : part;
        per_part.push_back(enumerate_rank(depth, budget, model));
    }
    std::vector<Grove> out;
    Grove cur;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == per_part.size()) {
            out.push_back(cur);
            return;
        }
        for (const auto& t : per_part[i]) {
            cur.trees.push_back(t);
            rec(i + 1);
            cur.trees.pop_back();
        }
    };
    rec(0);
    return out;
}

std::size_t count_by_rank(unsigned r, const CostModel& model) {
    if (r < 1 || r > static_cast<unsigned>(kMaxDepth) + 1) {
        throw invalid_argument("rank " + std::to_string(r) + " is outside 1..3");
    }
    return enumerate_topologies(static_cast<int>(r) - 1, PartitionSpec{{r}}, model).size();
}

std::size_t total_multiplicity(int depth, const CostModel& model) {
    if (depth < 0 || depth > kMaxDepth) throw invalid_argument("unsupported depth " + std::to_string(depth));
    std::size_t total = 0;
    for (const auto& p : integer_partitions(static_cast<unsigned>(depth) + 1)) {
        total += enumerate_groves(p, model).size();
    }
    return total;
}

std::vector<std::string> read_table_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io, "cannot read reference table '" + path + "'");
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (!line.empty()) out.push_back(line);
    }
    return out;
}

EnumerationReport verify_against_table(int table, const CostModel& model, const std::vector<std::string>& reference,
                                       bool apply_exceptions) {
    if (table < 0 || table > kMaxDepth) throw invalid_argument("unknown table " + std::to_string(table));
    EnumerationReport rep;
    rep.depth = table;
    rep.partition = PartitionSpec{{static_cast<unsigned>(table) + 1}};

    std::set<std::string> produced;
    for (const auto& e : enumerate_topologies(table, rep.partition, model)) produced.insert(render(e));

    std::vector<std::pair<std::string, std::string>> exceptions;
    for (const auto& [ref, got] : model.exceptions) {
        exceptions.emplace_back(render(parse(ref)), render(parse(got)));
    }

    std::set<std::string> expected;
    for (const auto& line : reference) {
        std::string canon = render(parse(line));
        if (apply_exceptions) {
            for (const auto& ex : exceptions) {
                if (ex.first == canon) {
                    rep.exceptions_applied.push_back(ex);
                    canon = ex.second;
                }
            }
        }
        expected.insert(canon);
    }

    rep.produced.assign(produced.begin(), produced.end());
    rep.expected = std::vector<std::string>(expected.begin(), expected.end());
    std::set_difference(expected.begin(), expected.end(), produced.begin(), produced.end(),
                        std::back_inserter(rep.missing));
    std::set_difference(produced.begin(), produced.end(), expected.begin(), expected.end(),
                        std::back_inserter(rep.extra));

    if (!rep.exact()) {
        std::set<std::string> tolerated_missing, tolerated_extra;
        for (const auto& ex : exceptions) {
            if (expected.count(ex.first)) {
                tolerated_missing.insert(ex.first);
                tolerated_extra.insert(ex.second);
            }
        }
        auto inside = [](const std::vector<std::string>& v, const std::set<std::string>& s) {
            return std::all_of(v.begin(), v.end(), [&](const std::string& x) { return s.count(x) > 0; });
        };
        rep.confined_to_exceptions = inside(rep.missing, tolerated_missing) && inside(rep.extra, tolerated_extra);
    }
    return rep;
}

}  // namespace aitk
