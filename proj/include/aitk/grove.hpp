#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace aitk {

// Operator kinds in their fixed composition order. `point` marks ground
// arguments; a `phi` inside an argument tuple is a map-substituted argument.
enum class Kind : std::uint8_t { sigma = 0, tau = 1, phi = 2, point = 3 };

constexpr int kMaxDepth = 2;

/// Kind of the operator level at position `level` (0 is the head).
Kind level_kind(int level);
std::string_view kind_name(Kind kind);

struct Symbol {
    Kind kind = Kind::point;
    unsigned index = 1;
    unsigned lift = 0;

    friend auto operator<=>(const Symbol&, const Symbol&) = default;
};

using Tuple = std::vector<Symbol>;

/// A decorated operator chain `head level ... innermost level (args)`.
///
/// Levels are stored head first. An expression with no levels is the trivial
/// tree (depth -1), the unit of multiplication. Construction validates the
/// structure but does not canonicalize.
class TopologyExpr {
public:
    TopologyExpr(std::vector<Tuple> levels, Tuple args);

    static TopologyExpr trivial();
    /// Undecorated chain of the given depth over a single argument.
    static TopologyExpr base(int depth);

    const std::vector<Tuple>& levels() const { return levels_; }
    const Tuple& args() const { return args_; }
    int depth() const { return static_cast<int>(levels_.size()) - 1; }
    bool is_trivial() const { return levels_.empty(); }

    friend auto operator<=>(const TopologyExpr&, const TopologyExpr&) = default;

private:
    std::vector<Tuple> levels_;
    Tuple args_;
};

TopologyExpr parse(std::string_view text);
std::string render(const TopologyExpr& expr);
TopologyExpr canonicalize(const TopologyExpr& expr);
bool is_canonical(const TopologyExpr& expr);

/// Level-chain concatenation: the right factor's levels are re-kinded and
/// appended inward of the left factor's; the right factor supplies the
/// arguments. The trivial tree is a two-sided identity. Throws a
/// composition error when the left factor carries decorated arguments or the
/// product would exceed the kind order.
TopologyExpr multiply(const TopologyExpr& left, const TopologyExpr& right);

/// Every (left, right) pair of nontrivial factors whose product is `expr`.
std::vector<std::pair<TopologyExpr, TopologyExpr>> splittings(const TopologyExpr& expr);

bool is_prime(const TopologyExpr& expr);

/// Decomposition into primes, head first. The trivial tree factors into the
/// empty product.
std::vector<TopologyExpr> factor(const TopologyExpr& expr);

/// Product of a factor list (trivial for an empty list).
TopologyExpr multiply_all(const std::vector<TopologyExpr>& factors);

// Pattern used by exclusion rules: a level may be a wildcard ("*"), and the
// argument tuple may be "(*)" (anything) or "(*N)" (ground weight N).
struct TopologyPattern {
    std::vector<std::optional<Tuple>> levels;
    std::optional<Tuple> args;
    std::optional<unsigned> ground_weight;

    int depth() const { return static_cast<int>(levels.size()) - 1; }
};

TopologyPattern parse_pattern(std::string_view text);
std::string render_tuple(const Tuple& tuple, bool is_args);

}  // namespace aitk
