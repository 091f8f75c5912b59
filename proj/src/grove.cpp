#include "aitk/grove.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <variant>

#include "aitk/error.hpp"

namespace aitk {

Kind level_kind(int level) {
    if (level < 0 || level > kMaxDepth) {
        throw Error(ErrorCode::composition, "level " + std::to_string(level) + " exceeds the kind order");
    }
    return static_cast<Kind>(level);
}

std::string_view kind_name(Kind kind) {
    switch (kind) {
        case Kind::sigma: return "sig";
        case Kind::tau: return "tau";
        case Kind::phi: return "phi";
        case Kind::point: return "m";
    }
    return "?";
}

namespace {

bool is_operator(Kind k) { return k != Kind::point; }

void validate(const std::vector<Tuple>& levels, const Tuple& args) {
    if (args.empty()) throw invalid_argument("argument tuple is empty");
    for (const auto& s : args) {
        if (s.kind != Kind::point && s.kind != Kind::phi) {
            throw invalid_argument("argument tuple may only hold points or substituted maps");
        }
        if (s.index == 0) throw invalid_argument("symbol indices start at 1");
    }
    if (levels.empty()) {
        if (args.size() != 1 || args[0].kind != Kind::point || args[0].lift != 0) {
            throw invalid_argument("the trivial tree takes a single undecorated argument");
        }
        return;
    }
    if (static_cast<int>(levels.size()) > kMaxDepth + 1) {
        throw Error(ErrorCode::composition,
                    "depth " + std::to_string(levels.size() - 1) + " exceeds the kind order");
    }
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const Tuple& level = levels[i];
        const Kind own = level_kind(static_cast<int>(i));
        if (level.empty()) throw invalid_argument("empty operator level");
        bool has_own = false;
        for (const auto& s : level) {
            if (!is_operator(s.kind)) throw invalid_argument("points cannot appear in an operator level");
            if (s.index == 0) throw invalid_argument("symbol indices start at 1");
            if (s.kind < own) {
                throw invalid_argument("level " + std::to_string(i) + " holds an operator of an earlier kind");
            }
            has_own = has_own || s.kind == own;
        }
        if (!has_own) throw invalid_argument("level " + std::to_string(i) + " lacks its own operator kind");
        if (i == 0 && level.size() != 1) throw invalid_argument("the head level holds exactly one sigma");
    }
}

Tuple canonical_tuple(Tuple t) {
    std::sort(t.begin(), t.end(), [](const Symbol& a, const Symbol& b) {
        return std::tie(a.kind, a.lift, a.index) < std::tie(b.kind, b.lift, b.index);
    });
    std::array<unsigned, 4> next{1, 1, 1, 1};
    for (auto& s : t) s.index = next[static_cast<int>(s.kind)]++;
    return t;
}

std::string lift_suffix(unsigned lift) {
    return lift == 0 ? std::string() : "^(" + std::to_string(lift) + ")";
}

}  // namespace

TopologyExpr::TopologyExpr(std::vector<Tuple> levels, Tuple args)
    : levels_(std::move(levels)), args_(std::move(args)) {
    validate(levels_, args_);
}

TopologyExpr TopologyExpr::trivial() { return TopologyExpr({}, {Symbol{Kind::point, 1, 0}}); }

TopologyExpr TopologyExpr::base(int depth) {
    if (depth < -1 || depth > kMaxDepth) throw invalid_argument("unsupported depth " + std::to_string(depth));
    std::vector<Tuple> levels;
    for (int i = 0; i <= depth; ++i) levels.push_back({Symbol{level_kind(i), 1, 0}});
    return TopologyExpr(std::move(levels), {Symbol{Kind::point, 1, 0}});
}

std::string render_tuple(const Tuple& tuple, bool is_args) {
    std::array<int, 4> counts{};
    for (const auto& s : tuple) ++counts[static_cast<int>(s.kind)];
    auto item = [&](const Symbol& s) {
        std::string out(kind_name(s.kind));
        if (is_args || counts[static_cast<int>(s.kind)] > 1) out += std::to_string(s.index);
        out += lift_suffix(s.lift);
        return out;
    };
    if (!is_args && tuple.size() == 1) return item(tuple[0]);
    std::string out = "(";
    for (std::size_t i = 0; i < tuple.size(); ++i) {
        if (i) out += ", ";
        out += item(tuple[i]);
    }
    out += ')';
    return out;
}

std::string render(const TopologyExpr& expr) {
    std::string out;
    for (std::size_t i = 0; i < expr.levels().size(); ++i) {
        if (i) out += ' ';
        out += render_tuple(expr.levels()[i], false);
    }
    out += render_tuple(expr.args(), true);
    return out;
}

TopologyExpr canonicalize(const TopologyExpr& expr) {
    std::vector<Tuple> levels;
    levels.reserve(expr.levels().size());
    for (const auto& l : expr.levels()) levels.push_back(canonical_tuple(l));
    return TopologyExpr(std::move(levels), canonical_tuple(expr.args()));
}

bool is_canonical(const TopologyExpr& expr) { return canonicalize(expr) == expr; }

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Wildcard {
    std::optional<unsigned> weight;
};

using Element = std::variant<Symbol, Wildcard>;

struct Item {
    bool group = false;
    std::vector<Element> elements;
    std::size_t position = 0;
};

class Parser {
public:
    Parser(std::string_view text, bool allow_wildcards) : text_(text), wild_(allow_wildcards) {}

    std::vector<Item> items() {
        std::vector<Item> out;
        skip_ws();
        while (pos_ < text_.size()) {
            std::size_t before = pos_;
            if (text_[pos_] == '(') {
                out.push_back(group());
            } else {
                if (!out.empty() && !out.back().group && before == last_end_) {
                    fail("expected whitespace between levels");
                }
                Item it;
                it.position = pos_;
                it.elements.push_back(element());
                out.push_back(std::move(it));
            }
            last_end_ = pos_;
            skip_ws();
        }
        if (out.empty()) fail("empty expression");
        return out;
    }

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(pos_, what); }
    [[noreturn]] void fail_at(std::size_t at, const std::string& what) const { throw ParseError(at, what); }

private:
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    std::optional<unsigned> number() {
        std::size_t start = pos_;
        unsigned long long v = 0;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            v = v * 10 + static_cast<unsigned>(text_[pos_] - '0');
            if (v > 1000000) fail("number too large");
            ++pos_;
        }
        if (pos_ == start) return std::nullopt;
        return static_cast<unsigned>(v);
    }

    Item group() {
        Item it;
        it.group = true;
        it.position = pos_;
        eat('(');
        for (;;) {
            skip_ws();
            it.elements.push_back(element());
            skip_ws();
            if (eat(')')) break;
            if (!eat(',')) fail("expected ',' or ')'");
        }
        return it;
    }

    Element element() {
        std::size_t start = pos_;
        if (wild_ && eat('*')) {
            Wildcard w;
            w.weight = number();
            return w;
        }
        while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        std::string_view name = text_.substr(start, pos_ - start);
        if (name.empty()) fail("expected a symbol");
        static const std::map<std::string_view, Kind> names{
            {"sig", Kind::sigma}, {"sigma", Kind::sigma}, {"tau", Kind::tau}, {"phi", Kind::phi},
            {"m", Kind::point},   {"n", Kind::point},     {"p", Kind::point},
        };
        auto found = names.find(name);
        if (found == names.end()) fail_at(start, "unknown symbol '" + std::string(name) + "'");
        Symbol s;
        s.kind = found->second;
        if (auto idx = number()) {
            if (*idx == 0) fail("symbol indices start at 1");
            s.index = *idx;
        }
        if (eat('^')) {
            if (!eat('(')) fail("expected '(' after '^'");
            auto lift = number();
            if (!lift) fail("expected a lift order");
            if (!eat(')')) fail("expected ')' closing the lift");
            s.lift = *lift;
        }
        return s;
    }

    std::string_view text_;
    bool wild_;
    std::size_t pos_ = 0;
    std::size_t last_end_ = static_cast<std::size_t>(-1);
};

struct Parsed {
    std::vector<std::optional<Tuple>> levels;
    std::optional<Tuple> args;
    std::optional<unsigned> ground_weight;
};

Parsed parse_items(std::string_view text, bool wild) {
    Parser p(text, wild);
    auto items = p.items();
    const Item& last = items.back();
    if (!last.group) p.fail_at(last.position, "expected an argument tuple");

    Parsed out;
    for (std::size_t i = 0; i + 1 < items.size(); ++i) {
        const Item& it = items[i];
        if (std::holds_alternative<Wildcard>(it.elements[0])) {
            if (it.group || it.elements.size() != 1 || std::get<Wildcard>(it.elements[0]).weight) {
                p.fail_at(it.position, "a wildcard level is a bare '*'");
            }
            out.levels.emplace_back(std::nullopt);
            continue;
        }
        Tuple level;
        for (const auto& e : it.elements) {
            if (!std::holds_alternative<Symbol>(e)) p.fail_at(it.position, "wildcards cannot mix with symbols");
            const Symbol& s = std::get<Symbol>(e);
            if (s.kind == Kind::point) p.fail_at(it.position, "points cannot appear in an operator level");
            level.push_back(s);
        }
        out.levels.emplace_back(std::move(level));
    }

    if (std::holds_alternative<Wildcard>(last.elements[0])) {
        if (last.elements.size() != 1) p.fail_at(last.position, "wildcards cannot mix with symbols");
        out.ground_weight = std::get<Wildcard>(last.elements[0]).weight;
        return out;
    }
    Tuple args;
    for (const auto& e : last.elements) {
        if (!std::holds_alternative<Symbol>(e)) p.fail_at(last.position, "wildcards cannot mix with symbols");
        const Symbol& s = std::get<Symbol>(e);
        if (s.kind != Kind::point && s.kind != Kind::phi) {
            p.fail_at(last.position, "argument tuple may only hold points or substituted maps");
        }
        args.push_back(s);
    }
    out.args = std::move(args);
    return out;
}

}  // namespace

TopologyExpr parse(std::string_view text) {
    Parsed p = parse_items(text, false);
    std::vector<Tuple> levels;
    for (auto& l : p.levels) levels.push_back(std::move(*l));
    try {
        return canonicalize(TopologyExpr(std::move(levels), std::move(*p.args)));
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(0, e.what());
    }
}

TopologyPattern parse_pattern(std::string_view text) {
    Parsed p = parse_items(text, true);
    TopologyPattern out;
    for (auto& l : p.levels) out.levels.push_back(l ? std::optional<Tuple>(canonical_tuple(*l)) : std::nullopt);
    if (p.args) out.args = canonical_tuple(*p.args);
    out.ground_weight = p.ground_weight;
    return out;
}

// ---------------------------------------------------------------------------
// Algebra

namespace {

const Symbol kPlainPoint{Kind::point, 1, 0};

Tuple shift_kinds(const Tuple& t, int by) {
    Tuple out = t;
    for (auto& s : out) {
        int k = static_cast<int>(s.kind) + by;
        if (k < 0 || k > static_cast<int>(Kind::phi)) {
            throw Error(ErrorCode::composition, "re-kinded operator falls outside the sigma/tau/phi order");
        }
        s.kind = static_cast<Kind>(k);
    }
    return out;
}

}  // namespace

TopologyExpr multiply(const TopologyExpr& left, const TopologyExpr& right) {
    if (left.is_trivial()) return right;
    if (right.is_trivial()) return left;
    if (left.args().size() != 1 || left.args()[0] != kPlainPoint) {
        throw Error(ErrorCode::composition, "left factor carries decorated arguments: " + render(left));
    }
    const int depth = left.depth() + right.depth() + 1;
    if (depth > kMaxDepth) {
        throw Error(ErrorCode::composition, "product depth " + std::to_string(depth) + " exceeds the kind order");
    }
    std::vector<Tuple> levels = left.levels();
    for (const auto& l : right.levels()) levels.push_back(shift_kinds(l, left.depth() + 1));
    return TopologyExpr(std::move(levels), right.args());
}

std::vector<std::pair<TopologyExpr, TopologyExpr>> splittings(const TopologyExpr& expr) {
    std::vector<std::pair<TopologyExpr, TopologyExpr>> out;
    const auto& levels = expr.levels();
    for (int k = 0; k < expr.depth(); ++k) {
        std::vector<Tuple> head(levels.begin(), levels.begin() + k + 1);
        std::vector<Tuple> tail;
        try {
            for (std::size_t i = k + 1; i < levels.size(); ++i) tail.push_back(shift_kinds(levels[i], -(k + 1)));
            TopologyExpr left(std::move(head), {kPlainPoint});
            TopologyExpr right(std::move(tail), expr.args());
            out.emplace_back(std::move(left), std::move(right));
        } catch (const Error&) {
            // inner levels do not form a chain of their own
        }
    }
    return out;
}

bool is_prime(const TopologyExpr& expr) { return !expr.is_trivial() && splittings(expr).empty(); }

std::vector<TopologyExpr> factor(const TopologyExpr& expr) {
    if (expr.is_trivial()) return {};
    auto splits = splittings(expr);
    if (splits.empty()) return {expr};
    auto out = factor(splits.front().first);
    auto rest = factor(splits.front().second);
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
}

TopologyExpr multiply_all(const std::vector<TopologyExpr>& factors) {
    // Right fold: only the innermost factor may carry decorated arguments.
    TopologyExpr acc = TopologyExpr::trivial();
    for (auto it = factors.rbegin(); it != factors.rend(); ++it) acc = multiply(*it, acc);
    return acc;
}

}  // namespace aitk
