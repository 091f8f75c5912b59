#include "aitk/situations.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>

#include "aitk/error.hpp"

namespace aitk {

namespace {

std::string lifted(std::string_view name, unsigned lift) {
    std::string out(name);
    if (lift) out += "^(" + std::to_string(lift) + ")";
    return out;
}

}  // namespace

std::string render(const SituationExpr& s) {
    std::string out;
    for (std::size_t i = 0; i < s.pow_lifts.size(); ++i) {
        if (i) out += ' ';
        out += lifted("Pow", s.pow_lifts[i]);
    }
    out += '(';
    for (std::size_t i = 0; i < s.operand_lifts.size(); ++i) {
        if (i) out += " x ";
        out += lifted("A", s.operand_lifts[i]);
    }
    out += ')';
    return out;
}

SituationExpr parse_situation(std::string_view text) {
    std::size_t pos = 0;
    auto ws = [&] {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    };
    auto word = [&](std::string_view w) {
        if (text.substr(pos, w.size()) == w) {
            pos += w.size();
            return true;
        }
        return false;
    };
    auto lift = [&]() -> unsigned {
        if (!word("^(")) return 0;
        std::size_t start = pos;
        unsigned v = 0;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            v = v * 10 + static_cast<unsigned>(text[pos] - '0');
            ++pos;
        }
        if (pos == start || !word(")")) throw ParseError(pos, "malformed lift");
        return v;
    };

    SituationExpr s;
    ws();
    while (word("Pow")) {
        s.pow_lifts.push_back(lift());
        ws();
    }
    if (s.pow_lifts.empty()) throw ParseError(pos, "expected 'Pow'");
    if (!word("(")) throw ParseError(pos, "expected '('");
    for (;;) {
        ws();
        if (!word("A")) throw ParseError(pos, "expected 'A'");
        s.operand_lifts.push_back(lift());
        ws();
        if (word(")")) break;
        if (!word("x")) throw ParseError(pos, "expected 'x' or ')'");
    }
    ws();
    if (pos != text.size()) throw ParseError(pos, "trailing input");
    if (s.operand_lifts.size() > 2) throw ParseError(pos, "tensor products are binary");
    return s;
}

unsigned situation_order(const SituationExpr& s) {
    unsigned order = static_cast<unsigned>(s.pow_lifts.size()) - 1;
    for (auto l : s.pow_lifts) order += l;
    for (auto l : s.operand_lifts) order += l;
    if (s.is_tensor() && s.operand_lifts[0] == 0 && s.operand_lifts[1] == 0) order += 1;
    return order;
}

bool admissible(const SituationExpr& s, const SituationRules& rules) {
    if (!s.is_tensor() || !rules.balanced_tensors) return true;
    int open = 2 - 2 * (static_cast<int>(s.pow_lifts.size()) - 1);
    for (auto l : s.pow_lifts) open -= static_cast<int>(l);
    const int lifted_operands = (s.operand_lifts[0] > 0) + (s.operand_lifts[1] > 0);
    return open >= 0 && lifted_operands == open;
}

std::vector<SituationExpr> enumerate_situations(unsigned order, const SituationRules& rules) {
    std::set<SituationExpr> found;
    // Every unit of order is spent on a lift, an extra Pow or a tensor, so
    // chain length and lifts are bounded by the order.
    std::vector<unsigned> chain;
    std::function<void(unsigned)> chains = [&](unsigned budget) {
        if (!chain.empty()) {
            for (unsigned a = 0; a <= order; ++a) {
                SituationExpr single{chain, {a}};
                if (situation_order(single) == order) found.insert(single);
                for (unsigned b = 0; b <= order; ++b) {
                    SituationExpr pair{chain, {a, b}};
                    if (situation_order(pair) == order && admissible(pair, rules)) found.insert(pair);
                }
            }
        }
        if (chain.size() > order) return;
        for (unsigned l = 0; l <= budget; ++l) {
            chain.push_back(l);
            chains(budget - l);
            chain.pop_back();
        }
    };
    chains(order);

    std::vector<SituationExpr> out(found.begin(), found.end());
    std::sort(out.begin(), out.end(),
              [](const SituationExpr& a, const SituationExpr& b) { return render(a) < render(b); });
    return out;
}

}  // namespace aitk
