#pragma once

#include <compare>
#include <string>
#include <string_view>
#include <vector>

namespace aitk {

/// A term `Pow^(l1) Pow^(l2) ... (operand)` where the operand is either a
/// lifted algebra symbol `A^(k)` or an ordered tensor pair `A^(i) x A^(j)`.
struct SituationExpr {
    std::vector<unsigned> pow_lifts;      // head first, nonempty
    std::vector<unsigned> operand_lifts;  // one entry, or two for a tensor

    bool is_tensor() const { return operand_lifts.size() == 2; }
    friend auto operator<=>(const SituationExpr&, const SituationExpr&) = default;
};

std::string render(const SituationExpr& s);
SituationExpr parse_situation(std::string_view text);

// Fitted charging scheme (not derived): one unit per lift order, one per
// extra Pow in the chain, one for a tensor pair of two unlifted operands.
// With `balanced_tensors`, a tensor form is admitted only when its lifted
// operands fill exactly the slots the chain leaves open: each chain lift
// fills one of the two operand slots, an extra Pow fills both.
struct SituationRules {
    bool balanced_tensors = true;
};

unsigned situation_order(const SituationExpr& s);
bool admissible(const SituationExpr& s, const SituationRules& rules);

/// All admissible situations of exactly the given order, sorted by text.
std::vector<SituationExpr> enumerate_situations(unsigned order, const SituationRules& rules = {});

}  // namespace aitk
