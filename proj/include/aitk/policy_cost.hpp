#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "aitk/variational.hpp"

namespace aitk {

/// Finite group given by its composition table; generators are element ids.
class FiniteGroup {
public:
    FiniteGroup(std::vector<std::vector<std::size_t>> table, std::vector<std::size_t> generators);

    static FiniteGroup cyclic(std::size_t n);
    static FiniteGroup dihedral(std::size_t n);  // order 2n
    static FiniteGroup direct_product(const FiniteGroup& a, const FiniteGroup& b);
    /// "cyclic:<n>", "dihedral:<n>", or products joined with 'x'.
    static FiniteGroup from_spec(const std::string& spec);

    std::size_t order() const { return table_.size(); }
    std::size_t identity() const { return identity_; }
    const std::vector<std::size_t>& generators() const { return generators_; }
    std::size_t compose(std::size_t a, std::size_t b) const { return table_[a][b]; }
    /// Product of generators listed by generator position.
    std::size_t evaluate(std::span<const std::size_t> word) const;
    /// Shortest generator-word length of each element (breadth-first).
    std::vector<std::size_t> word_lengths() const;

    bool is_associative() const;

private:
    std::vector<std::vector<std::size_t>> table_;
    std::vector<std::size_t> generators_;
    std::size_t identity_ = 0;
};

struct PolicyCostFunction {
    FiniteGroup group;
    // Cost of a pair of (evaluated) words; the policy value of g is cost(e, g).
    std::function<double(std::size_t, std::size_t)> cost;
    // Three-policy competition cost; evaluated, never derived.
    std::function<double(std::size_t, std::size_t, std::size_t)> cost3;

    double value(std::size_t g) const { return cost(group.identity(), g); }
};

/// I(P): density f(g, alpha) = delta_eps(P(g) - alpha), uniform probability
/// over G, quadrature over alpha with `samples` cells.
double policy_information(const PolicyCostFunction& pcf, double eps, std::size_t samples = 4096);

/// Lever metric on generator axes from second differences of the cost on
/// length-2 words, symmetrized and shifted so its smallest eigenvalue is at
/// least lambda.
Eigen::MatrixXd lever_metric(const PolicyCostFunction& pcf, double lambda = 1e-6);

GeodesicPath optimal_policy_path(const PolicyCostFunction& pcf, std::span<const double> start,
                                 std::span<const double> velocity, std::size_t steps, double h);

}  // namespace aitk
