#include "aitk/policy_cost.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "aitk/infotheory.hpp"
#include "aitk/kvconfig.hpp"

namespace aitk {

FiniteGroup::FiniteGroup(std::vector<std::vector<std::size_t>> table, std::vector<std::size_t> generators)
    : table_(std::move(table)), generators_(std::move(generators)) {
    const std::size_t n = table_.size();
    if (n == 0) throw invalid_argument("empty group");
    for (const auto& row : table_) {
        if (row.size() != n) throw invalid_argument("group table is not square");
        for (std::size_t v : row) {
            if (v >= n) throw invalid_argument("group table entry out of range");
        }
    }
    for (std::size_t a = 0; a < n; ++a) {
        std::vector<bool> row_seen(n), col_seen(n);
        for (std::size_t b = 0; b < n; ++b) {
            row_seen[table_[a][b]] = true;
            col_seen[table_[b][a]] = true;
        }
        for (std::size_t v = 0; v < n; ++v) {
            if (!row_seen[v] || !col_seen[v]) throw invalid_argument("group table is not a Latin square");
        }
    }
    for (std::size_t g : generators_) {
        if (g >= n) throw invalid_argument("generator out of range");
    }
    bool found = false;
    for (std::size_t e = 0; e < n && !found; ++e) {
        bool ok = true;
        for (std::size_t a = 0; a < n && ok; ++a) ok = table_[e][a] == a && table_[a][e] == a;
        if (ok) {
            identity_ = e;
            found = true;
        }
    }
    if (!found) throw invalid_argument("group table has no identity");
    if (n <= 64 && !is_associative()) throw invalid_argument("group table is not associative");
}

FiniteGroup FiniteGroup::cyclic(std::size_t n) {
    if (n == 0) throw invalid_argument("empty group");
    std::vector<std::vector<std::size_t>> t(n, std::vector<std::size_t>(n));
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) t[a][b] = (a + b) % n;
    }
    return FiniteGroup(std::move(t), n > 1 ? std::vector<std::size_t>{1} : std::vector<std::size_t>{});
}

FiniteGroup FiniteGroup::dihedral(std::size_t n) {
    if (n == 0) throw invalid_argument("dihedral order must be positive");
    // element (k, f) -> k + n * f; rotation r^k followed by optional reflection
    const std::size_t m = 2 * n;
    std::vector<std::vector<std::size_t>> t(m, std::vector<std::size_t>(m));
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < m; ++b) {
            const std::size_t ka = a % n, fa = a / n, kb = b % n, fb = b / n;
            // (r^ka s^fa)(r^kb s^fb) = r^(ka + (-1)^fa kb) s^(fa + fb)
            const std::size_t k = fa ? (ka + n - kb) % n : (ka + kb) % n;
            t[a][b] = k + n * ((fa + fb) % 2);
        }
    }
    std::vector<std::size_t> gens;
    if (n > 1) gens.push_back(1);
    gens.push_back(n);
    return FiniteGroup(std::move(t), std::move(gens));
}

FiniteGroup FiniteGroup::direct_product(const FiniteGroup& a, const FiniteGroup& b) {
    const std::size_t na = a.order(), nb = b.order();
    std::vector<std::vector<std::size_t>> t(na * nb, std::vector<std::size_t>(na * nb));
    for (std::size_t x = 0; x < na * nb; ++x) {
        for (std::size_t y = 0; y < na * nb; ++y) {
            t[x][y] = a.compose(x / nb, y / nb) * nb + b.compose(x % nb, y % nb);
        }
    }
    std::vector<std::size_t> gens;
    for (std::size_t g : a.generators()) gens.push_back(g * nb + b.identity());
    for (std::size_t g : b.generators()) gens.push_back(a.identity() * nb + g);
    return FiniteGroup(std::move(t), std::move(gens));
}

FiniteGroup FiniteGroup::from_spec(const std::string& spec) {
    std::optional<FiniteGroup> out;
    for (const auto& raw : split(spec, 'x')) {
        const std::string part = trim(raw);
        const auto colon = part.find(':');
        if (colon == std::string::npos) throw invalid_argument("bad group spec '" + part + "'");
        const std::string kind = trim(part.substr(0, colon));
        std::size_t n = 0;
        try {
            std::size_t used = 0;
            const std::string num = trim(part.substr(colon + 1));
            n = std::stoul(num, &used);
            if (used != num.size()) throw std::invalid_argument(num);
        } catch (const std::exception&) {
            throw invalid_argument("bad group size in '" + part + "'");
        }
        FiniteGroup g = kind == "cyclic"     ? cyclic(n)
                        : kind == "dihedral" ? dihedral(n)
                                             : throw invalid_argument("unknown group kind '" + kind + "'");
        out = out ? direct_product(*out, g) : g;
    }
    if (!out) throw invalid_argument("empty group spec");
    if (out->order() > 4096) throw invalid_argument("group too large");
    return *out;
}

std::size_t FiniteGroup::evaluate(std::span<const std::size_t> word) const {
    std::size_t g = identity_;
    for (std::size_t idx : word) {
        if (idx >= generators_.size()) throw invalid_argument("word letter out of range");
        g = table_[g][generators_[idx]];
    }
    return g;
}

std::vector<std::size_t> FiniteGroup::word_lengths() const {
    constexpr auto unreached = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> len(order(), unreached);
    std::deque<std::size_t> queue{identity_};
    len[identity_] = 0;
    while (!queue.empty()) {
        const std::size_t g = queue.front();
        queue.pop_front();
        for (std::size_t x : generators_) {
            const std::size_t h = table_[g][x];
            if (len[h] == unreached) {
                len[h] = len[g] + 1;
                queue.push_back(h);
            }
        }
    }
    return len;
}

bool FiniteGroup::is_associative() const {
    const std::size_t n = order();
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            for (std::size_t c = 0; c < n; ++c) {
                if (table_[table_[a][b]][c] != table_[a][table_[b][c]]) return false;
            }
        }
    }
    return true;
}

double policy_information(const PolicyCostFunction& pcf, double eps, std::size_t samples) {
    if (!(eps > 0.0)) throw invalid_argument("smoothing width must be positive");
    if (samples < 8) throw invalid_argument("need at least 8 quadrature cells");
    const std::size_t n = pcf.group.order();
    std::vector<double> values(n);
    for (std::size_t g = 0; g < n; ++g) {
        values[g] = pcf.value(g);
        if (!std::isfinite(values[g])) throw Error(ErrorCode::numeric, "cost is not finite");
    }
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    const double lower = *lo - 8.0 * eps, upper = *hi + 8.0 * eps;
    const double spacing = (upper - lower) / static_cast<double>(samples);

    double total = 0.0;
    std::vector<double> density(samples);
    for (std::size_t g = 0; g < n; ++g) {
        for (std::size_t i = 0; i < samples; ++i) {
            const double alpha = lower + (static_cast<double>(i) + 0.5) * spacing;
            density[i] = smoothed_delta(values[g], alpha, eps);
        }
        total += fisher_information(density, spacing);
    }
    return total / static_cast<double>(n);
}

Eigen::MatrixXd lever_metric(const PolicyCostFunction& pcf, double lambda) {
    const auto& G = pcf.group;
    const std::size_t k = G.generators().size();
    if (k == 0) throw invalid_argument("group has no generators");
    const std::size_t e = G.identity();
    const double base = pcf.cost(e, e);
    Eigen::MatrixXd s(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            const std::size_t word[2] = {i, j};
            const double v = pcf.cost(e, G.evaluate(word)) - pcf.value(G.generators()[i]) -
                             pcf.value(G.generators()[j]) + base;
            if (!std::isfinite(v)) throw Error(ErrorCode::numeric, "cost is not finite on a length-2 word");
            s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        }
    }
    Eigen::MatrixXd g = 0.5 * (s + s.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
    const double low = es.eigenvalues().minCoeff();
    if (low < lambda) g += (lambda - low) * Eigen::MatrixXd::Identity(g.rows(), g.cols());
    // keep symmetry exact after the shift
    return 0.5 * (g + g.transpose());
}

GeodesicPath optimal_policy_path(const PolicyCostFunction& pcf, std::span<const double> start,
                                 std::span<const double> velocity, std::size_t steps, double h) {
    return integrate_geodesic(MetricField::constant(lever_metric(pcf)), start, velocity, steps, h);
}

}  // namespace aitk
