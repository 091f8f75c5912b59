#include "aitk/infotheory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "aitk/error.hpp"
#include "aitk/kvconfig.hpp"

namespace aitk {

namespace {

constexpr double kRelativeFloor = 1e-12;
constexpr double kUnderflow = 1e-300;

}  // namespace

void GridSpec::validate() const {
    if (axes.empty()) throw invalid_argument("grid has no axes");
    for (const auto& a : axes) {
        if (a.count < 8) throw invalid_argument("axis '" + a.name + "' needs at least 8 samples");
        if (!std::isfinite(a.lower) || !std::isfinite(a.upper) || !(a.upper > a.lower)) {
            throw invalid_argument("axis '" + a.name + "' needs finite bounds with upper > lower");
        }
    }
}

std::size_t GridSpec::size() const {
    std::size_t n = 1;
    for (const auto& a : axes) n *= a.count;
    return n;
}

double GridSpec::cell_volume() const {
    double v = 1.0;
    for (const auto& a : axes) v *= a.spacing();
    return v;
}

std::size_t GridSpec::axis_index(std::string_view name) const {
    for (std::size_t i = 0; i < axes.size(); ++i) {
        if (axes[i].name == name) return i;
    }
    throw invalid_argument("grid has no axis '" + std::string(name) + "'");
}

std::size_t GridSpec::stride(std::size_t axis) const {
    std::size_t s = 1;
    for (std::size_t i = axis + 1; i < axes.size(); ++i) s *= axes[i].count;
    return s;
}

GridDistribution GridDistribution::normalized(GridSpec grid, std::vector<double> values, double eps) {
    grid.validate();
    if (values.size() != grid.size()) throw invalid_argument("value count does not match the grid");
    if (!(eps > 0.0)) throw invalid_argument("smoothing width must be positive");
    double mass = 0.0;
    for (double v : values) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw Error(ErrorCode::numeric, "density values must be finite and >= 0");
        mass += v;
    }
    mass *= grid.cell_volume();
    if (!(mass > 0.0)) throw Error(ErrorCode::numeric, "density has zero mass on the grid");
    for (double& v : values) v /= mass;
    return GridDistribution(std::move(grid), std::move(values), eps);
}

double GridDistribution::integral() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s * grid_.cell_volume();
}

double GridDistribution::peak() const { return *std::max_element(values_.begin(), values_.end()); }

std::string GridDistribution::serialize() const {
    auto list = [&](auto get) {
        std::string out;
        for (std::size_t i = 0; i < grid_.axes.size(); ++i) {
            if (i) out += ',';
            out += get(grid_.axes[i]);
        }
        return out;
    };
    std::string out = "grid axes=" + list([](const Axis& a) { return a.name; }) +
                      " lower=" + list([](const Axis& a) { return format_double(a.lower); }) +
                      " upper=" + list([](const Axis& a) { return format_double(a.upper); }) +
                      " counts=" + list([](const Axis& a) { return std::to_string(a.count); }) +
                      " eps=" + format_double(eps_) + "\n";
    for (double v : values_) {
        out += format_double(v);
        out += '\n';
    }
    return out;
}

GridDistribution GridDistribution::deserialize(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string header;
    std::getline(in, header);
    std::istringstream hs(header);
    std::string tag;
    hs >> tag;
    if (tag != "grid") throw Error(ErrorCode::parse, "distribution header must start with 'grid'");
    std::vector<std::string> names;
    std::vector<double> lower, upper;
    std::vector<std::size_t> counts;
    double eps = 0.0;
    std::string field;
    while (hs >> field) {
        auto eq = field.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::parse, "bad header field '" + field + "'");
        std::string key = field.substr(0, eq);
        auto items = split(field.substr(eq + 1), ',');
        if (key == "axes") {
            names = items;
        } else if (key == "lower") {
            for (auto& s : items) lower.push_back(std::stod(s));
        } else if (key == "upper") {
            for (auto& s : items) upper.push_back(std::stod(s));
        } else if (key == "counts") {
            for (auto& s : items) counts.push_back(std::stoul(s));
        } else if (key == "eps") {
            eps = std::stod(items.at(0));
        } else {
            throw Error(ErrorCode::parse, "unknown header field '" + key + "'");
        }
    }
    if (lower.size() != names.size() || upper.size() != names.size() || counts.size() != names.size()) {
        throw Error(ErrorCode::parse, "header axis lists disagree in length");
    }
    GridSpec grid;
    for (std::size_t i = 0; i < names.size(); ++i) grid.axes.push_back(Axis{names[i], lower[i], upper[i], counts[i]});
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (!line.empty()) values.push_back(std::stod(line));
    }
    grid.validate();
    if (values.size() != grid.size()) throw Error(ErrorCode::parse, "value count does not match the header");
    return GridDistribution(std::move(grid), std::move(values), eps);
}

double smoothed_delta(double x, double center, double eps) {
    if (!(eps > 0.0)) throw invalid_argument("smoothing width must be positive");
    const double z = (x - center) / eps;
    return std::exp(-0.5 * z * z) / (eps * std::sqrt(2.0 * std::numbers::pi));
}

// ---------------------------------------------------------------------------
// Nested construction

namespace {

enum class Form { point, pair, map, lifted_sigma, chain, chain_pair, chain_lifted_sigma, chain_lifted_tau };

Form classify(const TopologyExpr& expr) {
    const std::string text = render(canonicalize(expr));
    static const std::vector<std::pair<std::string, Form>> forms{
        {"sig(m1)", Form::point},
        {"sig(m1, m2)", Form::pair},
        {"sig(phi1)", Form::map},
        {"sig^(1)(m1)", Form::lifted_sigma},
        {"sig tau(m1)", Form::chain},
        {"sig tau(m1, m2)", Form::chain_pair},
        {"sig^(1) tau(m1)", Form::chain_lifted_sigma},
        {"sig tau^(1)(m1)", Form::chain_lifted_tau},
    };
    for (const auto& [t, f] : forms) {
        if (t == text) return f;
    }
    throw invalid_argument("no nested-delta construction for '" + text + "'");
}

bool is_chain(Form f) { return f >= Form::chain; }
bool has_pair(Form f) { return f == Form::pair || f == Form::chain_pair; }

// Inner functional value at the point coordinates.
class Inner {
public:
    Inner(Form form, const MetricBinding& b) : form_(form), b_(b) {
        auto need = [](bool bound, const char* name) {
            if (!bound) throw invalid_argument(std::string("unbound symbol '") + name + "'");
        };
        if (has_pair(form)) {
            need(static_cast<bool>(b.sigma_pair), "sigma_pair");
        } else {
            need(static_cast<bool>(b.sigma), "sigma");
        }
        if (form == Form::map) need(static_cast<bool>(b.phi), "phi");
        if (form == Form::lifted_sigma || form == Form::chain_lifted_sigma) {
            need(static_cast<bool>(b.sigma_lift), "sigma_lift");
        }
        if (is_chain(form)) need(static_cast<bool>(b.tau), "tau");
        if (form == Form::chain_lifted_tau) need(static_cast<bool>(b.tau_lift), "tau_lift");
    }

    double operator()(double m, double n) const {
        double s = 0.0;
        switch (form_) {
            case Form::point:
            case Form::chain:
            case Form::chain_lifted_tau: s = b_.sigma(m); break;
            case Form::pair:
            case Form::chain_pair: s = b_.sigma_pair(m, n); break;
            case Form::map: s = b_.sigma(b_.phi(m)); break;
            case Form::lifted_sigma:
            case Form::chain_lifted_sigma: s = b_.sigma_lift(b_.sigma(m)); break;
        }
        if (!is_chain(form_)) return s;
        double t = b_.tau(s);
        if (form_ == Form::chain_lifted_tau) t = b_.tau_lift(t);
        return t;
    }

private:
    Form form_;
    const MetricBinding& b_;
};

std::size_t point_axis_count(Form f) { return has_pair(f) ? 2 : 1; }

}  // namespace

std::vector<std::string> required_axes(const TopologyExpr& expr) {
    Form f = classify(expr);
    std::vector<std::string> out{"m"};
    if (has_pair(f)) out.push_back("n");
    out.push_back("a");
    if (is_chain(f)) out.push_back("b");
    return out;
}

GridSpec default_grid(const TopologyExpr& expr, const MetricBinding& binding, const std::vector<Axis>& point_axes,
                      double eps, std::size_t offset_count) {
    if (!(eps > 0.0)) throw invalid_argument("smoothing width must be positive");
    Form f = classify(expr);
    Inner inner(f, binding);
    if (point_axes.size() != point_axis_count(f)) throw invalid_argument("wrong number of point axes");
    double lo = INFINITY, hi = -INFINITY;
    const Axis& m = point_axes[0];
    const Axis* n = point_axes.size() > 1 ? &point_axes[1] : nullptr;
    for (std::size_t i = 0; i < m.count; ++i) {
        for (std::size_t j = 0; j < (n ? n->count : 1); ++j) {
            double v = inner(m.center(i), n ? n->center(j) : 0.0);
            if (!std::isfinite(v)) throw Error(ErrorCode::numeric, "inner functional is not finite");
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    GridSpec g;
    g.axes = point_axes;
    if (is_chain(f)) {
        const double peak = 1.0 / (eps * std::sqrt(2.0 * std::numbers::pi));
        g.axes.push_back(Axis{"a", -3.0 * eps, peak + 3.0 * eps, offset_count});
        g.axes.push_back(Axis{"b", lo - 3.0 * eps, hi + 3.0 * eps, offset_count});
    } else {
        g.axes.push_back(Axis{"a", lo - 3.0 * eps, hi + 3.0 * eps, offset_count});
    }
    return g;
}

GridDistribution build_nested_distribution(const TopologyExpr& expr, const MetricBinding& binding,
                                           const GridSpec& grid, double eps) {
    if (!(eps > 0.0)) throw invalid_argument("smoothing width must be positive");
    grid.validate();
    Form f = classify(expr);
    Inner inner(f, binding);
    auto names = required_axes(expr);
    if (grid.axes.size() != names.size()) throw invalid_argument("grid axes do not match the expression");
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (grid.axes[i].name != names[i]) {
            throw invalid_argument("grid axis " + std::to_string(i) + " must be '" + names[i] + "'");
        }
    }

    std::vector<double> values(grid.size());
    std::vector<std::size_t> idx(grid.axes.size(), 0);
    const std::size_t npoint = point_axis_count(f);
    for (std::size_t cell = 0; cell < values.size(); ++cell) {
        std::size_t rem = cell;
        for (std::size_t ax = grid.axes.size(); ax-- > 0;) {
            idx[ax] = rem % grid.axes[ax].count;
            rem /= grid.axes[ax].count;
        }
        const double m = grid.axes[0].center(idx[0]);
        const double n = npoint > 1 ? grid.axes[1].center(idx[1]) : 0.0;
        const double g = inner(m, n);
        if (!std::isfinite(g)) {
            std::string where;
            for (std::size_t ax = 0; ax < grid.axes.size(); ++ax) {
                where += (ax ? ", " : "") + grid.axes[ax].name + "=" + format_double(grid.axes[ax].center(idx[ax]));
            }
            throw Error(ErrorCode::numeric, "non-finite metric evaluation at (" + where + ")");
        }
        const double a = grid.axes[npoint].center(idx[npoint]);
        if (is_chain(f)) {
            const double b = grid.axes[npoint + 1].center(idx[npoint + 1]);
            values[cell] = smoothed_delta(smoothed_delta(g, b, eps), a, eps);
        } else {
            values[cell] = smoothed_delta(g, a, eps);
        }
    }
    return GridDistribution::normalized(grid, std::move(values), eps);
}

GridDistribution marginalize(const GridDistribution& dist, std::string_view axis) {
    const GridSpec& g = dist.grid();
    const std::size_t ax = g.axis_index(axis);
    GridSpec out_grid;
    for (std::size_t i = 0; i < g.axes.size(); ++i) {
        if (i != ax) out_grid.axes.push_back(g.axes[i]);
    }
    const std::size_t stride = g.stride(ax);
    const std::size_t count = g.axes[ax].count;
    const std::size_t outer = g.size() / (stride * count);
    std::vector<double> values(out_grid.size(), 0.0);
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t k = 0; k < count; ++k) {
            for (std::size_t s = 0; s < stride; ++s) {
                values[o * stride + s] += dist.values()[(o * count + k) * stride + s];
            }
        }
    }
    return GridDistribution::normalized(std::move(out_grid), std::move(values), dist.eps());
}

// ---------------------------------------------------------------------------
// Information functionals

std::vector<double> log_derivative(std::span<const double> density, double spacing) {
    if (density.size() < 2) throw invalid_argument("derivative needs at least two samples along the axis");
    const double peak = *std::max_element(density.begin(), density.end());
    const double floor = std::max(kRelativeFloor * peak, std::numeric_limits<double>::min());
    std::vector<double> lg(density.size());
    for (std::size_t i = 0; i < density.size(); ++i) lg[i] = std::log(std::max(density[i], floor));
    std::vector<double> d(density.size());
    const std::size_t n = density.size();
    d[0] = (lg[1] - lg[0]) / spacing;
    d[n - 1] = (lg[n - 1] - lg[n - 2]) / spacing;
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (lg[i + 1] - lg[i - 1]) / (2.0 * spacing);
    return d;
}

double fisher_information(std::span<const double> density, double spacing) {
    auto d = log_derivative(density, spacing);
    double s = 0.0;
    for (std::size_t i = 0; i < density.size(); ++i) s += density[i] * d[i] * d[i];
    return s * spacing;
}

double fisher_information(const GridDistribution& dist, std::size_t axis) {
    const GridSpec& g = dist.grid();
    if (axis >= g.axes.size()) throw invalid_argument("axis out of range");
    const std::size_t count = g.axes[axis].count;
    if (count < 2) throw invalid_argument("axis '" + g.axes[axis].name + "' is degenerate");
    const std::size_t stride = g.stride(axis);
    const std::size_t outer = g.size() / (stride * count);
    const double h = g.axes[axis].spacing();
    // The floor is global so that every line sees the same cutoff.
    const double floor = std::max(kRelativeFloor * dist.peak(), std::numeric_limits<double>::min());

    std::vector<double> line(count), lg(count);
    double total = 0.0;
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t s = 0; s < stride; ++s) {
            for (std::size_t k = 0; k < count; ++k) {
                line[k] = dist.values()[(o * count + k) * stride + s];
                lg[k] = std::log(std::max(line[k], floor));
            }
            for (std::size_t k = 0; k < count; ++k) {
                double d = 0.0;
                if (k == 0) {
                    d = (lg[1] - lg[0]) / h;
                } else if (k + 1 == count) {
                    d = (lg[k] - lg[k - 1]) / h;
                } else {
                    d = (lg[k + 1] - lg[k - 1]) / (2.0 * h);
                }
                total += line[k] * d * d;
            }
        }
    }
    return total * g.cell_volume();
}

double fisher_information(const GridDistribution& dist, std::string_view axis) {
    return fisher_information(dist, dist.grid().axis_index(axis));
}

CramerRaoReport cramer_rao_report(const GridDistribution& dist, double tolerance) {
    const GridSpec& g = dist.grid();
    CramerRaoReport rep;
    rep.single_axis = g.axes.size() == 1;
    for (std::size_t ax = 0; ax < g.axes.size(); ++ax) {
        AxisInformation info;
        info.axis = g.axes[ax].name;
        info.information = fisher_information(dist, ax);
        const std::size_t stride = g.stride(ax);
        const std::size_t count = g.axes[ax].count;
        std::vector<double> marginal(count, 0.0);
        for (std::size_t cell = 0; cell < g.size(); ++cell) marginal[(cell / stride) % count] += dist.values()[cell];
        double mass = 0.0, mean = 0.0;
        for (std::size_t k = 0; k < count; ++k) {
            mass += marginal[k];
            mean += marginal[k] * g.axes[ax].center(k);
        }
        mean /= mass;
        double var = 0.0;
        for (std::size_t k = 0; k < count; ++k) {
            const double d = g.axes[ax].center(k) - mean;
            var += marginal[k] * d * d;
        }
        info.mean = mean;
        info.variance = var / mass;
        info.product = info.variance * info.information;
        rep.axes.push_back(info);
    }
    if (rep.single_axis) rep.bound_holds = rep.axes[0].product >= 1.0 - tolerance;
    return rep;
}

GridDistribution gaussian_location(double mean, double sd, std::size_t samples, double span_sd) {
    if (!(sd > 0.0)) throw invalid_argument("standard deviation must be positive");
    GridSpec g;
    g.axes.push_back(Axis{"x", mean - span_sd * sd, mean + span_sd * sd, samples});
    std::vector<double> v(samples);
    for (std::size_t i = 0; i < samples; ++i) v[i] = smoothed_delta(g.axes[0].center(i), mean, sd);
    return GridDistribution::normalized(std::move(g), std::move(v), sd);
}

std::array<double, 16> delta_matrix(const InfoTensorBinding& binding, const std::array<double, 4>& mbar, double eps) {
    std::array<double, 16> d{};
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            double arg = 0.0;
            for (std::size_t k = 0; k < 4; ++k) {
                const auto& fn = binding.lambda[InfoTensorBinding::at(i, j, k)];
                const double v = fn ? fn(mbar[k]) : 0.0;
                if (!std::isfinite(v)) {
                    throw Error(ErrorCode::numeric, "Lambda component (" + std::to_string(i) + "," + std::to_string(j) +
                                                        "," + std::to_string(k) + ") is not finite");
                }
                arg += v;
            }
            d[i * 4 + j] = smoothed_delta(arg, binding.offsets[i * 4 + j], eps);
        }
    }
    return d;
}

double information_density(const InfoTensorBinding& binding, const std::array<double, 4>& mbar, double eps) {
    if (!(eps > 0.0)) throw invalid_argument("smoothing width must be positive");
    auto checked = [&](const std::array<double, 4>& p) {
        auto d = delta_matrix(binding, p, eps);
        for (double v : d) {
            if (v < kUnderflow) {
                throw Error(ErrorCode::numeric, "delta underflow at the evaluation point; increase eps");
            }
        }
        return d;
    };
    const auto centre = checked(mbar);
    // grad[i][kl] = d_i ln D_kl
    std::array<std::array<double, 16>, 4> grad{};
    for (std::size_t i = 0; i < 4; ++i) {
        const double h = 1e-5 * std::max(1.0, std::abs(mbar[i]));
        auto up = mbar, down = mbar;
        up[i] += h;
        down[i] -= h;
        const auto du = checked(up);
        const auto dd = checked(down);
        for (std::size_t kl = 0; kl < 16; ++kl) grad[i][kl] = (std::log(du[kl]) - std::log(dd[kl])) / (2.0 * h);
    }
    double total = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            double contraction = 0.0;
            for (std::size_t kl = 0; kl < 16; ++kl) contraction += grad[i][kl] * grad[j][kl];
            total += centre[i * 4 + j] * contraction;
        }
    }
    return total;
}

std::function<double(double)> named_function(std::string_view spec) {
    auto parts = split(spec, ':');
    const std::string& name = parts[0];
    auto arg = [&](std::size_t i) {
        if (parts.size() <= i) throw config_error("function '" + std::string(spec) + "' is missing a parameter");
        try {
            std::size_t used = 0;
            const double v = std::stod(parts[i], &used);
            if (used == parts[i].size()) return v;
        } catch (const std::exception&) {
        }
        throw config_error("bad parameter in function '" + std::string(spec) + "'");
    };
    if (name == "identity") return [](double x) { return x; };
    if (name == "square") return [](double x) { return x * x; };
    if (name == "abs") return [](double x) { return std::abs(x); };
    if (name == "sin") return [](double x) { return std::sin(x); };
    if (name == "cos") return [](double x) { return std::cos(x); };
    if (name == "tanh") return [](double x) { return std::tanh(x); };
    if (name == "exp") return [](double x) { return std::exp(x); };
    if (name == "scale") {
        double c = arg(1);
        return [c](double x) { return c * x; };
    }
    if (name == "shift") {
        double c = arg(1);
        return [c](double x) { return x + c; };
    }
    if (name == "affine") {
        double a = arg(1), b = arg(2);
        return [a, b](double x) { return a * x + b; };
    }
    throw config_error("unknown function '" + std::string(spec) + "'");
}

std::function<double(double, double)> named_pair_function(std::string_view spec) {
    if (spec == "diff") return [](double m, double n) { return m - n; };
    if (spec == "absdiff") return [](double m, double n) { return std::abs(m - n); };
    if (spec == "sum") return [](double m, double n) { return m + n; };
    if (spec == "product") return [](double m, double n) { return m * n; };
    throw config_error("unknown pair function '" + std::string(spec) + "'");
}

}  // namespace aitk
