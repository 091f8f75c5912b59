#include "aitk/aitk.h"

#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <new>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "aitk/cost_model.hpp"
#include "aitk/enumerator.hpp"
#include "aitk/error.hpp"
#include "aitk/grove.hpp"
#include "aitk/infotheory.hpp"
#include "aitk/kvconfig.hpp"
#include "aitk/policy_cost.hpp"
#include "aitk/regsim.hpp"
#include "aitk/situations.hpp"
#include "aitk/variational.hpp"

struct aitk_expr {
    aitk::TopologyExpr expr;
};

struct aitk_model {
    aitk::CostModel model;
};

struct aitk_strings {
    std::vector<std::string> items;
};

struct aitk_report {
    std::vector<std::pair<std::string, std::string>> values;
    std::vector<std::pair<std::string, std::string>> docs;

    void put(std::string key, std::string value) { values.emplace_back(std::move(key), std::move(value)); }
    void put(std::string key, double value) { put(std::move(key), aitk::format_double(value)); }
    void put_count(std::string key, std::size_t value) { put(std::move(key), std::to_string(value)); }
    void put_flag(std::string key, bool value) { put(std::move(key), std::string(value ? "true" : "false")); }
    void doc(std::string name, std::string text) { docs.emplace_back(std::move(name), std::move(text)); }
};

namespace {

thread_local std::string last_error;

aitk_status to_status(aitk::ErrorCode code) { return static_cast<aitk_status>(static_cast<int>(code)); }

template <class F>
aitk_status guard(F&& body) {
    try {
        last_error.clear();
        body();
        return AITK_OK;
    } catch (const aitk::Error& e) {
        last_error = e.what();
        return to_status(e.code());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return AITK_E_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return AITK_E_INTERNAL;
    }
}

void require(const void* p, const char* what) {
    if (!p) throw aitk::invalid_argument(std::string(what) + " is null");
}

const aitk::CostModel& model_or_shipped(const aitk_model* m) {
    static const aitk::CostModel shipped = aitk::CostModel::shipped();
    return m ? m->model : shipped;
}

std::string join(const aitk::Vec& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + aitk::format_double(v[i]);
    return s;
}

std::string fnv1a(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

aitk::Vec doubles(const aitk::KvConfig& cfg, const char* key, aitk::Vec fallback, std::size_t size) {
    aitk::Vec v = cfg.get_doubles(key, std::move(fallback));
    if (v.size() != size) {
        throw aitk::config_error(std::string(key) + " needs " + std::to_string(size) + " values");
    }
    return v;
}

std::size_t positive_count(const aitk::KvConfig& cfg, const char* key, long long fallback) {
    const long long v = cfg.get_int(key, fallback);
    if (v < 1) throw aitk::config_error(std::string(key) + " must be positive");
    return static_cast<std::size_t>(v);
}

void echo(aitk_report& r, const aitk::KvConfig& cfg) {
    for (const auto& [k, v] : cfg.entries()) r.put("config." + k, v);
}

// --- info ------------------------------------------------------------------

void info_report(aitk_report& r, const aitk::GridDistribution& dist) {
    const auto cr = aitk::cramer_rao_report(dist);
    std::string csv = "axis,information,mean,variance,product\n";
    for (const auto& a : cr.axes) {
        r.put("information." + a.axis, a.information);
        r.put("mean." + a.axis, a.mean);
        r.put("variance." + a.axis, a.variance);
        r.put("variance_x_information." + a.axis, a.product);
        csv += a.axis + "," + aitk::format_double(a.information) + "," + aitk::format_double(a.mean) + "," +
               aitk::format_double(a.variance) + "," + aitk::format_double(a.product) + "\n";
    }
    r.put_flag("single_axis", cr.single_axis);
    r.put_flag("bound_holds", cr.bound_holds);
    r.put("integral", dist.integral());
    r.doc("information.csv", csv);
}

void run_info(const aitk::KvConfig& cfg, aitk_report& r) {
    const std::string kind = cfg.get_string("kind", "gaussian");
    if (kind == "gaussian") {
        cfg.require_known({"kind", "mean", "sd", "samples", "span_sd"});
        const double mean = cfg.get_double("mean", 0.0), sd = cfg.get_double("sd", 1.0);
        const double span = cfg.get_double("span_sd", 6.0);
        const std::size_t samples = positive_count(cfg, "samples", 256);
        if (!(sd > 0.0) || !(span > 0.0)) throw aitk::config_error("sd and span_sd must be positive");
        r.put("kind", kind);
        r.put("mean", mean);
        r.put("sd", sd);
        r.put_count("samples", samples);
        r.put("span_sd", span);
        r.put("analytic_information", 1.0 / (sd * sd));
        info_report(r, aitk::gaussian_location(mean, sd, samples, span));
    } else if (kind == "nested") {
        cfg.require_known({"kind", "form", "eps", "points", "offsets", "point.lower", "point.upper", "bind."});
        const auto form = cfg.get("form");
        if (!form) throw aitk::config_error("nested info needs 'form'");
        const aitk::TopologyExpr expr = aitk::canonicalize(aitk::parse(*form));
        const double eps = cfg.get_double("eps", 0.1);
        const std::size_t points = positive_count(cfg, "points", 32), offsets = positive_count(cfg, "offsets", 48);
        const double lo = cfg.get_double("point.lower", -1.0), hi = cfg.get_double("point.upper", 1.0);
        aitk::MetricBinding b;
        b.sigma = aitk::named_function(cfg.get_string("bind.sigma", "square"));
        b.sigma_pair = aitk::named_pair_function(cfg.get_string("bind.sigma_pair", "absdiff"));
        b.sigma_lift = aitk::named_function(cfg.get_string("bind.sigma_lift", "tanh"));
        b.tau = aitk::named_function(cfg.get_string("bind.tau", "identity"));
        b.tau_lift = aitk::named_function(cfg.get_string("bind.tau_lift", "tanh"));
        b.phi = aitk::named_function(cfg.get_string("bind.phi", "sin"));
        const auto names = aitk::required_axes(expr);
        std::vector<aitk::Axis> point_axes;
        for (const auto& n : names) {
            if (n == "m" || n == "n") point_axes.push_back(aitk::Axis{n, lo, hi, points});
        }
        const auto grid = aitk::default_grid(expr, b, point_axes, eps, offsets);
        const auto dist = aitk::build_nested_distribution(expr, b, grid, eps);
        r.put("kind", kind);
        r.put("form", aitk::render(expr));
        r.put("eps", eps);
        r.put_count("points", points);
        r.put_count("offsets", offsets);
        info_report(r, dist);
        r.doc("distribution.grid", dist.serialize());
    } else if (kind == "grid") {
        cfg.require_known({"kind", "path"});
        const auto path = cfg.get("path");
        if (!path) throw aitk::config_error("grid info needs 'path'");
        std::ifstream in(*path, std::ios::binary);
        if (!in) throw aitk::Error(aitk::ErrorCode::io, "cannot read '" + *path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        r.put("kind", kind);
        r.put("path", *path);
        info_report(r, aitk::GridDistribution::deserialize(ss.str()));
    } else {
        throw aitk::config_error("unknown info kind '" + kind + "'");
    }
}

// --- critical ----------------------------------------------------------------

aitk::Functional make_functional(const aitk::KvConfig& cfg, std::size_t& dim, aitk::Vec& start) {
    const std::string name = cfg.get_string("functional", "quadratic");
    if (name == "quadratic") {
        const aitk::Vec center = cfg.get_doubles("center", {1.0, -2.0});
        dim = center.size();
        if (dim == 0) throw aitk::config_error("center is empty");
        const aitk::Vec scale = doubles(cfg, "scale", aitk::Vec(dim, 1.0), dim);
        start = doubles(cfg, "start", aitk::Vec(dim, 0.0), dim);
        return {[center, scale](std::span<const double> x) {
                    double s = 0.0;
                    for (std::size_t i = 0; i < x.size(); ++i) s += scale[i] * (x[i] - center[i]) * (x[i] - center[i]);
                    return s;
                },
                "quadratic"};
    }
    if (name == "rosenbrock") {
        dim = 2;
        start = doubles(cfg, "start", {-1.2, 1.0}, 2);
        return {[](std::span<const double> x) {
                    return (1.0 - x[0]) * (1.0 - x[0]) + 100.0 * (x[1] - x[0] * x[0]) * (x[1] - x[0] * x[0]);
                },
                "rosenbrock"};
    }
    if (name == "information_scale") {
        // Fisher information of a Gaussian of scale s on a fixed window, plus weight * s^2.
        dim = 1;
        start = doubles(cfg, "start", {2.0}, 1);
        const double window = cfg.get_double("window", 12.0), weight = cfg.get_double("weight", 1.0);
        const std::size_t samples = positive_count(cfg, "samples", 512);
        if (!(window > 0.0)) throw aitk::config_error("window must be positive");
        return {[window, weight, samples](std::span<const double> x) {
                    const double s = x[0];
                    if (!(s > 0.0)) return std::numeric_limits<double>::infinity();
                    const double spacing = 2.0 * window / static_cast<double>(samples);
                    std::vector<double> f(samples);
                    for (std::size_t i = 0; i < samples; ++i) {
                        const double z = (-window + (static_cast<double>(i) + 0.5) * spacing) / s;
                        f[i] = std::exp(-0.5 * z * z) / (s * std::sqrt(2.0 * std::numbers::pi));
                    }
                    return aitk::fisher_information(f, spacing) + weight * s * s;
                },
                "information_scale"};
    }
    throw aitk::config_error("unknown functional '" + name + "'");
}

void solve_report(aitk_report& r, const aitk::SolveResult& res, bool converged) {
    r.put_flag("converged", converged);
    r.put("theta", join(res.theta));
    r.put("value", res.value);
    r.put("residual", res.residual);
    r.put_count("iterations", res.iterations);
    r.doc("trace.csv", aitk::trace_csv(res));
}

// --- geodesic ----------------------------------------------------------------

aitk::PolicyCostFunction make_policy_cost(const aitk::KvConfig& cfg) {
    aitk::FiniteGroup group = aitk::FiniteGroup::from_spec(cfg.get_string("group", "cyclic:4"));
    const std::string cost = cfg.get_string("cost", "word_distance");
    aitk::PolicyCostFunction pcf{group, nullptr, nullptr};
    if (cost == "word_distance") {
        const auto lengths = group.word_lengths();
        const auto g = group;
        pcf.cost = [g, lengths](std::size_t a, std::size_t b) {
            for (std::size_t x = 0; x < g.order(); ++x) {
                if (g.compose(a, x) == b) return static_cast<double>(lengths[x]);
            }
            throw aitk::Error(aitk::ErrorCode::numeric, "no quotient in group table");
        };
    } else if (cost.rfind("constant:", 0) == 0) {
        double c = 0.0;
        try {
            c = std::stod(cost.substr(9));
        } catch (const std::exception&) {
            throw aitk::config_error("bad constant cost '" + cost + "'");
        }
        pcf.cost = [c](std::size_t, std::size_t) { return c; };
    } else {
        throw aitk::config_error("unknown cost '" + cost + "'");
    }
    return pcf;
}

aitk::MetricField make_metric(const aitk::KvConfig& cfg, aitk_report& r, const aitk::PolicyCostFunction* pcf) {
    const std::string kind = cfg.get_string("metric", "euclidean");
    r.put("metric", kind);
    if (kind == "euclidean") return aitk::MetricField::euclidean(positive_count(cfg, "dimension", 2));
    if (kind == "sphere") return aitk::MetricField::sphere();
    if (kind == "constant") {
        const aitk::Vec m = cfg.get_doubles("matrix", {});
        const auto d = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(m.size()))));
        if (d == 0 || d * d != m.size()) throw aitk::config_error("matrix needs d*d values");
        Eigen::MatrixXd g(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m[i * d + j];
        }
        return aitk::MetricField::constant(g);
    }
    if (kind == "policy" && pcf) {
        const Eigen::MatrixXd g = aitk::lever_metric(*pcf, cfg.get_double("lambda", 1e-6));
        r.put_count("group_order", pcf->group.order());
        r.put("policy_information", aitk::policy_information(*pcf, cfg.get_double("eps", 0.1)));
        return aitk::MetricField::constant(g);
    }
    throw aitk::config_error("unknown metric '" + kind + "'");
}

// --- regsim ------------------------------------------------------------------

void echo_scenario(aitk_report& r, const aitk::regsim::Scenario& s) {
    const auto& g = s.game;
    r.put_count("config.agents", g.agents);
    r.put("config.capacity", g.capacity);
    r.put("config.regrowth", g.regrowth);
    r.put("config.outside_utility", g.outside_utility);
    r.put_count("config.rounds", g.rounds);
    r.put("config.initial_resource", g.initial_resource < 0.0 ? g.capacity : g.initial_resource);
    r.put("config.retention", g.retention);
    r.put("config.harvest_value", g.harvest_value);
    r.put("config.effort_cost", g.effort_cost);
    r.put("config.inspection_cost", g.inspection_cost);
    r.put_count("config.exit_window", g.exit_window);
    const auto& a = s.agent;
    r.put_count("config.agent.order", static_cast<std::size_t>(a.order));
    r.put("config.agent.greed", a.greed);
    r.put("config.agent.target_mean", a.target_mean);
    r.put("config.agent.target_sd", a.target_sd);
    r.put("config.agent.sensitivity", a.sensitivity);
    r.put("config.agent.obs_sd", a.obs_sd);
    r.put("config.agent.prior_sd", a.prior_sd);
    r.put("config.agent.prior_strength", a.prior_strength);
    for (const auto& line : aitk::split(s.policy.render(), '\n')) {
        const auto eq = line.find(" = ");
        if (eq != std::string::npos) r.put("config." + line.substr(0, eq), line.substr(eq + 3));
    }
    for (const auto& e : s.events) r.put("config.event", e.render());
    if (!s.mode.empty()) r.put("config.mode", s.mode);
}

void welfare_report(aitk_report& r, const aitk::regsim::WelfareSummary& w) {
    r.put("welfare", w.welfare);
    r.put("total_utility", w.total_utility);
    r.put("retained_agent_rounds", w.retained_agent_rounds);
    r.put("enforcement_cost", w.enforcement_cost);
    r.put("final_resource", w.final_resource);
    r.put("min_resource", w.min_resource);
    r.put("depletion_round", std::to_string(w.depletion_round));
    r.put_count("final_active", w.final_active);
}

aitk::regsim::Scenario scenario_from(const char* text, const char* family) {
    aitk::KvConfig cfg = aitk::KvConfig::parse(text);
    if (family) cfg.set("policy.family", family);
    return aitk::regsim::Scenario::from_config(cfg);
}

template <class F>
aitk_status with_report(aitk_report** out, F&& body) {
    aitk_report* r = nullptr;
    const aitk_status st = guard([&] {
        require(out, "output pointer");
        r = new aitk_report();
        body(*r);
    });
    if (out) {
        if (st == AITK_OK || st == AITK_E_NOT_CONVERGED) {
            *out = r;
            return st;
        }
        *out = nullptr;
    }
    delete r;
    return st;
}

}  // namespace

extern "C" {

const char* aitk_last_error(void) { return last_error.c_str(); }
const char* aitk_version(void) { return "1.0.0"; }

size_t aitk_strings_size(const aitk_strings* list) { return list ? list->items.size() : 0; }
const char* aitk_strings_at(const aitk_strings* list, size_t index) {
    return list && index < list->items.size() ? list->items[index].c_str() : nullptr;
}
void aitk_strings_free(aitk_strings* list) { delete list; }

size_t aitk_report_size(const aitk_report* r) { return r ? r->values.size() : 0; }
const char* aitk_report_key(const aitk_report* r, size_t i) {
    return r && i < r->values.size() ? r->values[i].first.c_str() : nullptr;
}
const char* aitk_report_value(const aitk_report* r, size_t i) {
    return r && i < r->values.size() ? r->values[i].second.c_str() : nullptr;
}
const char* aitk_report_get(const aitk_report* r, const char* key) {
    if (!r || !key) return nullptr;
    for (const auto& [k, v] : r->values) {
        if (k == key) return v.c_str();
    }
    return nullptr;
}
size_t aitk_report_doc_count(const aitk_report* r) { return r ? r->docs.size() : 0; }
const char* aitk_report_doc_name(const aitk_report* r, size_t i) {
    return r && i < r->docs.size() ? r->docs[i].first.c_str() : nullptr;
}
const char* aitk_report_doc_text(const aitk_report* r, size_t i) {
    return r && i < r->docs.size() ? r->docs[i].second.c_str() : nullptr;
}
void aitk_report_free(aitk_report* r) { delete r; }

aitk_status aitk_expr_parse(const char* text, aitk_expr** out) {
    return guard([&] {
        require(text, "text");
        require(out, "output pointer");
        *out = new aitk_expr{aitk::canonicalize(aitk::parse(text))};
    });
}

void aitk_expr_free(aitk_expr* expr) { delete expr; }

aitk_status aitk_expr_render(const aitk_expr* expr, char* buffer, size_t capacity, size_t* needed) {
    return guard([&] {
        require(expr, "expression");
        const std::string text = aitk::render(expr->expr);
        if (needed) *needed = text.size();
        if (buffer && capacity > 0) {
            const std::size_t n = std::min(text.size(), capacity - 1);
            std::memcpy(buffer, text.data(), n);
            buffer[n] = '\0';
        }
    });
}

aitk_status aitk_expr_depth(const aitk_expr* expr, int* out) {
    return guard([&] {
        require(expr, "expression");
        require(out, "output pointer");
        *out = expr->expr.depth();
    });
}

aitk_status aitk_expr_rank(const aitk_expr* expr, const aitk_model* model, unsigned* out) {
    return guard([&] {
        require(expr, "expression");
        require(out, "output pointer");
        *out = aitk::rank(expr->expr, model_or_shipped(model));
    });
}

aitk_status aitk_expr_multiply(const aitk_expr* left, const aitk_expr* right, aitk_expr** out) {
    return guard([&] {
        require(left, "left expression");
        require(right, "right expression");
        require(out, "output pointer");
        *out = new aitk_expr{aitk::canonicalize(aitk::multiply(left->expr, right->expr))};
    });
}

aitk_status aitk_expr_is_prime(const aitk_expr* expr, int* out) {
    return guard([&] {
        require(expr, "expression");
        require(out, "output pointer");
        *out = aitk::is_prime(expr->expr) ? 1 : 0;
    });
}

aitk_status aitk_expr_factor(const aitk_expr* expr, aitk_strings** out) {
    return guard([&] {
        require(expr, "expression");
        require(out, "output pointer");
        auto list = std::make_unique<aitk_strings>();
        for (const auto& f : aitk::factor(expr->expr)) list->items.push_back(aitk::render(f));
        *out = list.release();
    });
}

aitk_status aitk_model_shipped(aitk_model** out) {
    return guard([&] {
        require(out, "output pointer");
        *out = new aitk_model{aitk::CostModel::shipped()};
    });
}

aitk_status aitk_model_load(const char* path, aitk_model** out) {
    return guard([&] {
        require(path, "path");
        require(out, "output pointer");
        *out = new aitk_model{aitk::CostModel::load(path)};
    });
}

aitk_status aitk_model_parse(const char* text, aitk_model** out) {
    return guard([&] {
        require(text, "text");
        require(out, "output pointer");
        *out = new aitk_model{aitk::CostModel::from_config(aitk::KvConfig::parse(text))};
    });
}

aitk_status aitk_model_render(const aitk_model* model, aitk_strings** out) {
    return guard([&] {
        require(model, "model");
        require(out, "output pointer");
        auto list = std::make_unique<aitk_strings>();
        for (const auto& line : aitk::split(model->model.to_config().render(), '\n')) {
            if (!line.empty()) list->items.push_back(line);
        }
        *out = list.release();
    });
}

void aitk_model_free(aitk_model* model) { delete model; }

aitk_status aitk_partitions(unsigned n, aitk_strings** out) {
    return guard([&] {
        require(out, "output pointer");
        if (n == 0) throw aitk::invalid_argument("partitions need n >= 1");
        auto list = std::make_unique<aitk_strings>();
        for (const auto& p : aitk::integer_partitions(n)) list->items.push_back(p.render());
        *out = list.release();
    });
}

aitk_status aitk_enumerate(int depth, const char* partition, const aitk_model* model, aitk_strings** out) {
    return guard([&] {
        require(out, "output pointer");
        if (depth < 0 || depth > aitk::kMaxDepth) throw aitk::invalid_argument("depth must be 0, 1 or 2");
        const auto& m = model_or_shipped(model);
        aitk::PartitionSpec p = partition ? aitk::PartitionSpec::parse(partition)
                                          : aitk::PartitionSpec{{static_cast<unsigned>(depth + 1)}};
        if (p.total() != static_cast<unsigned>(depth + 1)) {
            throw aitk::invalid_argument("partition " + p.render() + " does not sum to depth + 1");
        }
        auto list = std::make_unique<aitk_strings>();
        for (const auto& g : aitk::enumerate_groves(p, m)) list->items.push_back(g.render());
        *out = list.release();
    });
}

aitk_status aitk_count_by_rank(unsigned rank, const aitk_model* model, size_t* out) {
    return guard([&] {
        require(out, "output pointer");
        *out = aitk::count_by_rank(rank, model_or_shipped(model));
    });
}

aitk_status aitk_total_multiplicity(int depth, const aitk_model* model, size_t* out) {
    return guard([&] {
        require(out, "output pointer");
        *out = aitk::total_multiplicity(depth, model_or_shipped(model));
    });
}

aitk_status aitk_verify_table(int table, const char* path, const aitk_model* model, int apply_exceptions,
                              aitk_report** out) {
    return with_report(out, [&](aitk_report& r) {
        require(path, "table path");
        if (table < 0 || table > 2) throw aitk::invalid_argument("table must be 0, 1 or 2");
        std::ifstream in(path, std::ios::binary);
        if (!in) throw aitk::Error(aitk::ErrorCode::io, std::string("cannot read '") + path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        const auto reference = aitk::read_table_file(path);
        const auto rep = aitk::verify_against_table(table, model_or_shipped(model), reference, apply_exceptions != 0);
        r.put("table", std::to_string(table));
        r.put("table.hash", fnv1a(ss.str()));
        r.put("depth", std::to_string(rep.depth));
        r.put("partition", rep.partition.render());
        r.put_flag("apply_exceptions", apply_exceptions != 0);
        r.put_count("produced", rep.produced.size());
        r.put_count("expected", rep.expected ? rep.expected->size() : 0);
        r.put_count("missing", rep.missing.size());
        r.put_count("extra", rep.extra.size());
        r.put_count("exceptions_applied", rep.exceptions_applied.size());
        r.put_flag("exact", rep.exact());
        r.put_flag("confined_to_exceptions", rep.confined_to_exceptions);
        r.put_flag("acceptable", rep.acceptable());
        std::string produced, diff;
        for (const auto& line : rep.produced) produced += line + "\n";
        for (const auto& line : rep.missing) diff += "- " + line + "\n";
        for (const auto& line : rep.extra) diff += "+ " + line + "\n";
        for (const auto& [from, to] : rep.exceptions_applied) diff += "= " + from + " => " + to + "\n";
        r.doc("produced.txt", produced);
        r.doc("diff.txt", diff);
    });
}

aitk_status aitk_situations(unsigned order, aitk_strings** out) {
    return guard([&] {
        require(out, "output pointer");
        auto list = std::make_unique<aitk_strings>();
        for (const auto& s : aitk::enumerate_situations(order)) list->items.push_back(aitk::render(s));
        *out = list.release();
    });
}

aitk_status aitk_run_info(const char* config_text, aitk_report** out) {
    return with_report(out, [&](aitk_report& r) {
        require(config_text, "config");
        const auto cfg = aitk::KvConfig::parse(config_text);
        echo(r, cfg);
        run_info(cfg, r);
    });
}

aitk_status aitk_run_critical(const char* config_text, uint64_t seed, aitk_report** out) {
    return with_report(out, [&](aitk_report& r) {
        require(config_text, "config");
        const auto cfg = aitk::KvConfig::parse(config_text);
        cfg.require_known({"functional", "center", "scale", "start", "window", "weight", "samples", "tol", "h",
                           "max_iterations", "jitter", "lower", "upper"});
        echo(r, cfg);
        std::size_t dim = 0;
        aitk::Vec start;
        const aitk::Functional f = make_functional(cfg, dim, start);
        aitk::SolveOptions opt;
        opt.tol = cfg.get_double("tol", opt.tol);
        opt.h = cfg.get_double("h", opt.h);
        opt.max_iterations = positive_count(cfg, "max_iterations", static_cast<long long>(opt.max_iterations));
        opt.jitter = cfg.get_double("jitter", 0.0);
        opt.seed = seed;
        if (!(opt.tol > 0.0) || !(opt.h > 0.0) || !(opt.jitter >= 0.0)) {
            throw aitk::config_error("tol and h must be positive, jitter non-negative");
        }
        if (cfg.has("lower")) opt.lower = doubles(cfg, "lower", {}, dim);
        if (cfg.has("upper")) opt.upper = doubles(cfg, "upper", {}, dim);
        r.put("functional", f.tag);
        r.put("seed", std::to_string(seed));
        try {
            solve_report(r, aitk::solve_critical(f, start, opt), true);
        } catch (const aitk::NotConverged& e) {
            solve_report(r, e.best(), false);
            throw;
        }
    });
}

aitk_status aitk_run_geodesic(const char* config_text, aitk_report** out) {
    return with_report(out, [&](aitk_report& r) {
        require(config_text, "config");
        const auto cfg = aitk::KvConfig::parse(config_text);
        cfg.require_known({"metric", "dimension", "matrix", "group", "cost", "lambda", "eps", "start", "velocity",
                           "steps", "h"});
        echo(r, cfg);
        std::optional<aitk::PolicyCostFunction> pcf;
        if (cfg.get_string("metric", "euclidean") == "policy") pcf = make_policy_cost(cfg);
        const aitk::MetricField field = make_metric(cfg, r, pcf ? &*pcf : nullptr);
        const std::size_t d = field.dimension;
        aitk::Vec start_default(d, 0.0);
        if (cfg.get_string("metric", "euclidean") == "sphere") start_default = {std::numbers::pi / 2.0, 0.0};
        const aitk::Vec start = doubles(cfg, "start", start_default, d);
        const aitk::Vec velocity = doubles(cfg, "velocity", aitk::Vec(d, 1.0), d);
        const std::size_t steps = positive_count(cfg, "steps", 1000);
        const double h = cfg.get_double("h", 1e-3);
        r.put_count("steps", steps);
        r.put("h", h);
        r.put("velocity", join(velocity));
        try {
            const auto path = aitk::integrate_geodesic(field, start, velocity, steps, h);
            const double e0 = aitk::metric_energy(field, path.points.front(), path.velocities.front());
            const double e1 = aitk::metric_energy(field, path.points.back(), path.velocities.back());
            r.put("endpoint", join(path.points.back()));
            r.put("energy_start", e0);
            r.put("energy_end", e1);
            r.put("energy_relative_drift", e0 != 0.0 ? std::abs(e1 - e0) / std::abs(e0) : std::abs(e1));
            r.doc("geodesic.csv", path.csv());
        } catch (const aitk::GeodesicError& e) {
            r.put_count("completed_steps", e.partial().points.size() - 1);
            r.doc("geodesic.csv", e.partial().csv());
            throw;
        }
    });
}

aitk_status aitk_simulate(const char* config_text, uint64_t seed, long long rounds, const char* family,
                          aitk_report** out) {
    return with_report(out, [&](aitk_report& r) {
        require(config_text, "config");
        aitk::regsim::Scenario s = scenario_from(config_text, family);
        if (rounds >= 0) {
            s.game.rounds = static_cast<std::size_t>(rounds);
            for (const auto& e : s.events) {
                if (e.round > s.game.rounds) throw aitk::config_error("event round after the last round");
            }
        }
        echo_scenario(r, s);
        r.put("seed", std::to_string(seed));
        const auto trace = aitk::regsim::run_scenario(s, seed);
        welfare_report(r, trace.summary);
        r.doc("trace.csv", trace.csv());
    });
}

aitk_status aitk_optimize(const char* config_text, uint64_t seed, const char* family, aitk_report** out) {
    return with_report(out, [&](aitk_report& r) {
        require(config_text, "config");
        const aitk::regsim::Scenario s = scenario_from(config_text, family);
        echo_scenario(r, s);
        std::string seeds;
        for (auto v : s.seeds) seeds += (seeds.empty() ? "" : ",") + std::to_string(v);
        r.put("seed", std::to_string(seed));
        r.put("objective_seeds", seeds);
        const auto res = aitk::regsim::optimize_slack(s);
        const auto names = res.best.param_names();
        for (std::size_t i = 0; i < names.size(); ++i) r.put("best." + names[i], res.best.params[i]);
        r.put("best_mean_welfare", res.welfare);
        r.put("residual", res.residual);
        r.put_count("iterations", res.iterations);
        r.put_flag("converged", res.converged);

        aitk::regsim::Scenario base = s;
        base.policy = aitk::regsim::PolicySpec::make("none", s.policy.base);
        r.put("baseline_mean_welfare", aitk::regsim::mean_welfare(base, base.policy));

        std::string scan = "";
        for (std::size_t i = 0; i < names.size(); ++i) scan += names[i] + ",";
        scan += "mean_welfare\n";
        for (const auto& [x, w] : res.scan) scan += join(x) + "," + aitk::format_double(w) + "\n";
        r.doc("scan.csv", scan);
        r.doc("solver.csv", aitk::trace_csv(res.solver));
        r.doc("policy.txt", res.best.render());
        aitk::regsim::Scenario best = s;
        best.policy = res.best;
        r.doc("trace.csv", aitk::regsim::run_scenario(best, seed).csv());
    });
}

}  // extern "C"
