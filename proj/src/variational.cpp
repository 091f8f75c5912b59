#include "aitk/variational.hpp"

#include <algorithm>
#include <cmath>

#include "aitk/kvconfig.hpp"
#include "aitk/rng.hpp"

namespace aitk {

Vec first_variation(const Functional& f, std::span<const double> theta, double h) {
    if (!(h > 0.0)) throw invalid_argument("finite-difference step must be positive");
    Vec x(theta.begin(), theta.end());
    Vec grad(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double keep = x[i];
        x[i] = keep + h;
        const double up = f(x);
        x[i] = keep - h;
        const double down = f(x);
        x[i] = keep;
        if (!std::isfinite(up) || !std::isfinite(down)) {
            throw Error(ErrorCode::numeric, "functional is not finite at offset " + format_double(h) +
                                                " along coordinate " + std::to_string(i));
        }
        grad[i] = (up - down) / (2.0 * h);
    }
    return grad;
}

namespace {

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

class Box {
public:
    explicit Box(const SolveOptions& o, std::size_t d) : lower_(o.lower), upper_(o.upper) {
        if ((lower_ && lower_->size() != d) || (upper_ && upper_->size() != d)) {
            throw invalid_argument("box bounds do not match the parameter dimension");
        }
    }

    Vec project(Vec x) const {
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (lower_) x[i] = std::max(x[i], (*lower_)[i]);
            if (upper_) x[i] = std::min(x[i], (*upper_)[i]);
        }
        return x;
    }

    // Projected-gradient residual; equals |grad| without a box.
    double residual(const Vec& x, const Vec& g) const {
        Vec step(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) step[i] = x[i] - g[i];
        step = project(std::move(step));
        for (std::size_t i = 0; i < x.size(); ++i) step[i] = x[i] - step[i];
        return norm(step);
    }

private:
    std::optional<Vec> lower_, upper_;
};

}  // namespace

SolveResult solve_critical(const Functional& f, std::span<const double> theta0, const SolveOptions& options) {
    if (theta0.empty()) throw invalid_argument("empty parameter vector");
    const Box box(options, theta0.size());
    Vec x(theta0.begin(), theta0.end());
    if (options.jitter > 0.0) {
        Rng rng(options.seed);
        for (double& v : x) v += options.jitter * (2.0 * rng.uniform() - 1.0);
    }
    x = box.project(std::move(x));

    double fx = f(x);
    if (!std::isfinite(fx)) throw Error(ErrorCode::numeric, "functional is not finite at the start point");
    Vec g = first_variation(f, x, options.h);
    double res = box.residual(x, g);
    double alpha = 1.0 / std::max(1.0, norm(g));

    SolveResult out;
    out.seed = options.seed;
    auto record = [&](std::size_t it) {
        out.trace.push_back(TraceRow{it, x, fx, res});
        out.theta = x;
        out.value = fx;
        out.residual = res;
        out.iterations = it;
    };

    for (std::size_t it = 0;; ++it) {
        record(it);
        if (res < options.tol) return out;
        if (it == options.max_iterations) break;

        double step = alpha;
        Vec cand;
        double fc = 0.0;
        bool accepted = false;
        for (int tries = 0; tries < 80; ++tries) {
            Vec trial(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] - step * g[i];
            cand = box.project(std::move(trial));
            fc = f(cand);
            Vec moved(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) moved[i] = x[i] - cand[i];
            if (std::isfinite(fc) && fc <= fx - 1e-4 * dot(g, moved)) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // no descent available at finite-difference resolution

        Vec gc = first_variation(f, cand, options.h);
        Vec s(x.size()), y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            s[i] = cand[i] - x[i];
            y[i] = gc[i] - g[i];
        }
        const double sy = dot(s, y);
        alpha = sy > 0.0 ? dot(s, s) / sy : 2.0 * step;
        x = std::move(cand);
        fx = fc;
        g = std::move(gc);
        res = box.residual(x, g);
    }
    throw NotConverged(std::move(out));
}

std::string trace_csv(const SolveResult& result) {
    std::string out = "# seed=" + std::to_string(result.seed) + "\niteration";
    const std::size_t d = result.theta.size();
    for (std::size_t i = 0; i < d; ++i) out += ",theta" + std::to_string(i);
    out += ",value,residual\n";
    for (const auto& row : result.trace) {
        out += std::to_string(row.iteration);
        for (double v : row.theta) out += "," + format_double(v);
        out += "," + format_double(row.value) + "," + format_double(row.residual) + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------

MetricField MetricField::euclidean(std::size_t dimension) {
    return MetricField{dimension, [dimension](std::span<const double>) {
                           return Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(dimension),
                                                            static_cast<Eigen::Index>(dimension))
                               .eval();
                       }};
}

MetricField MetricField::sphere() {
    return MetricField{2, [](std::span<const double> p) {
                           Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2, 2);
                           const double s = std::sin(p[0]);
                           g(0, 0) = 1.0;
                           g(1, 1) = s * s;
                           return g;
                       }};
}

MetricField MetricField::constant(Eigen::MatrixXd g) {
    const auto d = static_cast<std::size_t>(g.rows());
    return MetricField{d, [g = std::move(g)](std::span<const double>) { return g; }};
}

Eigen::MatrixXd checked_metric(const MetricField& field, std::span<const double> p) {
    if (p.size() != field.dimension) throw invalid_argument("point dimension does not match the metric");
    Eigen::MatrixXd g = field.g(p);
    const auto d = static_cast<Eigen::Index>(field.dimension);
    if (g.rows() != d || g.cols() != d) throw invalid_argument("metric has the wrong shape");
    if (!g.allFinite()) throw Error(ErrorCode::numeric, "metric is not finite");
    if (!(g - g.transpose()).isZero(0.0)) throw Error(ErrorCode::numeric, "metric is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
    if (!(es.eigenvalues().minCoeff() > 1e-9)) throw Error(ErrorCode::numeric, "metric is not positive definite");
    return g;
}

Vec christoffel(const MetricField& field, std::span<const double> p, double h) {
    const std::size_t d = field.dimension;
    const Eigen::MatrixXd g = checked_metric(field, p);
    const Eigen::MatrixXd ginv = g.inverse();

    // dg[l](i, j) = d_l g_ij
    std::vector<Eigen::MatrixXd> dg(d);
    Vec x(p.begin(), p.end());
    for (std::size_t l = 0; l < d; ++l) {
        const double keep = x[l];
        x[l] = keep + h;
        Eigen::MatrixXd up = checked_metric(field, x);
        x[l] = keep - h;
        Eigen::MatrixXd down = checked_metric(field, x);
        x[l] = keep;
        dg[l] = (up - down) / (2.0 * h);
    }

    Vec gamma(d * d * d, 0.0);
    for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = i; j < d; ++j) {
                double s = 0.0;
                for (std::size_t l = 0; l < d; ++l) {
                    const auto li = static_cast<Eigen::Index>(l), ii = static_cast<Eigen::Index>(i),
                               jj = static_cast<Eigen::Index>(j);
                    s += ginv(static_cast<Eigen::Index>(k), li) * (dg[i](li, jj) + dg[j](li, ii) - dg[l](ii, jj));
                }
                gamma[k * d * d + i * d + j] = 0.5 * s;
                gamma[k * d * d + j * d + i] = 0.5 * s;
            }
        }
    }
    return gamma;
}

double metric_energy(const MetricField& field, std::span<const double> p, std::span<const double> v) {
    const Eigen::MatrixXd g = checked_metric(field, p);
    Eigen::Map<const Eigen::VectorXd> vv(v.data(), static_cast<Eigen::Index>(v.size()));
    return vv.dot(g * vv);
}

GeodesicPath integrate_geodesic(const MetricField& field, std::span<const double> start,
                                std::span<const double> velocity, std::size_t steps, double h) {
    const std::size_t d = field.dimension;
    if (start.size() != d || velocity.size() != d) throw invalid_argument("start/velocity dimension mismatch");
    if (!(h > 0.0)) throw invalid_argument("step size must be positive");

    GeodesicPath path;
    path.h = h;
    path.initial_velocity.assign(velocity.begin(), velocity.end());
    Vec x(start.begin(), start.end());
    Vec v(velocity.begin(), velocity.end());
    path.points.push_back(x);
    path.velocities.push_back(v);

    // state derivative: (v, -Gamma(x)[v, v])
    auto accel = [&](const Vec& px, const Vec& pv) {
        const Vec gam = christoffel(field, px);
        Vec a(d, 0.0);
        for (std::size_t k = 0; k < d; ++k) {
            double s = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                for (std::size_t j = 0; j < d; ++j) s += gam[k * d * d + i * d + j] * pv[i] * pv[j];
            }
            a[k] = -s;
        }
        return a;
    };
    auto axpy = [](const Vec& a, double s, const Vec& b) {
        Vec r(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + s * b[i];
        return r;
    };

    for (std::size_t n = 0; n < steps; ++n) {
        try {
            const Vec k1x = v, k1v = accel(x, v);
            const Vec x2 = axpy(x, 0.5 * h, k1x), v2 = axpy(v, 0.5 * h, k1v);
            const Vec k2x = v2, k2v = accel(x2, v2);
            const Vec x3 = axpy(x, 0.5 * h, k2x), v3 = axpy(v, 0.5 * h, k2v);
            const Vec k3x = v3, k3v = accel(x3, v3);
            const Vec x4 = axpy(x, h, k3x), v4 = axpy(v, h, k3v);
            const Vec k4x = v4, k4v = accel(x4, v4);
            for (std::size_t i = 0; i < d; ++i) {
                x[i] += h / 6.0 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]);
                v[i] += h / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
            }
        } catch (const Error& e) {
            throw GeodesicError("metric failure at step " + std::to_string(n) + ": " + e.what(), path);
        }
        path.points.push_back(x);
        path.velocities.push_back(v);
    }
    return path;
}

std::string GeodesicPath::csv() const {
    std::string out = "# h=" + format_double(h) + " velocity=";
    for (std::size_t i = 0; i < initial_velocity.size(); ++i) {
        if (i) out += ',';
        out += format_double(initial_velocity[i]);
    }
    out += "\nstep";
    const std::size_t d = initial_velocity.size();
    for (std::size_t i = 0; i < d; ++i) out += ",x" + std::to_string(i);
    for (std::size_t i = 0; i < d; ++i) out += ",v" + std::to_string(i);
    out += '\n';
    for (std::size_t n = 0; n < points.size(); ++n) {
        out += std::to_string(n);
        for (double c : points[n]) out += "," + format_double(c);
        for (double c : velocities[n]) out += "," + format_double(c);
        out += '\n';
    }
    return out;
}

}  // namespace aitk
