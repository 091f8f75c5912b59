#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "aitk/error.hpp"

namespace aitk {

using Vec = std::vector<double>;

struct Functional {
    std::function<double(std::span<const double>)> evaluate;
    std::string tag;

    double operator()(std::span<const double> theta) const { return evaluate(theta); }
};

/// Central-difference gradient of F at theta.
Vec first_variation(const Functional& f, std::span<const double> theta, double h);

struct SolveOptions {
    double tol = 1e-8;
    double h = 1e-5;  // finite-difference step
    std::size_t max_iterations = 50000;
    std::uint64_t seed = 1;
    double jitter = 0.0;  // seeded perturbation of the start point
    // Optional box; the residual is then the projected gradient.
    std::optional<Vec> lower;
    std::optional<Vec> upper;
};

struct TraceRow {
    std::size_t iteration = 0;
    Vec theta;
    double value = 0.0;
    double residual = 0.0;
};

struct SolveResult {
    Vec theta;
    double value = 0.0;
    double residual = 0.0;
    std::size_t iterations = 0;
    std::uint64_t seed = 0;
    std::vector<TraceRow> trace;
};

class NotConverged : public Error {
public:
    explicit NotConverged(SolveResult best)
        : Error(ErrorCode::not_converged, "iteration cap reached; residual " + std::to_string(best.residual)),
          best_(std::move(best)) {}

    const SolveResult& best() const { return best_; }

private:
    SolveResult best_;
};

/// Drives |first_variation| below tol by gradient descent with Armijo
/// backtracking (Barzilai-Borwein trial steps). Throws NotConverged carrying
/// the best point when the iteration cap is hit.
SolveResult solve_critical(const Functional& f, std::span<const double> theta0, const SolveOptions& options = {});

std::string trace_csv(const SolveResult& result);

// ---------------------------------------------------------------------------
// Geometry on lever space

struct MetricField {
    std::size_t dimension = 0;
    std::function<Eigen::MatrixXd(std::span<const double>)> g;

    static MetricField euclidean(std::size_t dimension);
    /// Round 2-sphere in (theta, phi) coordinates.
    static MetricField sphere();
    static MetricField constant(Eigen::MatrixXd g);
};

/// Evaluates g at p and checks symmetry and smallest eigenvalue > 1e-9.
Eigen::MatrixXd checked_metric(const MetricField& g, std::span<const double> p);

/// Gamma^k_ij at p, flattened as [k * d * d + i * d + j].
Vec christoffel(const MetricField& g, std::span<const double> p, double h = 1e-5);

struct GeodesicPath {
    std::vector<Vec> points;
    std::vector<Vec> velocities;
    double h = 0.0;
    Vec initial_velocity;

    std::string csv() const;
};

class GeodesicError : public Error {
public:
    GeodesicError(const std::string& what, GeodesicPath partial)
        : Error(ErrorCode::numeric, what), partial_(std::move(partial)) {}

    const GeodesicPath& partial() const { return partial_; }

private:
    GeodesicPath partial_;
};

/// Classical RK4 on the first-order geodesic system.
GeodesicPath integrate_geodesic(const MetricField& g, std::span<const double> start, std::span<const double> velocity,
                                std::size_t steps, double h);

/// g(v, v) at a path sample.
double metric_energy(const MetricField& g, std::span<const double> p, std::span<const double> v);

}  // namespace aitk
