#include <cmath>
#include <numbers>
#include <random>

#include "aitk/error.hpp"
#include "aitk/grove.hpp"
#include "aitk/infotheory.hpp"
#include "doctest.h"

using namespace aitk;

namespace {

MetricBinding identity_binding() {
    MetricBinding b;
    b.sigma = [](double m) { return m; };
    b.sigma_pair = [](double m, double n) { return std::abs(m - n); };
    b.sigma_lift = [](double s) { return std::tanh(s); };
    b.tau = [](double s) { return s; };
    b.tau_lift = [](double t) { return 0.5 * t; };
    b.phi = [](double m) { return m; };
    return b;
}

// Independent 1-D oracle: analytic d/dx ln f of a Gaussian, midpoint sum.
double gaussian_fisher_oracle(double sd, std::size_t samples, double span) {
    const double lo = -span * sd, h = 2.0 * span * sd / static_cast<double>(samples);
    double s = 0.0, mass = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const double x = lo + (static_cast<double>(i) + 0.5) * h;
        const double f = std::exp(-0.5 * x * x / (sd * sd));
        mass += f;
        s += f * (x / (sd * sd)) * (x / (sd * sd));
    }
    return s / mass;
}

}  // namespace

TEST_CASE("smoothed delta normalization, peak and scaling") {
    const double eps = 0.05, c = 0.3;
    double s = 0.0;
    const double h = 1e-4;
    for (double x = c - 1.0; x < c + 1.0; x += h) s += smoothed_delta(x + 0.5 * h, c, eps) * h;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(smoothed_delta(c, c, eps) == doctest::Approx(1.0 / (eps * std::sqrt(2.0 * std::numbers::pi))));
    const double ratio = smoothed_delta(c, c, eps / 2) / smoothed_delta(c, c, eps);
    CHECK(std::abs(ratio - 2.0) < 2e-6);
}

TEST_CASE("Gaussian location information against analytic 1/s^2") {
    for (double sd : {0.5, 1.0, 2.0}) {
        const auto d = gaussian_location(0.0, sd, 256, 6.0);
        const double info = fisher_information(d, "x");
        CHECK(std::abs(info * sd * sd - 1.0) < 0.01);
        CHECK(info == doctest::Approx(gaussian_fisher_oracle(sd, 256, 6.0)).epsilon(1e-3));
    }
}

TEST_CASE("uniform density carries no information") {
    GridSpec g;
    g.axes.push_back(Axis{"x", 0.0, 1.0, 64});
    const auto d = GridDistribution::normalized(g, std::vector<double>(64, 3.0), 0.1);
    CHECK(std::abs(fisher_information(d, std::size_t{0})) < 1e-6);
}

TEST_CASE("information is non-negative on random smoothed-delta mixtures") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0), w(0.05, 0.4);
    for (int trial = 0; trial < 100; ++trial) {
        GridSpec g;
        g.axes.push_back(Axis{"m", -2.0, 2.0, 40});
        g.axes.push_back(Axis{"a", -2.0, 2.0, 40});
        std::vector<double> v(g.size());
        const double eps = w(rng), shift = u(rng), slope = u(rng);
        for (std::size_t i = 0; i < 40; ++i) {
            for (std::size_t j = 0; j < 40; ++j) {
                v[i * 40 + j] = smoothed_delta(slope * g.axes[0].center(i) + shift, g.axes[1].center(j), eps);
            }
        }
        const auto d = GridDistribution::normalized(g, v, eps);
        CHECK(fisher_information(d, "m") >= 0.0);
        CHECK(fisher_information(d, "a") >= 0.0);
        for (const auto& a : cramer_rao_report(d).axes) CHECK(a.information >= 0.0);
    }
}

TEST_CASE("depth-0 identity form is symmetric under swapping m and a") {
    const auto expr = parse("sig(m1)");
    GridSpec g;
    g.axes.push_back(Axis{"m", -1.0, 1.0, 30});
    g.axes.push_back(Axis{"a", -1.0, 1.0, 30});
    const auto d = build_nested_distribution(expr, identity_binding(), g, 0.2);
    for (std::size_t i = 0; i < 30; ++i) {
        for (std::size_t j = 0; j < 30; ++j) CHECK(d.values()[i * 30 + j] == doctest::Approx(d.values()[j * 30 + i]));
    }
}

TEST_CASE("identity map substitution reduces to the point form") {
    const auto b = identity_binding();
    GridSpec g;
    g.axes.push_back(Axis{"m", -1.0, 1.0, 24});
    g.axes.push_back(Axis{"a", -1.2, 1.2, 24});
    const auto point = build_nested_distribution(parse("sig(m1)"), b, g, 0.15);
    const auto mapped = build_nested_distribution(parse("sig(phi1)"), b, g, 0.15);
    CHECK(point.values() == mapped.values());
}

TEST_CASE("depth-1 chain with identity tau carries the depth-0 delta as its outer offset") {
    const auto b = identity_binding();
    const double eps = 0.1;
    const auto expr = parse("sig tau(m1)");
    const std::vector<Axis> points{Axis{"m", -1.0, 1.0, 12}};
    const auto grid = default_grid(expr, b, points, eps, 16);
    GridSpec fine = grid;
    fine.axes[1].count = 400;  // a axis
    const auto d = build_nested_distribution(expr, b, fine, eps);
    const auto& A = fine.axes[1];
    const auto& B = fine.axes[2];
    const double peak = smoothed_delta(0.0, 0.0, eps);
    double worst = 0.0;
    for (std::size_t i = 0; i < 12; ++i) {
        for (std::size_t k = 0; k < B.count; ++k) {
            double mass = 0.0, first = 0.0;
            for (std::size_t j = 0; j < A.count; ++j) {
                const double v = d.values()[(i * A.count + j) * B.count + k];
                mass += v;
                first += v * A.center(j);
            }
            const double expected = smoothed_delta(points[0].center(i), B.center(k), eps);
            worst = std::max(worst, std::abs(first / mass - expected));
        }
    }
    CHECK(worst < 1e-3 * peak);
}

TEST_CASE("required axes and binding errors") {
    CHECK(required_axes(parse("sig(m1)")) == std::vector<std::string>{"m", "a"});
    CHECK(required_axes(parse("sig(m1, m2)")) == std::vector<std::string>{"m", "n", "a"});
    CHECK(required_axes(parse("sig tau(m1, m2)")) == std::vector<std::string>{"m", "n", "a", "b"});
    CHECK_THROWS_AS(required_axes(parse("sig tau phi(m1)")), Error);
    MetricBinding empty;
    GridSpec g;
    g.axes.push_back(Axis{"m", -1.0, 1.0, 10});
    g.axes.push_back(Axis{"a", -1.0, 1.0, 10});
    CHECK_THROWS_AS(build_nested_distribution(parse("sig(m1)"), empty, g, 0.1), Error);
    auto bad = identity_binding();
    bad.sigma = [](double m) { return m > 0.5 ? NAN : m; };
    try {
        build_nested_distribution(parse("sig(m1)"), bad, g, 0.1);
        FAIL("expected numeric error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::numeric);
        CHECK(std::string(e.what()).find("m=") != std::string::npos);
    }
}

TEST_CASE("every supported form builds a normalized distribution with finite information") {
    const auto b = identity_binding();
    for (const char* form : {"sig(m1)", "sig(m1, m2)", "sig(phi1)", "sig^(1)(m1)", "sig tau(m1)", "sig tau(m1, m2)",
                             "sig^(1) tau(m1)", "sig tau^(1)(m1)"}) {
        const auto expr = parse(form);
        std::vector<Axis> points{Axis{"m", -1.0, 1.0, 10}};
        if (required_axes(expr)[1] == "n") points.push_back(Axis{"n", -1.0, 1.0, 10});
        const auto d = build_nested_distribution(expr, b, default_grid(expr, b, points, 0.2, 12), 0.2);
        CHECK(d.integral() == doctest::Approx(1.0));
        for (std::size_t ax = 0; ax < d.grid().axes.size(); ++ax) {
            const double info = fisher_information(d, ax);
            CHECK(std::isfinite(info));
            CHECK(info >= 0.0);
        }
    }
}

TEST_CASE("marginalize integrates one axis out") {
    GridSpec g;
    g.axes.push_back(Axis{"m", -1.0, 1.0, 20});
    g.axes.push_back(Axis{"a", -2.0, 2.0, 30});
    const auto d = build_nested_distribution(parse("sig(m1)"), identity_binding(), g, 0.2);
    const auto m = marginalize(d, "m");
    REQUIRE(m.grid().axes.size() == 1);
    CHECK(m.grid().axes[0].name == "a");
    CHECK(m.integral() == doctest::Approx(1.0));
    CHECK_THROWS_AS(marginalize(d, "zz"), Error);
}

TEST_CASE("Cramer-Rao on Gaussian location families and narrow deltas") {
    for (double sd : {0.5, 1.0, 2.0}) {
        const auto rep = cramer_rao_report(gaussian_location(1.0, sd, 256, 6.0));
        REQUIRE(rep.axes.size() == 1);
        CHECK(rep.single_axis);
        CHECK(rep.axes[0].product >= 0.99);
        CHECK(rep.axes[0].product <= 1.01);
        CHECK(rep.bound_holds);
    }
    const auto narrow = cramer_rao_report(gaussian_location(0.0, 0.01, 512, 6.0));
    CHECK(narrow.axes[0].product >= 0.99);
}

TEST_CASE("serialization round trip") {
    GridSpec g;
    g.axes.push_back(Axis{"m", -1.0, 1.0, 9});
    g.axes.push_back(Axis{"a", -1.5, 1.5, 11});
    const auto d = build_nested_distribution(parse("sig(m1)"), identity_binding(), g, 0.3);
    const auto back = GridDistribution::deserialize(d.serialize());
    CHECK(back.values() == d.values());
    CHECK(back.grid().axes.size() == 2);
    CHECK(back.eps() == d.eps());
    CHECK(back.serialize() == d.serialize());
    CHECK_THROWS_AS(GridDistribution::deserialize("grid axes=m lower=0 upper=1 counts=8 eps=0.1\n1\n"), Error);
}

TEST_CASE("grid validation") {
    GridSpec g;
    g.axes.push_back(Axis{"m", 1.0, 0.0, 10});
    CHECK_THROWS_AS(g.validate(), Error);
    GridSpec few;
    few.axes.push_back(Axis{"m", 0.0, 1.0, 4});
    CHECK_THROWS_AS(few.validate(), Error);
    const double one[] = {1.0};
    CHECK_THROWS_AS(fisher_information(std::span<const double>(one, 1), 0.1), Error);
}

TEST_CASE("information density") {
    const double eps = 0.5;
    const std::array<double, 4> mbar{0.3, -0.2, 0.7, 0.1};

    InfoTensorBinding constant;
    for (auto& f : constant.lambda) f = [](double) { return 0.25; };
    CHECK(std::abs(information_density(constant, mbar, eps)) < 1e-12);

    // Lambda^{ij0}(x) = c x for every (i, j), identical offsets: each D_ij is the
    // same function of mbar_0, so the contraction is 16 copies of D (d ln D)^2.
    const double c = 0.8, offset = 0.1;
    InfoTensorBinding linear;
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            linear.lambda[InfoTensorBinding::at(i, j, 0)] = [c](double x) { return c * x; };
            linear.offsets[i * 4 + j] = offset;
        }
    }
    const double z = c * mbar[0] - offset;
    const double D = smoothed_delta(c * mbar[0], offset, eps);
    const double dlog = -z * c / (eps * eps);
    CHECK(information_density(linear, mbar, eps) == doctest::Approx(16.0 * D * dlog * dlog).epsilon(1e-6));

    // relabelling the k and l indices of D_kl leaves the scalar unchanged
    InfoTensorBinding mixed;
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t n = 0; n < 64; ++n) {
        const double a = u(rng);
        mixed.lambda[n] = [a](double x) { return a * x; };
    }
    for (auto& o : mixed.offsets) o = 0.1 * u(rng);
    InfoTensorBinding swapped = mixed;
    for (std::size_t k = 0; k < 4; ++k) {
        for (std::size_t l = 0; l < 4; ++l) {
            for (std::size_t m = 0; m < 4; ++m) swapped.lambda[InfoTensorBinding::at(k, l, m)] = mixed.lambda[InfoTensorBinding::at(l, k, m)];
            swapped.offsets[k * 4 + l] = mixed.offsets[l * 4 + k];
        }
    }
    // swapping (k, l) also swaps the (i, j) weights D_ij; the contraction is symmetric in both
    CHECK(information_density(swapped, mbar, eps) == doctest::Approx(information_density(mixed, mbar, eps)).epsilon(1e-9));

    InfoTensorBinding far = linear;
    for (auto& o : far.offsets) o = 1e3;
    CHECK_THROWS_AS(information_density(far, mbar, 0.01), Error);
}

TEST_CASE("named functions") {
    CHECK(named_function("square")(3.0) == 9.0);
    CHECK(named_function("affine:2:1")(3.0) == 7.0);
    CHECK(named_pair_function("absdiff")(1.0, 3.0) == 2.0);
    CHECK_THROWS_AS(named_function("nope"), Error);
    CHECK_THROWS_AS(named_function("scale:x"), Error);
    CHECK_THROWS_AS(named_pair_function("nope"), Error);
}
