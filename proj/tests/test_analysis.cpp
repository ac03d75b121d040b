#include <catch2/catch_amalgamated.hpp>

#include <numbers>
#include <random>

#include "rdob/analysis.hpp"
#include "rdob/models.hpp"

using namespace rdob;
using namespace rdob::analysis;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("cpsd of unit white noise integrates to the variance") {
    std::mt19937 rng(3);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> x(1 << 16);
    for (auto& v : x) v = g(rng);
    const CpsdCurve c = cpsd(x, 1e4);
    REQUIRE(c.total() == Catch::Approx(1.0).epsilon(0.05));
    for (std::size_t i = 1; i < c.cumulative.size(); ++i)
        REQUIRE(c.cumulative[i] >= c.cumulative[i - 1]);
}

TEST_CASE("cpsd of a pure sinusoid concentrates at its frequency") {
    const double fs = 1e4, f0 = 500.0;
    std::vector<double> x(1 << 15);
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = std::sin(2.0 * kPi * f0 * static_cast<double>(i) / fs);
    const CpsdCurve c = cpsd(x, fs);
    const double df = c.freq_hz[1] - c.freq_hz[0];
    const double below = c.at(f0 - 2.0 * df);
    const double above = c.at(f0 + 2.0 * df);
    REQUIRE(above - below >= 0.95 * c.total());
    REQUIRE(c.total() == Catch::Approx(0.5).epsilon(0.05));  // sin power
}

TEST_CASE("cpsd scaling and short-signal rejection") {
    std::mt19937 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> x(1 << 14);
    for (auto& v : x) v = g(rng);
    std::vector<double> x3 = x;
    for (auto& v : x3) v *= 3.0;
    const double a = cpsd(x, 1e4).total();
    const double b = cpsd(x3, 1e4).total();
    REQUIRE(b == Catch::Approx(9.0 * a).epsilon(1e-9));

    REQUIRE_THROWS_AS(cpsd(std::vector<double>(5, 0.0), 1e4), std::invalid_argument);
}

TEST_CASE("hysteretic drive shows harmonic steps in the error cpsd") {
    // Open-loop error of a hysteretic map driven at 10 Hz has content at
    // integer multiples of 10 Hz.
    const double fs = 1e4;
    models::BoucWenParams p;
    p.asymmetry = 0.4;
    models::HysteresisModel m(p, 1.0 / fs);
    std::vector<double> err(1 << 15);
    double u_prev = 0.0;
    for (std::size_t i = 0; i < err.size(); ++i) {
        const double u = 3.0 * std::sin(2.0 * kPi * 10.0 * static_cast<double>(i + 1) / fs);
        err[i] = m.step(u, u - u_prev);
        u_prev = u;
    }
    const CpsdCurve c = cpsd(err, fs);
    // Power accumulated around the first few harmonics dominates.
    const double at_35 = c.at(35.0);
    const double harmonics = c.at(105.0) - at_35;
    REQUIRE(at_35 > 0.0);
    REQUIRE(harmonics > 0.001 * c.total());
}

TEST_CASE("hysteresis loop extraction: degenerate and genuine loops") {
    const double fs = 1e4, f0 = 10.0;
    std::vector<double> u(20000), lin(20000);
    for (std::size_t i = 0; i < u.size(); ++i) {
        u[i] = 2.0 * std::sin(2.0 * kPi * f0 * static_cast<double>(i) / fs);
        lin[i] = 0.7 * u[i];
    }
    const HysteresisLoop degenerate = hysteresis_loop(u, lin);
    REQUIRE(degenerate.area < 1e-9);

    models::BoucWenParams p;
    models::HysteresisModel m(p, 1.0 / fs);
    std::vector<double> d(u.size());
    double u_prev = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        d[i] = m.step(u[i], u[i] - u_prev);
        u_prev = u[i];
    }
    const HysteresisLoop loop = hysteresis_loop(u, d);
    REQUIRE(loop.area > 1e-3);
    REQUIRE(loop.cycle.size() >= 900);  // ~one 10 Hz cycle at 10 kHz

    REQUIRE_THROWS_AS(hysteresis_loop(std::vector<double>(100, 1.0), std::vector<double>(99, 1.0)),
                      std::invalid_argument);
    // Fewer than two full periods.
    std::vector<double> half(600), halfy(600);
    for (std::size_t i = 0; i < half.size(); ++i)
        half[i] = std::sin(2.0 * kPi * 10.0 * static_cast<double>(i) / fs);
    REQUIRE_THROWS_AS(hysteresis_loop(half, halfy), std::invalid_argument);
}

TEST_CASE("peak picks the first maximum and scales in place") {
    num::FrequencyResponse flat({1.0, 2.0, 3.0},
                                {num::Complex(2.0, 0.0), num::Complex(0.0, 2.0),
                                 num::Complex(-2.0, 0.0)});
    auto [w0, m0] = peak(flat);
    REQUIRE(w0 == 1.0);  // tie broken toward the lowest frequency
    REQUIRE(m0 == 2.0);

    // Peak location is invariant under positive scaling.
    num::FrequencyResponse bumped({1.0, 2.0, 3.0},
                                  {num::Complex(1.0, 0.0), num::Complex(0.0, 5.0),
                                   num::Complex(2.0, 0.0)});
    auto [w1, m1] = peak(bumped);
    num::FrequencyResponse scaled = bumped;
    for (auto& v : scaled.values) v *= 7.0;
    auto [w2, m2] = peak(scaled);
    REQUIRE(w1 == w2);
    REQUIRE(m2 == Catch::Approx(7.0 * m1));
}

TEST_CASE("example sensitivity peak found by the grid argmax") {
    // |1 - Q| for the worked second-order Q peaks at sqrt(2) wq with height
    // 2/sqrt(3).
    const double wq = 1e4;
    auto grid = num::log_grid(1e3, 1e5, 200);
    std::vector<num::Complex> vals;
    for (double w : grid) {
        const num::Complex x(0.0, w / wq);
        vals.push_back(1.0 - 1.0 / ((x + 1.0) * (x + 1.0)));
    }
    auto [where, height] = peak({grid, vals});
    REQUIRE(where == Catch::Approx(std::sqrt(2.0) * wq).epsilon(0.02));
    REQUIRE(height == Catch::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-3));
}
