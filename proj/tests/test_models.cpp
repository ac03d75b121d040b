#include <catch2/catch_amalgamated.hpp>

#include <numbers>
#include <random>

#include "rdob/models.hpp"

using namespace rdob;
using namespace rdob::models;

namespace {
constexpr double kPi = std::numbers::pi;

// Enclosed (u, d) loop area over the final cycle via the shoelace sum.
double loop_area(HysteresisModel& m, double amp, double freq_hz, double dt, int cycles) {
    const int per_cycle = static_cast<int>(1.0 / (freq_hz * dt));
    double u_prev = 0.0;
    double area = 0.0;
    std::vector<std::pair<double, double>> cycle;
    for (int k = 0; k < cycles * per_cycle; ++k) {
        const double u = amp * std::sin(2.0 * kPi * freq_hz * (k + 1) * dt);
        const double d = m.step(u, u - u_prev);
        u_prev = u;
        if (k >= (cycles - 1) * per_cycle) cycle.emplace_back(u, d);
    }
    for (std::size_t i = 0; i < cycle.size(); ++i) {
        const auto& [u0, d0] = cycle[i];
        const auto& [u1, d1] = cycle[(i + 1) % cycle.size()];
        area += u0 * d1 - u1 * d0;
    }
    return std::abs(area) / 2.0;
}
}  // namespace

TEST_CASE("hysteresis at rest stays at rest") {
    HysteresisModel m(BoucWenParams{}, 1e-4);
    for (int k = 0; k < 1000; ++k) REQUIRE(m.step(0.0, 0.0) == 0.0);
}

TEST_CASE("sinusoidal drive opens a loop with positive area") {
    BoucWenParams p;
    HysteresisModel m(p, 1e-4);
    const double area = loop_area(m, 2.0, 10.0, 1e-4, 6);
    REQUIRE(area > 1e-3);
}

TEST_CASE("loops are rate dependent when leak is active") {
    BoucWenParams p;
    p.leak = 30.0;
    HysteresisModel m10(p, 1e-4), m50(p, 1e-4);
    const double a10 = loop_area(m10, 2.0, 10.0, 1e-4, 8);
    const double a50 = loop_area(m50, 2.0, 50.0, 1e-4, 8);
    REQUIRE(std::abs(a10 - a50) > 0.01 * std::max(a10, a50));
}

TEST_CASE("asymmetry skews the loop") {
    BoucWenParams p;
    p.asymmetry = 0.4;
    HysteresisModel m(p, 1e-4);
    // Warm up, then compare the disturbance extremes on each polarity.
    double u_prev = 0.0, d_max = 0.0, d_min = 0.0;
    for (int k = 0; k < 60000; ++k) {
        const double u = 2.0 * std::sin(2.0 * kPi * 10.0 * (k + 1) * 1e-4);
        const double d = m.step(u, u - u_prev);
        u_prev = u;
        if (k > 30000) {
            d_max = std::max(d_max, d);
            d_min = std::min(d_min, d);
        }
    }
    REQUIRE(std::abs(d_max + d_min) > 0.02 * (d_max - d_min));
}

TEST_CASE("bounded output for arbitrary bounded inputs") {
    BoucWenParams p;
    p.asymmetry = 0.3;
    p.leak = 10.0;
    for (std::uint32_t seed : {1u, 2u, 3u}) {
        HysteresisModel m(p, 1e-4);
        std::mt19937 rng(seed);
        std::uniform_real_distribution<double> jump(-1.0, 1.0);
        double u = 0.0;
        double worst = 0.0;
        for (int k = 0; k < 1000000; ++k) {
            double u_next = u + jump(rng);
            if (std::abs(u_next) > 5.0) u_next = u;  // keep |u| <= 5
            const double d = m.step(u_next, u_next - u);
            u = u_next;
            worst = std::max(worst, std::abs(d));
        }
        REQUIRE(worst <= m.bound() * (1.0 + 1e-12));
    }
}

TEST_CASE("replaying an input sequence reproduces the disturbance exactly") {
    BoucWenParams p;
    p.leak = 5.0;
    std::vector<double> u(5000);
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> step(-0.3, 0.3);
    for (std::size_t i = 1; i < u.size(); ++i) u[i] = u[i - 1] + step(rng);

    auto run = [&] {
        HysteresisModel m(p, 1e-4);
        std::vector<double> d;
        for (std::size_t i = 1; i < u.size(); ++i) d.push_back(m.step(u[i], u[i] - u[i - 1]));
        return d;
    };
    REQUIRE(run() == run());
}

TEST_CASE("parameter sets that violate boundedness are rejected") {
    BoucWenParams p;
    p.gamma = p.beta;  // fails gamma <= beta (1 - |asymmetry|) with asymmetry != 0
    p.asymmetry = 0.5;
    REQUIRE_THROWS_AS(HysteresisModel(p, 1e-4), std::invalid_argument);

    BoucWenParams neg;
    neg.beta = -1.0;
    REQUIRE_THROWS_AS(HysteresisModel(neg, 1e-4), std::invalid_argument);

    BoucWenParams asym;
    asym.asymmetry = 1.0;
    REQUIRE_THROWS_AS(HysteresisModel(asym, 1e-4), std::invalid_argument);
}

TEST_CASE("noise determinism and statistics") {
    NoiseSource zero(42, 0.0);
    for (int k = 0; k < 100; ++k) REQUIRE(zero.sample() == 0.0);

    NoiseSource a(7, 1.0), b(7, 1.0);
    for (int k = 0; k < 1000; ++k) REQUIRE(a.sample() == b.sample());

    NoiseSource big(11, 1.0);
    double mean = 0.0;
    const int n = 1000000;
    for (int k = 0; k < n; ++k) mean += big.sample();
    mean /= n;
    REQUIRE(std::abs(mean) < 4.0 / 1000.0);

    // Shaped source: deterministic and roughly unit variance after the
    // normalization.
    NoiseSource s1(3, 1.0, 2.0 * kPi * 500.0, 1e-4), s2(3, 1.0, 2.0 * kPi * 500.0, 1e-4);
    double var = 0.0;
    for (int k = 0; k < 200000; ++k) {
        const double v = s1.sample();
        REQUIRE(v == s2.sample());
        var += v * v;
    }
    var /= 200000;
    REQUIRE(var == Catch::Approx(1.0).epsilon(0.1));
}

TEST_CASE("piezo plant matches the identified coefficients") {
    const TransferFunction pn = piezo_plant();
    const double dc = (5.8e4 * 1.934e7) / (1.421e7 * 3.948e7);
    REQUIRE(pn.num.eval(0.0) / pn.den.eval(0.0) == Catch::Approx(dc).epsilon(1e-12));
    REQUIRE(pn.relative_degree() == 2);
}
