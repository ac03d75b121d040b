#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "rdob/eig.hpp"
#include "rdob/expm.hpp"
#include "rdob/matrix.hpp"
#include "rdob/polynomial.hpp"

using namespace rdob::num;

namespace {

// Truncated-series oracle for the matrix exponential; independent of the Pade
// path. Scales by halving until the norm is small, sums the Taylor series,
// squares back.
RMat expm_taylor_oracle(RMat m) {
    int halvings = 0;
    while (one_norm(m) > 0.25) {
        m = m * 0.5;
        ++halvings;
    }
    const std::size_t n = m.rows();
    RMat acc = RMat::identity(n);
    RMat term = RMat::identity(n);
    for (int k = 1; k <= 30; ++k) {
        term = term * m * (1.0 / k);
        acc = acc + term;
    }
    for (int k = 0; k < halvings; ++k) acc = acc * acc;
    return acc;
}

double max_abs_diff(const RMat& a, const RMat& b) {
    double best = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            best = std::max(best, std::abs(a(i, j) - b(i, j)));
    return best;
}

// Inverse iteration; returns the eigenpair residual ||Mv - lambda v||.
double eigenpair_residual(const CMat& m, Complex lambda, std::mt19937& rng) {
    const std::size_t n = m.rows();
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    CMat v(n, 1);
    for (std::size_t i = 0; i < n; ++i) v(i, 0) = Complex(u(rng), u(rng));
    const double shift = 1e-10 * (1.0 + std::abs(lambda));
    CMat shifted(m);
    for (std::size_t i = 0; i < n; ++i) shifted(i, i) -= lambda + Complex(shift, shift);
    for (int it = 0; it < 3; ++it) {
        v = solve(shifted, v);
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) norm += std::norm(v(i, 0));
        norm = std::sqrt(norm);
        for (std::size_t i = 0; i < n; ++i) v(i, 0) /= norm;
    }
    CMat mv = m * v;
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) res += std::norm(mv(i, 0) - lambda * v(i, 0));
    return std::sqrt(res);
}

}  // namespace

TEST_CASE("matrix product, solve and inverse") {
    RMat a{{4.0, 1.0}, {2.0, 3.0}};
    RMat b{{1.0}, {2.0}};
    RMat x = solve(a, b);
    REQUIRE(std::abs(4.0 * x(0, 0) + x(1, 0) - 1.0) < 1e-14);
    REQUIRE(std::abs(2.0 * x(0, 0) + 3.0 * x(1, 0) - 2.0) < 1e-14);

    RMat ainv = inverse(a);
    RMat eye = a * ainv;
    REQUIRE(max_abs_diff(eye, RMat::identity(2)) < 1e-14);

    REQUIRE_THROWS_AS(solve(RMat{{1.0, 2.0}, {2.0, 4.0}}, b), rdob::numeric_error);
}

TEST_CASE("polynomial arithmetic and evaluation") {
    Polynomial p{1.0, 3.0, 2.0};  // s^2 + 3s + 2 = (s+1)(s+2)
    REQUIRE(p.degree() == 2);
    REQUIRE(p.eval(Complex(-1.0, 0.0)) == Complex(0.0, 0.0));
    Polynomial q = Polynomial{1.0, 1.0} * Polynomial{1.0, 2.0};
    REQUIRE(q == p);
    Polynomial sum = p + Polynomial{-1.0, 0.0, 0.0};
    REQUIRE(sum == Polynomial{3.0, 2.0});
    REQUIRE(Polynomial{0.0, 0.0}.is_zero());
}

TEST_CASE("expm trivial cases") {
    REQUIRE(max_abs_diff(expm(RMat(3, 3, 0.0)), RMat::identity(3)) == 0.0);

    RMat d{{0.3, 0.0}, {0.0, -1.7}};
    RMat e = expm(d);
    REQUIRE(std::abs(e(0, 0) - std::exp(0.3)) < 1e-14);
    REQUIRE(std::abs(e(1, 1) - std::exp(-1.7)) < 1e-14);
    REQUIRE(std::abs(e(0, 1)) == 0.0);
}

TEST_CASE("expm of SORE dynamics against truncated-series oracle") {
    // wr = 1, zr = 1, evaluated at t = pi.
    RMat a{{0.0, 1.0}, {-1.0, -2.0}};
    RMat e = expm(a * std::numbers::pi);
    RMat oracle = expm_taylor_oracle(a * std::numbers::pi);
    REQUIRE(max_abs_diff(e, oracle) < 1e-9);
}

TEST_CASE("expm inverse identity and eigenvalue mapping") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        RMat m(4, 4);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) m(i, j) = 3.0 * u(rng);
        RMat prod = expm(m) * expm(-m);
        REQUIRE(max_abs_diff(prod, RMat::identity(4)) < 1e-8);

        // eig(expm(M)) = exp(eig(M)) as multisets.
        auto lm = eigenvalues(m);
        auto le = eigenvalues(expm(m));
        std::vector<bool> used(le.size(), false);
        for (const auto& l : lm) {
            const Complex target = std::exp(l);
            double best = 1e300;
            std::size_t best_i = 0;
            for (std::size_t i = 0; i < le.size(); ++i) {
                if (used[i]) continue;
                const double d = std::abs(le[i] - target);
                if (d < best) {
                    best = d;
                    best_i = i;
                }
            }
            used[best_i] = true;
            REQUIRE(best < 1e-6 * (1.0 + std::abs(target)));
        }
    }
}

TEST_CASE("eigenvalues of triangular and companion matrices") {
    RMat t{{2.0, 5.0, 1.0}, {0.0, -3.0, 2.0}, {0.0, 0.0, 0.5}};
    auto le = eigenvalues(t);
    std::vector<double> re;
    for (const auto& l : le) {
        REQUIRE(std::abs(l.imag()) < 1e-9);
        re.push_back(l.real());
    }
    std::sort(re.begin(), re.end());
    REQUIRE(std::abs(re[0] + 3.0) < 1e-9);
    REQUIRE(std::abs(re[1] - 0.5) < 1e-9);
    REQUIRE(std::abs(re[2] - 2.0) < 1e-9);

    // Companion of s^2 + 3s + 2 -> roots {-1, -2}.
    auto r = roots(Polynomial{1.0, 3.0, 2.0});
    std::sort(r.begin(), r.end(),
              [](Complex a, Complex b) { return a.real() < b.real(); });
    REQUIRE(std::abs(r[0] - Complex(-2.0, 0.0)) < 1e-10);
    REQUIRE(std::abs(r[1] - Complex(-1.0, 0.0)) < 1e-10);
}

TEST_CASE("eigenpair residuals on random matrices") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 8; ++trial) {
        const std::size_t n = 6;
        RMat m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) m(i, j) = 10.0 * u(rng);
        auto eig = eigenvalues(m);
        REQUIRE(eig.size() == n);
        const CMat mc = to_complex(m);
        const double scale = inf_norm(m);
        for (const auto& l : eig)
            REQUIRE(eigenpair_residual(mc, l, rng) < 1e-8 * scale);
    }
}

TEST_CASE("eigenvalues of badly scaled matrices need balancing") {
    // Companion-style matrix with entries spanning ~1e14, as the piezo loop
    // matrices do.
    Polynomial den = Polynomial{1.0, 754.0, 1.421e7} * Polynomial{1.0, 638.3, 3.948e7};
    auto r = roots(den);
    REQUIRE(r.size() == 4);
    // Expected roots of each quadratic factor.
    const Complex r1(-377.0, std::sqrt(1.421e7 - 377.0 * 377.0));
    const Complex r2(-319.15, std::sqrt(3.948e7 - 319.15 * 319.15));
    for (const auto& expect : {r1, std::conj(r1), r2, std::conj(r2)}) {
        double best = 1e300;
        for (const auto& got : r) best = std::min(best, std::abs(got - expect));
        REQUIRE(best < 1e-5 * std::abs(expect));
    }
}

TEST_CASE("complex roots come out as conjugate pairs within tolerance") {
    auto r = roots(Polynomial::from_roots({Complex(-1.0, 2.0), Complex(-1.0, -2.0),
                                           Complex(-5.0, 0.0)}));
    REQUIRE(r.size() == 3);
    double best = 1e300;
    for (const auto& got : r) best = std::min(best, std::abs(got - Complex(-1.0, 2.0)));
    REQUIRE(best < 1e-9);
}
