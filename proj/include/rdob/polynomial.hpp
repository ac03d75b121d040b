#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "rdob/errors.hpp"

namespace rdob::num {

using Complex = std::complex<double>;

// Real polynomial with coefficients stored highest degree first.
// The zero polynomial is stored as {0}.
class Polynomial {
public:
    Polynomial() : coeffs_{0.0} {}

    explicit Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
        if (coeffs_.empty()) coeffs_ = {0.0};
        trim();
    }

    Polynomial(std::initializer_list<double> coeffs) : Polynomial(std::vector<double>(coeffs)) {}

    static Polynomial constant(double c) { return Polynomial({c}); }

    // (s - r) factors multiplied together; complex roots must come in
    // conjugate pairs so the result is real.
    static Polynomial from_roots(const std::vector<std::complex<double>>& roots,
                                 double leading = 1.0) {
        std::vector<std::complex<double>> c{leading};
        for (const auto& r : roots) {
            std::vector<std::complex<double>> next(c.size() + 1, 0.0);
            for (std::size_t i = 0; i < c.size(); ++i) {
                next[i] += c[i];
                next[i + 1] -= c[i] * r;
            }
            c = std::move(next);
        }
        std::vector<double> real(c.size());
        for (std::size_t i = 0; i < c.size(); ++i) real[i] = c[i].real();
        return Polynomial(real);
    }

    const std::vector<double>& coeffs() const { return coeffs_; }
    std::size_t degree() const { return coeffs_.size() - 1; }
    bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == 0.0; }
    double leading() const { return coeffs_.front(); }

    std::complex<double> eval(std::complex<double> s) const {
        std::complex<double> acc = 0.0;
        for (double c : coeffs_) acc = acc * s + c;
        return acc;
    }

    double eval(double s) const {
        double acc = 0.0;
        for (double c : coeffs_) acc = acc * s + c;
        return acc;
    }

    // Sum of |c_i| |s|^i, an upper bound on |eval(s)| used to decide whether a
    // small value means a genuine root.
    double eval_magnitude_bound(std::complex<double> s) const {
        const double m = std::abs(s);
        double acc = 0.0;
        for (double c : coeffs_) acc = acc * m + std::abs(c);
        return acc;
    }

    Polynomial operator*(const Polynomial& o) const {
        if (is_zero() || o.is_zero()) return Polynomial();
        std::vector<double> r(coeffs_.size() + o.coeffs_.size() - 1, 0.0);
        for (std::size_t i = 0; i < coeffs_.size(); ++i)
            for (std::size_t j = 0; j < o.coeffs_.size(); ++j)
                r[i + j] += coeffs_[i] * o.coeffs_[j];
        return Polynomial(r);
    }

    Polynomial operator+(const Polynomial& o) const {
        const std::size_t n = std::max(coeffs_.size(), o.coeffs_.size());
        std::vector<double> r(n, 0.0);
        for (std::size_t i = 0; i < coeffs_.size(); ++i)
            r[n - coeffs_.size() + i] += coeffs_[i];
        for (std::size_t i = 0; i < o.coeffs_.size(); ++i)
            r[n - o.coeffs_.size() + i] += o.coeffs_[i];
        return Polynomial(r);
    }

    Polynomial operator-(const Polynomial& o) const { return *this + (o * -1.0); }

    Polynomial operator*(double s) const {
        std::vector<double> r = coeffs_;
        for (auto& c : r) c *= s;
        return Polynomial(r);
    }

    bool operator==(const Polynomial& o) const { return coeffs_ == o.coeffs_; }

private:
    void trim() {
        std::size_t lead = 0;
        while (lead + 1 < coeffs_.size() && coeffs_[lead] == 0.0) ++lead;
        coeffs_.erase(coeffs_.begin(), coeffs_.begin() + lead);
    }

    std::vector<double> coeffs_;
};

}  // namespace rdob::num
