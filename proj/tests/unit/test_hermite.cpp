#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "wicklab/hermite.hpp"

using namespace wicklab;
using Catch::Approx;

namespace {

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

} // namespace

TEST_CASE("hermite_eval worked examples") {
    CHECK(hermite_eval(0, 7.3, 2.0) == 1.0);
    CHECK(hermite_eval(2, 0.0, 1.5) == Approx(-1.5).margin(1e-15));
    CHECK(hermite_eval(3, 2.0, 1.0) == Approx(oracle::hermite_explicit(3, 2.0, 1.0)).margin(1e-14));
    CHECK(hermite_eval(3, 2.0, 1.0) == Approx(2.0).margin(1e-14));
}

TEST_CASE("C = 0 gives pure powers") {
    for (int k = 0; k <= 12; ++k)
        for (double x : {-2.5, -0.3, 0.0, 1.7}) CHECK(rel_err(hermite_eval(k, x, 0.0), std::pow(x, k)) < 1e-13);
}

TEST_CASE("recurrence agrees with the explicit alternating sum") {
    for (int k = 0; k <= 12; ++k)
        for (double x = -3.0; x <= 3.0; x += 0.25)
            for (double C : {0.0, 0.5, 1.0, 2.7, 4.0})
                CHECK(rel_err(hermite_eval(k, x, C), oracle::hermite_explicit(k, x, C)) < 1e-10);
}

TEST_CASE("hermite_sequence matches single evaluations") {
    const auto seq = hermite_sequence(20, 1.3, 0.8);
    for (int k = 0; k <= 20; ++k) CHECK(seq[static_cast<std::size_t>(k)] == hermite_eval(k, 1.3, 0.8));
}

TEST_CASE("generating identity at K = 30") {
    for (double x = -3.0; x <= 3.0; x += 0.5)
        for (double C : {0.0, 1.0, 2.5, 4.0})
            for (double t : {-1.0, -0.4, 0.3, 1.0}) {
                double sum = 0.0;
                double tk = 1.0;
                for (int k = 0; k <= 30; ++k) {
                    sum += tk * hermite_eval(k, x, C);
                    tk *= t / (k + 1);
                }
                CHECK(std::abs(sum - std::exp(t * x - C * t * t / 2)) < 1e-10);
            }
}

TEST_CASE("generating series converges as K grows") {
    double prev = std::numeric_limits<double>::infinity();
    for (int K : {20, 30, 40, 50}) {
        double worst = 0.0;
        for (double x = -3.0; x <= 3.0; x += 0.5)
            for (double C : {0.0, 1.0, 2.5, 4.0})
                for (double t : {-1.0, -0.4, 0.3, 1.0}) {
                    double sum = 0.0;
                    double tk = 1.0;
                    for (int k = 0; k <= K; ++k) {
                        sum += tk * hermite_eval(k, x, C);
                        tk *= t / (k + 1);
                    }
                    worst = std::max(worst, std::abs(sum - std::exp(t * x - C * t * t / 2)));
                }
        CHECK(worst < prev);
        prev = worst;
    }
    CHECK(prev < 1e-10);
}

TEST_CASE("binomial shift H_k(x + y, C)") {
    for (int k = 0; k <= 10; ++k)
        for (double x : {-2.0, 0.4, 1.9})
            for (double y : {-1.1, 0.0, 0.7})
                for (double C : {0.0, 1.0, 3.0}) {
                    double s = 0.0;
                    for (int l = 0; l <= k; ++l) s += oracle::binom(k, l) * hermite_eval(l, x, C) * std::pow(y, k - l);
                    CHECK(rel_err(s, hermite_eval(k, x + y, C)) < 1e-10);
                }
}

TEST_CASE("hermite_inverse_coeffs examples") {
    CHECK(hermite_inverse_coeffs(2, 1.0) == std::vector<double>{1.0, 1.0});
    CHECK(hermite_inverse_coeffs(1, 5.0) == std::vector<double>{1.0});
    CHECK(hermite_inverse_coeffs(4, 1.0) == std::vector<double>{1.0, 6.0, 3.0});
    // Factorial formula evaluated directly.
    for (int k = 0; k <= 16; ++k) {
        const auto c = hermite_inverse_coeffs(k, 1.7);
        for (int l = 0; 2 * l <= k; ++l) {
            const double want = oracle::factorial(k) * std::pow(1.7, l) /
                                (std::pow(2.0, l) * oracle::factorial(l) * oracle::factorial(k - 2 * l));
            CHECK(rel_err(c[static_cast<std::size_t>(l)], want) < 1e-13);
        }
    }
}

TEST_CASE("inversion reconstructs x^k") {
    for (int k = 0; k <= 10; ++k)
        for (double x = -3.0; x <= 3.0; x += 0.5)
            for (double C : {0.0, 1.0, 4.0}) {
                const auto c = hermite_inverse_coeffs(k, C);
                double s = 0.0;
                for (int l = 0; 2 * l <= k; ++l) s += c[static_cast<std::size_t>(l)] * hermite_eval(k - 2 * l, x, C);
                CHECK(rel_err(s, std::pow(x, k)) < 1e-10 * std::max(1.0, std::pow(3.0, k)));
            }
}

TEST_CASE("pairing numbers stay exact at high degree") {
    // k = 64, l = 32: 64! / (2^32 32!) = 63!!.
    const auto p = pairing_numbers(64);
    CHECK(rel_err(p.back(), oracle::double_factorial(63)) < 1e-12);
    CHECK_THROWS_AS(pairing_numbers(65), Error);
    CHECK_THROWS_AS(hermite_eval(-1, 0.0, 1.0), Error);
    CHECK_THROWS_AS(hermite_eval(2, 0.0, -1.0), Error);
}

TEST_CASE("wick_basis_change") {
    const std::vector<double> x2{0, 0, 1};
    CHECK(wick_basis_change(x2, 1.0) == std::vector<double>{1, 0, 1});
    const std::vector<double> v{1, 2, 3, 4};
    CHECK(wick_basis_change(v, 0.0) == v);
    const auto h = monomial_to_hermite(v, 2.0);
    const auto back = hermite_to_monomial(h, 2.0);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(back[i] == Approx(v[i]).margin(1e-12));
    // Hermite expansion evaluates to the same polynomial.
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<double> p(9);
    for (auto& c : p) c = u(rng);
    const auto hp = monomial_to_hermite(p, 1.3);
    for (double x : {-1.5, 0.2, 2.1}) {
        double a = 0, b = 0;
        for (int k = 0; k < 9; ++k) {
            a += p[static_cast<std::size_t>(k)] * std::pow(x, k);
            b += hp[static_cast<std::size_t>(k)] * hermite_eval(k, x, 1.3);
        }
        CHECK(rel_err(a, b) < 1e-12);
    }
}

TEST_CASE("complex hermite") {
    const std::complex<double> z{1.0, 2.0};
    CHECK(complex_hermite_eval(0, 0, z, 3.0) == std::complex<double>(1.0, 0.0));
    const auto h11 = complex_hermite_eval(1, 1, z, 0.7);
    CHECK(h11.real() == Approx(std::norm(z) - 0.7).margin(1e-14));
    CHECK(std::abs(h11.imag()) < 1e-14);
    const auto h20 = complex_hermite_eval(2, 0, z, 0.7);
    CHECK(std::abs(h20 - z * z) < 1e-14);
    for (int k = 0; k <= 8; ++k) {
        const std::complex<double> w{-0.6, 1.3};
        CHECK(std::abs(complex_hermite_eval(k, 0, w, 2.0) - std::pow(w, k)) < 1e-12 * std::max(1.0, std::pow(std::abs(w), k)));
    }
    // Direct sum with binomials for a mixed bidegree.
    const std::complex<double> w{0.4, -0.9};
    std::complex<double> want = 0.0;
    for (int m = 0; m <= 2; ++m)
        want += oracle::factorial(m) * oracle::binom(3, m) * oracle::binom(2, m) * std::pow(-1.5, m) *
                std::pow(w, 3 - m) * std::pow(std::conj(w), 2 - m);
    CHECK(std::abs(complex_hermite_eval(3, 2, w, 1.5) - want) < 1e-13);
    CHECK(complex_hermite_eval(0, 0, {0.0, 0.0}, 1.0) == std::complex<double>(1.0, 0.0));
}
