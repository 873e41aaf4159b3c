#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "wicklab/besov.hpp"

using namespace wicklab;

namespace {

SpectralField random_field(int n, std::uint64_t seed, bool mean_zero = false, double decay = 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    SpectralField f(n);
    for (int a = 0; a <= n; ++a)
        for (int b = -n; b <= n; ++b) {
            if (!in_ball(a, b, n) || (a == 0 && b < 0)) continue;
            const double s = std::pow(1.0 + a * a + b * b, -decay / 2);
            if (a == 0 && b == 0) f.set(0, 0, mean_zero ? 0.0 : s * g(rng));
            else f.set(a, b, cplx{s * g(rng), s * g(rng)});
        }
    return f;
}

double max_diff(const SpectralField& a, const SpectralField& b) {
    const int n = std::max(a.radius(), b.radius());
    double d = 0.0;
    for (int m1 = -n; m1 <= n; ++m1)
        for (int m2 = -n; m2 <= n; ++m2) d = std::max(d, std::abs(a.at(m1, m2) - b.at(m1, m2)));
    return d;
}

} // namespace

TEST_CASE("partition of unity and supports") {
    const DyadicPartition part(6);
    const int lim = static_cast<int>(std::ceil(part.coverage()));
    for (int a = -lim; a <= lim; ++a)
        for (int b = -lim; b <= lim; ++b) {
            const double r = std::sqrt(double(a * a + b * b));
            if (r >= part.coverage()) continue;
            double s = 0.0;
            for (int k = -1; k <= part.kmax(); ++k) {
                const double w = part.weight(k, a, b);
                CHECK(w >= 0.0);
                CHECK(w <= 1.0);
                if (w > 0.0) {
                    if (k == -1) CHECK(r < 4.0 / 3.0);
                    else {
                        CHECK(r > 3.0 * std::ldexp(1.0, k) / 4.0);
                        CHECK(r < 8.0 * std::ldexp(1.0, k) / 3.0);
                    }
                }
                s += w;
            }
            CHECK(std::abs(s - 1.0) <= 1e-12);
        }
}

TEST_CASE("partition examples") {
    const DyadicPartition part(4);
    CHECK(part.weight(-1, 0, 0) == 1.0);
    double s = 0.0;
    for (int k = -1; k <= 4; ++k) s += part.weight(k, 5, 0);
    CHECK(std::abs(s - 1.0) < 1e-12);
    CHECK(part.weight(2, 1, 0) == 0.0);
    CHECK(DyadicPartition::kmax_for_radius(1) == 2);
    CHECK(DyadicPartition::kmax_for_radius(8) == 5);
    CHECK(DyadicPartition::kmax_for_radius(9) == 6);
}

TEST_CASE("lp_blocks") {
    SpectralField c(0);
    c.set(0, 0, 3.0);
    const auto dc = lp_blocks(c, DyadicPartition(2));
    CHECK(dc.block(-1).at(0, 0) == cplx{3.0, 0.0});
    for (int k = 0; k <= 2; ++k) CHECK(l2_norm_squared(dc.block(k)) == 0.0);

    const auto e4 = fourier_mode(4, 0);
    const auto part = DyadicPartition::for_radius(4);
    const auto d4 = lp_blocks(e4, part);
    for (int k = -1; k <= part.kmax(); ++k) {
        const bool in_annulus = k >= 0 && 3.0 * std::ldexp(1.0, k) / 4.0 < 4.0 && 4.0 < 8.0 * std::ldexp(1.0, k) / 3.0;
        if (!in_annulus) CHECK(l2_norm_squared(d4.block(k)) == 0.0);
    }
    CHECK(std::abs(d4.block(1).at(4, 0) + d4.block(2).at(4, 0) - 1.0) < 1e-12);

    const auto f = random_field(12, 5);
    const auto pf = DyadicPartition::for_radius(12);
    const auto d = lp_blocks(f, pf);
    SpectralField sum(0);
    for (int k = -1; k <= pf.kmax(); ++k) sum += d.block(k);
    CHECK(max_diff(sum, f) <= 1e-12);

    CHECK_THROWS_AS(lp_blocks(random_field(12, 1), DyadicPartition(3)), Error);
}

TEST_CASE("besov norm examples") {
    SpectralField c(0);
    c.set(0, 0, -2.0);
    CHECK(std::abs(besov_norm(c, 0.0, kInfinity, kInfinity) - 2.0) < 1e-14);
    CHECK(std::abs(besov_norm(c, 0.7, 2.0, 2.0) - std::exp2(-0.7) * 2.0) < 1e-14);

    // e_(4,0): ||Delta_k f||_inf = chi_k((4,0)).
    const auto e4 = fourier_mode(4, 0);
    const auto part = DyadicPartition::for_radius(4);
    const double want = std::max(part.weight(1, 4, 0), part.weight(2, 4, 0));
    CHECK(std::abs(besov_norm(e4, 0.0, kInfinity, kInfinity, part) - want) < 1e-12);
}

TEST_CASE("sobolev norm") {
    SpectralField c(0);
    c.set(0, 0, 1.0);
    CHECK(sobolev_norm(c, 0.7) == 1.0);
    CHECK(std::abs(sobolev_norm(fourier_mode(1, 0), -1.0) - 1.0 / std::sqrt(1.0 + 4 * oracle::pi * oracle::pi)) < 1e-15);
    const auto f = random_field(6, 12);
    CHECK(std::abs(sobolev_norm(f, 0.0) - lp_norm(f, 2.0)) < 1e-12);
    const auto g = synthesize_real(f, 13);
    double s = 0.0;
    for (double v : g.values) s += v * v;
    CHECK(std::abs(sobolev_norm(f, 0.0) - std::sqrt(s / double(g.values.size()))) < 1e-12);
}

TEST_CASE("B^gamma_{2,2} against H^gamma, mode by mode") {
    // B^2 = sum_m w(m) |f^(m)|^2 with w(m) = sum_k 2^{2 gamma k} chi_k(m)^2, so
    // B^2 / H^2 lies between the extremes of w(m) / mu_m^gamma.
    for (double gamma : {-0.7, 0.0, 0.5}) {
        const int n = 20;
        const auto part = DyadicPartition::for_radius(n);
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (int a = -n; a <= n; ++a)
            for (int b = -n; b <= n; ++b) {
                if (!in_ball(a, b, n)) continue;
                double w = 0.0;
                for (int k = -1; k <= part.kmax(); ++k) w += std::exp2(2.0 * gamma * k) * std::pow(part.weight(k, a, b), 2);
                const double q = w / std::pow(oracle::rate(a, b), gamma);
                lo = std::min(lo, q);
                hi = std::max(hi, q);
            }
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const auto f = random_field(n, seed, false, 0.5);
            const double r2 = std::pow(besov_norm(f, gamma, 2.0, 2.0) / sobolev_norm(f, gamma), 2);
            CHECK(r2 >= lo * (1 - 1e-12));
            CHECK(r2 <= hi * (1 + 1e-12));
        }
        CHECK(hi / lo < 100.0);
    }
}

TEST_CASE("lp norms on simple fields") {
    SpectralField cosf(1);
    cosf.set(1, 0, 0.5);
    CHECK(std::abs(lp_norm(cosf, kInfinity) - 1.0) < 1e-14);
    const int P = good_fft_size(5);
    double grid_mean = 0.0;
    for (int i = 0; i < P; ++i)
        for (int j = 0; j < P; ++j) grid_mean += std::abs(std::cos(2.0 * oracle::pi * i / P));
    grid_mean /= double(P) * P;
    CHECK(std::abs(lp_norm(cosf, 1.0) - grid_mean) < 1e-14);
    CHECK(std::abs(lp_norm(cosf, 1.0) - 2.0 / oracle::pi) < 0.05);
    CHECK(std::abs(lp_norm(cosf, 2.0) - std::sqrt(0.5)) < 1e-14);
    CHECK_THROWS_AS(lp_norm(cosf, 3.0), Error);
}

TEST_CASE("paraproduct examples") {
    SpectralField f(0), g(0);
    f.set(0, 0, 2.0);
    g.set(0, 0, -3.0);
    const auto part = DyadicPartition::for_radius(8);
    CHECK(l2_norm_squared(paraproduct_less(f, g, part)) == 0.0);
    CHECK(std::abs(resonance(f, g, part).at(0, 0) + 6.0) < 1e-13);

    SpectralField e8(8);
    e8.set(8, 0, 1.0);
    const auto fg = multiply(f, e8);
    CHECK(max_diff(paraproduct_less(f, e8, part), fg) < 1e-13);
    CHECK(l2_norm_squared(resonance(f, e8, part)) < 1e-26);
}

TEST_CASE("Bony decomposition reconstructs the product") {
    for (std::uint64_t seed : {1, 2, 3, 4}) {
        const auto f = random_field(8, seed);
        const auto g = random_field(8, seed + 50);
        const auto part = DyadicPartition::for_radius(8);
        auto s = paraproduct_less(f, g, part);
        s += resonance(f, g, part);
        s += paraproduct_greater(f, g, part);
        CHECK(max_diff(s, multiply(f, g)) <= 1e-12);
    }
}

TEST_CASE("paraproduct and resonance ratios stay bounded") {
    double worst_para = 0.0;
    double worst_res = 0.0;
    const double a2 = -0.3;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto f = random_field(8, seed, false, 1.5);
        const auto g = random_field(8, seed + 1000, false, 0.5);
        const auto part = DyadicPartition::for_radius(16);
        const double para = hoelder_norm(paraproduct_less(f, g, part), a2, part) /
                            (lp_norm(f, kInfinity) * hoelder_norm(g, a2, part));
        // alpha1 = 0.6, alpha2 = -0.3, sum > 0.
        const double res = hoelder_norm(resonance(f, g, part), 0.3, part) /
                           (hoelder_norm(f, 0.6, part) * hoelder_norm(g, a2, part));
        worst_para = std::max(worst_para, para);
        worst_res = std::max(worst_res, res);
    }
    CHECK(worst_para < 50.0);
    CHECK(worst_res < 50.0);
}

TEST_CASE("scaling ratio is bounded on mean-zero fields") {
    const double alpha = 0.4;
    for (std::uint64_t seed : {3, 4}) {
        const auto f = random_field(6, seed, true);
        const double base = hoelder_norm(f, -alpha);
        for (int lambda : {2, 4, 8, 16}) {
            const auto s = scale_lambda(f, lambda);
            const double r = hoelder_norm(s, -alpha) / (std::pow(lambda, -alpha) * base);
            CHECK(r < 10.0);
        }
    }
}
