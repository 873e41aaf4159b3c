#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "wicklab/support_lab.hpp"

using namespace wicklab;

namespace {

SpectralField random_field(int n, std::uint64_t seed, double amp = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, amp);
    SpectralField f(n);
    for (int a = 0; a <= n; ++a)
        for (int b = -n; b <= n; ++b) {
            if (!in_ball(a, b, n) || (a == 0 && b < 0)) continue;
            if (a == 0 && b == 0) f.set(0, 0, g(rng));
            else f.set(a, b, cplx{g(rng), g(rng)});
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

const MomentProfile& profile_n2() {
    static const MomentProfile p = match_moments(2, 0.05, 1e-8);
    return p;
}

} // namespace

TEST_CASE("base profile") {
    CHECK_THROWS_AS(base_profile(0.0, 16), Error);
    CHECK_THROWS_AS(base_profile(1.0, 16), Error);
    const auto g = base_profile(0.05, 64);
    for (int i = 0; i < 64; ++i) CHECK(g(i, 32) == Catch::Approx(0.0).margin(1e-15));
    for (int i = 1; i < 64; ++i)
        for (int j = 1; j < 64; ++j) CHECK(g(i, 64 - j) == Catch::Approx(-g(i, j)).margin(1e-15));
    for (int j = 0; j < 64; ++j) CHECK(g(0, j) == 0.0);
    CHECK(profile_value(0.0, 0.3, 0.2) == Catch::Approx(std::sqrt(2.0 * std::log(1.0 / 0.3)) * std::cos(oracle::pi * 0.2)));
    CHECK(std::abs(profile_value(1e-9, 0.3, 0.2) - profile_value(0.0, 0.3, 0.2)) < 1e-12);
}

TEST_CASE("moment targets") {
    const auto b = moment_targets(3);
    REQUIRE(b.size() == 7);
    CHECK(b[0] == 1.0);
    CHECK(b[1] == 0.0);
    CHECK(b[2] == 1.0);
    CHECK(b[3] == 0.0);
    CHECK(b[4] == 3.0);
    CHECK(b[6] == 15.0);
    CHECK_THROWS_AS(moment_targets(0), Error);
}

TEST_CASE("one-dimensional moment identities") {
    for (int k = 0; k <= 5; ++k) {
        const double log_m = log_moment_quadrature(k);
        const double cos_m = cos_moment_quadrature(k);
        CHECK(std::abs(log_m - oracle::double_factorial(2 * k)) <= 1e-6);
        CHECK(std::abs(cos_m - oracle::double_factorial(2 * k - 1) / oracle::double_factorial(2 * k)) <= 1e-10);
        // Their product is the target b_{2k}.
        CHECK(std::abs(log_m * cos_m - moment_targets(std::max(k, 1))[static_cast<std::size_t>(2 * k)]) <= 1e-6 * oracle::double_factorial(2 * k));
    }
}

TEST_CASE("b_2 from two-dimensional quadrature of g(0)^2") {
    // Separable route: tanh-sinh in x1, Gauss-Kronrod in x2.
    boost::math::quadrature::tanh_sinh<double> ts;
    const double inner = ts.integrate([](double x1) { return 2.0 * std::log(1.0 / x1); }, 0.0, 1.0);
    const double outer = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [](double x2) { return std::pow(std::cos(oracle::pi * x2), 2); }, 0.0, 1.0);
    CHECK(std::abs(inner * outer - 1.0) < 1e-4);

    // Midpoint grid directly on g(0, .)^2: independent of the separable route.
    const int P = 4000;
    double s = 0.0;
    for (int i = 0; i < P; ++i)
        for (int j = 0; j < 64; ++j) {
            const double x1 = (i + 0.5) / P;
            const double x2 = (j + 0.5) / 64;
            s += std::pow(profile_value(0.0, x1, x2), 2);
        }
    CHECK(std::abs(s / (P * 64.0) - 1.0) < 1e-3);
}

TEST_CASE("match_moments N = 1") {
    const auto p = match_moments(1, 0.05, 1e-8);
    CHECK(p.residuals.size() == 3);
    CHECK(p.residuals[1] <= 1e-8);
    CHECK(p.residuals[2] <= 1e-8);
    // int H_1(f) is the mean of f.
    CHECK(std::abs(p.field.at(0, 0).real()) <= 1e-8);
    CHECK(p.field.is_exactly_hermitian());
    double dev = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) dev = std::max(dev, std::abs(p.start_jacobian(i, j) - (i == j ? 1.0 : 0.0)));
    CHECK(dev <= 0.2);
}

TEST_CASE("match_moments N = 2 with independent verification") {
    const auto& p = profile_n2();
    CHECK(p.max_residual() <= 1e-8);
    // Independent check: power moments by direct summation on a 4x grid.
    const int P = p.verify_resolution;
    const auto g = p.grid(P);
    const auto b = moment_targets(2);
    for (int k = 1; k <= 4; ++k) {
        long double s = 0.0L;
        for (double v : g.values) s += std::pow(static_cast<long double>(v), k);
        CHECK(std::abs(double(s / g.values.size()) - b[static_cast<std::size_t>(k)]) <= 1e-8);
    }
    CHECK_THROWS_AS(match_moments(5, 0.05, 1e-8), Error);
}

TEST_CASE("shift scale") {
    CHECK(shift_scale(3) == 1);
    CHECK(shift_scale(4) == 1);
    CHECK(shift_scale(8) == 1);
    CHECK(shift_scale(16) == 2);
    CHECK(shift_scale(1000) == static_cast<int>(std::floor(std::pow(std::log(1000.0), std::log(std::log(1000.0))))));
    CHECK_THROWS_AS(shift_scale(2), Error);
}

TEST_CASE("build_shift") {
    const auto& p = profile_n2();
    const auto zero = build_shift(16, 0.0, p.field, 0.3);
    CHECK(l2_norm_squared(zero) == 0.0);
    CHECK_THROWS_AS(build_shift(16, -1.0, p.field, 0.0), Error);
    const auto h = build_shift(16, 0.2, p.field, 0.0);
    CHECK(h.radius() == 2 * kProfileRadius);
    CHECK(h.at(1, 0) == cplx{0.0, 0.0});
    CHECK(h.is_exactly_hermitian());
    // h_n(t) against sqrt(C_n) Lambda_{l_n}(f): C^1 distance bounded by the e^{-lambda} factors.
    for (int n : {16, 64, 256}) {
        const int l = shift_scale(n);
        const auto target = std::sqrt(0.2) * scale_lambda(p.field, l);
        double worst = 0.0;
        for (double t : {0.0, 0.5, 2.0}) {
            const auto d = build_shift(n, 0.2, p.field, t) - target;
            double c1 = 0.0;
            d.for_each_mode([&](int m1, int m2, cplx v) {
                c1 += std::abs(v) * (1.0 + kTwoPi * std::sqrt(double(m1 * m1 + m2 * m2)));
            });
            worst = std::max(worst, c1);
        }
        // Mode 0 decays as e^{-1}; the rest as e^{-(1 + 4 pi^2 l^2)}.
        double bound = std::exp(-1.0) * std::sqrt(0.2) * std::abs(p.field.at(0, 0));
        p.field.for_each_mode([&](int m1, int m2, cplx v) {
            if (m1 == 0 && m2 == 0) return;
            const double lam = 1.0 + 4.0 * oracle::pi * oracle::pi * l * l * (m1 * m1 + m2 * m2);
            bound += std::exp(-lam) * std::sqrt(0.2) * std::abs(v) * (1.0 + kTwoPi * l * std::sqrt(double(m1 * m1 + m2 * m2)));
        });
        CHECK(worst <= bound * (1.0 + 1e-12) + 1e-15);
    }
}

TEST_CASE("shift_vanishing_norm") {
    const auto& p = profile_n2();
    // Zero field: H_k(0, C) constant, only block -1.
    const SpectralField z(0);
    CHECK(shift_vanishing_norm(z, 0.7, 1, 0.4) == 0.0);
    CHECK(shift_vanishing_norm(z, 0.7, 3, 0.4) == 0.0);
    CHECK(std::abs(shift_vanishing_norm(z, 0.7, 2, 0.4) - std::pow(2.0, 0.4) * 0.7) < 1e-12);
    // Mean zero after dilation.
    for (int l : {1, 2, 3})
        for (int k = 1; k <= 4; ++k) {
            const auto hk = hermite_of_field(scale_lambda(p.field, l), k, 1.0);
            CHECK(std::abs(hk.at(0, 0)) < 1e-8);
        }
    // k = 1 scales like l^{-alpha}.
    const double alpha = 0.4;
    const double base = shift_vanishing_norm(scale_lambda(p.field, 1), 0.0, 1, alpha);
    for (int l : {2, 4, 8}) {
        const double r = shift_vanishing_norm(scale_lambda(p.field, l), 0.0, 1, alpha) / (std::pow(l, -alpha) * base);
        CHECK(r < 10.0);
        CHECK(r > 0.1);
    }
}

TEST_CASE("shift_family") {
    const int P = 25;
    const auto g = synthesize_real(random_field(3, 1, 0.5), P);
    const auto h = synthesize_real(random_field(3, 2, 0.5), P);
    const double C = 0.8;
    const auto z = hermite_family(g, 4, C);

    GridField zero(P);
    const auto id = shift_family(zero, z);
    for (int k = 0; k <= 4; ++k) CHECK(id[k].values == z[k].values);

    // Hermite shift collapse: T_h H(g) = H(g + h).
    const auto shifted = shift_family(h, z);
    for (std::size_t q = 0; q < g.values.size(); ++q)
        for (int k = 0; k <= 4; ++k) {
            const double want = oracle::hermite_explicit(k, g.values[q] + h.values[q], C);
            CHECK(std::abs(shifted[k].values[q] - want) <= 1e-10 * std::max(1.0, std::abs(want)));
        }

    // T_{-h} T_h = id on a generic family.
    WickFamily rnd;
    rnd.kmax = 4;
    for (int k = 0; k <= 4; ++k) rnd.members.push_back(synthesize_real(random_field(2, 10 + k), P));
    GridField mh = h;
    for (double& v : mh.values) v = -v;
    const auto back = shift_family(mh, shift_family(h, rnd));
    for (int k = 0; k <= 4; ++k)
        for (std::size_t q = 0; q < g.values.size(); ++q) CHECK(std::abs(back[k].values[q] - rnd[k].values[q]) <= 1e-10);

    // Spectral overload agrees with the grid one.
    std::vector<SpectralField> zs;
    for (int k = 0; k <= 2; ++k) zs.push_back(random_field(2, 30 + k));
    const auto hs = random_field(2, 40);
    const auto ss = shift_family(hs, zs);
    const auto want2 = zs[2] + 2.0 * multiply(hs, zs[1]) + multiply(hs, multiply(hs, zs[0]));
    CHECK(max_diff(ss[2], want2) < 1e-11);
}

TEST_CASE("shifted driver at M = n") {
    const auto& p = profile_n2();
    const int n = 4;
    const double R = 0.3;
    const double alpha = 0.4;
    const auto d = shifted_driver_distance(n, n, R, 3, alpha, p, 99);
    const double Rn = variance_R(n);
    CHECK(d.C_n == Catch::Approx(Rn - R));
    const auto h = build_shift(n, d.C_n, p.field, 0.0);
    // k = 1: the driver collapses to -h_n.
    CHECK(std::abs(d.distance[1] - hoelder_norm(h, -alpha)) <= 1e-8);
    // Every k: the shifted family equals H_k(-h_n, R_n).
    const auto state = stationary_sample(n, 99);
    const int P = exact_resolution(3 * h.radius());
    const auto fam = wick_powers(state, 3, P);
    auto drift = -(project(state.modes, n) + h);
    drift.symmetrize();
    const auto shifted = shift_family(synthesize_real(drift, P), fam);
    const auto hg = synthesize_real(h, P);
    double worst = 0.0;
    for (int k = 0; k <= 3; ++k)
        for (std::size_t q = 0; q < hg.values.size(); ++q)
            worst = std::max(worst, std::abs(shifted[k].values[q] - oracle::hermite_explicit(k, -hg.values[q], Rn)));
    CHECK(worst <= 1e-8);

    // R = R_n: no shift, zero distance.
    const auto z = shifted_driver_distance(n, n, Rn, 3, alpha, p, 5);
    CHECK(z.C_n == 0.0);
    for (int k = 1; k <= 3; ++k) CHECK(z.distance[static_cast<std::size_t>(k)] <= 1e-10);
    CHECK_THROWS_AS(shifted_driver_distance(2, 4, R, 3, alpha, p, 1), Error);
}

TEST_CASE("shift by a nearby Cameron-Martin element") {
    // T_{-Zt} z - T_{-Z} z = T_{-Z}(T_{Z - Zt} z) - T_{-Z} z is O(||Z - Zt||).
    const int P = 25;
    const auto Z = synthesize_real(random_field(3, 7, 0.5), P);
    const auto z = hermite_family(Z, 3, 0.6);
    const auto pert = synthesize_real(random_field(2, 8), P);
    GridField mZ = Z;
    for (double& v : mZ.values) v = -v;
    const auto ref = shift_family(mZ, z);
    double prev = 0.0;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        GridField mZt = mZ;
        for (std::size_t q = 0; q < mZt.values.size(); ++q) mZt.values[q] -= eps * pert.values[q];
        const auto s = shift_family(mZt, z);
        double d = 0.0;
        for (int k = 0; k <= 3; ++k)
            for (std::size_t q = 0; q < s[k].values.size(); ++q) d = std::max(d, std::abs(s[k].values[q] - ref[k].values[q]));
        if (prev > 0.0) CHECK(d < 0.2 * prev);
        prev = d;
    }
}
