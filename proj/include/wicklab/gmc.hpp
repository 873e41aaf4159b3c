#pragma once

// Massive Gaussian free field, its Wick exponential in the L^2 phase
// gamma^2 < 8 pi, and the H^{-beta} second-moment series
//   E ||:e^{gamma X_n}:||^2_{H^{-beta}} = sum_m mu_m^{-beta} sum_k gamma^{2k}/k! K_n^{*k}(m).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "wicklab/lattice_kernels.hpp"
#include "wicklab/she.hpp"
#include "wicklab/torus_fourier.hpp"

namespace wicklab {

inline constexpr double kCriticalGammaSquared = 8.0 * std::numbers::pi;

inline void check_phase(double gamma) {
    require(std::isfinite(gamma) && gamma * gamma < kCriticalGammaSquared, ErrorCode::phase,
            "gamma^2 = " + std::to_string(gamma * gamma) + " outside the L2 phase gamma^2 < 8 pi");
}

/// gamma^2 < 8 pi and gamma^2 / (8 pi) < beta < 1.
inline void check_phase(double gamma, double beta) {
    check_phase(gamma);
    require(beta > gamma * gamma / kCriticalGammaSquared && beta < 1.0, ErrorCode::phase,
            "beta = " + std::to_string(beta) + " outside (gamma^2 / 8 pi, 1) = (" +
                std::to_string(gamma * gamma / kCriticalGammaSquared) + ", 1)");
}

struct GFFSample {
    int n = 0;
    SpectralField field;
    double R = 0.0;
};

/// The fixed-time marginal of the stationary heat equation: same draws as
/// stationary_sample(n, seed).
inline GFFSample gff_sample(int n, std::uint64_t seed) {
    auto s = stationary_sample(n, seed);
    return {n, std::move(s.modes), variance_R(n)};
}

/// G^{(N)}(x) = (1/2) sum_{|m| <= N} cos(2 pi m.x) / mu_m.
inline double green_function(int N, double x1, double x2) { return covariance_C(N, x1, x2); }

/// G_beta^{(N)}(x) = sum_{|m| <= N} mu_m^{-beta} cos(2 pi m.x).
inline double green_beta(double beta, int N, double x1, double x2) {
    require(N >= 0, ErrorCode::domain, "truncation must be >= 0");
    double s = 0.0;
    for (int a = -N; a <= N; ++a)
        for (int b = -N; b <= N; ++b)
            if (in_ball(a, b, N)) s += std::pow(mode_rate(a, b), -beta) * std::cos(kTwoPi * (a * x1 + b * x2));
    return s;
}

/// Grid size for chaos fields of truncation n: fine enough that the
/// non-band-limited exponential aliases negligibly.
inline int chaos_resolution(int n) { return std::max(64, good_fft_size(32 * n)); }

struct ChaosField {
    double gamma = 0.0;
    int n = 0;
    GridField grid;
};

/// :e^{gamma X_n}: = exp(gamma X_n - gamma^2 R_n / 2) on the P x P grid.
inline ChaosField wick_exponential(const GFFSample& X, double gamma, int P) {
    check_phase(gamma);
    const double shift = 0.5 * gamma * gamma * X.R;
    const auto g = synthesize_real(X.field, P);
    return {gamma, X.n, map_grid(g, [&](double x) { return std::exp(gamma * x - shift); })};
}

inline ChaosField wick_exponential(const GFFSample& X, double gamma) {
    return wick_exponential(X, gamma, chaos_resolution(X.n));
}

/// T_h f = e^{gamma h} f, pointwise.
inline GridField gmc_shift(const GridField& f, const GridField& h, double gamma) {
    require(f.P == h.P, ErrorCode::domain, "chaos field and shift live on different grids");
    GridField out(f.P);
    for (std::size_t i = 0; i < f.values.size(); ++i) out.values[i] = std::exp(gamma * h.values[i]) * f.values[i];
    return out;
}

inline bool positivity_check(const GridField& f) {
    return std::all_of(f.values.begin(), f.values.end(), [](double v) { return v >= 0.0; });
}

inline bool positivity_check(const ChaosField& f) { return positivity_check(f.grid); }

/// sum_m mu_m^{-beta} |hat g(m)|^2 over every frequency the P x P grid carries
/// (m wrapped into [-P/2, P/2)^2).
inline double grid_sobolev_norm_squared(const GridField& g, double beta) {
    const int P = g.P;
    const auto cnt = g.values.size();
    auto buf = detail::fft_alloc(cnt);
    auto out = detail::fft_alloc(cnt);
    for (std::size_t i = 0; i < cnt; ++i) {
        buf[i][0] = g.values[i];
        buf[i][1] = 0.0;
    }
    detail::fft2d(P, FFTW_FORWARD, buf.get(), out.get());
    const double scale = 1.0 / (double(P) * double(P));
    double s = 0.0;
    for (int i = 0; i < P; ++i) {
        const int m1 = i < (P + 1) / 2 ? i : i - P;
        for (int j = 0; j < P; ++j) {
            const int m2 = j < (P + 1) / 2 ? j : j - P;
            const auto idx = static_cast<std::size_t>(i) * P + j;
            const double re = out[idx][0] * scale;
            const double im = out[idx][1] * scale;
            s += std::pow(mode_rate(m1, m2), -beta) * (re * re + im * im);
        }
    }
    return s;
}

struct SeriesResult {
    double value = 0.0;
    int terms = 0;           // highest k included
    double tail_bound = 0.0; // (aR)^{K+1} / (K+1)! e^{aR}
};

namespace detail {

// sum_m mu_m^{-beta} sum_{k=0}^{K} a^k / k! K^{*k}(m), with K chosen so the
// crude tail bound (a mass)^{K+1}/(K+1)! e^{a mass} drops below 1e-14. The
// k = 0 term is the indicator of the origin.
inline SeriesResult exponential_kernel_series(const LatticeKernel& kern, double a, double beta,
                                              bool include_k0) {
    const double mass = a * kern.total();
    SeriesResult res;
    auto weighted = [&](const LatticeKernel& k) {
        double s = 0.0;
        const int r = k.radius();
        for (int m1 = -r; m1 <= r; ++m1)
            for (int m2 = -r; m2 <= r; ++m2) {
                const double v = k.at(m1, m2);
                if (v != 0.0) s += std::pow(mode_rate(m1, m2), -beta) * v;
            }
        return s;
    };
    if (include_k0) res.value = 1.0;
    double coef = 1.0;
    double tail_term = mass;  // mass^{K+1} / (K+1)! with K = 0
    if (mass == 0.0) return res;
    LatticeKernel power = kern;
    for (int k = 1;; ++k) {
        coef *= a / k;
        res.value += coef * weighted(power);
        res.terms = k;
        tail_term *= mass / (k + 1);
        res.tail_bound = tail_term * std::exp(mass);
        if (res.tail_bound < 1e-14) break;
        require(k < 400, ErrorCode::no_convergence, "exponential kernel series did not reach its tail bound");
        power = star(power, kern);
    }
    return res;
}

} // namespace detail

/// E ||:e^{gamma X_n}:||^2_{H^{-beta}} from the lattice series.
inline SeriesResult gmc_second_moment_series(int n, double gamma, double beta) {
    check_phase(gamma, beta);
    require(n >= 0, ErrorCode::domain, "truncation must be >= 0");
    return detail::exponential_kernel_series(heat_kernel(0.0, n), gamma * gamma, beta, true);
}

inline double gmc_second_moment_analytic(int n, double gamma, double beta) {
    return gmc_second_moment_series(n, gamma, beta).value;
}

/// 1_{N < |p| <= M} / (2 mu_p).
inline LatticeKernel annulus_kernel(int N, int M) {
    require(M >= N && N >= 0, ErrorCode::domain, "annulus needs M >= N >= 0");
    auto k = heat_kernel(0.0, M);
    for (int a = -M; a <= M; ++a)
        for (int b = -M; b <= M; ++b)
            if (in_ball(a, b, N)) k.raw(a, b) = 0.0;
    return k;
}

/// E ||:e^{gamma (X_M - X_N)}: - 1||^2_{H^{-beta}}
///   = sum_m mu_m^{-beta} sum_{k >= 1} gamma^{2k}/k! A^{*k}(m),  A = annulus kernel.
inline SeriesResult gmc_gap_series(int N, int M, double gamma, double beta) {
    check_phase(gamma, beta);
    return detail::exponential_kernel_series(annulus_kernel(N, M), gamma * gamma, beta, false);
}

inline double gmc_gap_to_one(int N, int M, double gamma, double beta) {
    return gmc_gap_series(N, M, gamma, beta).value;
}

/// lambda gamma^2 / (4 pi) + 2 - 2 beta; the boosted integral is finite iff < 2.
inline double boosted_exponent(double lambda, double gamma, double beta) {
    return lambda * gamma * gamma / (4.0 * std::numbers::pi) + 2.0 - 2.0 * beta;
}

/// int int exp(a G^{(N)}(x - y)) G_beta(x, y) dx dy = sum_m mu_m^{-beta} c_m,
/// with c the Fourier coefficients of exp(a C_N). Evaluated spectrally: C_N is
/// sampled on a grid of chaos_resolution(N) points per axis, exponentiated and
/// transformed. a = lambda gamma^2.
inline double boosted_integral(int N, double a, double beta) {
    require(N >= 0 && a >= 0.0, ErrorCode::domain, "boosted integral needs N >= 0 and a >= 0");
    SpectralField cov(N, true);
    for (int m1 = -N; m1 <= N; ++m1)
        for (int m2 = -N; m2 <= N; ++m2)
            if (in_ball(m1, m2, N)) cov.raw(m1, m2) = 0.5 / mode_rate(m1, m2);
    const int P = chaos_resolution(N);
    const auto g = map_grid(synthesize_real(cov, P), [&](double c) { return std::exp(a * c); });
    const int cnt = P * P;
    auto buf = detail::fft_alloc(static_cast<std::size_t>(cnt));
    auto out = detail::fft_alloc(static_cast<std::size_t>(cnt));
    for (int i = 0; i < cnt; ++i) {
        buf[i][0] = g.values[static_cast<std::size_t>(i)];
        buf[i][1] = 0.0;
    }
    detail::fft2d(P, FFTW_FORWARD, buf.get(), out.get());
    const double scale = 1.0 / (double(P) * double(P));
    double s = 0.0;
    for (int i = 0; i < P; ++i) {
        const int m1 = i < (P + 1) / 2 ? i : i - P;
        for (int j = 0; j < P; ++j) {
            const int m2 = j < (P + 1) / 2 ? j : j - P;
            s += std::pow(mode_rate(m1, m2), -beta) * out[static_cast<std::size_t>(i) * P + j][0] * scale;
        }
    }
    return s;
}

/// The same integral from the lattice series sum_k a^k / k! K_N^{*k}.
inline SeriesResult boosted_integral_series(int N, double a, double beta) {
    return detail::exponential_kernel_series(heat_kernel(0.0, N), a, beta, true);
}

struct BoostedSweep {
    std::vector<int> N;
    std::vector<double> value;
    double increment_ratio = 0.0;  // last increment over the one before
    bool stabilizes = false;       // increments shrink geometrically
};

/// Boosted integral along increasing truncations. The increments of a
/// convergent sequence shrink (ratio < 1); a divergent one keeps growing.
inline BoostedSweep boosted_sweep(const std::vector<int>& Ns, double a, double beta) {
    require(Ns.size() >= 3, ErrorCode::domain, "boosted sweep needs at least three truncations");
    BoostedSweep s;
    s.N = Ns;
    for (int N : Ns) s.value.push_back(boosted_integral(N, a, beta));
    const std::size_t L = s.value.size();
    const double d1 = s.value[L - 2] - s.value[L - 3];
    const double d2 = s.value[L - 1] - s.value[L - 2];
    s.increment_ratio = d2 / d1;
    s.stabilizes = s.increment_ratio < 1.0;
    return s;
}

} // namespace wicklab
