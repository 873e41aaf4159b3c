#pragma once

// Stationary Galerkin-truncated stochastic heat equation on T^2.
//
// Mode m of Z_n relaxes at rate mu_m = 1 + 4 pi^2 |m|^2 and is driven by a
// complex Brownian motion with W_{-m} = conj(W_m), E|W_m(t)|^2 = |t|. At
// stationarity E|a_m|^2 = 1/(2 mu_m); the time-dt transition is exact.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "wicklab/hermite.hpp"
#include "wicklab/lattice_kernels.hpp"
#include "wicklab/parallel.hpp"
#include "wicklab/torus_fourier.hpp"

namespace wicklab {

/// R_n = sum_{|m| <= n} 1 / (2 mu_m).
inline double variance_R(int n) {
    require(n >= 0, ErrorCode::domain, "truncation must be >= 0");
    double s = 0.0;
    for (int a = -n; a <= n; ++a)
        for (int b = -n; b <= n; ++b)
            if (in_ball(a, b, n)) s += 0.5 / mode_rate(a, b);
    return s;
}

/// C_n(x) = sum_{|m| <= n} cos(2 pi m.x) / (2 mu_m) = E[Z_n(t, 0) Z_n(t, x)].
inline double covariance_C(int n, double x1, double x2) {
    require(n >= 0, ErrorCode::domain, "truncation must be >= 0");
    double s = 0.0;
    for (int a = -n; a <= n; ++a)
        for (int b = -n; b <= n; ++b)
            if (in_ball(a, b, n)) s += std::cos(kTwoPi * (a * x1 + b * x2)) * 0.5 / mode_rate(a, b);
    return s;
}

class OUEnsemble {
public:
    int n = 0;
    double t = 0.0;
    SpectralField modes;
    std::uint64_t rng_seed = 0;

    /// Draws every mode from the stationary law. Draw order: a_0, then one
    /// complex normal per pair (m, -m) with m1 > 0 or (m1 == 0, m2 > 0), in
    /// lexicographic order of m.
    static OUEnsemble stationary(int n, std::uint64_t seed) {
        require(n >= 0, ErrorCode::domain, "truncation must be >= 0");
        OUEnsemble s;
        s.n = n;
        s.rng_seed = seed;
        s.engine_.seed(seed);
        s.modes = SpectralField(n, true);
        s.modes.set(0, 0, std::sqrt(0.5) * s.normal());
        for_each_pair(n, [&](int a, int b) { s.modes.set(a, b, s.complex_normal(0.5 / mode_rate(a, b))); });
        return s;
    }

    /// Exact transition over dt > 0:
    ///   a_m <- exp(-mu dt) a_m + eta_m,  E|eta_m|^2 = (1 - exp(-2 mu dt)) / (2 mu).
    void advance(double dt) {
        require(dt > 0.0 && std::isfinite(dt), ErrorCode::domain, "time step must be positive and finite");
        {
            const double decay = std::exp(-dt);
            const double var = -std::expm1(-2.0 * dt) / 2.0;
            const double a0 = decay * modes.at(0, 0).real() + std::sqrt(var) * normal();
            modes.set(0, 0, a0);
        }
        for_each_pair(n, [&](int a, int b) {
            const double mu = mode_rate(a, b);
            const double var = -std::expm1(-2.0 * mu * dt) / (2.0 * mu);
            modes.set(a, b, std::exp(-mu * dt) * modes.at(a, b) + complex_normal(var));
        });
        t += dt;
    }

private:
    template <class F>
    static void for_each_pair(int n, F&& fn) {
        for (int a = 0; a <= n; ++a)
            for (int b = -n; b <= n; ++b)
                if ((a > 0 || b > 0) && in_ball(a, b, n)) fn(a, b);
    }

    double normal() { return dist_(engine_); }

    // Complex normal with E|z|^2 = var.
    cplx complex_normal(double var) {
        const double s = std::sqrt(var / 2.0);
        const double x = normal();
        const double y = normal();
        return {s * x, s * y};
    }

    Engine engine_;
    std::normal_distribution<double> dist_{0.0, 1.0};
};

inline OUEnsemble stationary_sample(int n, std::uint64_t seed) { return OUEnsemble::stationary(n, seed); }

inline OUEnsemble evolve(OUEnsemble state, double dt) {
    state.advance(dt);
    return state;
}

struct WickFamily {
    int kmax = 0;
    int n = 0;
    double R = 0.0;
    std::vector<GridField> members;  // members[k] = H_k(field, R)

    const GridField& operator[](int k) const { return members.at(static_cast<std::size_t>(k)); }
    int resolution() const { return members.empty() ? 0 : members.front().P; }
};

/// H_k(g(x), C) for k = 0..kmax at every grid point.
inline WickFamily hermite_family(const GridField& g, int kmax, double C, int n = 0) {
    detail::check_degree(kmax);
    detail::check_variance(C);
    WickFamily w;
    w.kmax = kmax;
    w.n = n;
    w.R = C;
    w.members.assign(static_cast<std::size_t>(kmax) + 1, GridField(g.P));
    for (std::size_t i = 0; i < g.values.size(); ++i) {
        const double x = g.values[i];
        double hm1 = 0.0;
        double h = 1.0;
        w.members[0].values[i] = 1.0;
        for (int k = 0; k < kmax; ++k) {
            const double next = x * h - k * C * hm1;
            hm1 = h;
            h = next;
            w.members[static_cast<std::size_t>(k) + 1].values[i] = h;
        }
    }
    return w;
}

/// Z_n^{:k:} = H_k(Z_n, R_n) on the P x P grid, k = 0..kmax. P > 2 kmax n keeps
/// the order-kmax member exactly analyzable at radius kmax n.
inline WickFamily wick_powers(const OUEnsemble& state, int kmax, int P) {
    require(kmax >= 0, ErrorCode::domain, "kmax must be >= 0");
    detail::check_resolution(P, std::max(kmax, 1) * state.n);
    return hermite_family(synthesize_real(state.modes, P), kmax, variance_R(state.n), state.n);
}

/// Fourier coefficients of member k (radius k n).
inline SpectralField wick_spectrum(const WickFamily& w, int k) {
    return analyze(w[k], k * w.n);
}

inline double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

/// k! K_n(dt)^{*k}, the covariance kernel of the order-k Wick power's modes:
/// E[<Z_n^{:k:}(t), e_p> conj(<Z_n^{:k:}(t + dt), e_p>)].
inline LatticeKernel wick_covariance_kernel(int n, int k, double dt) {
    require(k >= 1, ErrorCode::domain, "Wick order must be >= 1");
    auto kern = star_power(heat_kernel(dt, n), k);
    const double f = factorial(k);
    for (double& v : kern.data()) v *= f;
    return kern;
}

inline double wick_mode_covariance(int n, int k, double dt, int p1, int p2) {
    return wick_covariance_kernel(n, k, dt).at(p1, p2);
}

} // namespace wicklab
