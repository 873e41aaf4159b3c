#pragma once

// Moment-matched profiles, the shift functions h_n, the binomial shift T_h on
// Wick families, and the shifted-driver distance.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "wicklab/besov.hpp"
#include "wicklab/hermite.hpp"
#include "wicklab/she.hpp"
#include "wicklab/torus_fourier.hpp"

namespace wicklab {

inline constexpr int kProfileRadius = 32;
inline constexpr int kProfileSamples = 512;

inline double double_factorial(int k) {
    double f = 1.0;
    for (int i = k; i > 1; i -= 2) f *= i;
    return f;
}

/// g(a, x) = sqrt(2 log(1/x1)) cos(pi x2)
///           exp(-a^2 (x1^{-1/2} + (1-x1)^{-1/2} + x2^{-1/2} + (1-x2)^{-1/2}))
/// for x in the open unit square; a == 0 gives the undamped function.
inline double profile_value(double a, double x1, double x2) {
    if (x1 <= 0.0 || x1 >= 1.0 || x2 <= 0.0 || x2 >= 1.0) return 0.0;
    const double damp = a * a * (1.0 / std::sqrt(x1) + 1.0 / std::sqrt(1.0 - x1) + 1.0 / std::sqrt(x2) +
                                 1.0 / std::sqrt(1.0 - x2));
    return std::sqrt(2.0 * std::log(1.0 / x1)) * std::cos(std::numbers::pi * x2) * std::exp(-damp);
}

/// Samples of g(a, .) at (i/P, j/P); the removable boundary values are 0.
inline GridField base_profile(double a, int P) {
    require(a > 0.0 && a < 1.0, ErrorCode::domain, "profile smoothing a must lie in (0, 1)");
    require(P >= 2, ErrorCode::domain, "profile resolution must be >= 2");
    GridField g(P);
    for (int i = 0; i < P; ++i)
        for (int j = 0; j < P; ++j) g(i, j) = profile_value(a, double(i) / P, double(j) / P);
    return g;
}

/// b_k for k = 0..2N: 0 for odd k, (k-1)!! for even k (b_0 = 1).
inline std::vector<double> moment_targets(int N) {
    require(N >= 1, ErrorCode::domain, "moment order N must be >= 1");
    std::vector<double> b(static_cast<std::size_t>(2 * N) + 1, 0.0);
    for (int k = 0; k <= 2 * N; k += 2) b[static_cast<std::size_t>(k)] = double_factorial(k - 1);
    return b;
}

/// int_0^1 (2 log(1/x))^k dx by tanh-sinh quadrature (endpoint singularity at 0).
inline double log_moment_quadrature(int k) {
    require(k >= 0, ErrorCode::domain, "moment order must be >= 0");
    boost::math::quadrature::tanh_sinh<double> q;
    return q.integrate([k](double x) { return std::pow(2.0 * std::log(1.0 / x), k); }, 0.0, 1.0);
}

/// int_0^1 cos(pi x)^{2k} dx by adaptive Gauss-Kronrod.
inline double cos_moment_quadrature(int k) {
    require(k >= 0, ErrorCode::domain, "moment order must be >= 0");
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [k](double x) { return std::pow(std::cos(std::numbers::pi * x), 2 * k); }, 0.0, 1.0, 15, 1e-15);
}

struct MomentProfile {
    int N = 0;
    double a0 = 0.0;
    SpectralField field;            // f, band-limited to kProfileRadius
    std::vector<double> a;          // a_1 .. a_{2N} (a[0] unused)
    std::vector<double> residuals;  // |int H_k(f)| for k = 0..2N, checked at the verification grid
    int iterations = 0;
    int verify_resolution = 0;
    Eigen::MatrixXd start_jacobian;  // d/da_i int f^j at a = 0, rows i, columns j

    double max_residual() const {
        double r = 0.0;
        for (std::size_t k = 1; k < residuals.size(); ++k) r = std::max(r, residuals[k]);
        return r;
    }

    GridField grid(int P) const { return synthesize_real(field, P); }
};

/// |int H_k(f(x), 1) dx| for k = 0..kmax, by grid quadrature at resolution P.
inline std::vector<double> hermite_integrals(const SpectralField& f, int kmax, int P) {
    const auto g = synthesize_real(f, P);
    std::vector<double> s(static_cast<std::size_t>(kmax) + 1, 0.0);
    for (double x : g.values) {
        const auto h = hermite_sequence(kmax, x, 1.0);
        for (int k = 0; k <= kmax; ++k) s[static_cast<std::size_t>(k)] += h[static_cast<std::size_t>(k)];
    }
    for (double& v : s) v = std::abs(v / static_cast<double>(g.values.size()));
    return s;
}

namespace detail {

inline double grid_power_mean(const GridField& g, const GridField* weight, int k) {
    double s = 0.0;
    for (std::size_t i = 0; i < g.values.size(); ++i) {
        double v = detail::ipow(g.values[i], k);
        if (weight) v *= weight->values[i];
        s += v;
    }
    return s / static_cast<double>(g.values.size());
}

} // namespace detail

/// Solves int f^k = b_k, k = 1..2N, for f = g(a0) + sum_i a_i phi_i with
/// damped Newton. g(a0) is sampled at kProfileSamples and band-limited to
/// kProfileRadius; phi_i is the dual basis of psi_j = Pi(j g^{j-1}), so the
/// Jacobian at a = 0 is the identity. All integrals are exact grid means since
/// f^k stays band-limited to k kProfileRadius.
inline MomentProfile match_moments(int N, double a0, double tol) {
    require(N >= 1 && N <= 4, ErrorCode::domain, "moment order N must lie in [1, 4]");
    require(a0 > 0.0 && a0 < 1.0, ErrorCode::domain, "profile smoothing a0 must lie in (0, 1)");
    require(tol > 0.0, ErrorCode::domain, "residual tolerance must be positive");
    const int K = 2 * N;
    const int r = kProfileRadius;
    const int P = std::max(256, good_fft_size(r * K + 1));
    const auto targets = moment_targets(N);

    const auto base = analyze(base_profile(a0, kProfileSamples), r);
    const auto bgrid = synthesize_real(base, P);

    std::vector<SpectralField> psi;
    for (int j = 1; j <= K; ++j) {
        GridField pj(P);
        for (std::size_t i = 0; i < pj.values.size(); ++i)
            pj.values[i] = j * detail::ipow(bgrid.values[i], j - 1);
        psi.push_back(analyze(pj, r));
    }
    Eigen::MatrixXd gram(K, K);
    for (int i = 0; i < K; ++i)
        for (int j = 0; j < K; ++j) {
            double s = 0.0;
            psi[static_cast<std::size_t>(i)].for_each_mode(
                [&](int m1, int m2, cplx v) { s += (v * std::conj(psi[static_cast<std::size_t>(j)].at(m1, m2))).real(); });
            gram(i, j) = s;
        }
    const Eigen::MatrixXd ginv = gram.inverse();
    require(ginv.allFinite(), ErrorCode::no_convergence, "moment basis is singular");
    std::vector<SpectralField> phi;
    std::vector<GridField> phi_grid;
    for (int i = 0; i < K; ++i) {
        SpectralField p(r, true);
        for (int l = 0; l < K; ++l) p.axpy(ginv(i, l), psi[static_cast<std::size_t>(l)]);
        p.symmetrize();
        phi_grid.push_back(synthesize_real(p, P));
        phi.push_back(std::move(p));
    }

    auto make_grid = [&](const Eigen::VectorXd& a) {
        GridField f = bgrid;
        for (int i = 0; i < K; ++i)
            for (std::size_t q = 0; q < f.values.size(); ++q)
                f.values[q] += a(i) * phi_grid[static_cast<std::size_t>(i)].values[q];
        return f;
    };
    auto residual = [&](const GridField& f) {
        Eigen::VectorXd F(K);
        for (int k = 1; k <= K; ++k)
            F(k - 1) = detail::grid_power_mean(f, nullptr, k) - targets[static_cast<std::size_t>(k)];
        return F;
    };
    auto jacobian = [&](const GridField& f) {
        Eigen::MatrixXd J(K, K);  // J(k-1, i) = d F_k / d a_i
        for (int k = 1; k <= K; ++k)
            for (int i = 0; i < K; ++i)
                J(k - 1, i) = k * detail::grid_power_mean(f, &phi_grid[static_cast<std::size_t>(i)], k - 1);
        return J;
    };

    MomentProfile out;
    out.N = N;
    out.a0 = a0;
    Eigen::VectorXd a = Eigen::VectorXd::Zero(K);
    GridField f = make_grid(a);
    Eigen::VectorXd F = residual(f);
    out.start_jacobian = jacobian(f).transpose();
    const double goal = 1e-3 * tol;
    int it = 0;
    for (; it < 100 && F.lpNorm<Eigen::Infinity>() > goal; ++it) {
        const Eigen::VectorXd step = jacobian(f).fullPivLu().solve(-F);
        require(step.allFinite(), ErrorCode::no_convergence, "singular Newton system");
        double t = 1.0;
        const double norm0 = F.norm();
        for (;;) {
            const Eigen::VectorXd trial = a + t * step;
            GridField ft = make_grid(trial);
            Eigen::VectorXd Ft = residual(ft);
            if (Ft.norm() < (1.0 - 0.25 * t) * norm0 || (t < 1.0 / 64 && Ft.norm() < norm0)) {
                a = trial;
                f = std::move(ft);
                F = std::move(Ft);
                break;
            }
            t *= 0.5;
            if (t < 1e-6) {
                // No further descent is possible at double precision.
                it = 100;
                break;
            }
        }
    }
    out.iterations = it;

    SpectralField result = base;
    for (int i = 0; i < K; ++i) result.axpy(a(i), phi[static_cast<std::size_t>(i)]);
    result.symmetrize();
    out.field = std::move(result);
    out.a.assign(static_cast<std::size_t>(K) + 1, 0.0);
    for (int i = 0; i < K; ++i) out.a[static_cast<std::size_t>(i) + 1] = a(i);
    out.verify_resolution = 4 * P;
    out.residuals = hermite_integrals(out.field, K, out.verify_resolution);
    if (out.max_residual() > tol)
        throw Error(ErrorCode::no_convergence,
                    "moment matching stalled: max |int H_k(f)| = " + std::to_string(out.max_residual()) +
                        " > tol " + std::to_string(tol) + " (a0 too large or N too high)");
    return out;
}

/// l_n = floor((log n)^{log log n}) = floor(exp((log log n)^2)), natural logs,
/// floored at 1. Needs n >= 3.
inline int shift_scale(int n) {
    require(n >= 3, ErrorCode::domain, "shift index n must be >= 3");
    const double ll = std::log(std::log(double(n)));
    return std::max(1, static_cast<int>(std::floor(std::exp(ll * ll))));
}

/// h_n(t) = sqrt(C_n) sum_m a_m (1 - exp(-lambda_{n,m} (t + 1))) e_{l_n m}
/// with lambda_{n,m} = 1 + 4 pi^2 l_n^2 |m|^2 and a_m the profile coefficients.
inline SpectralField build_shift(int n, double C_n, const SpectralField& base, double t) {
    require(C_n >= 0.0, ErrorCode::domain, "shift budget C_n must be >= 0");
    require(t >= 0.0, ErrorCode::domain, "shift time must be >= 0");
    const int l = shift_scale(n);
    const double amp = std::sqrt(C_n);
    SpectralField h(base.radius() * l, true);
    base.for_each_mode([&](int m1, int m2, cplx v) {
        const double lambda = 1.0 + 4.0 * std::numbers::pi * std::numbers::pi * double(l) * l * (m1 * m1 + m2 * m2);
        h.raw(l * m1, l * m2) = amp * -std::expm1(-lambda * (t + 1.0)) * v;
    });
    h.symmetrize();
    return h;
}

/// H_k(h(x), C) evaluated on a grid fine enough to analyze exactly at radius k r_h.
inline SpectralField hermite_of_field(const SpectralField& h, int k, double C) {
    detail::check_degree(k);
    const int r = std::max(k, 1) * h.radius();
    const int P = exact_resolution(r);
    const auto g = synthesize_real(h, P);
    return analyze(map_grid(g, [&](double x) { return hermite_eval(k, x, C); }), r);
}

/// ||H_k(h, C_n)||_{C^{-alpha}}.
inline double shift_vanishing_norm(const SpectralField& h, double C_n, int k, double alpha) {
    require(k >= 1, ErrorCode::domain, "order k must be >= 1");
    return hoelder_norm(hermite_of_field(h, k, C_n), -alpha);
}

/// (T_h z)_k = sum_{l <= k} binom(k, l) z_l h^{k-l}, pointwise on a common grid.
/// Exact on band-limited data when the grid resolves every product.
inline WickFamily shift_family(const GridField& h, const WickFamily& z) {
    require(h.P == z.resolution(), ErrorCode::domain, "shift and family live on different grids");
    WickFamily out = z;
    const std::size_t cnt = h.values.size();
    std::vector<double> hp(static_cast<std::size_t>(z.kmax) + 1);
    for (std::size_t q = 0; q < cnt; ++q) {
        hp[0] = 1.0;
        for (int j = 1; j <= z.kmax; ++j) hp[static_cast<std::size_t>(j)] = hp[static_cast<std::size_t>(j) - 1] * h.values[q];
        for (int k = 0; k <= z.kmax; ++k) {
            double s = 0.0;
            double binom = 1.0;
            for (int l = 0; l <= k; ++l) {
                s += binom * z[l].values[q] * hp[static_cast<std::size_t>(k - l)];
                binom = binom * (k - l) / (l + 1);
            }
            out.members[static_cast<std::size_t>(k)].values[q] = s;
        }
    }
    return out;
}

/// Spectral form: the family z_0..z_K as band-limited fields; products are
/// de-aliased by sampling on a grid that resolves the highest-order member.
inline std::vector<SpectralField> shift_family(const SpectralField& h, const std::vector<SpectralField>& z) {
    require(!z.empty(), ErrorCode::domain, "empty Wick family");
    const int K = static_cast<int>(z.size()) - 1;
    std::vector<int> rad(z.size());
    for (int k = 0; k <= K; ++k) {
        int r = 0;
        for (int l = 0; l <= k; ++l) r = std::max(r, z[static_cast<std::size_t>(l)].radius() + (k - l) * h.radius());
        rad[static_cast<std::size_t>(k)] = r;
    }
    const int P = exact_resolution(*std::max_element(rad.begin(), rad.end()));
    WickFamily fam;
    fam.kmax = K;
    for (const auto& m : z) fam.members.push_back(synthesize_real(m, P));
    const auto shifted = shift_family(synthesize_real(h, P), fam);
    std::vector<SpectralField> out;
    for (int k = 0; k <= K; ++k) out.push_back(analyze(shifted[k], rad[static_cast<std::size_t>(k)]));
    return out;
}

struct DriverDistance {
    std::vector<double> distance;  // index k = 0..kmax
    double C_n = 0.0;
    int l_n = 1;
};

/// One realization of ||(T_{-Z_n - h_n(t)} Z_M^{:.:})_k - H_k(0, R)||_{C^{-alpha}}
/// for k = 0..kmax, with C_n = max(R_n - R, 0) and Z_M drawn from `seed`.
inline DriverDistance shifted_driver_distance(int n, int M, double R, int kmax, double alpha,
                                              const MomentProfile& profile, std::uint64_t seed,
                                              double t = 0.0) {
    require(n >= 3 && M >= n, ErrorCode::domain, "shifted driver needs M >= n >= 3");
    require(R >= 0.0, ErrorCode::domain, "target variance R must be >= 0");
    require(kmax >= 1, ErrorCode::domain, "kmax must be >= 1");
    DriverDistance out;
    out.C_n = std::max(variance_R(n) - R, 0.0);
    out.l_n = shift_scale(n);
    const auto state = stationary_sample(M, seed);
    const auto h = build_shift(n, out.C_n, profile.field, t);
    SpectralField drift = -(project(state.modes, n) + h);
    drift.symmetrize();

    const int rmax = std::max(M, drift.radius());
    const int P = exact_resolution(kmax * rmax);
    const auto fam = wick_powers(state, kmax, P);
    const auto shifted = shift_family(synthesize_real(drift, P), fam);
    out.distance.assign(static_cast<std::size_t>(kmax) + 1, 0.0);
    for (int k = 1; k <= kmax; ++k) {
        const double target = hermite_eval(k, 0.0, R);
        GridField d = shifted[k];
        for (double& v : d.values) v -= target;
        out.distance[static_cast<std::size_t>(k)] = hoelder_norm(analyze(d, k * rmax), -alpha);
    }
    return out;
}

} // namespace wicklab
