#pragma once

// Truncated Fourier series on the torus T^2 = R^2 / Z^2 and their grid samples.
//
// A SpectralField stores a_m for |m| <= n (Euclidean ball, m in Z^2); the field
// it represents is sum_m a_m e_m(x) with e_m(x) = exp(2 pi i m.x). Grid samples
// live at x = (i/P, j/P). Because every field here is band-limited, P > 2n makes
// synthesis/analysis an exact pair up to roundoff.

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <fftw3.h>

#include "wicklab/error.hpp"

namespace wicklab {

using cplx = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline bool in_ball(int m1, int m2, int n) noexcept {
    return m1 * m1 + m2 * m2 <= n * n;
}

/// mu_m = 1 + 4 pi^2 |m|^2, the symbol of 1 - Laplacian on T^2.
inline double mode_rate(int m1, int m2) noexcept {
    return 1.0 + 4.0 * std::numbers::pi * std::numbers::pi * double(m1 * m1 + m2 * m2);
}

class SpectralField {
public:
    SpectralField() : SpectralField(0, true) {}

    explicit SpectralField(int n, bool hermitian = true)
        : n_(n), hermitian_(hermitian),
          coeffs_(static_cast<std::size_t>(2 * n + 1) * (2 * n + 1), cplx{0.0, 0.0}) {
        require(n >= 0, ErrorCode::domain, "spectral radius must be >= 0");
    }

    int radius() const noexcept { return n_; }
    bool hermitian() const noexcept { return hermitian_; }

    cplx at(int m1, int m2) const noexcept {
        if (!in_ball(m1, m2, n_)) return {0.0, 0.0};
        return coeffs_[index(m1, m2)];
    }

    /// Sets a_m. For hermitian fields a_{-m} is set to conj(v) as well, and the
    /// zero mode must be real.
    void set(int m1, int m2, cplx v) {
        require(in_ball(m1, m2, n_), ErrorCode::domain,
                "mode (" + std::to_string(m1) + "," + std::to_string(m2) +
                    ") outside spectral radius " + std::to_string(n_));
        if (hermitian_) {
            if (m1 == 0 && m2 == 0) {
                require(v.imag() == 0.0, ErrorCode::domain,
                        "zero mode of a hermitian field must be real");
            }
            coeffs_[index(-m1, -m2)] = std::conj(v);
        }
        coeffs_[index(m1, m2)] = v;
    }

    /// Raw access for bulk kernels; caller keeps the invariants.
    cplx& raw(int m1, int m2) noexcept { return coeffs_[index(m1, m2)]; }
    const std::vector<cplx>& data() const noexcept { return coeffs_; }

    /// Visits every stored lattice point |m| <= n in lexicographic (m1, m2) order.
    template <class F>
    void for_each_mode(F&& fn) const {
        for (int m1 = -n_; m1 <= n_; ++m1)
            for (int m2 = -n_; m2 <= n_; ++m2)
                if (in_ball(m1, m2, n_)) fn(m1, m2, coeffs_[index(m1, m2)]);
    }

    /// Re-imposes a_{-m} = conj(a_m) by averaging; marks the field hermitian.
    void symmetrize() {
        for (int m1 = -n_; m1 <= n_; ++m1)
            for (int m2 = -n_; m2 <= n_; ++m2) {
                if (!in_ball(m1, m2, n_)) continue;
                if (m1 > 0 || (m1 == 0 && m2 > 0)) {
                    const cplx a = coeffs_[index(m1, m2)];
                    const cplx b = std::conj(coeffs_[index(-m1, -m2)]);
                    const cplx avg = 0.5 * (a + b);
                    coeffs_[index(m1, m2)] = avg;
                    coeffs_[index(-m1, -m2)] = std::conj(avg);
                }
            }
        coeffs_[index(0, 0)] = {coeffs_[index(0, 0)].real(), 0.0};
        hermitian_ = true;
    }

    /// Exact check of a_{-m} == conj(a_m) over the stored ball.
    bool is_exactly_hermitian() const noexcept {
        for (int m1 = -n_; m1 <= n_; ++m1)
            for (int m2 = -n_; m2 <= n_; ++m2)
                if (in_ball(m1, m2, n_) &&
                    coeffs_[index(m1, m2)] != std::conj(coeffs_[index(-m1, -m2)]))
                    return false;
        return true;
    }

    /// Copy with a larger storage radius (no change of the represented field).
    SpectralField widened(int n) const {
        if (n <= n_) return *this;
        SpectralField out(n, hermitian_);
        for_each_mode([&](int m1, int m2, cplx v) { out.raw(m1, m2) = v; });
        return out;
    }

    SpectralField& operator+=(const SpectralField& o) { return axpy(1.0, o); }
    SpectralField& operator-=(const SpectralField& o) { return axpy(-1.0, o); }
    SpectralField& operator*=(double s) {
        for (auto& c : coeffs_) c *= s;
        return *this;
    }

    /// this += s * o, growing the radius if needed.
    SpectralField& axpy(double s, const SpectralField& o) {
        if (o.n_ > n_) *this = widened(o.n_);
        hermitian_ = hermitian_ && o.hermitian_;
        o.for_each_mode([&](int m1, int m2, cplx v) { raw(m1, m2) += s * v; });
        return *this;
    }

    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(double s, SpectralField a) { return a *= s; }
    friend SpectralField operator-(SpectralField a) { return a *= -1.0; }

private:
    std::size_t index(int m1, int m2) const noexcept {
        const int w = 2 * n_ + 1;
        return static_cast<std::size_t>((m1 + n_) * w + (m2 + n_));
    }

    int n_;
    bool hermitian_;
    std::vector<cplx> coeffs_;
};

/// Single Fourier mode e_m (times an amplitude).
inline SpectralField fourier_mode(int m1, int m2, cplx amplitude = 1.0) {
    const int n = static_cast<int>(std::ceil(std::sqrt(double(m1 * m1 + m2 * m2))));
    SpectralField f(n, false);
    f.set(m1, m2, amplitude);
    return f;
}

/// Real samples on the P x P grid; value(i, j) is the field at (i/P, j/P).
template <class T>
struct BasicGrid {
    int P = 0;
    std::vector<T> values;

    BasicGrid() = default;
    explicit BasicGrid(int p, T fill = T{}) : P(p), values(static_cast<std::size_t>(p) * p, fill) {
        require(p >= 1, ErrorCode::domain, "grid resolution must be >= 1");
    }

    T& operator()(int i, int j) { return values[static_cast<std::size_t>(i) * P + j]; }
    const T& operator()(int i, int j) const { return values[static_cast<std::size_t>(i) * P + j]; }

    /// Equal-weight (trapezoidal) quadrature of the integral over T^2.
    T mean() const {
        T s{};
        for (const auto& v : values) s += v;
        return s / static_cast<double>(values.size());
    }
};

using GridField = BasicGrid<double>;
using ComplexGridField = BasicGrid<cplx>;

/// Smallest 2^a 3^b 5^c that is >= n.
inline int good_fft_size(int n) {
    if (n <= 1) return 1;
    for (int p = n;; ++p) {
        int q = p;
        for (int f : {2, 3, 5})
            while (q % f == 0) q /= f;
        if (q == 1) return p;
    }
}

/// Smallest FFT-friendly resolution that represents radius-n fields exactly.
inline int exact_resolution(int n) { return good_fft_size(2 * n + 1); }

namespace detail {

struct FftwFree {
    void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};
using FftBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

inline FftBuffer fft_alloc(std::size_t count) {
    return FftBuffer(fftw_alloc_complex(count));
}

// Plans are created once per (P, direction) with FFTW_ESTIMATE on fftw-aligned
// scratch buffers, then reused through the thread-safe new-array execute
// interface. Every buffer passed to execute is fftw-allocated, so the alignment
// (and hence the chosen codelets and the roundoff) is identical on every call.
class FftPlans {
public:
    static FftPlans& instance() {
        static FftPlans plans;
        return plans;
    }

    fftw_plan get(int P, int sign) {
        std::lock_guard lock(mutex_);
        auto key = std::make_pair(P, sign);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        const auto n = static_cast<std::size_t>(P) * P;
        auto in = fft_alloc(n);
        auto out = fft_alloc(n);
        fftw_plan p = fftw_plan_dft_2d(P, P, in.get(), out.get(), sign, FFTW_ESTIMATE);
        require(p != nullptr, ErrorCode::domain, "fftw planning failed");
        plans_.emplace(key, p);
        return p;
    }

    FftPlans(const FftPlans&) = delete;
    FftPlans& operator=(const FftPlans&) = delete;

private:
    FftPlans() = default;
    ~FftPlans() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    std::mutex mutex_;
    std::map<std::pair<int, int>, fftw_plan> plans_;
};

inline void fft2d(int P, int sign, fftw_complex* in, fftw_complex* out) {
    fftw_execute_dft(FftPlans::instance().get(P, sign), in, out);
}

inline int wrap(int m, int P) noexcept { return ((m % P) + P) % P; }

inline void check_resolution(int P, int n) {
    require(P > 2 * n, ErrorCode::resolution,
            "grid resolution " + std::to_string(P) + " must exceed 2 * spectral radius " +
                std::to_string(2 * n));
}

} // namespace detail

/// Grid values sum_m a_m e_m(i/P, j/P).
inline ComplexGridField synthesize(const SpectralField& f, int P) {
    detail::check_resolution(P, f.radius());
    const auto n = static_cast<std::size_t>(P) * P;
    auto buf = detail::fft_alloc(n);
    auto out = detail::fft_alloc(n);
    for (std::size_t i = 0; i < n; ++i) buf[i][0] = buf[i][1] = 0.0;
    f.for_each_mode([&](int m1, int m2, cplx v) {
        const auto idx = static_cast<std::size_t>(detail::wrap(m1, P)) * P + detail::wrap(m2, P);
        buf[idx][0] = v.real();
        buf[idx][1] = v.imag();
    });
    detail::fft2d(P, FFTW_BACKWARD, buf.get(), out.get());
    ComplexGridField g(P);
    for (std::size_t i = 0; i < n; ++i) g.values[i] = {out[i][0], out[i][1]};
    return g;
}

/// Real-valued synthesis; the field must be hermitian.
inline GridField synthesize_real(const SpectralField& f, int P) {
    require(f.hermitian(), ErrorCode::domain, "synthesize_real needs a hermitian field");
    const auto c = synthesize(f, P);
    GridField g(P);
    for (std::size_t i = 0; i < c.values.size(); ++i) g.values[i] = c.values[i].real();
    return g;
}

namespace detail {

inline SpectralField analyze_buffer(const fftw_complex* spec, int P, int n, bool hermitian) {
    const double scale = 1.0 / (double(P) * double(P));
    SpectralField f(n, false);
    for (int m1 = -n; m1 <= n; ++m1)
        for (int m2 = -n; m2 <= n; ++m2) {
            if (!in_ball(m1, m2, n)) continue;
            const auto idx = static_cast<std::size_t>(wrap(m1, P)) * P + wrap(m2, P);
            f.raw(m1, m2) = cplx{spec[idx][0], spec[idx][1]} * scale;
        }
    if (hermitian) f.symmetrize();
    return f;
}

} // namespace detail

/// Equal-weight quadrature of hat f(m) for |m| <= n. Real grids give hermitian
/// fields with the symmetry imposed exactly.
inline SpectralField analyze(const GridField& g, int n) {
    detail::check_resolution(g.P, n);
    const auto cnt = g.values.size();
    auto buf = detail::fft_alloc(cnt);
    auto out = detail::fft_alloc(cnt);
    for (std::size_t i = 0; i < cnt; ++i) {
        buf[i][0] = g.values[i];
        buf[i][1] = 0.0;
    }
    detail::fft2d(g.P, FFTW_FORWARD, buf.get(), out.get());
    return detail::analyze_buffer(out.get(), g.P, n, true);
}

inline SpectralField analyze(const ComplexGridField& g, int n) {
    detail::check_resolution(g.P, n);
    const auto cnt = g.values.size();
    auto buf = detail::fft_alloc(cnt);
    auto out = detail::fft_alloc(cnt);
    for (std::size_t i = 0; i < cnt; ++i) {
        buf[i][0] = g.values[i].real();
        buf[i][1] = g.values[i].imag();
    }
    detail::fft2d(g.P, FFTW_FORWARD, buf.get(), out.get());
    return detail::analyze_buffer(out.get(), g.P, n, false);
}

/// Galerkin projection Pi_n': keeps |m| <= n'.
inline SpectralField project(const SpectralField& f, int n_prime) {
    require(n_prime >= 0, ErrorCode::domain, "projection radius must be >= 0");
    const int r = std::min(n_prime, f.radius());
    SpectralField out(r, f.hermitian());
    f.for_each_mode([&](int m1, int m2, cplx v) {
        if (in_ball(m1, m2, r)) out.raw(m1, m2) = v;
    });
    return out;
}

/// Lambda_lambda f = f(lambda .): coefficient a_m moves to lambda m.
inline SpectralField scale_lambda(const SpectralField& f, int lambda) {
    require(lambda >= 1, ErrorCode::domain, "dilation factor must be a positive integer");
    SpectralField out(f.radius() * lambda, f.hermitian());
    f.for_each_mode([&](int m1, int m2, cplx v) { out.raw(lambda * m1, lambda * m2) = v; });
    return out;
}

/// Pointwise product, fully de-aliased: sampled at P > 2 (n_f + n_g) and
/// re-analyzed at radius n_f + n_g, where the product is exactly band-limited.
inline SpectralField multiply(const SpectralField& f, const SpectralField& g) {
    const int n = f.radius() + g.radius();
    const int P = exact_resolution(n);
    const auto a = synthesize(f, P);
    const auto b = synthesize(g, P);
    ComplexGridField prod(P);
    for (std::size_t i = 0; i < prod.values.size(); ++i) prod.values[i] = a.values[i] * b.values[i];
    auto out = analyze(prod, n);
    if (f.hermitian() && g.hermitian()) out.symmetrize();
    return out;
}

/// sum_m |a_m|^2.
inline double l2_norm_squared(const SpectralField& f) {
    double s = 0.0;
    f.for_each_mode([&](int, int, cplx v) { s += std::norm(v); });
    return s;
}

/// Point evaluation sum_m a_m e_m(x); direct summation.
inline cplx evaluate(const SpectralField& f, double x1, double x2) {
    cplx s = 0.0;
    f.for_each_mode([&](int m1, int m2, cplx v) {
        if (v == cplx{0.0, 0.0}) return;
        const double ph = kTwoPi * (m1 * x1 + m2 * x2);
        s += v * cplx{std::cos(ph), std::sin(ph)};
    });
    return s;
}

/// Applies fn pointwise to a real grid.
template <class F>
GridField map_grid(const GridField& g, F&& fn) {
    GridField out(g.P);
    for (std::size_t i = 0; i < g.values.size(); ++i) out.values[i] = fn(g.values[i]);
    return out;
}

} // namespace wicklab
