#pragma once

// Nonnegative symmetric kernels on Z^2 and their convolution algebra
//   (K1 * K2)(m) = sum_l K1(m - l) K2(l),
// the heat kernel K(t, p) = exp(-I_p |t|) / (2 I_p) with I_p = 1 + 4 pi^2 |p|^2,
// and the decay checks built on them.
//
// A kernel is either finite (exactly zero beyond its radius) or a truncated
// view of an infinite kernel. Infinite kernels may carry an analytic tail bound
// K(m) <= c (1 + |m|^2)^{-e} beyond the stored radius; any operation whose
// answer depends on the unstored part refuses to run without one.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "wicklab/besov.hpp"
#include "wicklab/torus_fourier.hpp"

namespace wicklab {

struct TailBound {
    double constant = 0.0;
    double exponent = 0.0;
};

class LatticeKernel {
public:
    LatticeKernel() : LatticeKernel(0) {}

    explicit LatticeKernel(int radius)
        : radius_(radius), values_(static_cast<std::size_t>(2 * radius + 1) * (2 * radius + 1), 0.0) {
        require(radius >= 0, ErrorCode::domain, "kernel radius must be >= 0");
    }

    /// Indicator of the origin, the unit of the convolution algebra.
    static LatticeKernel delta() {
        LatticeKernel k(0);
        k.raw(0, 0) = 1.0;
        return k;
    }

    int radius() const noexcept { return radius_; }
    int width() const noexcept { return 2 * radius_ + 1; }

    double at(int m1, int m2) const noexcept {
        if (std::abs(m1) > radius_ || std::abs(m2) > radius_) return 0.0;
        return values_[index(m1, m2)];
    }

    double& raw(int m1, int m2) noexcept { return values_[index(m1, m2)]; }
    const std::vector<double>& data() const noexcept { return values_; }
    std::vector<double>& data() noexcept { return values_; }

    bool infinite() const noexcept { return infinite_; }
    const std::optional<TailBound>& tail() const noexcept { return tail_; }

    /// Marks this as a truncated view of an infinite kernel.
    void mark_infinite(std::optional<TailBound> tail) {
        infinite_ = true;
        tail_ = tail;
    }

    /// Sets m and -m together; m must lie in the ball |m| <= radius.
    void set_symmetric(int m1, int m2, double v) {
        require(in_ball(m1, m2, radius_), ErrorCode::domain, "kernel point outside radius");
        require(v >= 0.0, ErrorCode::domain, "kernel values must be nonnegative");
        raw(m1, m2) = v;
        raw(-m1, -m2) = v;
    }

    double total() const noexcept {
        double s = 0.0;
        for (double v : values_) s += v;
        return s;
    }

    /// (K)_N: zero outside |m| <= N. The result is a finite kernel.
    LatticeKernel truncated(int N) const {
        const int r = std::min(N, radius_);
        LatticeKernel out(r);
        for (int a = -r; a <= r; ++a)
            for (int b = -r; b <= r; ++b)
                if (in_ball(a, b, N)) out.raw(a, b) = at(a, b);
        return out;
    }

    /// K - (K)_N, keeping the infinite flag and tail of K.
    LatticeKernel beyond(int N) const {
        LatticeKernel out = *this;
        for (int a = -radius_; a <= radius_; ++a)
            for (int b = -radius_; b <= radius_; ++b)
                if (in_ball(a, b, N)) out.raw(a, b) = 0.0;
        return out;
    }

    bool is_symmetric() const noexcept {
        for (int a = -radius_; a <= radius_; ++a)
            for (int b = -radius_; b <= radius_; ++b)
                if (at(a, b) != at(-a, -b)) return false;
        return true;
    }

private:
    std::size_t index(int m1, int m2) const noexcept {
        return static_cast<std::size_t>((m1 + radius_) * width() + (m2 + radius_));
    }

    int radius_;
    std::vector<double> values_;
    bool infinite_ = false;
    std::optional<TailBound> tail_;
};

namespace detail {

// Direct convolution of the stored values; exact lattice arithmetic with one
// final symmetrization so K(m) == K(-m) holds bit for bit.
inline LatticeKernel star_stored(const LatticeKernel& k1, const LatticeKernel& k2) {
    const int r1 = k1.radius();
    const int r2 = k2.radius();
    LatticeKernel out(r1 + r2);
    const int w2 = k2.width();
    const int wo = out.width();
    const auto& v2 = k2.data();
    auto& vo = out.data();
    for (int a1 = -r1; a1 <= r1; ++a1)
        for (int a2 = -r1; a2 <= r1; ++a2) {
            const double v = k1.at(a1, a2);
            if (v == 0.0) continue;
            for (int l1 = -r2; l1 <= r2; ++l1) {
                const double* src = &v2[static_cast<std::size_t>((l1 + r2) * w2)];
                double* dst = &vo[static_cast<std::size_t>((a1 + l1 + r1 + r2) * wo + (a2 + r1))];
                for (int l2 = 0; l2 < w2; ++l2) dst[l2] += v * src[l2];
            }
        }
    const int r = out.radius();
    for (int a = -r; a <= r; ++a)
        for (int b = -r; b <= r; ++b) {
            if (a < 0 || (a == 0 && b < 0)) continue;
            const double avg = 0.5 * (out.at(a, b) + out.at(-a, -b));
            out.raw(a, b) = avg;
            out.raw(-a, -b) = avg;
        }
    return out;
}

// Upper bound for sum_{|l| > R} (1 + |l|^2)^{-q}, q > 1, R >= 3. Off-axis
// points are dominated by the integral over their inward unit cell, all inside
// |x| > R - 1.5, giving pi (1 + a^2)^{1-q} / (q - 1); the four axis rays add at
// most the same again.
inline double lattice_tail_sum(int R, double q) {
    const double a = double(R) - 1.5;
    return kTwoPi * std::pow(1.0 + a * a, 1.0 - q) / (q - 1.0);
}

// Smallest A with K(q) <= A (1 + |q|^2)^{-e} for every q, tail included.
inline double envelope_constant(const LatticeKernel& k, double e) {
    double A = 0.0;
    const int r = k.radius();
    for (int a = -r; a <= r; ++a)
        for (int b = -r; b <= r; ++b) {
            const double v = k.at(a, b);
            if (v > 0.0) A = std::max(A, v * std::pow(1.0 + a * a + b * b, e));
        }
    if (k.infinite()) A = std::max(A, k.tail()->constant);
    return A;
}

inline void check_tail(const LatticeKernel& k, const char* name) {
    if (k.infinite())
        require(k.tail().has_value(), ErrorCode::tail_required,
                std::string(name) + " is a truncated infinite kernel without a tail bound");
}

} // namespace detail

/// K1 * K2 for finite kernels. Truncated infinite kernels are refused: their
/// unstored part would be dropped silently. Use star_with_tail for those.
inline LatticeKernel star(const LatticeKernel& k1, const LatticeKernel& k2) {
    require(!k1.infinite() && !k2.infinite(), ErrorCode::tail_required,
            "star of a truncated infinite kernel; use star_with_tail");
    return detail::star_stored(k1, k2);
}

/// k-fold convolution power, k >= 1.
inline LatticeKernel star_power(const LatticeKernel& k, int power) {
    require(power >= 1, ErrorCode::domain, "star power needs k >= 1");
    LatticeKernel out = k;
    for (int i = 1; i < power; ++i) out = star(out, k);
    return out;
}

struct StarWithTail {
    LatticeKernel stored;  // convolution of the stored values
    double error = 0.0;    // bound on the unstored contribution, valid for |m| <= m_range
    int m_range = 0;
};

/// Convolution of possibly-infinite kernels with a rigorous bound on what the
/// truncation leaves out, valid at every |m| <= m_range. Needs tail bounds on
/// every infinite input and m_range <= R/2 for each infinite input's radius R.
inline StarWithTail star_with_tail(const LatticeKernel& k1, const LatticeKernel& k2, int m_range) {
    detail::check_tail(k1, "first kernel");
    detail::check_tail(k2, "second kernel");
    StarWithTail out{detail::star_stored(k1, k2), 0.0, m_range};
    // Contribution of l beyond the stored radius R of `inf` paired with `other`:
    // for |m| <= R/2 and |l| > R, |m - l| >= |l|/2, so
    // other(m - l) <= 4^e A (1 + |l|^2)^{-e} with A the envelope constant.
    auto one_side = [&](const LatticeKernel& inf, const LatticeKernel& other) {
        if (!inf.infinite()) return 0.0;
        const int R = inf.radius();
        require(2 * m_range <= R && R >= 3, ErrorCode::domain,
                "m_range must be at most half the stored radius of an infinite kernel");
        const double e_other = other.infinite() ? other.tail()->exponent : 1.0;
        const double A = detail::envelope_constant(other, e_other);
        const auto& t = *inf.tail();
        const double q = e_other + t.exponent;
        require(q > 1.0, ErrorCode::domain, "tail exponents too small for a summable bound");
        return std::pow(4.0, e_other) * A * t.constant * detail::lattice_tail_sum(R, q);
    };
    out.error = one_side(k2, k1) + one_side(k1, k2);
    return out;
}

/// K(t, .) restricted to |p| <= N (the finite kernel K_N(t)).
inline LatticeKernel heat_kernel(double t, int N) {
    require(N >= 0, ErrorCode::domain, "heat kernel truncation must be >= 0");
    LatticeKernel k(N);
    for (int a = -N; a <= N; ++a)
        for (int b = -N; b <= N; ++b) {
            if (!in_ball(a, b, N)) continue;
            const double I = mode_rate(a, b);
            k.raw(a, b) = std::exp(-I * std::abs(t)) / (2.0 * I);
        }
    return k;
}

/// The infinite heat kernel K(t, .) stored to radius R, with the tail bound
/// K(t, p) <= 1 / (2 (1 + 4 pi^2 |p|^2)) <= (1/2) (1 + |p|^2)^{-1}.
inline LatticeKernel heat_kernel_infinite(double t, int R) {
    auto k = heat_kernel(t, R);
    k.mark_infinite(TailBound{0.5, 1.0});
    return k;
}

struct DecayReport {
    double c_prime = 0.0;     // max_m (K1*K2)(m) (1 + |m|^2)^{alpha + beta - 1}
    double tail_error = 0.0;  // already folded into c_prime
};

/// Empirical constant of the convolution decay bound
///   K1*K2(m) <= C' / (1 + |m|^2)^{alpha + beta - 1}
/// over |m| <= m_range, after checking K1 <= C (1+|m|^2)^{-alpha} and
/// K2 <= C (1+|m|^2)^{-beta} (stored values and tail bounds).
inline DecayReport verify_decay_bound(const LatticeKernel& k1, const LatticeKernel& k2, double alpha,
                                      double beta, double C, int m_range) {
    require(alpha > 0.0 && alpha < 1.0 && beta > 0.0 && beta < 1.0 && alpha + beta > 1.0,
            ErrorCode::domain, "decay bound needs alpha, beta in (0,1) with alpha + beta > 1");
    auto check = [&](const LatticeKernel& k, double e, const char* name) {
        const double A = detail::envelope_constant(k, e);
        require(A <= C * (1.0 + 1e-12), ErrorCode::hypothesis,
                std::string(name) + " exceeds C / (1 + |m|^2)^exponent (needs C >= " +
                    std::to_string(A) + ")");
        if (k.infinite() && k.tail())
            require(k.tail()->exponent >= e, ErrorCode::hypothesis,
                    std::string(name) + " tail decays slower than the hypothesis");
    };
    check(k1, alpha, "first kernel");
    check(k2, beta, "second kernel");
    const bool any_infinite = k1.infinite() || k2.infinite();
    StarWithTail conv = any_infinite ? star_with_tail(k1, k2, m_range)
                                     : StarWithTail{star(k1, k2), 0.0, m_range};
    const double expo = alpha + beta - 1.0;
    DecayReport rep;
    rep.tail_error = conv.error;
    for (int a = -m_range; a <= m_range; ++a)
        for (int b = -m_range; b <= m_range; ++b) {
            if (!in_ball(a, b, m_range)) continue;
            const double v = conv.stored.at(a, b) + conv.error;
            rep.c_prime = std::max(rep.c_prime, v * std::pow(1.0 + a * a + b * b, expo));
        }
    return rep;
}

/// Largest value over |m| <= m_range of
///   |K1*K2 - K1*(K2)_N|(m) (1 + max(|m|, N)^2)^{alpha + beta - 1} / C'.
/// The truncated bound holds on that range iff the result is <= 1.
inline double truncation_gap_ratio(const LatticeKernel& k1, const LatticeKernel& k2, int N,
                                   double alpha, double beta, double c_prime, int m_range) {
    const auto gap = star_with_tail(k1, k2.beyond(N), m_range);
    const double expo = alpha + beta - 1.0;
    double worst = 0.0;
    for (int a = -m_range; a <= m_range; ++a)
        for (int b = -m_range; b <= m_range; ++b) {
            if (!in_ball(a, b, m_range)) continue;
            const double r = std::max(std::sqrt(double(a * a + b * b)), double(N));
            const double v = gap.stored.at(a, b) + gap.error;
            worst = std::max(worst, v * std::pow(1.0 + r * r, expo) / c_prime);
        }
    return worst;
}

namespace detail {

inline LatticeKernel power_or_delta(const LatticeKernel& k, int power) {
    return power == 0 ? LatticeKernel::delta() : star_power(k, power);
}

} // namespace detail

/// K_n(dt)^{*k} * K_M(dt)^{*l} - K_n(dt)^{*(k+l)}, the kernel whose dyadic
/// block sums give the mixed Wick-product variance proxy.
inline LatticeKernel mixed_wick_kernel(int n, int M, int k, int l, double dt) {
    require(M >= n && n >= 0, ErrorCode::domain, "mixed gap needs M >= n >= 0");
    require(k >= 0 && l >= 0 && k + l >= 1, ErrorCode::domain, "mixed gap needs k + l >= 1");
    const auto kn = heat_kernel(dt, n);
    const auto kM = heat_kernel(dt, M);
    const auto lhs = star(detail::power_or_delta(kn, k), detail::power_or_delta(kM, l));
    const auto rhs = star_power(kn, k + l);
    LatticeKernel out(lhs.radius());
    for (int a = -lhs.radius(); a <= lhs.radius(); ++a)
        for (int b = -lhs.radius(); b <= lhs.radius(); ++b)
            out.raw(a, b) = lhs.at(a, b) - rhs.at(a, b);
    return out;
}

/// sum_p chi_j(p)^2 {K_n^{*k} * K_M^{*l} - K_n^{*(k+l)}}(p).
inline double mixed_wick_gap(int n, int M, int k, int l, double dt, int j, const DyadicPartition& part) {
    const auto g = mixed_wick_kernel(n, M, k, l, dt);
    double s = 0.0;
    const int r = g.radius();
    for (int a = -r; a <= r; ++a)
        for (int b = -r; b <= r; ++b) {
            const double v = g.at(a, b);
            if (v == 0.0) continue;
            const double w = part.weight(j, a, b);
            s += w * w * v;
        }
    return s;
}

/// sum_j 2^{-2 j alpha} mixed_wick_gap(n, M, k, l, dt, j), over every block of
/// a partition covering the kernel.
inline double block_weighted_gap(int n, int M, int k, int l, double dt, double alpha) {
    const auto g = mixed_wick_kernel(n, M, k, l, dt);
    const auto part = DyadicPartition::for_radius(g.radius());
    std::vector<double> per_block(static_cast<std::size_t>(part.kmax()) + 2, 0.0);
    const int r = g.radius();
    for (int a = -r; a <= r; ++a)
        for (int b = -r; b <= r; ++b) {
            const double v = g.at(a, b);
            if (v == 0.0) continue;
            for (int j = -1; j <= part.kmax(); ++j) {
                const double w = part.weight(j, a, b);
                per_block[static_cast<std::size_t>(j + 1)] += w * w * v;
            }
        }
    double s = 0.0;
    for (int j = -1; j <= part.kmax(); ++j)
        s += std::exp2(-2.0 * j * alpha) * per_block[static_cast<std::size_t>(j + 1)];
    return s;
}

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size() && x.size() >= 2, ErrorCode::domain, "slope fit needs >= 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace wicklab
