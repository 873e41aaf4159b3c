#pragma once

// Real and complex Hermite polynomials with variance parameter.
//
// H_k(x, C) is defined by exp(t x - C t^2 / 2) = sum_k t^k / k! H_k(x, C), so
// H_k(x, 0) = x^k and H_k(x) := H_k(x, 1) is the probabilists' family.

#include <algorithm>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wicklab/error.hpp"

namespace wicklab {

/// Highest supported degree. Factorials past this overflow double precision.
inline constexpr int kMaxHermiteDegree = 64;

struct HermiteParams {
    int k = 0;
    double C = 1.0;
};

struct ComplexHermiteParams {
    int k = 0;
    int l = 0;
    double c = 1.0;
};

namespace detail {

inline void check_degree(int k) {
    require(k >= 0 && k <= kMaxHermiteDegree, ErrorCode::domain,
            "hermite degree " + std::to_string(k) + " outside [0, " +
                std::to_string(kMaxHermiteDegree) + "]");
}

inline void check_variance(double C) {
    require(C >= 0.0, ErrorCode::domain, "hermite variance parameter must be >= 0");
}

template <class T>
T ipow(T base, int e) {
    T out{1};
    for (; e > 0; --e) out *= base;
    return out;
}

} // namespace detail

/// H_k(x, C) by the three-term recurrence H_{k+1} = x H_k - k C H_{k-1}.
inline double hermite_eval(int k, double x, double C) {
    detail::check_degree(k);
    detail::check_variance(C);
    if (k == 0) return 1.0;
    double prev = 1.0;
    double cur = x;
    for (int j = 1; j < k; ++j) {
        const double next = x * cur - j * C * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

/// All H_0(x, C) .. H_kmax(x, C) in one recurrence sweep.
inline std::vector<double> hermite_sequence(int kmax, double x, double C) {
    detail::check_degree(kmax);
    detail::check_variance(C);
    std::vector<double> out(static_cast<std::size_t>(kmax) + 1);
    out[0] = 1.0;
    if (kmax >= 1) out[1] = x;
    for (int j = 1; j < kmax; ++j) out[j + 1] = x * out[j] - j * C * out[j - 1];
    return out;
}

/// Pairing numbers k! / (2^l l! (k-2l)!) for l = 0..k/2 (the number of ways to
/// choose l disjoint pairs from k points). Exact in 128-bit integers while they
/// fit; past that the recurrence continues in floating point, where each step
/// carries at most a few ulps of relative error (well inside 1e-12 per term).
inline std::vector<double> pairing_numbers(int k) {
    detail::check_degree(k);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(k / 2) + 1);
    unsigned __int128 exact = 1;
    bool fits = true;
    double approx = 1.0;
    out.push_back(1.0);
    for (int l = 0; 2 * (l + 1) <= k; ++l) {
        const auto num = static_cast<unsigned __int128>(k - 2 * l) *
                         static_cast<unsigned __int128>(k - 2 * l - 1);
        const auto den = static_cast<unsigned __int128>(2 * (l + 1));
        if (fits) {
            unsigned __int128 prod = 0;
            if (__builtin_mul_overflow(exact, num, &prod)) {
                fits = false;
                approx = static_cast<double>(exact) * static_cast<double>(num) /
                         static_cast<double>(den);
            } else {
                exact = prod / den;
                approx = static_cast<double>(exact);
            }
        } else {
            approx = approx * static_cast<double>(num) / static_cast<double>(den);
        }
        out.push_back(approx);
    }
    return out;
}

/// Coefficients c_l with x^k = sum_l c_l H_{k-2l}(x, C),
/// c_l = k! C^l / (2^l l! (k-2l)!).
inline std::vector<double> hermite_inverse_coeffs(int k, double C) {
    detail::check_variance(C);
    auto c = pairing_numbers(k);
    double cpow = 1.0;
    for (auto& v : c) {
        v *= cpow;
        cpow *= C;
    }
    return c;
}

/// Monomial coefficients of H_k(., C): entry j is the coefficient of x^j.
inline std::vector<double> hermite_monomial_coeffs(int k, double C) {
    detail::check_variance(C);
    const auto pairs = pairing_numbers(k);
    std::vector<double> out(static_cast<std::size_t>(k) + 1, 0.0);
    double cpow = 1.0;
    for (std::size_t l = 0; l < pairs.size(); ++l) {
        const double sign = (l % 2 == 0) ? 1.0 : -1.0;
        out[static_cast<std::size_t>(k) - 2 * l] = sign * pairs[l] * cpow;
        cpow *= C;
    }
    return out;
}

/// Re-expresses sum_k powers[k] x^k as sum_k out[k] H_k(x, C).
inline std::vector<double> monomial_to_hermite(std::span<const double> powers, double C) {
    detail::check_variance(C);
    std::vector<double> out(powers.size(), 0.0);
    for (std::size_t k = 0; k < powers.size(); ++k) {
        if (powers[k] == 0.0) continue;
        const auto c = hermite_inverse_coeffs(static_cast<int>(k), C);
        for (std::size_t l = 0; l < c.size(); ++l) out[k - 2 * l] += powers[k] * c[l];
    }
    return out;
}

/// Inverse of monomial_to_hermite.
inline std::vector<double> hermite_to_monomial(std::span<const double> hermite, double C) {
    detail::check_variance(C);
    std::vector<double> out(hermite.size(), 0.0);
    for (std::size_t k = 0; k < hermite.size(); ++k) {
        if (hermite[k] == 0.0) continue;
        const auto c = hermite_monomial_coeffs(static_cast<int>(k), C);
        for (std::size_t j = 0; j < c.size(); ++j) out[j] += hermite[k] * c[j];
    }
    return out;
}

/// Basis change used by the Wick calculus: monomial -> Hermite coefficients.
inline std::vector<double> wick_basis_change(std::span<const double> powers, double C) {
    return monomial_to_hermite(powers, C);
}

/// H_{k,l}(z, c) = sum_m m! binom(k,m) binom(l,m) (-c)^m z^{k-m} conj(z)^{l-m}.
inline std::complex<double> complex_hermite_eval(int k, int l, std::complex<double> z, double c) {
    detail::check_degree(k);
    detail::check_degree(l);
    detail::check_variance(c);
    const int mmax = std::min(k, l);
    const auto zb = std::conj(z);
    std::complex<double> sum = 0.0;
    // weight_m = m! binom(k,m) binom(l,m) (-c)^m, built incrementally.
    double weight = 1.0;
    for (int m = 0; m <= mmax; ++m) {
        if (m > 0) weight *= -c * static_cast<double>(k - m + 1) * (l - m + 1) / m;
        sum += weight * detail::ipow(z, k - m) * detail::ipow(zb, l - m);
    }
    return sum;
}

} // namespace wicklab
