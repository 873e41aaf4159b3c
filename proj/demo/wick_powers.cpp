// Samples the truncated stationary field, builds its Wick powers and compares
// the empirical spectral variance of each order with k! K_n^{*k}(p).

#include <cstdio>

#include "wicklab/wicklab.hpp"

int main() {
    using namespace wicklab;
    const int n = 3;
    const int kmax = 3;
    const int replicas = 2000;
    const int P = exact_resolution(kmax * n);

    std::vector<RunningStats> var(kmax + 1);
    for (int r = 0; r < replicas; ++r) {
        const auto w = wick_powers(stationary_sample(n, derive_seed(2024, r)), kmax, P);
        for (int k = 1; k <= kmax; ++k) var[k].add(std::norm(wick_spectrum(w, k).at(1, 0)));
    }
    std::printf("n = %d, R_n = %.6f, mode p = (1, 0)\n", n, variance_R(n));
    for (int k = 1; k <= kmax; ++k)
        std::printf("k = %d  analytic %.6e  sampled %.6e +- %.1e\n", k, wick_mode_covariance(n, k, 0.0, 1, 0),
                    var[k].mean(), var[k].std_error());
}
