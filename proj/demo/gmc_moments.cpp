// Second moment of the Wick exponential in H^{-beta}: lattice series against
// sampling, and the gap to one along nested truncations.

#include <cstdio>

#include "wicklab/wicklab.hpp"

int main() {
    using namespace wicklab;
    const double gamma = 1.0;
    const double beta = 0.5;
    for (int n : {0, 2, 4}) {
        RunningStats st;
        for (int r = 0; r < 1000; ++r)
            st.add(grid_sobolev_norm_squared(wick_exponential(gff_sample(n, derive_seed(7, r)), gamma).grid, beta));
        std::printf("n = %d  series %.6f  sampled %.6f +- %.4f\n", n, gmc_second_moment_analytic(n, gamma, beta),
                    st.mean(), st.std_error());
    }
    for (int N : {2, 4, 8, 16})
        std::printf("gap to one, N = %2d, M = %2d: %.6e\n", N, 2 * N, gmc_gap_to_one(N, 2 * N, gamma, beta));
}
