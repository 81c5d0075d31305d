// Frequency-test balance thresholds next to the published tomography table.
#include <cstdio>

#include "optrng/analysis.hpp"

int main() {
    std::printf("%10s %10s %8s %10s %10s\n", "N", "B_max", "B_ref", "Sz_max", "Sz_ref");
    for (const auto& ref : optrng::kStokesReference) {
        const auto row = optrng::balance_threshold(ref.n);
        std::printf("%10.0e %10.5f %8.4f %10.6f %10.5f\n", ref.n, row.b_max, ref.balance, row.sz_max, ref.sz);
    }
}
