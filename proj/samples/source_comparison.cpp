// Raw and post-processed sources scored by the MAE of their median p-value profile.
#include <cstdio>
#include <string>

#include "optrng/analysis.hpp"
#include "optrng/extractors.hpp"
#include "optrng/sources.hpp"

using namespace optrng;

namespace {

void score(const std::string& name, const BitSequence& seq) {
    const auto report = nist::run_battery(seq, nist::TestParams::reduced(), name);
    try {
        const double m = mae(median_profile({report}));
        std::printf("%-22s %9zu bits  %2zu tests  MAE %.4f\n", name.c_str(), seq.size(), report.applicable_count(), m);
    } catch (const EmptyProfile&) {
        std::printf("%-22s %9zu bits  no applicable test\n", name.c_str(), seq.size());
    }
}

}  // namespace

int main() {
    const std::size_t n = 2000000;
    CoherentSourceConfig coherent;
    coherent.bias_amplitude = 0.01;
    coherent.bias_period = 1e4;
    coherent.seed = derive_seed(2024, 0);

    HybridSourceConfig hybrid;
    hybrid.coherent = coherent;
    hybrid.heralded.seed = derive_seed(2024, 1);
    hybrid.seed = derive_seed(2024, 2);

    const auto raw = simulate_coherent_bits(coherent, 2 * n).first;
    score("software", software_source(n, 7));
    score("coherent (a=0.01)", raw.slice(0, n));
    score("heralded", simulate_heralded(hybrid.heralded, n));
    score("hybrid (omega=20)", simulate_hybrid(hybrid, n));
    score("coherent + vonneumann", von_neumann(raw).first);
    score("coherent + babkin", babkin_stream(raw, 300).first);
}
