// Acceptance runner: `optrng_acceptance <criterion>` prints one PASS/FAIL line
// and exits non-zero on failure; `optrng_acceptance all` runs every criterion.
#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "optrng/analysis.hpp"
#include "optrng/extractors.hpp"
#include "optrng/nist/battery.hpp"
#include "optrng/physics.hpp"
#include "optrng/sources.hpp"

using namespace optrng;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double freq_p(const BitSequence& s) {
    const auto bits = s.unpack();
    return nist::frequency(nist::Bits(bits));
}

BitSequence bernoulli_bits(double p, std::size_t n, std::uint64_t seed) {
    Xoshiro256pp rng(seed);
    BitBuilder b(n);
    for (std::size_t i = 0; i < n; ++i) b.push_back(rng.bernoulli(p));
    return std::move(b).build();
}

CoherentSourceConfig biased_coherent(double a, std::uint64_t seed) {
    CoherentSourceConfig cfg;
    cfg.bias_amplitude = a;
    cfg.bias_period = 1e4;
    cfg.seed = seed;
    return cfg;
}

Outcome event_rate_check() {
    const double r = event_rate(20e6, 0.1);
    return {std::abs(r - 1.9e6) / 1.9e6 <= 0.005, fmt("event_rate(2e7, 0.1) = %.1f Hz", r)};
}

Outcome multiphoton_check() {
    const double p = multiphoton_prob(0.1);
    return {std::abs(p - 0.00468) < 5e-6 && std::round(p * 1000) / 10 == 0.5, fmt("multiphoton_prob(0.1) = %.6f", p)};
}

Outcome threshold_table_check() {
    bool ok = true;
    std::ostringstream os;
    for (const auto& ref : kStokesReference) {
        const auto row = balance_threshold(ref.n, 0.01);
        const bool b_ok = std::abs(row.b_max - ref.balance) <= 0.01;
        const bool s_ok = std::abs(row.sz_max - ref.sz) <= 1e-4;
        ok = ok && b_ok && s_ok;
        os << fmt(" N=%.0e B=%.5f(%s) Sz=%.6f vs %.5f(%s);", ref.n, row.b_max, b_ok ? "ok" : "off", row.sz_max, ref.sz,
                  s_ok ? "ok" : "off");
    }
    return {ok, os.str()};
}

Outcome frequency_known_answer_check() {
    const auto seq = BitSequence::from_string("1011010101");
    const auto bits = seq.unpack();
    const double p = nist::frequency(nist::Bits(bits), nist::LengthGate::skip);
    const auto d = discrepancy(seq);
    return {d == 2 && std::abs(p - 0.5271) <= 1e-4, fmt("D_N = %lld, p = %.6f", static_cast<long long>(d), p)};
}

Outcome babkin_exhaustive_check() {
    std::size_t words = 0;
    for (std::size_t n = 1; n <= 12; ++n) {
        BabkinCodec codec(n);
        std::map<int, std::vector<unsigned>> by_weight;
        for (unsigned mask = 0; mask < (1u << n); ++mask) by_weight[std::popcount(mask)].push_back(mask);
        for (auto& [k, masks] : by_weight) {
            const auto kk = static_cast<std::size_t>(k);
            const BigInt total = binomial_exact(static_cast<std::int64_t>(n), k);
            const auto blocks = codec.blocks(kk);
            // blocks tile [0, C(n,k)) with sizes 2^b_j
            BigInt start = 0;
            for (const auto& b : blocks) {
                if (b.end != start + (BigInt(1) << b.exponent)) return {false, fmt("block tiling broken at n=%zu k=%d", n, k)};
                start = b.end;
            }
            if (start != total) return {false, fmt("blocks do not cover C(%zu,%d)", n, k)};
            std::set<BigInt> numbers;
            std::vector<std::set<std::string>> outputs(blocks.size());
            for (unsigned mask : masks) {
                BitBuilder bb;
                for (std::size_t i = 0; i < n; ++i) bb.push_back((mask >> i) & 1u);
                const auto word = std::move(bb).build();
                const BigInt num = codec.number(word);
                if (num < 0 || num >= total) return {false, fmt("number out of range at n=%zu", n)};
                numbers.insert(num);
                const auto blk = codec.block_index(kk, num);
                const auto out = codec.encode(word);
                if (out.size() != blocks[blk].exponent) return {false, "output width differs from block exponent"};
                outputs[blk].insert(out.to_string());
                ++words;
            }
            if (BigInt(numbers.size()) != total) return {false, fmt("numbering not bijective at n=%zu k=%d", n, k)};
            for (std::size_t j = 0; j < blocks.size(); ++j) {
                if (outputs[j].size() != (std::size_t{1} << blocks[j].exponent)) {
                    return {false, fmt("block %zu not uniform at n=%zu k=%d", j, n, k)};
                }
            }
        }
    }
    return {true, fmt("%zu words over n = 1..12: bijective, tiled, uniform per block", words)};
}

Outcome babkin_trace_check() {
    BabkinCodec codec(8);
    const auto word = BitSequence::from_string("00101000");
    const BigInt num = codec.number(word);
    std::vector<unsigned> exps;
    for (const auto& b : codec.blocks(2)) exps.push_back(b.exponent);
    const auto blk = codec.block_index(2, num) + 1;
    const auto out = codec.encode(word).to_string();
    const bool ok = num == 8 && exps == std::vector<unsigned>{2, 3, 4} && blk == 2 && out == "000";
    return {ok, fmt("Num %s, blocks [%u,%u,%u], block %zu, output \"%s\"", num.str().c_str(), exps.at(0), exps.at(1),
                    exps.at(2), blk, out.c_str())};
}

Outcome binomial_agreement_check() {
    const double exact = binomial_exact(300, 150).convert_to<double>();
    const double rel = std::abs(binomial_approx(300, 150) - exact) / exact;
    return {rel < 1e-10, fmt("relative error %.3e", rel)};
}

Outcome von_neumann_yield_check() {
    const auto [out, st] = von_neumann(bernoulli_bits(0.7, 1000000, 2024));
    const double p = freq_p(out);
    bool discard_ok = 2 * st.discarded_bits >= st.input_bits;
    for (unsigned n = 0; n <= 12 && discard_ok; ++n) {
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            BitBuilder bb;
            for (unsigned i = 0; i < n; ++i) bb.push_back((mask >> i) & 1u);
            const auto s = von_neumann(std::move(bb).build()).second;
            if (2 * s.discarded_bits < s.input_bits) discard_ok = false;
        }
    }
    const bool ok = std::abs(st.yield - 0.21) <= 0.01 && p >= 0.01 && discard_ok;
    return {ok, fmt("yield %.4f, monobit p %.4f, discard >= 50%% on all inputs: %s", st.yield, p, discard_ok ? "yes" : "no")};
}

Outcome battery_calibration_check() {
    const std::size_t count = 20;
    std::vector<BitSequence> seqs;
    for (std::size_t s = 0; s < count; ++s) seqs.push_back(software_source(2000000, derive_seed(2025, s)));
    const auto reports = nist::run_batteries(seqs, nist::TestParams::full());
    const auto table = pass_rates(reports, 0.01);
    bool ok = true;
    std::ostringstream os;
    for (const auto& r : table.rates) {
        if (r.applicable_subsequences == 0) {
            ok = false;
            os << fmt(" t%d never applicable;", static_cast<int>(r.id));
            continue;
        }
        // pooled pass fraction scaled to 20 sequences
        const double frac = static_cast<double>(r.passed) / static_cast<double>(r.p_values);
        const bool t_ok = frac >= 18.0 / 20.0;
        ok = ok && t_ok;
        os << fmt(" t%d %.3f(%zu)%s", static_cast<int>(r.id), frac, r.applicable_subsequences, t_ok ? "" : "!");
    }
    const auto hist = aggregate_histogram(reports, 20);
    const double crit = special::chi_square_critical(19, 0.001);
    const bool h_ok = hist.chi_square() < crit;
    os << fmt("; histogram chi2 %.2f < %.2f over %llu p-values", hist.chi_square(), crit,
              static_cast<unsigned long long>(hist.total));
    return {ok && h_ok, os.str()};
}

Outcome bias_detection_check() {
    int biased_fail = 0;
    int clean_pass = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        biased_fail += freq_p(simulate_coherent_bits(biased_coherent(0.1, derive_seed(31, s)), 1000000).first) < 0.01;
        clean_pass += freq_p(simulate_coherent_bits(biased_coherent(0.0, derive_seed(32, s)), 1000000).first) >= 0.01;
    }
    return {biased_fail >= 18 && clean_pass >= 18,
            fmt("a=0.1 fails %d/20, a=0 passes %d/20", biased_fail, clean_pass)};
}

double sequence_mae(const BitSequence& seq, const nist::TestParams& params) {
    return mae(median_profile({nist::run_battery(seq, params)}));
}

Outcome hybrid_ordering_check() {
    const auto params = nist::TestParams::reduced();
    const std::size_t pairs = 30;
    std::size_t wins = 0;
    double sum_raw = 0.0;
    double sum_hyb = 0.0;
    for (std::size_t s = 0; s < pairs; ++s) {
        HybridSourceConfig h;
        h.coherent = biased_coherent(0.05, derive_seed(41, s));
        h.heralded.seed = derive_seed(42, s);
        h.seed = derive_seed(43, s);
        h.mean_spacing = 20.0;
        const double raw = sequence_mae(simulate_coherent_bits(h.coherent, 2000000).first, params);
        const double hyb = sequence_mae(simulate_hybrid(h, 2000000), params);
        wins += raw > hyb;
        sum_raw += raw;
        sum_hyb += hyb;
    }
    const bool ok = static_cast<double>(wins) >= 0.8 * static_cast<double>(pairs);
    return {ok, fmt("MAE(raw) > MAE(hybrid) in %zu/%zu pairs; mean MAE raw %.4f, hybrid %.4f", wins, pairs,
                    sum_raw / pairs, sum_hyb / pairs)};
}

Outcome digital_mixing_check() {
    const std::size_t n = 1000000;
    const std::vector<std::size_t> periods{0, 100, 20, 5, 1};  // 0 = no mixing
    std::vector<std::vector<double>> ps(periods.size());
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto base = simulate_coherent_bits(biased_coherent(0.05, derive_seed(51, s)), n).first;
        HeraldedSourceConfig q;
        q.seed = derive_seed(52, s);
        const auto quantum = simulate_heralded(q, n);
        for (std::size_t i = 0; i < periods.size(); ++i) {
            const auto mixed = periods[i] == 0 ? base : digital_mix(base, quantum.slice(0, (n + periods[i] - 1) / periods[i]), periods[i]);
            ps[i].push_back(freq_p(mixed));
        }
    }
    std::vector<double> med;
    for (const auto& v : ps) med.push_back(median(v));
    bool ok = true;
    for (std::size_t i = 1; i < med.size(); ++i) ok = ok && med[i] >= med[i - 1];
    return {ok, fmt("median p for i = inf,100,20,5,1: %.4g %.4g %.4g %.4g %.4g", med[0], med[1], med[2], med[3], med[4])};
}

Outcome hom_pipeline_check() {
    const HomParams truth{100.0, -0.8, 1.6e-5};
    const auto delays = linspace_delays(10 * truth.w, 101);
    int within = 0;
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        try {
            const auto fit = hom_fit(synthetic_hom(truth, delays, 0.03, derive_seed(61, s)));
            const double rel = std::abs(fit.params.w - truth.w) / truth.w;
            worst = std::max(worst, rel);
            within += rel <= 0.05;
        } catch (const Error&) {
            worst = INFINITY;
        }
    }
    const auto sw = spectral_width(1.6e-5, 810e-9);
    const double dw_rel = std::abs(sw.delta_omega - 1.874e13) / 1.874e13;
    const double dl_rel = std::abs(sw.delta_lambda - 6.5e-9) / 6.5e-9;
    const bool ok = within == 100 && dw_rel <= 1e-3 && dl_rel <= 1e-3;
    return {ok, fmt("w within 5%% in %d/100 seeds (worst %.2f%%); delta_omega %.4e Hz (%.3f%%), delta_lambda %.4f nm (%.3f%% from 6.5 nm)",
                    within, 100 * worst, sw.delta_omega, 100 * dw_rel, sw.delta_lambda * 1e9, 100 * dl_rel)};
}

Outcome poisson_characterization_check() {
    const auto h = simulate_photocounts(0.1, 10000000, 71);
    return {std::abs(h.mean - 0.1) <= 0.001,
            fmt("lambda_hat %.5f over 1e7 cycles; reference means %.3f %.3f %.3f not asserted", h.mean, kReferenceMeans[0],
                kReferenceMeans[1], kReferenceMeans[2])};
}

const std::vector<std::pair<std::string, std::function<Outcome()>>>& criteria() {
    static const std::vector<std::pair<std::string, std::function<Outcome()>>> list{
        {"event_rate", event_rate_check},
        {"multiphoton", multiphoton_check},
        {"threshold_table", threshold_table_check},
        {"frequency_known_answer", frequency_known_answer_check},
        {"babkin_exhaustive", babkin_exhaustive_check},
        {"babkin_trace", babkin_trace_check},
        {"binomial_agreement", binomial_agreement_check},
        {"von_neumann_yield", von_neumann_yield_check},
        {"battery_calibration", battery_calibration_check},
        {"bias_detection", bias_detection_check},
        {"hybrid_ordering", hybrid_ordering_check},
        {"digital_mixing", digital_mixing_check},
        {"hom_pipeline", hom_pipeline_check},
        {"poisson_characterization", poisson_characterization_check},
    };
    return list;
}

bool run(const std::string& key, const std::function<Outcome()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = fn();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", key.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
    return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
    const std::string want = argc > 1 ? argv[1] : "all";
    bool all_ok = true;
    bool found = false;
    for (const auto& [key, fn] : criteria()) {
        if (want != "all" && want != key) continue;
        found = true;
        all_ok = run(key, fn) && all_ok;
    }
    if (!found) {
        std::fprintf(stderr, "unknown criterion: %s\n", want.c_str());
        return 2;
    }
    return all_ok ? 0 : 1;
}
