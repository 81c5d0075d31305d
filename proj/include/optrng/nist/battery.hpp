#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "optrng/bitstream.hpp"
#include "optrng/errors.hpp"
#include "optrng/nist/catalog.hpp"
#include "optrng/nist/params.hpp"
#include "optrng/nist/tests.hpp"

namespace optrng::nist {

enum class TestStatus { ok, too_short, inapplicable };

inline std::string_view to_string(TestStatus s) noexcept {
    switch (s) {
        case TestStatus::ok: return "ok";
        case TestStatus::too_short: return "too_short";
        case TestStatus::inapplicable: return "inapplicable";
    }
    return "?";
}

using ParamList = std::vector<std::pair<std::string, std::size_t>>;

struct TestResult {
    TestId id = TestId::frequency;
    std::vector<double> p_values;  ///< empty unless applicable
    TestStatus status = TestStatus::ok;
    std::string reason;
    ParamList params;

    bool applicable() const noexcept { return status == TestStatus::ok; }
};

struct TestReport {
    std::string sequence_id;
    std::size_t length = 0;
    std::vector<TestResult> tests;  ///< ordered by test id

    const TestResult& result(TestId id) const {
        for (const auto& t : tests) {
            if (t.id == id) return t;
        }
        throw DomainError("test not present in report");
    }
    std::size_t applicable_count() const {
        return static_cast<std::size_t>(std::count_if(tests.begin(), tests.end(), [](const auto& t) { return t.applicable(); }));
    }
};

/// Parameters actually consumed by one test.
inline ParamList params_for(TestId id, const TestParams& p) {
    switch (id) {
        case TestId::block_frequency: return {{"M", p.block_frequency_m}};
        case TestId::rank: return {{"rows", p.rank_rows}, {"cols", p.rank_cols}};
        case TestId::non_overlapping_template:
            return {{"m", p.non_overlapping_m},
                    {"blocks", p.non_overlapping_blocks},
                    {"templates", p.non_overlapping_templates}};
        case TestId::overlapping_template: return {{"m", p.overlapping_m}, {"M", p.overlapping_block}};
        case TestId::universal: return {{"L", p.universal_l}, {"Q", p.universal_q}};
        case TestId::linear_complexity: return {{"M", p.linear_complexity_m}};
        case TestId::serial: return {{"m", p.serial_m}};
        case TestId::approximate_entropy: return {{"m", p.approximate_entropy_m}};
        default: return {};
    }
}

/// p-values of one test; throws TooShort or Inapplicable.
inline std::vector<double> run_test(TestId id, Bits bits, const TestParams& p) {
    switch (id) {
        case TestId::frequency: return {frequency(bits)};
        case TestId::block_frequency: return {block_frequency(bits, p.block_frequency_m)};
        case TestId::runs: return {runs(bits)};
        case TestId::longest_run: return {longest_run(bits)};
        case TestId::rank: return {rank(bits, p.rank_rows, p.rank_cols)};
        case TestId::dft: return {dft(bits)};
        case TestId::non_overlapping_template:
            return non_overlapping_template(bits, p.non_overlapping_m, p.non_overlapping_blocks,
                                            p.non_overlapping_templates);
        case TestId::overlapping_template: return {overlapping_template(bits, p.overlapping_m, p.overlapping_block)};
        case TestId::universal: return {universal(bits, p.universal_l, p.universal_q)};
        case TestId::linear_complexity: return {linear_complexity(bits, p.linear_complexity_m)};
        case TestId::serial: return serial(bits, p.serial_m);
        case TestId::approximate_entropy: return {approximate_entropy(bits, p.approximate_entropy_m)};
        case TestId::cumulative_sums: return cumulative_sums(bits);
        case TestId::random_excursions: return random_excursions(bits);
        case TestId::random_excursions_variant: return random_excursions_variant(bits);
    }
    throw DomainError("unknown test id");
}

inline std::vector<double> run_test(TestId id, const BitSequence& seq, const TestParams& p) {
    const auto bits = seq.unpack();
    return run_test(id, Bits(bits), p);
}

/// Runs one test and records a length or cycle-count failure as a flag.
inline TestResult evaluate(TestId id, Bits bits, const TestParams& p) {
    TestResult r;
    r.id = id;
    r.params = params_for(id, p);
    try {
        r.p_values = run_test(id, bits, p);
    } catch (const TooShort& e) {
        r.status = TestStatus::too_short;
        r.reason = e.what();
    } catch (const Inapplicable& e) {
        r.status = TestStatus::inapplicable;
        r.reason = e.what();
    }
    return r;
}

namespace detail {

/// Calls fn(i) for i in [0, count) on up to `jobs` threads.
template <class Fn>
void parallel_for(std::size_t count, unsigned jobs, Fn&& fn) {
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
    if (jobs <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count || failed.load()) return;
            try {
                fn(i);
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

inline TestReport run_battery(const BitSequence& seq, const TestParams& params, std::string sequence_id = {},
                              unsigned jobs = 1) {
    params.validate();
    const auto bits = seq.unpack();
    TestReport report;
    report.sequence_id = std::move(sequence_id);
    report.length = seq.size();
    report.tests.resize(kTestCount);
    detail::parallel_for(kTestCount, jobs, [&](std::size_t i) {
        report.tests[i] = evaluate(static_cast<TestId>(static_cast<int>(i) + 1), Bits(bits), params);
    });
    return report;
}

/// One report per sequence, in input order; sequences are spread over `jobs` threads.
inline std::vector<TestReport> run_batteries(const std::vector<BitSequence>& seqs, const TestParams& params,
                                             const std::vector<std::string>& ids = {}, unsigned jobs = 1) {
    std::vector<TestReport> out(seqs.size());
    detail::parallel_for(seqs.size(), jobs, [&](std::size_t i) {
        out[i] = run_battery(seqs[i], params, i < ids.size() ? ids[i] : std::to_string(i), 1);
    });
    return out;
}

}  // namespace optrng::nist
