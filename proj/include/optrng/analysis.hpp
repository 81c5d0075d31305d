#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "optrng/bitstream.hpp"
#include "optrng/errors.hpp"
#include "optrng/nist/battery.hpp"
#include "optrng/special.hpp"

namespace optrng {

inline constexpr double kDefaultAlpha = 0.01;

/// Median of a non-empty list (mean of the two central values for even sizes).
inline double median(std::vector<double> v) {
    if (v.empty()) throw DomainError("median of an empty list");
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double hi = v[mid];
    if (v.size() % 2 == 1) return hi;
    const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lo + hi);
}

struct MedianEntry {
    nist::TestId id;
    double median = 0.0;
    std::size_t sequences = 0;  ///< reports in which the test was applicable
};

struct MedianProfile {
    std::vector<MedianEntry> entries;  ///< ascending test id, applicable tests only

    bool empty() const noexcept { return entries.empty(); }
    std::optional<double> find(nist::TestId id) const {
        for (const auto& e : entries) {
            if (e.id == id) return e.median;
        }
        return std::nullopt;
    }
};

/// Per-test median: multi-p-value tests reduce to their median inside each report first.
inline MedianProfile median_profile(const std::vector<nist::TestReport>& reports) {
    MedianProfile profile;
    for (int t = 1; t <= nist::kTestCount; ++t) {
        const auto id = static_cast<nist::TestId>(t);
        std::vector<double> per_sequence;
        for (const auto& r : reports) {
            for (const auto& res : r.tests) {
                if (res.id == id && res.applicable() && !res.p_values.empty()) per_sequence.push_back(median(res.p_values));
            }
        }
        if (!per_sequence.empty()) profile.entries.push_back({id, median(per_sequence), per_sequence.size()});
    }
    return profile;
}

/// Mean |median - 1/2| over the profile, with the universal-test median halved first.
inline double mae(const MedianProfile& profile) {
    if (profile.empty()) throw EmptyProfile();
    double sum = 0.0;
    for (const auto& e : profile.entries) {
        const double m = e.id == nist::TestId::universal ? e.median / 2.0 : e.median;
        sum += std::abs(m - 0.5);
    }
    return sum / static_cast<double>(profile.entries.size());
}

struct HistogramSpec {
    std::size_t bin_count = 20;
    std::vector<std::uint64_t> counts;
    std::uint64_t total = 0;

    double bin_width() const { return 1.0 / static_cast<double>(bin_count); }
    double expected() const { return static_cast<double>(total) / static_cast<double>(bin_count); }

    /// Pearson statistic against the uniform expectation.
    double chi_square() const {
        const double e = expected();
        if (e <= 0.0) return 0.0;
        double chi2 = 0.0;
        for (auto c : counts) chi2 += (static_cast<double>(c) - e) * (static_cast<double>(c) - e) / e;
        return chi2;
    }
    std::size_t degrees_of_freedom() const { return bin_count - 1; }
};

inline HistogramSpec make_histogram(std::size_t bin_count = 20) {
    if (bin_count == 0) throw DomainError("histogram needs at least one bin");
    HistogramSpec h;
    h.bin_count = bin_count;
    h.counts.assign(bin_count, 0);
    return h;
}

/// Bins are [k/B, (k+1)/B) except the last, which is closed at 1.
inline void add_p_value(HistogramSpec& h, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p-value outside [0, 1]");
    const auto bin = std::min(static_cast<std::size_t>(p * static_cast<double>(h.bin_count)), h.bin_count - 1);
    ++h.counts[bin];
    ++h.total;
}

inline HistogramSpec histogram(const std::vector<double>& p_values, std::size_t bin_count = 20) {
    auto h = make_histogram(bin_count);
    for (double p : p_values) add_p_value(h, p);
    return h;
}

/// Pools every reported p-value of every test and report.
inline HistogramSpec aggregate_histogram(const std::vector<nist::TestReport>& reports, std::size_t bin_count = 20) {
    if (reports.empty()) throw DomainError("aggregate_histogram needs at least one report");
    auto h = make_histogram(bin_count);
    for (const auto& r : reports) {
        for (const auto& t : r.tests) {
            for (double p : t.p_values) add_p_value(h, p);
        }
    }
    return h;
}

struct PassRate {
    nist::TestId id;
    std::size_t applicable_subsequences = 0;
    std::uint64_t p_values = 0;
    std::uint64_t passed = 0;

    /// Percentage of pooled p-values at or above alpha; NaN when the test never applied.
    double percent() const {
        return p_values == 0 ? std::numeric_limits<double>::quiet_NaN()
                             : 100.0 * static_cast<double>(passed) / static_cast<double>(p_values);
    }
};

struct PassRateTable {
    std::size_t subsequences = 0;
    std::size_t sub_len = 0;
    double alpha = kDefaultAlpha;
    std::vector<PassRate> rates;  ///< one row per test, ascending id

    const PassRate& rate(nist::TestId id) const { return rates.at(static_cast<std::size_t>(id) - 1); }
};

inline PassRateTable pass_rates(const std::vector<nist::TestReport>& reports, double alpha = kDefaultAlpha) {
    PassRateTable table;
    table.subsequences = reports.size();
    table.sub_len = reports.empty() ? 0 : reports.front().length;
    table.alpha = alpha;
    for (int t = 1; t <= nist::kTestCount; ++t) table.rates.push_back({static_cast<nist::TestId>(t)});
    for (const auto& r : reports) {
        for (const auto& res : r.tests) {
            if (!res.applicable()) continue;
            auto& row = table.rates[static_cast<std::size_t>(res.id) - 1];
            ++row.applicable_subsequences;
            for (double p : res.p_values) {
                ++row.p_values;
                if (p >= alpha) ++row.passed;
            }
        }
    }
    return table;
}

/// Splits seq into disjoint sub_len-bit pieces (remainder dropped) and runs the battery on each.
inline PassRateTable subsequence_pass_rates(const BitSequence& seq, std::size_t sub_len,
                                            const nist::TestParams& params = {}, double alpha = kDefaultAlpha,
                                            unsigned jobs = 1) {
    if (sub_len == 0 || seq.size() < sub_len) {
        throw TooShort("subsequence_pass_rates: sequence shorter than one subsequence");
    }
    const auto pieces = chunk(seq, sub_len);
    const auto reports = nist::run_batteries(pieces.chunks, params, {}, jobs);
    bool any = false;
    for (const auto& r : reports) any = any || r.applicable_count() > 0;
    if (!any) throw TooShort("subsequence_pass_rates: no test applies at this subsequence length");
    auto table = pass_rates(reports, alpha);
    table.sub_len = sub_len;
    return table;
}

struct ThresholdRow {
    double n = 0.0;
    double b_max = 0.0;
    double sz_max = 0.0;
};

/// Largest balance that still passes the frequency test at level alpha for N bits.
inline ThresholdRow balance_threshold(double n, double alpha = kDefaultAlpha) {
    if (!(n >= 2.0)) throw DomainError("balance_threshold requires N >= 2");
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
    const double rho = special::erfc_inv(alpha) / std::sqrt(n / 2.0);
    if (rho >= 1.0) throw DomainError("no balance passes at this length");
    return {n, (1.0 + rho) / (1.0 - rho), rho};
}

/// Tomography data published alongside the thresholds; S_x and S_y are reference only.
struct StokesReference {
    double n;
    double balance;
    double s0;
    double sx;
    double sy;
    double sz;
};

inline constexpr std::array<StokesReference, 6> kStokesReference{{
    {1e2, 1.7, 1.0, 0.96399, 0.07258, 0.25584},
    {1e3, 1.18, 1.0, 0.99585, 0.02621, 0.08719},
    {1e4, 1.05, 1.0, 0.99956, 0.01548, 0.02518},
    {1e5, 1.016, 1.0, 0.99988, 0.01274, 0.00828},
    {1e6, 1.005, 1.0, 0.99991, 0.01261, 0.00254},
    {1e7, 1.0016, 1.0, 0.99992, 0.01258, 0.00082},
}};

// ---- CSV ----

namespace detail {

inline std::string fmt(double v, int precision = 10) {
    if (std::isnan(v)) return "nan";
    std::ostringstream os;
    os.precision(precision);
    os << v;
    return os.str();
}

}  // namespace detail

inline std::string histogram_csv(const HistogramSpec& h) {
    std::ostringstream os;
    os << "bin,lower,upper,count,expected\n";
    for (std::size_t i = 0; i < h.bin_count; ++i) {
        os << i << ',' << detail::fmt(static_cast<double>(i) * h.bin_width()) << ','
           << detail::fmt(static_cast<double>(i + 1) * h.bin_width()) << ',' << h.counts[i] << ','
           << detail::fmt(h.expected()) << '\n';
    }
    return os.str();
}

inline std::string pass_rates_csv(const PassRateTable& t) {
    std::ostringstream os;
    os << "id,name,categories,applicable_subsequences,p_values,passed,percent\n";
    for (const auto& r : t.rates) {
        const auto& info = nist::info(r.id);
        std::string cats;
        for (auto c : nist::categories(r.id)) {
            if (!cats.empty()) cats += '|';
            cats += nist::roman(c);
        }
        os << static_cast<int>(r.id) << ',' << info.key << ',' << cats << ',' << r.applicable_subsequences << ','
           << r.p_values << ',' << r.passed << ',' << detail::fmt(r.percent(), 6) << '\n';
    }
    return os.str();
}

inline std::string thresholds_csv(const std::vector<ThresholdRow>& rows, double alpha) {
    std::ostringstream os;
    os << "N,alpha,B_max,Sz_max\n";
    for (const auto& r : rows) {
        os << detail::fmt(r.n, 12) << ',' << detail::fmt(alpha) << ',' << detail::fmt(r.b_max) << ','
           << detail::fmt(r.sz_max) << '\n';
    }
    return os.str();
}

inline std::string median_profile_csv(const MedianProfile& p) {
    std::ostringstream os;
    os << "id,name,median,sequences\n";
    for (const auto& e : p.entries) {
        os << static_cast<int>(e.id) << ',' << nist::info(e.id).key << ',' << detail::fmt(e.median) << ','
           << e.sequences << '\n';
    }
    return os.str();
}

}  // namespace optrng
