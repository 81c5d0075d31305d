#pragma once

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <memory>
#include <mutex>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "optrng/errors.hpp"
#include "optrng/nist/params.hpp"
#include "optrng/special.hpp"

// Statistical tests of NIST SP 800-22 rev. 1a. Every function takes one byte
// (0 or 1) per bit and returns p-values in [0, 1]. Length rules follow the
// recommended minimums of SP 800-22; violations raise TooShort, and the
// random-excursion cycle rule raises Inapplicable.
namespace optrng::nist {

using Bits = std::span<const std::uint8_t>;

namespace detail {

inline void require_length(bool ok, const std::string& test, const std::string& rule) {
    if (!ok) throw TooShort(test + ": " + rule);
}

inline double clamp_p(double p) { return std::clamp(p, 0.0, 1.0); }

inline std::size_t floor_log2(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(std::bit_width(n) - 1); }

}  // namespace detail

enum class LengthGate { enforce, skip };

/// Test 1: p = erfc(|S_n| / sqrt(2n)).
inline double frequency(Bits bits, LengthGate gate = LengthGate::enforce) {
    const std::size_t n = bits.size();
    if (gate == LengthGate::enforce) detail::require_length(n >= 100, "frequency", "n >= 100");
    if (n == 0) throw TooShort("frequency: empty sequence");
    std::int64_t s = 0;
    for (auto b : bits) s += b ? 1 : -1;
    return detail::clamp_p(special::erfc(static_cast<double>(std::llabs(s)) / std::sqrt(2.0 * static_cast<double>(n))));
}

/// Test 2.
inline double block_frequency(Bits bits, std::size_t m) {
    const std::size_t n = bits.size();
    detail::require_length(n >= 100 && n >= m, "block_frequency", "n >= 100 and n >= M");
    const std::size_t blocks = n / m;
    double chi2 = 0.0;
    for (std::size_t i = 0; i < blocks; ++i) {
        std::size_t ones = 0;
        for (std::size_t j = 0; j < m; ++j) ones += bits[i * m + j];
        const double pi = static_cast<double>(ones) / static_cast<double>(m) - 0.5;
        chi2 += pi * pi;
    }
    chi2 *= 4.0 * static_cast<double>(m);
    return detail::clamp_p(special::igamc(static_cast<double>(blocks) / 2.0, chi2 / 2.0));
}

/// Test 3. A failed frequency prerequisite yields p = 0, as in the reference suite.
inline double runs(Bits bits) {
    const std::size_t n = bits.size();
    detail::require_length(n >= 100, "runs", "n >= 100");
    const double nd = static_cast<double>(n);
    const double pi = static_cast<double>(std::accumulate(bits.begin(), bits.end(), std::size_t{0})) / nd;
    if (std::abs(pi - 0.5) >= 2.0 / std::sqrt(nd)) return 0.0;
    std::size_t v = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) v += bits[k] != bits[k + 1];
    const double num = std::abs(static_cast<double>(v) - 2.0 * nd * pi * (1.0 - pi));
    const double den = 2.0 * std::sqrt(2.0 * nd) * pi * (1.0 - pi);
    return detail::clamp_p(special::erfc(num / den));
}

/// Test 4; block size and class table chosen from n as in SP 800-22.
inline double longest_run(Bits bits) {
    const std::size_t n = bits.size();
    detail::require_length(n >= 128, "longest_run", "n >= 128");
    std::size_t m = 0;
    std::size_t v_lo = 0;
    std::vector<double> pi;
    if (n < 6272) {
        m = 8;
        v_lo = 1;
        pi = {0.21484375, 0.3671875, 0.23046875, 0.1875};
    } else if (n < 750000) {
        m = 128;
        v_lo = 4;
        pi = {0.1174035788, 0.242955959, 0.249363483, 0.17517706, 0.102701071, 0.112398847};
    } else {
        m = 10000;
        v_lo = 10;
        pi = {0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727};
    }
    const std::size_t classes = pi.size();
    const std::size_t blocks = n / m;
    std::vector<double> nu(classes, 0.0);
    for (std::size_t i = 0; i < blocks; ++i) {
        std::size_t run = 0;
        std::size_t longest = 0;
        for (std::size_t j = 0; j < m; ++j) {
            run = bits[i * m + j] ? run + 1 : 0;
            longest = std::max(longest, run);
        }
        const std::size_t cls = longest <= v_lo ? 0 : std::min(longest - v_lo, classes - 1);
        nu[cls] += 1.0;
    }
    double chi2 = 0.0;
    const double nb = static_cast<double>(blocks);
    for (std::size_t i = 0; i < classes; ++i) chi2 += (nu[i] - nb * pi[i]) * (nu[i] - nb * pi[i]) / (nb * pi[i]);
    return detail::clamp_p(special::igamc(static_cast<double>(classes - 1) / 2.0, chi2 / 2.0));
}

/// Rank of a binary matrix whose rows are the low `cols` bits of each word.
inline std::size_t gf2_rank(std::vector<std::uint64_t> rows, std::size_t cols) {
    std::size_t rank = 0;
    for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
        const std::uint64_t bit = std::uint64_t{1} << (cols - 1 - c);
        std::size_t pivot = rank;
        while (pivot < rows.size() && !(rows[pivot] & bit)) ++pivot;
        if (pivot == rows.size()) continue;
        std::swap(rows[rank], rows[pivot]);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r != rank && (rows[r] & bit)) rows[r] ^= rows[rank];
        }
        ++rank;
    }
    return rank;
}

/// Probability that a random rows x cols binary matrix has rank r.
inline double rank_probability(std::size_t r, std::size_t rows, std::size_t cols) {
    const double exponent = static_cast<double>(r * (rows + cols - r)) - static_cast<double>(rows * cols);
    double prod = 1.0;
    for (std::size_t i = 0; i < r; ++i) {
        const double di = static_cast<double>(i);
        prod *= (1.0 - std::exp2(di - static_cast<double>(rows))) * (1.0 - std::exp2(di - static_cast<double>(cols))) /
                (1.0 - std::exp2(di - static_cast<double>(r)));
    }
    return std::exp2(exponent) * prod;
}

/// Test 5; rows are filled from consecutive bits, first bit in the leading column.
inline double rank(Bits bits, std::size_t rows = 32, std::size_t cols = 32) {
    const std::size_t n = bits.size();
    const std::size_t per = rows * cols;
    detail::require_length(n / per >= 38, "rank", "at least 38 matrices");
    const std::size_t count = n / per;
    const std::size_t full = std::min(rows, cols);
    double f_full = 0.0;
    double f_minus1 = 0.0;
    std::vector<std::uint64_t> mat(rows);
    for (std::size_t k = 0; k < count; ++k) {
        for (std::size_t r = 0; r < rows; ++r) {
            std::uint64_t w = 0;
            const auto* p = bits.data() + k * per + r * cols;
            for (std::size_t c = 0; c < cols; ++c) w = (w << 1) | p[c];
            mat[r] = w;
        }
        const std::size_t rk = gf2_rank(mat, cols);
        if (rk == full) f_full += 1.0;
        else if (rk + 1 == full) f_minus1 += 1.0;
    }
    const double nn = static_cast<double>(count);
    const double p_full = rank_probability(full, rows, cols);
    const double p_minus1 = rank_probability(full - 1, rows, cols);
    const double p_rest = 1.0 - p_full - p_minus1;
    const double f_rest = nn - f_full - f_minus1;
    const double chi2 = (f_full - nn * p_full) * (f_full - nn * p_full) / (nn * p_full) +
                        (f_minus1 - nn * p_minus1) * (f_minus1 - nn * p_minus1) / (nn * p_minus1) +
                        (f_rest - nn * p_rest) * (f_rest - nn * p_rest) / (nn * p_rest);
    return detail::clamp_p(std::exp(-chi2 / 2.0));
}

namespace detail {

struct FftwDeleter {
    void operator()(void* p) const noexcept { fftw_free(p); }
};

// FFTW planning is not thread-safe; execution on distinct plans is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace detail

/// |X_k| for k = 0 .. n/2 - 1 of the +-1 sequence.
inline std::vector<double> dft_moduli(Bits bits) {
    const std::size_t n = bits.size();
    std::unique_ptr<double, detail::FftwDeleter> in(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
    std::unique_ptr<fftw_complex, detail::FftwDeleter> out(
        static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1))));
    if (!in || !out) throw std::bad_alloc();
    fftw_plan plan = nullptr;
    {
        std::lock_guard lock(detail::fftw_planner_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE);
    }
    if (!plan) throw Error("FFTW failed to create a plan");
    for (std::size_t i = 0; i < n; ++i) in.get()[i] = bits[i] ? 1.0 : -1.0;
    fftw_execute(plan);
    {
        std::lock_guard lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    std::vector<double> mod(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) mod[k] = std::hypot(out.get()[k][0], out.get()[k][1]);
    return mod;
}

/// Test 6: share of spectral peaks below the 95% threshold sqrt(n ln 20).
inline double dft(Bits bits) {
    const std::size_t n = bits.size();
    detail::require_length(n >= 1000, "dft", "n >= 1000");
    const double nd = static_cast<double>(n);
    const double threshold = std::sqrt(std::log(1.0 / 0.05) * nd);
    const auto mod = dft_moduli(bits);
    const double n1 = static_cast<double>(std::count_if(mod.begin(), mod.end(), [&](double m) { return m < threshold; }));
    const double n0 = 0.95 * nd / 2.0;
    const double d = (n1 - n0) / std::sqrt(nd * 0.95 * 0.05 / 4.0);
    return detail::clamp_p(special::erfc(std::abs(d) / std::sqrt(2.0)));
}

/**
 * All aperiodic templates of length m in ascending order (first bit most
 * significant). A template is aperiodic when no proper shift of it overlaps
 * itself; there are 148 of length 9.
 */
inline std::vector<std::uint32_t> aperiodic_templates(std::size_t m) {
    std::vector<std::uint32_t> out;
    const std::uint32_t count = std::uint32_t{1} << m;
    for (std::uint32_t t = 0; t < count; ++t) {
        bool aperiodic = true;
        for (std::size_t shift = 1; shift < m && aperiodic; ++shift) {
            const std::size_t overlap = m - shift;
            const std::uint32_t mask = (std::uint32_t{1} << overlap) - 1;
            // suffix of length `overlap` equals prefix of length `overlap`
            if ((t & mask) == (t >> shift)) aperiodic = false;
        }
        if (aperiodic) out.push_back(t);
    }
    return out;
}

namespace detail {

/// Value of the m-bit window starting at every position i <= n - m (first bit most significant).
inline std::vector<std::uint32_t> window_values(Bits bits, std::size_t m) {
    const std::size_t n = bits.size();
    if (n < m) return {};
    std::vector<std::uint32_t> out(n - m + 1);
    const std::uint32_t mask = m >= 32 ? ~std::uint32_t{0} : (std::uint32_t{1} << m) - 1;
    std::uint32_t v = 0;
    for (std::size_t i = 0; i < n; ++i) {
        v = ((v << 1) | bits[i]) & mask;
        if (i + 1 >= m) out[i + 1 - m] = v;
    }
    return out;
}

}  // namespace detail

/// Test 7; one p-value per template.
inline std::vector<double> non_overlapping_template(Bits bits, std::size_t m, std::size_t blocks,
                                                    std::size_t template_limit = 0) {
    const std::size_t n = bits.size();
    const std::size_t block_len = blocks == 0 ? 0 : n / blocks;
    detail::require_length(n >= 100 && block_len > m, "non_overlapping_template", "n >= 100 and block length > m");
    auto templates = aperiodic_templates(m);
    if (template_limit != 0 && template_limit < templates.size()) templates.resize(template_limit);

    const auto windows = detail::window_values(bits, m);
    const double md = static_cast<double>(m);
    const double mu = static_cast<double>(block_len - m + 1) / std::exp2(md);
    const double var = static_cast<double>(block_len) * (1.0 / std::exp2(md) - (2.0 * md - 1.0) / std::exp2(2.0 * md));

    std::vector<double> out;
    out.reserve(templates.size());
    for (std::uint32_t tpl : templates) {
        double chi2 = 0.0;
        for (std::size_t j = 0; j < blocks; ++j) {
            const std::size_t start = j * block_len;
            const std::size_t last = start + block_len - m;
            std::size_t hits = 0;
            for (std::size_t i = start; i <= last;) {
                if (windows[i] == tpl) {
                    ++hits;
                    i += m;
                } else {
                    ++i;
                }
            }
            chi2 += (static_cast<double>(hits) - mu) * (static_cast<double>(hits) - mu) / var;
        }
        out.push_back(detail::clamp_p(special::igamc(static_cast<double>(blocks) / 2.0, chi2 / 2.0)));
    }
    return out;
}

/**
 * Probabilities that an M-bit random block holds 0, 1, ..., classes-2, and at
 * least classes-1 overlapping occurrences of the all-ones template of length
 * m. Exact dynamic programming over (trailing ones, occurrences so far).
 */
inline std::vector<double> overlapping_class_probabilities(std::size_t m, std::size_t block_len, std::size_t classes = 6) {
    const std::size_t cap = classes - 1;
    // state[run][count], run in [0, m] (m means the last m bits are ones)
    std::vector<std::vector<double>> state(m + 1, std::vector<double>(classes, 0.0));
    state[0][0] = 1.0;
    for (std::size_t step = 0; step < block_len; ++step) {
        std::vector<std::vector<double>> next(m + 1, std::vector<double>(classes, 0.0));
        for (std::size_t run = 0; run <= m; ++run) {
            for (std::size_t c = 0; c <= cap; ++c) {
                const double p = state[run][c] * 0.5;
                if (p == 0.0) continue;
                next[0][c] += p;
                const std::size_t nr = std::min(run + 1, m);
                const std::size_t nc = nr == m ? std::min(c + 1, cap) : c;
                next[nr][nc] += p;
            }
        }
        state.swap(next);
    }
    std::vector<double> probs(classes, 0.0);
    for (const auto& row : state) {
        for (std::size_t c = 0; c < classes; ++c) probs[c] += row[c];
    }
    return probs;
}

/// Test 8 with the all-ones template.
inline double overlapping_template(Bits bits, std::size_t m = 9, std::size_t block_len = 1032) {
    const std::size_t n = bits.size();
    detail::require_length(n >= 1000000 && n >= block_len, "overlapping_template", "n >= 1e6");
    constexpr std::size_t classes = 6;
    const std::size_t blocks = n / block_len;
    const auto pi = overlapping_class_probabilities(m, block_len, classes);
    std::array<double, classes> nu{};
    for (std::size_t j = 0; j < blocks; ++j) {
        std::size_t hits = 0;
        std::size_t run = 0;
        for (std::size_t i = 0; i < block_len; ++i) {
            run = bits[j * block_len + i] ? run + 1 : 0;
            if (run >= m) ++hits;
        }
        nu[std::min(hits, classes - 1)] += 1.0;
    }
    double chi2 = 0.0;
    const double nb = static_cast<double>(blocks);
    for (std::size_t i = 0; i < classes; ++i) chi2 += (nu[i] - nb * pi[i]) * (nu[i] - nb * pi[i]) / (nb * pi[i]);
    return detail::clamp_p(special::igamc(static_cast<double>(classes - 1) / 2.0, chi2 / 2.0));
}

/// Test 9. Requires K >= 1000 * 2^L test blocks after Q initialization blocks.
inline double universal(Bits bits, std::size_t l = 7, std::size_t q = 1280) {
    static constexpr std::array<double, 17> expected{0,         0,         0,         0,         0,        0,
                                                     5.2177052, 6.1962507, 7.1836656, 8.1764248, 9.1723243,
                                                     10.170032, 11.168765, 12.168070, 13.167693, 14.167488,
                                                     15.167379};
    static constexpr std::array<double, 17> variance{0,     0,     0,     0,     0,     0,     2.954, 3.125, 3.238,
                                                     3.311, 3.356, 3.384, 3.401, 3.410, 3.416, 3.419, 3.421};
    const std::size_t n = bits.size();
    if (l < 6 || l > 16) throw DomainError("universal: L must lie in [6, 16]");
    const std::size_t total_blocks = n / l;
    const std::size_t min_k = std::size_t{1000} << l;
    detail::require_length(total_blocks >= q + min_k, "universal", "K >= 1000 * 2^L blocks");
    const std::size_t k = total_blocks - q;

    auto block_value = [&](std::size_t i) {
        std::size_t v = 0;
        for (std::size_t j = 0; j < l; ++j) v = (v << 1) | bits[i * l + j];
        return v;
    };
    std::vector<std::size_t> last(std::size_t{1} << l, 0);
    for (std::size_t i = 1; i <= q; ++i) last[block_value(i - 1)] = i;
    double sum = 0.0;
    for (std::size_t i = q + 1; i <= q + k; ++i) {
        const std::size_t v = block_value(i - 1);
        sum += std::log2(static_cast<double>(i - last[v]));
        last[v] = i;
    }
    const double kd = static_cast<double>(k);
    const double ld = static_cast<double>(l);
    const double fn = sum / kd;
    const double c = 0.7 - 0.8 / ld + (4.0 + 32.0 / ld) * std::pow(kd, -3.0 / ld) / 15.0;
    const double sigma = c * std::sqrt(variance[l] / kd);
    return detail::clamp_p(special::erfc(std::abs(fn - expected[l]) / (std::sqrt(2.0) * sigma)));
}

/**
 * Linear complexity of a binary sequence (Berlekamp-Massey over GF(2)).
 * Polynomials and a bit-reversed copy of the input are packed in 64-bit words
 * so each discrepancy is a masked parity over L/64 words.
 */
inline std::size_t linear_complexity_of(Bits s) {
    const std::size_t n = s.size();
    const std::size_t words = n / 64 + 3;
    std::vector<std::uint64_t> rev(words + 1, 0);  // rev bit j = s[n - 1 - j]
    for (std::size_t j = 0; j < n; ++j) {
        if (s[n - 1 - j]) rev[j >> 6] |= std::uint64_t{1} << (j & 63);
    }
    auto rev_word = [&](std::size_t pos) -> std::uint64_t {  // 64 bits of rev starting at bit pos
        const std::size_t w = pos >> 6;
        const unsigned b = pos & 63;
        if (w >= rev.size()) return 0;
        std::uint64_t lo = rev[w] >> b;
        if (b != 0 && w + 1 < rev.size()) lo |= rev[w + 1] << (64 - b);
        return lo;
    };
    std::vector<std::uint64_t> c(words, 0);
    std::vector<std::uint64_t> b(words, 0);
    std::vector<std::uint64_t> t(words, 0);
    c[0] = 1;
    b[0] = 1;
    std::size_t big_l = 0;
    std::size_t m_last = 0;  // N at the last length change, plus one
    bool have_last = false;
    for (std::size_t step = 0; step < n; ++step) {
        // d = sum_{i=0}^{L} c_i s_{step-i}; s_{step-i} = rev bit (n-1-step+i)
        const std::size_t base = n - 1 - step;
        const std::size_t used_words = big_l / 64 + 1;
        std::uint64_t acc = 0;
        for (std::size_t w = 0; w < used_words; ++w) {
            std::uint64_t cw = c[w];
            if (w == used_words - 1) {
                const unsigned bits_in_last = static_cast<unsigned>(big_l % 64) + 1;
                if (bits_in_last < 64) cw &= (std::uint64_t{1} << bits_in_last) - 1;
            }
            acc ^= cw & rev_word(base + 64 * w);
        }
        if (!(std::popcount(acc) & 1)) continue;
        const std::size_t shift = have_last ? step - (m_last - 1) : step + 1;
        const bool grow = 2 * big_l <= step;
        if (grow) t = c;
        const std::size_t ws = shift >> 6;
        const unsigned bs = shift & 63;
        for (std::size_t w = 0; w + ws < words; ++w) {
            std::uint64_t v = b[w] << bs;
            if (bs != 0 && w > 0) v |= b[w - 1] >> (64 - bs);
            c[w + ws] ^= v;
        }
        if (grow) {
            big_l = step + 1 - big_l;
            m_last = step + 1;
            have_last = true;
            b.swap(t);
        }
    }
    return big_l;
}

inline constexpr std::array<double, 7> kLinearComplexityClasses{0.010417, 0.03125, 0.125, 0.5, 0.25, 0.0625, 0.020833};

/// Class counts nu_0..nu_6 of the linear-complexity statistic T over the M-bit blocks.
inline std::array<double, 7> linear_complexity_counts(Bits bits, std::size_t m) {
    const std::size_t blocks = bits.size() / m;
    const double md = static_cast<double>(m);
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;  // (-1)^M
    const double mu = md / 2.0 + (9.0 - sign) / 36.0 - (md / 3.0 + 2.0 / 9.0) / std::exp2(md);
    std::array<double, 7> nu{};
    for (std::size_t j = 0; j < blocks; ++j) {
        const double lc = static_cast<double>(linear_complexity_of(bits.subspan(j * m, m)));
        const double t = sign * (lc - mu) + 2.0 / 9.0;
        std::size_t cls = 6;
        if (t <= -2.5) cls = 0;
        else if (t <= -1.5) cls = 1;
        else if (t <= -0.5) cls = 2;
        else if (t <= 0.5) cls = 3;
        else if (t <= 1.5) cls = 4;
        else if (t <= 2.5) cls = 5;
        nu[cls] += 1.0;
    }
    return nu;
}

/// Test 10.
inline double linear_complexity(Bits bits, std::size_t m = 1000) {
    const std::size_t n = bits.size();
    detail::require_length(n >= 1000000, "linear_complexity", "n >= 1e6");
    if (m < 500 || m > 5000) throw Inapplicable("linear_complexity: block length M must lie in [500, 5000]");
    const std::size_t blocks = n / m;
    detail::require_length(blocks >= 200, "linear_complexity", "at least 200 blocks");
    const auto nu = linear_complexity_counts(bits, m);
    double chi2 = 0.0;
    const double nb = static_cast<double>(blocks);
    for (std::size_t i = 0; i < 7; ++i) {
        const double e = nb * kLinearComplexityClasses[i];
        chi2 += (nu[i] - e) * (nu[i] - e) / e;
    }
    return detail::clamp_p(special::igamc(3.0, chi2 / 2.0));
}

namespace detail {

/// Counts of every length-`len` pattern over the n circular windows (first bit most significant).
inline std::vector<std::uint64_t> circular_pattern_counts(Bits bits, std::size_t len) {
    const std::size_t n = bits.size();
    std::vector<std::uint64_t> counts(std::size_t{1} << len, 0);
    if (len == 0) {
        counts[0] = n;
        return counts;
    }
    const std::uint32_t mask = (std::uint32_t{1} << len) - 1;
    std::uint32_t v = 0;
    for (std::size_t i = 0; i < n + len - 1; ++i) {
        v = ((v << 1) | bits[i % n]) & mask;
        if (i + 1 >= len) ++counts[v];
    }
    return counts;
}

/// Collapses length-`len` counts to length-`shorter` counts by summing over trailing bits.
inline std::vector<std::uint64_t> prefix_counts(const std::vector<std::uint64_t>& counts, std::size_t len,
                                                std::size_t shorter) {
    std::vector<std::uint64_t> out(std::size_t{1} << shorter, 0);
    const std::size_t drop = len - shorter;
    for (std::size_t p = 0; p < counts.size(); ++p) out[p >> drop] += counts[p];
    return out;
}

inline double psi_squared(const std::vector<std::uint64_t>& counts, std::size_t len, std::size_t n) {
    if (len == 0) return 0.0;
    double sum = 0.0;
    for (auto c : counts) sum += static_cast<double>(c) * static_cast<double>(c);
    const double nd = static_cast<double>(n);
    return std::exp2(static_cast<double>(len)) / nd * sum - nd;
}

}  // namespace detail

/// Test 11; returns {p1, p2}.
inline std::vector<double> serial(Bits bits, std::size_t m = 10) {
    const std::size_t n = bits.size();
    detail::require_length(n >= 100 && m + 2 < detail::floor_log2(n), "serial", "m < floor(log2 n) - 2");
    const auto cm = detail::circular_pattern_counts(bits, m);
    const auto cm1 = detail::prefix_counts(cm, m, m - 1);
    const auto cm2 = detail::prefix_counts(cm, m, m - 2);
    const double p0 = detail::psi_squared(cm, m, n);
    const double p1 = detail::psi_squared(cm1, m - 1, n);
    const double p2 = detail::psi_squared(cm2, m - 2, n);
    const double del1 = p0 - p1;
    const double del2 = p0 - 2.0 * p1 + p2;
    return {detail::clamp_p(special::igamc(std::exp2(static_cast<double>(m) - 2.0), del1 / 2.0)),
            detail::clamp_p(special::igamc(std::exp2(static_cast<double>(m) - 3.0), del2 / 2.0))};
}

/// Test 12.
inline double approximate_entropy(Bits bits, std::size_t m = 10) {
    const std::size_t n = bits.size();
    detail::require_length(n >= 100 && m + 5 < detail::floor_log2(n), "approximate_entropy",
                           "m < floor(log2 n) - 5");
    const auto c_hi = detail::circular_pattern_counts(bits, m + 1);
    const auto c_lo = detail::prefix_counts(c_hi, m + 1, m);
    const double nd = static_cast<double>(n);
    auto phi = [&](const std::vector<std::uint64_t>& counts) {
        double s = 0.0;
        for (auto c : counts) {
            if (c) {
                const double p = static_cast<double>(c) / nd;
                s += p * std::log(p);
            }
        }
        return s;
    };
    const double apen = phi(c_lo) - phi(c_hi);
    const double chi2 = 2.0 * nd * (std::log(2.0) - apen);
    return detail::clamp_p(special::igamc(std::exp2(static_cast<double>(m) - 1.0), chi2 / 2.0));
}

namespace detail {

inline double cusum_p(double z, double n) {
    const double sq = std::sqrt(n);
    double sum1 = 0.0;
    for (double k = std::floor((-n / z + 1.0) / 4.0); k <= std::floor((n / z - 1.0) / 4.0); k += 1.0) {
        sum1 += special::normal_cdf((4.0 * k + 1.0) * z / sq) - special::normal_cdf((4.0 * k - 1.0) * z / sq);
    }
    double sum2 = 0.0;
    for (double k = std::floor((-n / z - 3.0) / 4.0); k <= std::floor((n / z - 1.0) / 4.0); k += 1.0) {
        sum2 += special::normal_cdf((4.0 * k + 3.0) * z / sq) - special::normal_cdf((4.0 * k + 1.0) * z / sq);
    }
    return clamp_p(1.0 - sum1 + sum2);
}

}  // namespace detail

/// Test 13; returns {forward, backward}.
inline std::vector<double> cumulative_sums(Bits bits) {
    const std::size_t n = bits.size();
    detail::require_length(n >= 100, "cumulative_sums", "n >= 100");
    std::int64_t s = 0;
    std::int64_t z_fwd = 0;
    for (auto b : bits) {
        s += b ? 1 : -1;
        z_fwd = std::max<std::int64_t>(z_fwd, std::llabs(s));
    }
    s = 0;
    std::int64_t z_bwd = 0;
    for (std::size_t i = n; i-- > 0;) {
        s += bits[i] ? 1 : -1;
        z_bwd = std::max<std::int64_t>(z_bwd, std::llabs(s));
    }
    const double nd = static_cast<double>(n);
    return {detail::cusum_p(static_cast<double>(z_fwd), nd), detail::cusum_p(static_cast<double>(z_bwd), nd)};
}

/// Number of random-walk cycles J and the partial sums S_1..S_n.
struct Excursions {
    std::size_t cycles = 0;
    std::vector<std::int32_t> sums;
};

inline Excursions excursion_walk(Bits bits) {
    Excursions e;
    e.sums.resize(bits.size());
    std::int32_t s = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        s += bits[i] ? 1 : -1;
        e.sums[i] = s;
        if (s == 0) ++e.cycles;
    }
    if (!e.sums.empty() && e.sums.back() != 0) ++e.cycles;
    return e;
}

inline void require_cycles(std::size_t cycles, std::size_t n, const std::string& test) {
    const double needed = std::max(0.005 * std::sqrt(static_cast<double>(n)), 500.0);
    if (static_cast<double>(cycles) < needed) {
        throw Inapplicable(test + ": " + std::to_string(cycles) + " cycles, at least " +
                           std::to_string(static_cast<std::size_t>(needed)) + " needed");
    }
}

/// Test 14; one p-value per state x = -4..-1, 1..4.
inline std::vector<double> random_excursions(Bits bits) {
    const std::size_t n = bits.size();
    detail::require_length(n >= 1, "random_excursions", "n >= 1");
    const auto walk = excursion_walk(bits);
    require_cycles(walk.cycles, n, "random_excursions");
    static constexpr std::array<int, 8> states{-4, -3, -2, -1, 1, 2, 3, 4};
    // nu[state][k]: cycles with exactly k visits (k = 5 means >= 5)
    std::array<std::array<double, 6>, 8> nu{};
    std::array<int, 9> visits{};  // index x + 4
    auto close_cycle = [&] {
        for (std::size_t si = 0; si < states.size(); ++si) {
            const int v = visits[static_cast<std::size_t>(states[si] + 4)];
            nu[si][static_cast<std::size_t>(std::min(v, 5))] += 1.0;
        }
        visits.fill(0);
    };
    for (std::int32_t s : walk.sums) {
        if (s == 0) {
            close_cycle();
        } else if (s >= -4 && s <= 4) {
            ++visits[static_cast<std::size_t>(s + 4)];
        }
    }
    if (walk.sums.back() != 0) close_cycle();

    const double j = static_cast<double>(walk.cycles);
    std::vector<double> out;
    out.reserve(states.size());
    for (std::size_t si = 0; si < states.size(); ++si) {
        const double ax = std::abs(static_cast<double>(states[si]));
        const double r = 1.0 - 1.0 / (2.0 * ax);
        std::array<double, 6> pi{};
        pi[0] = r;
        for (int k = 1; k <= 4; ++k) pi[static_cast<std::size_t>(k)] = std::pow(r, k - 1) / (4.0 * ax * ax);
        pi[5] = std::pow(r, 4) / (2.0 * ax);
        double chi2 = 0.0;
        for (std::size_t k = 0; k < 6; ++k) chi2 += (nu[si][k] - j * pi[k]) * (nu[si][k] - j * pi[k]) / (j * pi[k]);
        out.push_back(detail::clamp_p(special::igamc(2.5, chi2 / 2.0)));
    }
    return out;
}

/// Test 15; one p-value per state x = -9..-1, 1..9.
inline std::vector<double> random_excursions_variant(Bits bits) {
    const std::size_t n = bits.size();
    detail::require_length(n >= 1, "random_excursions_variant", "n >= 1");
    const auto walk = excursion_walk(bits);
    require_cycles(walk.cycles, n, "random_excursions_variant");
    std::array<double, 19> xi{};  // index x + 9
    for (std::int32_t s : walk.sums) {
        if (s >= -9 && s <= 9) xi[static_cast<std::size_t>(s + 9)] += 1.0;
    }
    const double j = static_cast<double>(walk.cycles);
    std::vector<double> out;
    out.reserve(18);
    for (int x = -9; x <= 9; ++x) {
        if (x == 0) continue;
        const double ax = std::abs(static_cast<double>(x));
        const double v = xi[static_cast<std::size_t>(x + 9)];
        out.push_back(detail::clamp_p(special::erfc(std::abs(v - j) / std::sqrt(2.0 * j * (4.0 * ax - 2.0)))));
    }
    return out;
}

}  // namespace optrng::nist
