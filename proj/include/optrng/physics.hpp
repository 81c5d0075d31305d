#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "optrng/errors.hpp"
#include "optrng/random.hpp"

namespace optrng {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s, exact

// ---- photocount statistics ----

struct PhotocountHistogram {
    std::vector<std::uint64_t> bins;  ///< bins[k] = cycles with k photons
    std::uint64_t total_cycles = 0;
    double mean = 0.0;

    /// Pearson statistic against Poisson(mean); tail classes are pooled until each expects >= 5.
    struct PoissonFit {
        double chi_square = 0.0;
        std::size_t degrees_of_freedom = 0;
    };

    PoissonFit poisson_fit() const {
        PoissonFit fit;
        if (total_cycles == 0 || mean <= 0.0) return fit;
        const double n = static_cast<double>(total_cycles);
        std::vector<double> expected;
        std::vector<double> observed;
        double pk = std::exp(-mean);
        double cdf = 0.0;
        for (std::size_t k = 0;; ++k) {
            if (k > 0) pk *= mean / static_cast<double>(k);
            const double obs = k < bins.size() ? static_cast<double>(bins[k]) : 0.0;
            if (n * (1.0 - cdf - pk) < 5.0) {
                // close with the tail P(X >= k)
                double tail_obs = 0.0;
                for (std::size_t j = k; j < bins.size(); ++j) tail_obs += static_cast<double>(bins[j]);
                expected.push_back(n * (1.0 - cdf));
                observed.push_back(tail_obs);
                break;
            }
            expected.push_back(n * pk);
            observed.push_back(obs);
            cdf += pk;
        }
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (expected[i] > 0.0) fit.chi_square += (observed[i] - expected[i]) * (observed[i] - expected[i]) / expected[i];
        }
        // one parameter (the mean) is estimated from the data
        fit.degrees_of_freedom = expected.size() >= 2 ? expected.size() - 2 : 0;
        return fit;
    }

    void add(std::uint64_t photons, std::uint64_t times = 1) {
        if (photons >= bins.size()) bins.resize(photons + 1, 0);
        bins[photons] += times;
        total_cycles += times;
    }

    void finalize() {
        double weighted = 0.0;
        for (std::size_t k = 0; k < bins.size(); ++k) weighted += static_cast<double>(k) * static_cast<double>(bins[k]);
        mean = total_cycles == 0 ? 0.0 : weighted / static_cast<double>(total_cycles);
    }
};

inline PhotocountHistogram photocount_histogram(std::span<const std::uint64_t> per_cycle_counts) {
    PhotocountHistogram h;
    for (auto c : per_cycle_counts) h.add(c);
    h.finalize();
    return h;
}

/// Histogram of Poisson(mean) photon numbers over `cycles` clock cycles.
inline PhotocountHistogram simulate_photocounts(double mean, std::uint64_t cycles, std::uint64_t seed) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) throw DomainError("mean photon number must be >= 0");
    Xoshiro256pp rng(seed);
    PhotocountHistogram h;
    h.bins.assign(1, 0);
    for (std::uint64_t i = 0; i < cycles; ++i) h.add(rng.poisson(mean));
    h.finalize();
    return h;
}

/// Reference sample means of the three experimental sequence lengths (1e4, 1e6, 1e7 bits).
inline constexpr double kReferenceMeans[3] = {0.095, 0.105, 0.11};

// ---- Hong-Ou-Mandel dip ----

inline double sinc(double x) noexcept {
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}

struct HomParams {
    double c = 0.0;  ///< baseline coincidences
    double a = 0.0;  ///< dip amplitude (negative for a dip)
    double w = 0.0;  ///< width, metres
};

/// f(L) = C (1 + A sinc(L / w)).
inline double hom_model(double l, const HomParams& p) noexcept { return p.c * (1.0 + p.a * sinc(l / p.w)); }

struct HomPoint {
    double l = 0.0;       ///< path-length delay, metres
    double counts = 0.0;  ///< coincidences
};

struct SpectralWidth {
    double delta_omega = 0.0;   ///< Hz
    double delta_lambda = 0.0;  ///< metres
};

/// delta_omega = c / w, delta_lambda = lambda0^2 / (2 pi w).
inline SpectralWidth spectral_width(double w, double lambda0) {
    if (!(w > 0.0) || !(lambda0 > 0.0)) throw DomainError("spectral_width requires w > 0 and lambda0 > 0");
    return {kSpeedOfLight / w, lambda0 * lambda0 / (2.0 * std::numbers::pi * w)};
}

struct FitResult {
    HomParams params;
    double residual_rms = 0.0;
    std::size_t iterations = 0;
    bool converged = false;  ///< relative step fell below tolerance before the iteration cap
    SpectralWidth spectrum;
    double lambda0 = 0.0;
};

struct HomFitOptions {
    double tolerance = 1e-8;
    std::size_t max_iterations = 500;
    double lambda0 = 810e-9;
};

/**
 * Starting point: C from the outer fifth of the points by |L|, A from the
 * lowest point, w from the first baseline crossings either side of the dip.
 * Those sit at L = +-pi w, so w = (half their spacing) / pi.
 */
inline HomParams hom_initial_guess(const std::vector<HomPoint>& pts) {
    std::vector<HomPoint> sorted = pts;
    std::sort(sorted.begin(), sorted.end(), [](const auto& x, const auto& y) { return x.l < y.l; });

    std::vector<double> by_abs;
    by_abs.reserve(pts.size());
    for (const auto& p : pts) by_abs.push_back(std::abs(p.l));
    std::sort(by_abs.begin(), by_abs.end());
    const double wing_cut = by_abs[by_abs.size() - std::max<std::size_t>(1, by_abs.size() / 5)];
    double c = 0.0;
    std::size_t wing_n = 0;
    for (const auto& p : pts) {
        if (std::abs(p.l) >= wing_cut) {
            c += p.counts;
            ++wing_n;
        }
    }
    c /= static_cast<double>(wing_n);

    const auto lowest = std::min_element(sorted.begin(), sorted.end(),
                                         [](const auto& x, const auto& y) { return x.counts < y.counts; });
    const std::size_t centre = static_cast<std::size_t>(lowest - sorted.begin());
    const double a = c != 0.0 ? (lowest->counts - c) / c : -0.5;
    const double sign = a < 0.0 ? 1.0 : -1.0;  // side of the baseline the dip lies on

    auto crossing = [&](int dir) -> std::optional<double> {
        for (std::size_t i = centre;;) {
            const std::size_t j = dir > 0 ? i + 1 : i - 1;
            if ((dir > 0 && j >= sorted.size()) || (dir < 0 && i == 0)) return std::nullopt;
            const double yi = sign * (sorted[i].counts - c);
            const double yj = sign * (sorted[j].counts - c);
            if (yi < 0.0 && yj >= 0.0) {
                const double t = yi / (yi - yj);
                return sorted[i].l + t * (sorted[j].l - sorted[i].l);
            }
            i = j;
        }
    };
    const auto left = crossing(-1);
    const auto right = crossing(+1);
    double w = 0.0;
    if (left && right) {
        w = (*right - *left) / 2.0 / std::numbers::pi;
    } else if (left || right) {
        w = std::abs((left ? *left : *right) - lowest->l) / std::numbers::pi;
    }
    if (!(w > 0.0)) w = (sorted.back().l - sorted.front().l) / 20.0;
    return {c, a, w};
}

/// Levenberg-Marquardt fit of C (1 + A sinc(L/w)) with a central-difference Jacobian.
inline FitResult hom_fit(const std::vector<HomPoint>& pts, const HomFitOptions& opt = {}) {
    if (pts.size() < 4) throw InsufficientPoints("HOM fit needs at least 4 points");
    const auto [lo, hi] = std::minmax_element(pts.begin(), pts.end(), [](const auto& x, const auto& y) { return x.l < y.l; });
    if (!(hi->l > lo->l)) throw InsufficientPoints("HOM fit needs points at distinct delays");
    for (const auto& p : pts) {
        if (!std::isfinite(p.l) || !std::isfinite(p.counts)) throw DomainError("non-finite HOM data point");
    }

    // Parameters are scaled by the initial guess so all three are O(1).
    const HomParams guess = hom_initial_guess(pts);
    Eigen::Vector3d scale(guess.c != 0.0 ? std::abs(guess.c) : 1.0, guess.a != 0.0 ? std::abs(guess.a) : 1.0,
                          std::abs(guess.w));
    auto unpack = [&](const Eigen::Vector3d& x) { return HomParams{x[0] * scale[0], x[1] * scale[1], x[2] * scale[2]}; };
    const std::size_t m = pts.size();
    auto residuals = [&](const Eigen::Vector3d& x) {
        const HomParams p = unpack(x);
        Eigen::VectorXd r(static_cast<Eigen::Index>(m));
        for (std::size_t i = 0; i < m; ++i) r[static_cast<Eigen::Index>(i)] = hom_model(pts[i].l, p) - pts[i].counts;
        return r;
    };

    Eigen::Vector3d x(guess.c / scale[0], guess.a / scale[1], guess.w / scale[2]);
    Eigen::VectorXd r = residuals(x);
    double cost = r.squaredNorm();
    double mu = 1e-3;
    FitResult out;
    std::size_t it = 0;
    for (; it < opt.max_iterations; ++it) {
        Eigen::MatrixXd jac(static_cast<Eigen::Index>(m), 3);
        for (int k = 0; k < 3; ++k) {
            const double h = 1e-6 * std::max(1.0, std::abs(x[k]));
            Eigen::Vector3d xp = x;
            Eigen::Vector3d xm = x;
            xp[k] += h;
            xm[k] -= h;
            jac.col(k) = (residuals(xp) - residuals(xm)) / (2.0 * h);
        }
        const Eigen::Matrix3d jtj = jac.transpose() * jac;
        const Eigen::Vector3d g = jac.transpose() * r;

        bool accepted = false;
        Eigen::Vector3d step = Eigen::Vector3d::Zero();
        while (mu < 1e20) {
            Eigen::Matrix3d lhs = jtj;
            lhs.diagonal() += mu * jtj.diagonal().cwiseMax(1e-12);
            step = lhs.ldlt().solve(-g);
            const Eigen::Vector3d trial = x + step;
            const Eigen::VectorXd rt = residuals(trial);
            const double ct = rt.squaredNorm();
            if (std::isfinite(ct) && ct <= cost) {
                x = trial;
                r = rt;
                cost = ct;
                mu = std::max(mu / 3.0, 1e-12);
                accepted = true;
                break;
            }
            mu *= 4.0;
        }
        if (!accepted) {  // no downhill step at any damping: stationary point
            out.converged = true;
            break;
        }
        if (step.norm() <= opt.tolerance * (x.norm() + opt.tolerance)) {
            out.converged = true;
            ++it;
            break;
        }
    }

    HomParams p = unpack(x);
    p.w = std::abs(p.w);  // sinc is even in w
    if (!std::isfinite(p.c) || !std::isfinite(p.a) || !std::isfinite(p.w) || !(p.w > 0.0) || !std::isfinite(cost)) {
        throw FitDiverged("HOM fit left the finite parameter region");
    }
    out.params = p;
    out.iterations = it;
    out.residual_rms = std::sqrt(cost / static_cast<double>(m));
    out.lambda0 = opt.lambda0;
    out.spectrum = spectral_width(p.w, opt.lambda0);
    return out;
}

/// Synthetic dip sampled at `delays` with Gaussian noise of standard deviation noise_rel * C.
inline std::vector<HomPoint> synthetic_hom(const HomParams& truth, const std::vector<double>& delays, double noise_rel,
                                           std::uint64_t seed) {
    Xoshiro256pp rng(seed);
    std::vector<HomPoint> pts;
    pts.reserve(delays.size());
    for (double l : delays) {
        double y = hom_model(l, truth);
        if (noise_rel > 0.0) y += noise_rel * truth.c * rng.normal();
        pts.push_back({l, y});
    }
    return pts;
}

/// `count` equally spaced delays over [-half_span, half_span].
inline std::vector<double> linspace_delays(double half_span, std::size_t count) {
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = count == 1 ? 0.0 : -half_span + 2.0 * half_span * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    return out;
}

// ---- CSV ----

/// Parses "L,counts" rows; a non-numeric first row is treated as a header, '#' starts a comment.
inline std::vector<HomPoint> parse_hom_csv(std::string_view text) {
    std::vector<HomPoint> pts;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw MalformedFile("line " + std::to_string(lineno) + ": expected L,counts");
        try {
            std::size_t used_l = 0;
            std::size_t used_c = 0;
            const std::string ls = line.substr(0, comma);
            const std::string cs = line.substr(comma + 1);
            const double l = std::stod(ls, &used_l);
            const double c = std::stod(cs, &used_c);
            if (ls.find_first_not_of(" \t\r", used_l) != std::string::npos ||
                cs.find_first_not_of(" \t\r", used_c) != std::string::npos) {
                throw std::invalid_argument("trailing text");
            }
            pts.push_back({l, c});
        } catch (const std::exception&) {
            if (!header_seen && pts.empty()) {  // header on the first data line
                header_seen = true;
                continue;
            }
            throw MalformedFile("line " + std::to_string(lineno) + ": not a numeric L,counts pair");
        }
    }
    return pts;
}

inline std::string hom_curve_csv(const FitResult& fit, double l_min, double l_max, std::size_t samples = 201) {
    std::ostringstream os;
    os.precision(10);
    os << "L,fit\n";
    for (std::size_t i = 0; i < samples; ++i) {
        const double l = samples == 1 ? l_min
                                      : l_min + (l_max - l_min) * static_cast<double>(i) / static_cast<double>(samples - 1);
        os << l << ',' << hom_model(l, fit.params) << '\n';
    }
    return os.str();
}

}  // namespace optrng
