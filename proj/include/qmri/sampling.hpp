#ifndef QMRI_SAMPLING_HPP
#define QMRI_SAMPLING_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "qmri/array.hpp"
#include "qmri/errors.hpp"
#include "qmri/rng.hpp"

namespace qmri {

// k-space mask generation in the 2-D phase-encode plane. Sampling lives
// inside the centered elliptical support (semi-axes rows/2, cols/2); the
// central calib x calib square is always fully sampled. "rate" counts
// sampled locations as a fraction of the support.

enum class Pattern { VD, PD };
enum class Scheme { U1, U2, U3, U4 };

inline std::string pattern_name(Pattern p) { return p == Pattern::VD ? "vd" : "pd"; }

inline std::string scheme_name(Scheme s) {
    switch (s) {
        case Scheme::U1: return "u1";
        case Scheme::U2: return "u2";
        case Scheme::U3: return "u3";
        default: return "u4";
    }
}

inline Pattern parse_pattern(const std::string& s) {
    if (s == "vd") return Pattern::VD;
    if (s == "pd") return Pattern::PD;
    throw UsageError("pattern must be vd or pd");
}

inline Scheme parse_scheme(const std::string& s) {
    if (s == "u1") return Scheme::U1;
    if (s == "u2") return Scheme::U2;
    if (s == "u3") return Scheme::U3;
    if (s == "u4") return Scheme::U4;
    throw UsageError("scheme must be u1, u2, u3 or u4");
}

struct MaskParams {
    std::size_t rows = 0, cols = 0;
    double rate = 0.15;
    std::size_t calib = 24;
    std::uint64_t seed = 0;
    Pattern pattern = Pattern::VD;
    double vd_exponent = 4.0;
};

inline bool in_ellipse(std::size_t r, std::size_t c, std::size_t rows, std::size_t cols) {
    const double dy = (double(r) - double(rows) / 2.0) / (double(rows) / 2.0);
    const double dx = (double(c) - double(cols) / 2.0) / (double(cols) / 2.0);
    return dy * dy + dx * dx <= 1.0;
}

inline Mask elliptical_support(std::size_t rows, std::size_t cols) {
    Mask m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            m(r, c) = in_ellipse(r, c, rows, cols) ? 1 : 0;
    return m;
}

inline bool in_calib(std::size_t r, std::size_t c, const MaskParams& p) {
    const std::size_t r0 = p.rows / 2 - p.calib / 2;
    const std::size_t c0 = p.cols / 2 - p.calib / 2;
    return r >= r0 && r < r0 + p.calib && c >= c0 && c < c0 + p.calib;
}

struct MaskInfo {
    std::size_t target = 0;
    std::size_t achieved = 0;
    std::size_t support = 0;
    double pd_radius = 0;  // final Poisson-disk exclusion radius (VD: 0)
};

namespace detail {

struct Candidate {
    std::size_t r, c;
    double key;  // VD: exponential race key; PD: permutation key
};

inline void pd_dart_throw(const std::vector<Candidate>& order, double radius,
                          std::size_t rows, std::size_t cols,
                          std::vector<std::uint8_t>& accepted) {
    accepted.assign(order.size(), 0);
    const double r2 = radius * radius;
    const std::size_t cell = std::max<std::size_t>(1, std::size_t(std::ceil(radius)));
    const std::size_t gr = (rows + cell - 1) / cell, gc = (cols + cell - 1) / cell;
    std::vector<std::vector<std::uint32_t>> grid(gr * gc);
    for (std::size_t idx = 0; idx < order.size(); ++idx) {
        const auto& p = order[idx];
        const std::size_t br = p.r / cell, bc = p.c / cell;
        bool ok = true;
        const std::size_t rlo = br > 0 ? br - 1 : 0, rhi = std::min(br + 1, gr - 1);
        const std::size_t clo = bc > 0 ? bc - 1 : 0, chi = std::min(bc + 1, gc - 1);
        for (std::size_t b = rlo; b <= rhi && ok; ++b)
            for (std::size_t d = clo; d <= chi && ok; ++d)
                for (std::uint32_t q : grid[b * gc + d]) {
                    const double dr = double(p.r) - double(order[q].r);
                    const double dc = double(p.c) - double(order[q].c);
                    if (dr * dr + dc * dc < r2) {
                        ok = false;
                        break;
                    }
                }
        if (ok) {
            accepted[idx] = 1;
            grid[br * gc + bc].push_back(std::uint32_t(idx));
        }
    }
}

}  // namespace detail

inline Mask gen_mask(const MaskParams& p, MaskInfo* info = nullptr) {
    if (p.rows < 2 || p.cols < 2) throw DataError("mask: shape too small");
    if (!(p.rate > 0.0 && p.rate <= 1.0)) throw DataError("mask: rate outside (0, 1]");
    if (p.calib > std::min(p.rows, p.cols)) throw DataError("mask: calib larger than shape");

    Mask mask(p.rows, p.cols);
    std::size_t support = 0, calib_count = 0;
    std::vector<detail::Candidate> free_pts;  // support minus calibration
    for (std::size_t r = 0; r < p.rows; ++r)
        for (std::size_t c = 0; c < p.cols; ++c) {
            if (!in_ellipse(r, c, p.rows, p.cols)) {
                if (p.calib && in_calib(r, c, p))
                    throw DataError("mask: calibration square leaves the elliptical support");
                continue;
            }
            ++support;
            if (p.calib && in_calib(r, c, p)) {
                mask(r, c) = 1;
                ++calib_count;
            } else {
                free_pts.push_back({r, c, 0.0});
            }
        }

    const std::size_t target = std::size_t(std::llround(p.rate * double(support)));
    if (target < calib_count)
        throw DataError("mask: rate " + std::to_string(p.rate) +
                        " infeasible, calibration alone exceeds it");
    std::size_t want = target - calib_count;
    if (want > free_pts.size()) throw DataError("mask: rate exceeds available support");

    Rng rng(p.seed);
    if (p.pattern == Pattern::VD) {
        // center-weighted sampling without replacement via exponential race:
        // smaller -log(u)/w wins, w = (1 - r/r_max)^q
        for (auto& cand : free_pts) {
            const double dy = (double(cand.r) - double(p.rows) / 2.0) / (double(p.rows) / 2.0);
            const double dx = (double(cand.c) - double(p.cols) / 2.0) / (double(p.cols) / 2.0);
            const double rad = std::min(1.0, std::sqrt(dy * dy + dx * dx));
            const double w = std::pow(1.0 - rad, p.vd_exponent) + 1e-12;
            double u = rng.uniform();
            while (u <= 0.0) u = rng.uniform();
            cand.key = -std::log(u) / w;
        }
        std::nth_element(free_pts.begin(), free_pts.begin() + std::ptrdiff_t(want),
                         free_pts.end(),
                         [](const auto& a, const auto& b) { return a.key < b.key; });
        for (std::size_t i = 0; i < want; ++i) mask(free_pts[i].r, free_pts[i].c) = 1;
        if (info) *info = {target, calib_count + want, support, 0.0};
    } else {
        // dart throwing over a seeded permutation; bisect the exclusion
        // radius until the accept count reaches the target
        for (auto& cand : free_pts) cand.key = rng.uniform();
        std::sort(free_pts.begin(), free_pts.end(),
                  [](const auto& a, const auto& b) {
                      if (a.key != b.key) return a.key < b.key;
                      return a.r != b.r ? a.r < b.r : a.c < b.c;
                  });
        std::vector<std::uint8_t> accepted, best;
        double lo = 0.5, hi = std::sqrt(double(p.rows * p.rows + p.cols * p.cols));
        // adjacent pixels are 1 apart, so rho = 0.5 accepts every candidate
        // and the bisection always starts from a feasible accept set
        detail::pd_dart_throw(free_pts, lo, p.rows, p.cols, accepted);
        std::vector<std::uint8_t> init = accepted;
        double best_rho = lo;
        std::size_t best_count =
            std::size_t(std::count(init.begin(), init.end(), std::uint8_t(1)));
        best = init;
        for (int it = 0; it < 48; ++it) {
            const double rho = 0.5 * (lo + hi);
            detail::pd_dart_throw(free_pts, rho, p.rows, p.cols, accepted);
            const std::size_t cnt =
                std::size_t(std::count(accepted.begin(), accepted.end(), std::uint8_t(1)));
            if (cnt >= want) {
                if (rho > best_rho) {
                    best = accepted;
                    best_rho = rho;
                    best_count = cnt;
                }
                lo = rho;
            } else {
                hi = rho;
            }
            if (hi - lo < 1e-9) break;
        }
        // drop random accepted points down to the exact target; the
        // min-distance property survives deletion
        std::size_t excess = best_count - want;
        while (excess > 0) {
            const std::size_t k = std::size_t(rng.below(best.size()));
            if (best[k]) {
                best[k] = 0;
                --excess;
            }
        }
        for (std::size_t i = 0; i < best.size(); ++i)
            if (best[i]) mask(free_pts[i].r, free_pts[i].c) = 1;
        if (info) *info = {target, calib_count + want, support, best_rho};
    }
    return mask;
}

struct SchemeMasks {
    Scheme scheme = Scheme::U4;
    std::size_t I = 0, J = 0;
    std::vector<Mask> masks;  // index i*J + j

    Mask& at(std::size_t i, std::size_t j) { return masks[i * J + j]; }
    const Mask& at(std::size_t i, std::size_t j) const { return masks[i * J + j]; }
};

inline std::uint64_t scheme_seed(Scheme s, std::uint64_t base, std::size_t i, std::size_t j) {
    switch (s) {
        case Scheme::U1: return base ^ hash_combine(0, i, j);
        case Scheme::U2: return base ^ hash_combine(0, i);
        case Scheme::U3: return base ^ hash_combine(0, j);
        default: return base;
    }
}

inline SchemeMasks gen_scheme(Scheme scheme, std::size_t I, std::size_t J,
                              const MaskParams& base) {
    if (I < 1 || J < 1) throw DataError("scheme: need I, J >= 1");
    SchemeMasks out{scheme, I, J, {}};
    out.masks.reserve(I * J);
    for (std::size_t i = 0; i < I; ++i)
        for (std::size_t j = 0; j < J; ++j) {
            // identical seeds must give identical masks, so reuse where the
            // scheme repeats a pattern
            if (scheme == Scheme::U2 && j > 0) {
                out.masks.push_back(out.at(i, 0));
                continue;
            }
            if (scheme == Scheme::U3 && i > 0) {
                out.masks.push_back(out.at(0, j));
                continue;
            }
            if (scheme == Scheme::U4 && (i > 0 || j > 0)) {
                out.masks.push_back(out.at(0, 0));
                continue;
            }
            MaskParams p = base;
            p.seed = scheme_seed(scheme, base.seed, i, j);
            out.masks.push_back(gen_mask(p));
        }
    return out;
}

struct CoverageReport {
    std::size_t support = 0;
    std::vector<double> rates;                  // per mask, of support
    double union_rate = 0;                      // of support
    std::vector<std::vector<double>> overlap;   // pairwise |a&b| / support
};

inline CoverageReport coverage_stats(const std::vector<Mask>& masks) {
    if (masks.empty()) throw DataError("coverage: empty mask set");
    for (const Mask& m : masks)
        if (!m.same_shape(masks[0])) throw DataError("coverage: shape mismatch");
    CoverageReport rep;
    rep.support = popcount(elliptical_support(masks[0].rows, masks[0].cols));
    const double S = double(rep.support);
    Mask uni(masks[0].rows, masks[0].cols);
    for (const Mask& m : masks) {
        rep.rates.push_back(double(popcount(m)) / S);
        for (std::size_t n = 0; n < uni.size(); ++n) uni.v[n] |= m.v[n];
    }
    rep.union_rate = double(popcount(uni)) / S;
    rep.overlap.assign(masks.size(), std::vector<double>(masks.size(), 0.0));
    for (std::size_t a = 0; a < masks.size(); ++a)
        for (std::size_t b = 0; b < masks.size(); ++b) {
            std::size_t both = 0;
            for (std::size_t n = 0; n < masks[a].size(); ++n)
                both += (masks[a].v[n] && masks[b].v[n]);
            rep.overlap[a][b] = double(both) / S;
        }
    return rep;
}

}  // namespace qmri

#endif
