#ifndef QMRI_SIGNAL_MODEL_HPP
#define QMRI_SIGNAL_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "qmri/array.hpp"
#include "qmri/errors.hpp"
#include "qmri/types.hpp"

namespace qmri {

// Spoiled-GRE steady-state magnitude:
//   f = z0 * sin(theta) * (1 - E) / (1 - cos(theta) E) * exp(-te/t2s),
//   E = exp(-TR/t1).
inline double gre_signal(double z0, double t1_ms, double t2s_ms, double theta_deg,
                         double te_ms, double tr_ms) {
    if (!(t1_ms > 0) || !(t2s_ms > 0) || !(tr_ms > 0))
        throw DataError("gre_signal: t1, t2s and TR must be positive");
    if (!(z0 >= 0)) throw DataError("gre_signal: z0 must be >= 0");
    if (!(theta_deg > 0 && theta_deg <= 90)) throw DataError("gre_signal: flip angle outside (0, 90]");
    if (!(te_ms >= 0)) throw DataError("gre_signal: te must be >= 0");
    const double th = theta_deg * M_PI / 180.0;
    const double e1 = std::exp(-tr_ms / t1_ms);
    return z0 * std::sin(th) * (1.0 - e1) / (1.0 - std::cos(th) * e1) *
           std::exp(-te_ms / t2s_ms);
}

struct GridSpec {
    double min = 100, max = 5000;
    std::size_t count = 256;
    bool log_spaced = true;

    std::vector<double> values() const {
        if (count < 1 || !(min > 0) || !(max > min))
            throw DataError("grid: need 0 < min < max and count >= 1");
        std::vector<double> v(count);
        if (count == 1) {
            v[0] = min;
            return v;
        }
        for (std::size_t k = 0; k < count; ++k) {
            const double t = double(k) / double(count - 1);
            v[k] = log_spaced ? min * std::pow(max / min, t) : min + (max - min) * t;
        }
        return v;
    }
};

inline GridSpec default_t1_grid() { return {100, 5000, 256, true}; }
inline GridSpec default_t2s_grid() { return {1, 200, 256, true}; }

// Discretized signal atoms over (t1, t2s) grid pairs. Eq-separable storage:
// atom(a, b)[i*J + j] = sat[a][i] * decay[b][j], with z0 = 1. The flattened
// (i-major, j-minor) atom is materialized on demand.
struct Dictionary {
    std::vector<double> t1_grid;
    std::vector<double> t2s_grid;
    std::size_t I = 0, J = 0;
    double flip_scale = 1.0;
    // sat[a*I + i]: T1 saturation response at flip angle i for t1_grid[a]
    // decay[b*J + j]: T2* decay at echo j for t2s_grid[b]
    std::vector<double> sat;
    std::vector<double> decay;
    std::vector<double> sat2_sum;    // per t1 index, sum_i sat^2
    std::vector<double> decay2_sum;  // per t2s index, sum_j decay^2

    double sat_at(std::size_t a, std::size_t i) const { return sat[a * I + i]; }
    double decay_at(std::size_t b, std::size_t j) const { return decay[b * J + j]; }

    std::size_t atom_count() const { return t1_grid.size() * t2s_grid.size(); }

    std::vector<double> atom(std::size_t a, std::size_t b) const {
        std::vector<double> g(I * J);
        for (std::size_t i = 0; i < I; ++i)
            for (std::size_t j = 0; j < J; ++j) g[i * J + j] = sat_at(a, i) * decay_at(b, j);
        return g;
    }
};

inline Dictionary build_dictionary(const std::vector<double>& t1_grid,
                                   const std::vector<double>& t2s_grid,
                                   const AcqParams& acq, double flip_scale_value = 1.0) {
    if (t1_grid.empty() || t2s_grid.empty()) throw DataError("dictionary: empty grid");
    for (std::size_t k = 1; k < t1_grid.size(); ++k)
        if (!(t1_grid[k] > t1_grid[k - 1])) throw DataError("dictionary: t1 grid not increasing");
    for (std::size_t k = 1; k < t2s_grid.size(); ++k)
        if (!(t2s_grid[k] > t2s_grid[k - 1])) throw DataError("dictionary: t2s grid not increasing");

    Dictionary d;
    d.t1_grid = t1_grid;
    d.t2s_grid = t2s_grid;
    d.I = acq.n_fa();
    d.J = acq.n_echo();
    d.flip_scale = flip_scale_value;
    d.sat.resize(t1_grid.size() * d.I);
    d.decay.resize(t2s_grid.size() * d.J);
    d.sat2_sum.assign(t1_grid.size(), 0.0);
    d.decay2_sum.assign(t2s_grid.size(), 0.0);

    for (std::size_t a = 0; a < t1_grid.size(); ++a) {
        const double e1 = std::exp(-acq.tr_ms / t1_grid[a]);
        for (std::size_t i = 0; i < d.I; ++i) {
            const double th = flip_scale_value * acq.flip_angles_deg[i] * M_PI / 180.0;
            const double s = std::sin(th) * (1.0 - e1) / (1.0 - std::cos(th) * e1);
            d.sat[a * d.I + i] = s;
            d.sat2_sum[a] += s * s;
        }
    }
    for (std::size_t b = 0; b < t2s_grid.size(); ++b) {
        for (std::size_t j = 0; j < d.J; ++j) {
            const double e = std::exp(-acq.echo_times_ms[j] / t2s_grid[b]);
            d.decay[b * d.J + j] = e;
            d.decay2_sum[b] += e * e;
        }
    }
    return d;
}

struct VoxelFit {
    double z0 = 0;
    double t1 = 0;
    double t2s = 0;
    double residual = 0;
    bool degenerate = false;
};

namespace detail {

// weighted objective sum_ij w_ij (z0 * sat_i * decay_j - m_ij)^2
inline double fit_objective(const Dictionary& d, const double* m, const double* w,
                            double z0, std::size_t a, std::size_t b) {
    double s = 0;
    for (std::size_t i = 0; i < d.I; ++i) {
        const double sa = d.sat_at(a, i);
        for (std::size_t j = 0; j < d.J; ++j) {
            const double diff = z0 * sa * d.decay_at(b, j) - m[i * d.J + j];
            s += (w ? w[i * d.J + j] : 1.0) * diff * diff;
        }
    }
    return s;
}

// closed-form z0 given a grid pair: z0 = sum w g m / sum w g^2, clipped at 0
inline double fit_z0(const Dictionary& d, const double* m, const double* w,
                     std::size_t a, std::size_t b) {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < d.I; ++i) {
        const double sa = d.sat_at(a, i);
        for (std::size_t j = 0; j < d.J; ++j) {
            const double g = sa * d.decay_at(b, j);
            const double ww = w ? w[i * d.J + j] : 1.0;
            num += ww * g * m[i * d.J + j];
            den += ww * g * g;
        }
    }
    return den > 0 ? std::max(0.0, num / den) : 0.0;
}

inline double profiled_objective(const Dictionary& d, const double* m, const double* w,
                                 std::size_t a, std::size_t b) {
    return fit_objective(d, m, w, fit_z0(d, m, w, a, b), a, b);
}

struct StartCand {
    double obj;
    std::size_t a, b;
    bool operator<(const StartCand& o) const {
        if (obj != o.obj) return obj < o.obj;
        return a != o.a ? a < o.a : b < o.b;  // deterministic tie break
    }
};

// spec'd alternation from a given start: closed-form z0, 1-D t1 search at
// fixed (z0, t2s), 1-D t2s search at fixed (z0, t1), until stationary
inline VoxelFit alternate(const Dictionary& d, const double* m, const double* w,
                          std::size_t a, std::size_t b) {
    const std::size_t A = d.t1_grid.size(), B = d.t2s_grid.size();
    double z0 = 0;
    for (int round = 0; round < 20; ++round) {
        const std::size_t prev_a = a, prev_b = b;
        z0 = fit_z0(d, m, w, a, b);
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t ca = 0; ca < A; ++ca) {
            const double obj = fit_objective(d, m, w, z0, ca, b);
            if (obj < best) {
                best = obj;
                a = ca;
            }
        }
        z0 = fit_z0(d, m, w, a, b);
        best = std::numeric_limits<double>::infinity();
        for (std::size_t cb = 0; cb < B; ++cb) {
            const double obj = fit_objective(d, m, w, z0, a, cb);
            if (obj < best) {
                best = obj;
                b = cb;
            }
        }
        if (a == prev_a && b == prev_b) break;
    }
    z0 = fit_z0(d, m, w, a, b);
    VoxelFit f;
    f.z0 = z0;
    f.t1 = d.t1_grid[a];
    f.t2s = d.t2s_grid[b];
    f.residual = fit_objective(d, m, w, z0, a, b);
    return f;
}

}  // namespace detail

// Alternating MAP fit of one voxel: closed-form z0, then exhaustive 1-D
// searches over the t1 and t2s grids, repeated until the grid pair is
// stationary (at most 20 rounds). The (t1, t2s) surface has a shallow
// diagonal valley where single-coordinate moves stall, so the alternation is
// seeded by a coarse-to-fine multi-start scan (a few percent of the grid)
// and run from the best handful of starts. `weights`, when given, holds one
// weight per (i, j) term.
inline VoxelFit fit_voxel(const std::vector<double>& magnitudes, const Dictionary& dict,
                          const std::vector<double>* weights = nullptr) {
    const std::size_t IJ = dict.I * dict.J;
    if (magnitudes.size() != IJ) throw DataError("fit_voxel: magnitude count mismatch");
    if (weights && weights->size() != IJ) throw DataError("fit_voxel: weight count mismatch");
    for (double x : magnitudes)
        if (!std::isfinite(x) || x < 0) throw DataError("fit_voxel: magnitudes must be finite and >= 0");
    const double* m = magnitudes.data();
    const double* w = weights ? weights->data() : nullptr;

    const std::size_t A = dict.t1_grid.size(), B = dict.t2s_grid.size();
    bool all_zero = true;
    for (double x : magnitudes)
        if (x != 0) {
            all_zero = false;
            break;
        }
    if (all_zero) {
        VoxelFit f;
        f.degenerate = true;
        f.t1 = dict.t1_grid[A / 2];
        f.t2s = dict.t2s_grid[B / 2];
        return f;
    }

    constexpr std::size_t kTop = 8;

    // coarse lattice scan on the z0-profiled objective
    std::vector<detail::StartCand> cand;
    const std::size_t sa = std::max<std::size_t>(1, A / 16);
    const std::size_t sb = std::max<std::size_t>(1, B / 16);
    for (std::size_t ca = 0; ca < A; ca += sa)
        for (std::size_t cb = 0; cb < B; cb += sb)
            cand.push_back({detail::profiled_objective(dict, m, w, ca, cb), ca, cb});
    std::sort(cand.begin(), cand.end());
    if (cand.size() > kTop) cand.resize(kTop);

    // zoom: halve the stride, explore the 3x3 neighborhood of each survivor
    for (std::size_t stride = std::max(sa, sb) / 2; stride >= 1; stride /= 2) {
        std::vector<detail::StartCand> next = cand;
        for (const auto& c : cand)
            for (long da = -1; da <= 1; ++da)
                for (long db = -1; db <= 1; ++db) {
                    const long na = long(c.a) + da * long(stride);
                    const long nb = long(c.b) + db * long(stride);
                    if (na < 0 || nb < 0 || na >= long(A) || nb >= long(B)) continue;
                    next.push_back({detail::profiled_objective(dict, m, w, std::size_t(na),
                                                               std::size_t(nb)),
                                    std::size_t(na), std::size_t(nb)});
                }
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end(),
                               [](const auto& x, const auto& y) {
                                   return x.a == y.a && x.b == y.b;
                               }),
                   next.end());
        if (next.size() > kTop) next.resize(kTop);
        cand = std::move(next);
        if (stride == 1) break;
    }

    VoxelFit best;
    best.residual = std::numeric_limits<double>::infinity();
    const std::size_t starts = std::min<std::size_t>(4, cand.size());
    for (std::size_t k = 0; k < starts; ++k) {
        VoxelFit f = detail::alternate(dict, m, w, cand[k].a, cand[k].b);
        if (f.residual < best.residual) best = f;
    }
    return best;
}

// Global grid search used as the test oracle and for small problems:
// evaluates every (t1, t2s) pair with closed-form z0.
inline VoxelFit fit_voxel_exhaustive(const std::vector<double>& magnitudes,
                                     const Dictionary& dict,
                                     const std::vector<double>* weights = nullptr) {
    const std::size_t IJ = dict.I * dict.J;
    if (magnitudes.size() != IJ) throw DataError("fit_voxel_exhaustive: magnitude count mismatch");
    const double* m = magnitudes.data();
    const double* w = weights ? weights->data() : nullptr;
    const std::size_t A = dict.t1_grid.size(), B = dict.t2s_grid.size();

    bool all_zero = true;
    for (double x : magnitudes)
        if (x != 0) all_zero = false;
    if (all_zero) {
        VoxelFit f;
        f.degenerate = true;
        f.t1 = dict.t1_grid[A / 2];
        f.t2s = dict.t2s_grid[B / 2];
        return f;
    }

    VoxelFit best;
    double bestobj = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < A; ++a)
        for (std::size_t b = 0; b < B; ++b) {
            const double z = detail::fit_z0(dict, m, w, a, b);
            const double obj = detail::fit_objective(dict, m, w, z, a, b);
            if (obj < bestobj) {
                bestobj = obj;
                best = {z, dict.t1_grid[a], dict.t2s_grid[b], obj, false};
            }
        }
    return best;
}

// Flip-scale handling: the scale map is quantized to `bins` values over its
// observed range and one dictionary is built per bin.
struct DictionarySet {
    std::vector<Dictionary> dicts;
    std::vector<double> bin_centers;
    double lo = 1.0, hi = 1.0;

    const Dictionary& for_scale(double s) const {
        if (dicts.size() == 1) return dicts[0];
        const double t = (s - lo) / (hi - lo);
        const std::size_t k = std::min(dicts.size() - 1,
                                       std::size_t(std::max(0.0, t * double(dicts.size()))));
        return dicts[k];
    }
};

inline DictionarySet build_dictionary_set(const std::vector<double>& t1_grid,
                                          const std::vector<double>& t2s_grid,
                                          const AcqParams& acq, std::size_t bins = 32) {
    DictionarySet set;
    if (!acq.flip_scale) {
        set.dicts.push_back(build_dictionary(t1_grid, t2s_grid, acq, 1.0));
        set.bin_centers.push_back(1.0);
        return set;
    }
    const auto [mn, mx] = std::minmax_element(acq.flip_scale->v.begin(), acq.flip_scale->v.end());
    set.lo = *mn;
    set.hi = *mx;
    if (set.hi - set.lo < 1e-12) {
        set.dicts.push_back(build_dictionary(t1_grid, t2s_grid, acq, set.lo));
        set.bin_centers.push_back(set.lo);
        return set;
    }
    for (std::size_t k = 0; k < bins; ++k) {
        const double c = set.lo + (set.hi - set.lo) * (double(k) + 0.5) / double(bins);
        set.dicts.push_back(build_dictionary(t1_grid, t2s_grid, acq, c));
        set.bin_centers.push_back(c);
    }
    return set;
}

// Voxel-wise fit over a whole stack of magnitudes. Voxels are independent,
// so the result cannot depend on visit order.
inline QuantMaps fit_maps(const std::vector<RealMap>& stack_magnitudes,
                          const DictionarySet& dicts, const Mask& mask,
                          const AcqParams& acq,
                          const std::vector<double>* weights = nullptr) {
    const Dictionary& d0 = dicts.dicts.front();
    if (stack_magnitudes.size() != d0.I * d0.J)
        throw DataError("fit_maps: stack count != I*J");
    for (const auto& m : stack_magnitudes)
        if (m.rows != mask.rows || m.cols != mask.cols) throw DataError("fit_maps: shape mismatch");

    QuantMaps maps;
    maps.z0 = RealMap(mask.rows, mask.cols);
    maps.t1 = RealMap(mask.rows, mask.cols);
    maps.t2s = RealMap(mask.rows, mask.cols);
    maps.mask = mask;
    maps.degenerate = Mask(mask.rows, mask.cols);

    const std::size_t IJ = stack_magnitudes.size();
    std::vector<double> m(IJ);
    for (std::size_t n = 0; n < mask.size(); ++n) {
        if (!mask.v[n]) continue;
        for (std::size_t k = 0; k < IJ; ++k) m[k] = stack_magnitudes[k].v[n];
        const Dictionary& d =
            acq.flip_scale ? dicts.for_scale(acq.flip_scale->v[n]) : d0;
        const VoxelFit f = fit_voxel(m, d, weights);
        maps.z0.v[n] = f.z0;
        maps.t1.v[n] = f.t1;
        maps.t2s.v[n] = f.t2s;
        maps.degenerate.v[n] = f.degenerate ? 1 : 0;
    }
    return maps;
}

}  // namespace qmri

#endif
