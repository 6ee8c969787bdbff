#ifndef QMRI_METRICS_HPP
#define QMRI_METRICS_HPP

#include <cmath>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "qmri/array.hpp"
#include "qmri/errors.hpp"
#include "qmri/types.hpp"

namespace qmri {

// ||(est - ref) . mask||_2 / ||ref . mask||_2
inline double nrmse(const RealMap& est, const RealMap& ref, const Mask& mask) {
    if (!est.same_shape(ref) || est.rows != mask.rows || est.cols != mask.cols)
        throw DataError("nrmse: shape mismatch");
    double num = 0, den = 0;
    for (std::size_t n = 0; n < est.size(); ++n) {
        if (!mask.v[n]) continue;
        const double d = est.v[n] - ref.v[n];
        num += d * d;
        den += ref.v[n] * ref.v[n];
    }
    if (den == 0) throw DataError("nrmse: reference is zero on the mask");
    return std::sqrt(num / den);
}

// R2* = 1/T2*, reported in 1/s (t2s is in ms); clamped to [0, 1000] 1/s,
// zero off-mask. The clamp guards the near-zero end of the t2s grid.
inline RealMap r2star(const QuantMaps& maps) {
    RealMap r(maps.t2s.rows, maps.t2s.cols);
    for (std::size_t n = 0; n < r.size(); ++n) {
        if (!maps.mask.v[n]) continue;
        const double t2s = maps.t2s.v[n];
        const double val = t2s > 0 ? 1000.0 / t2s : 1000.0;
        r.v[n] = std::min(1000.0, std::max(0.0, val));
    }
    return r;
}

// 8-bit binary portable graymap with linear windowing over [lo, hi].
inline void render_pgm(const RealMap& map, const std::string& path, double lo, double hi) {
    if (!(hi > lo)) throw DataError("render: need hi > lo");
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("render: cannot open " + path);
    f << "P5\n" << map.cols << " " << map.rows << "\n255\n";
    for (double v : map.v) {
        double t = (v - lo) / (hi - lo);
        t = std::min(1.0, std::max(0.0, t));
        const int g = int(std::lround(t * 255.0));
        f.put(char(g));
    }
    if (!f) throw DataError("render: short write to " + path);
}

inline void render_error_pgm(const RealMap& est, const RealMap& ref, const Mask& mask,
                             const std::string& path, double lo, double hi) {
    if (!est.same_shape(ref)) throw DataError("render: shape mismatch");
    RealMap err(est.rows, est.cols);
    for (std::size_t n = 0; n < err.size(); ++n)
        err.v[n] = mask.v[n] ? std::abs(est.v[n] - ref.v[n]) : 0.0;
    render_pgm(err, path, lo, hi);
}

// NRMSE table keyed like the comparison tables: one row per (map, scheme),
// one column per (rate, method).
struct MetricsTable {
    // ordered keys preserve a deterministic CSV layout
    std::vector<std::string> maps{"t1", "r2s", "z0"};
    std::vector<std::string> schemes;
    std::vector<std::string> columns;  // "<rate>/<method>"
    // cell key: map + "|" + scheme + "|" + column -> NRMSE (or NaN marker)
    std::map<std::string, double> cells;
    std::map<std::string, std::string> status;  // "ok" or an error note

    static std::string key(const std::string& map, const std::string& scheme,
                           const std::string& column) {
        return map + "|" + scheme + "|" + column;
    }

    void set(const std::string& map, const std::string& scheme, const std::string& column,
             double value) {
        cells[key(map, scheme, column)] = value;
        status[key(map, scheme, column)] = "ok";
    }

    void mark_failed(const std::string& map, const std::string& scheme,
                     const std::string& column, const std::string& why) {
        status[key(map, scheme, column)] = why;
    }

    double get(const std::string& map, const std::string& scheme,
               const std::string& column) const {
        auto it = cells.find(key(map, scheme, column));
        if (it == cells.end()) throw DataError("metrics table: missing cell " + key(map, scheme, column));
        return it->second;
    }

    void write_csv(const std::string& path) const {
        std::ofstream f(path, std::ios::trunc);
        if (!f) throw DataError("metrics: cannot open " + path);
        f << "map,scheme";
        for (const auto& c : columns) f << "," << c;
        f << "\n";
        char buf[64];
        for (const auto& m : maps)
            for (const auto& s : schemes) {
                f << m << "," << s;
                for (const auto& c : columns) {
                    auto it = cells.find(key(m, s, c));
                    if (it == cells.end()) {
                        auto st = status.find(key(m, s, c));
                        f << "," << (st == status.end() ? "missing" : "failed:" + st->second);
                    } else {
                        std::snprintf(buf, sizeof buf, "%.10e", it->second);
                        f << "," << buf;
                    }
                }
                f << "\n";
            }
    }
};

}  // namespace qmri

#endif
