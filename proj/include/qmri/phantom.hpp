#ifndef QMRI_PHANTOM_HPP
#define QMRI_PHANTOM_HPP

#include <cmath>
#include <vector>

#include "qmri/array.hpp"
#include "qmri/errors.hpp"
#include "qmri/fft.hpp"
#include "qmri/rng.hpp"
#include "qmri/sampling.hpp"
#include "qmri/signal_model.hpp"
#include "qmri/types.hpp"

namespace qmri {

// Synthetic ground truth: piecewise-elliptical tissue maps, forward-simulated
// through the GRE signal equation with a smooth random phase and complex
// Gaussian noise on the sampled k-space locations.

struct Ellipse {
    double cx = 0, cy = 0;   // center, normalized [-1, 1] coordinates
    double rx = 1, ry = 1;   // semi-axes, normalized
    double angle_deg = 0;    // rotation
    double z0 = 1, t1 = 1000, t2s = 50;
};

struct PhantomSpec {
    std::size_t rows = 128, cols = 128;
    std::vector<Ellipse> regions;
    double noise_tau = 0;
    std::uint64_t seed = 0;
    int phase_order = 3;
};

// Fixture values spanning the default dictionary grids; not tissue data.
inline PhantomSpec default_phantom(std::size_t rows = 128, std::size_t cols = 128) {
    PhantomSpec s;
    s.rows = rows;
    s.cols = cols;
    s.regions = {
        {0.0, 0.0, 0.88, 0.92, 0.0, 0.80, 1000, 55},    // background
        {-0.42, -0.30, 0.26, 0.34, 20.0, 0.95, 600, 35},
        {0.40, -0.32, 0.28, 0.30, -15.0, 0.70, 1600, 80},
        {0.00, 0.32, 0.38, 0.26, 0.0, 1.00, 2400, 110},
        {-0.28, 0.48, 0.14, 0.12, 0.0, 0.60, 4000, 10},
        {0.30, 0.52, 0.12, 0.14, 30.0, 0.85, 800, 22},
        {0.02, -0.10, 0.10, 0.16, -40.0, 0.90, 3200, 65},
    };
    return s;
}

inline bool inside_ellipse(const Ellipse& e, double x, double y) {
    const double a = e.angle_deg * M_PI / 180.0;
    const double dx = x - e.cx, dy = y - e.cy;
    const double u = std::cos(a) * dx + std::sin(a) * dy;
    const double v = -std::sin(a) * dx + std::cos(a) * dy;
    return (u * u) / (e.rx * e.rx) + (v * v) / (e.ry * e.ry) <= 1.0;
}

inline QuantMaps make_phantom(const PhantomSpec& spec) {
    if (spec.regions.empty()) throw DataError("phantom: no regions");
    for (const auto& e : spec.regions)
        if (!(e.z0 >= 0) || !(e.t1 > 0) || !(e.t2s > 0))
            throw DataError("phantom: region parameters must be positive");

    QuantMaps maps;
    maps.z0 = RealMap(spec.rows, spec.cols);
    maps.t1 = RealMap(spec.rows, spec.cols);
    maps.t2s = RealMap(spec.rows, spec.cols);
    maps.mask = Mask(spec.rows, spec.cols);
    maps.degenerate = Mask(spec.rows, spec.cols);

    for (std::size_t r = 0; r < spec.rows; ++r) {
        const double y = 2.0 * (double(r) + 0.5) / double(spec.rows) - 1.0;
        for (std::size_t c = 0; c < spec.cols; ++c) {
            const double x = 2.0 * (double(c) + 0.5) / double(spec.cols) - 1.0;
            for (const auto& e : spec.regions) {  // later regions overwrite
                if (inside_ellipse(e, x, y)) {
                    maps.z0(r, c) = e.z0;
                    maps.t1(r, c) = e.t1;
                    maps.t2s(r, c) = e.t2s;
                    maps.mask(r, c) = 1;
                }
            }
        }
    }
    return maps;
}

// Smooth random polynomial phase over normalized coordinates.
inline RealMap random_phase(std::size_t rows, std::size_t cols, int order,
                            std::uint64_t seed) {
    RealMap phi(rows, cols);
    if (order < 0) return phi;
    Rng rng(hash_combine(seed, 0x9e3779b9));
    std::vector<double> coeff;
    for (int p = 0; p <= order; ++p)
        for (int q = 0; q <= order - p; ++q) coeff.push_back(rng.uniform(-M_PI, M_PI));
    std::size_t k = 0;
    for (std::size_t r = 0; r < rows; ++r) {
        const double y = 2.0 * (double(r) + 0.5) / double(rows) - 1.0;
        for (std::size_t c = 0; c < cols; ++c) {
            const double x = 2.0 * (double(c) + 0.5) / double(cols) - 1.0;
            double v = 0;
            k = 0;
            for (int p = 0; p <= order; ++p)
                for (int q = 0; q <= order - p; ++q)
                    v += coeff[k++] * std::pow(x, p) * std::pow(y, q);
            phi(r, c) = v;
        }
    }
    return phi;
}

// Noiseless complex echo images f_ij(maps) * exp(i phi).
inline EchoStack simulate_images(const QuantMaps& maps, const AcqParams& acq,
                                 const PhantomSpec& spec) {
    EchoStack stack(acq.n_fa(), acq.n_echo(), maps.z0.rows, maps.z0.cols);
    const RealMap phi = random_phase(maps.z0.rows, maps.z0.cols, spec.phase_order, spec.seed);
    for (std::size_t i = 0; i < stack.I; ++i)
        for (std::size_t j = 0; j < stack.J; ++j) {
            Image& im = stack.at(i, j);
            for (std::size_t n = 0; n < im.size(); ++n) {
                if (!maps.mask.v[n]) continue;
                const double scale = acq.flip_scale ? acq.flip_scale->v[n] : 1.0;
                const double f = gre_signal(maps.z0.v[n], maps.t1.v[n], maps.t2s.v[n],
                                            scale * acq.flip_angles_deg[i],
                                            acq.echo_times_ms[j], acq.tr_ms);
                im.v[n] = f * cplx(std::cos(phi.v[n]), std::sin(phi.v[n]));
            }
        }
    return stack;
}

// Undersampled noisy measurements. The noise value at location n of image
// (i, j) depends only on (seed, i, j, n) so different schemes sampling the
// same location see the same noise realization, mirroring retrospective
// undersampling of one acquisition.
inline KSpaceSet simulate_acquisition(const QuantMaps& maps, const AcqParams& acq,
                                      const PhantomSpec& spec,
                                      const std::vector<Mask>& masks) {
    acq.validate(maps.z0.size());
    const std::size_t I = acq.n_fa(), J = acq.n_echo();
    if (masks.size() != I * J) throw DataError("simulate: mask count != I*J");
    for (const auto& m : masks)
        if (m.rows != maps.z0.rows || m.cols != maps.z0.cols)
            throw DataError("simulate: mask shape mismatch");

    const EchoStack stack = simulate_images(maps, acq, spec);
    KSpaceSet set(I, J, maps.z0.rows, maps.z0.cols);
    for (std::size_t i = 0; i < I; ++i)
        for (std::size_t j = 0; j < J; ++j) {
            set.mask(i, j) = masks[i * J + j];
            Image k = fft2c(stack.at(i, j));
            Image& y = set.sample(i, j);
            for (std::size_t n = 0; n < k.size(); ++n) {
                if (!set.mask(i, j).v[n]) {
                    y.v[n] = 0;
                    continue;
                }
                cplx noise = 0;
                if (spec.noise_tau > 0) {
                    Rng nrng(hash_combine(hash_combine(spec.seed, i, j), n));
                    noise = nrng.cgauss(spec.noise_tau);
                }
                y.v[n] = k.v[n] + noise;
            }
        }
    return set;
}

inline std::vector<Mask> full_masks(std::size_t I, std::size_t J, std::size_t rows,
                                    std::size_t cols) {
    return std::vector<Mask>(I * J, Mask(rows, cols, 1));
}

// SNR(dB) -> noise variance via mean signal power over the echo stack:
// tau = mean|z|^2 * 10^(-snr/10). Unitary FFT keeps the k-space per-sample
// power equal to the image-domain mean power.
inline double noise_tau_for_snr(const QuantMaps& maps, const AcqParams& acq,
                                const PhantomSpec& spec, double snr_db) {
    const EchoStack stack = simulate_images(maps, acq, spec);
    double p = 0;
    std::size_t n = 0;
    for (const Image& im : stack.images) {
        for (const cplx& z : im.v) p += std::norm(z);
        n += im.size();
    }
    return (p / double(n)) * std::pow(10.0, -snr_db / 10.0);
}

}  // namespace qmri

#endif
