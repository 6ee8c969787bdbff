#ifndef QMRI_TYPES_HPP
#define QMRI_TYPES_HPP

#include <optional>
#include <string>
#include <vector>

#include "qmri/array.hpp"
#include "qmri/errors.hpp"

namespace qmri {

// Spoiled-GRE acquisition: flip angles theta_i (deg), echo times t_j (ms),
// repetition time TR (ms). flip_scale, when present, is the per-voxel
// transmit-field correction: effective angle = scale(n) * theta_i.
struct AcqParams {
    std::vector<double> flip_angles_deg;
    std::vector<double> echo_times_ms;
    double tr_ms = 0;
    std::optional<RealMap> flip_scale;

    std::size_t n_fa() const { return flip_angles_deg.size(); }
    std::size_t n_echo() const { return echo_times_ms.size(); }

    void validate(std::size_t voxels = 0) const {
        if (flip_angles_deg.empty() || echo_times_ms.empty())
            throw DataError("acq: need at least one flip angle and one echo");
        for (double a : flip_angles_deg)
            if (!(a > 0.0 && a <= 90.0)) throw DataError("acq: flip angle outside (0, 90]");
        double prev = 0;
        for (double t : echo_times_ms) {
            if (!(t > 0.0 && t > prev)) throw DataError("acq: echo times must be positive and increasing");
            prev = t;
        }
        if (!(tr_ms > prev)) throw DataError("acq: TR must exceed the last echo time");
        if (flip_scale) {
            if (voxels && flip_scale->size() != voxels)
                throw DataError("acq: flip_scale size does not match image");
            for (double s : flip_scale->v)
                if (!(s > 0.0 && s < 2.0)) throw DataError("acq: flip_scale outside (0, 2)");
        }
    }
};

// Per-voxel tissue parameters. t1/t2s are in ms; z0 is unitless proton
// density; mask flags the fitted support; degenerate marks voxels whose
// signal was identically zero (parameters unidentifiable there).
struct QuantMaps {
    RealMap z0;
    RealMap t1;
    RealMap t2s;
    Mask mask;
    Mask degenerate;

    void validate() const {
        if (!z0.same_shape(t1) || !z0.same_shape(t2s) ||
            z0.rows != mask.rows || z0.cols != mask.cols)
            throw DataError("maps: shape mismatch");
        for (std::size_t i = 0; i < mask.size(); ++i)
            if (mask.v[i] && (!degenerate.size() || !degenerate.v[i]) &&
                (!(t1.v[i] > 0) || !(t2s.v[i] > 0)))
                throw DataError("maps: nonpositive t1/t2s inside mask");
    }
};

// Complex VFA multi-echo images z_ij, flip-angle-major order.
struct EchoStack {
    std::size_t I = 0, J = 0;
    std::size_t rows = 0, cols = 0;
    std::vector<Image> images;  // I*J entries, index i*J + j

    EchoStack() = default;
    EchoStack(std::size_t i, std::size_t j, std::size_t r, std::size_t c)
        : I(i), J(j), rows(r), cols(c), images(i * j, Image(r, c)) {}

    Image& at(std::size_t i, std::size_t j) { return images[i * J + j]; }
    const Image& at(std::size_t i, std::size_t j) const { return images[i * J + j]; }

    void validate() const {
        if (images.size() != I * J) throw DataError("echo stack: image count mismatch");
        for (const auto& im : images) {
            if (im.rows != rows || im.cols != cols) throw DataError("echo stack: shape mismatch");
            if (!all_finite(im)) throw DataError("echo stack: non-finite value");
        }
    }
};

// Undersampled Fourier data: per-(i,j) k-space grids (zeros off-mask) and
// sampling masks; optional per-coil sensitivities (coils share one mask).
struct KSpaceSet {
    std::size_t I = 0, J = 0;
    std::size_t rows = 0, cols = 0;
    std::size_t coils = 1;
    std::vector<Image> samples;  // index (i*J + j)*coils + c
    std::vector<Mask> masks;     // index i*J + j
    std::vector<Image> sens;     // empty => unit single coil

    KSpaceSet() = default;
    KSpaceSet(std::size_t i, std::size_t j, std::size_t r, std::size_t c, std::size_t nc = 1)
        : I(i), J(j), rows(r), cols(c), coils(nc),
          samples(i * j * nc, Image(r, c)), masks(i * j, Mask(r, c)) {}

    Image& sample(std::size_t i, std::size_t j, std::size_t c = 0) {
        return samples[(i * J + j) * coils + c];
    }
    const Image& sample(std::size_t i, std::size_t j, std::size_t c = 0) const {
        return samples[(i * J + j) * coils + c];
    }
    Mask& mask(std::size_t i, std::size_t j) { return masks[i * J + j]; }
    const Mask& mask(std::size_t i, std::size_t j) const { return masks[i * J + j]; }

    void validate() const {
        if (samples.size() != I * J * coils || masks.size() != I * J)
            throw DataError("kspace: array count mismatch");
        if (!sens.empty() && sens.size() != coils)
            throw DataError("kspace: sensitivity count != coils");
        for (const auto& s : sens)
            if (s.rows != rows || s.cols != cols) throw DataError("kspace: sensitivity shape mismatch");
        for (std::size_t i = 0; i < I; ++i)
            for (std::size_t j = 0; j < J; ++j) {
                const Mask& m = mask(i, j);
                if (m.rows != rows || m.cols != cols) throw DataError("kspace: mask shape mismatch");
                for (std::size_t c = 0; c < coils; ++c) {
                    const Image& y = sample(i, j, c);
                    if (y.rows != rows || y.cols != cols) throw DataError("kspace: sample shape mismatch");
                    for (std::size_t n = 0; n < y.size(); ++n)
                        if (!m.v[n] && y.v[n] != cplx{0.0, 0.0})
                            throw DataError("kspace: nonzero sample off mask");
                }
            }
    }
};

}  // namespace qmri

#endif
