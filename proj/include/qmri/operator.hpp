#ifndef QMRI_OPERATOR_HPP
#define QMRI_OPERATOR_HPP

#include <optional>
#include <vector>

#include "qmri/array.hpp"
#include "qmri/errors.hpp"
#include "qmri/fft.hpp"
#include "qmri/wavelet.hpp"

namespace qmri {

// Measurement operator for one (flip angle, echo) pair:
//   A x = mask o F (sens_c o x)       per coil c, F the unitary centered FFT
//   B v = A H^{-1} v                  when a wavelet spec is attached
// The adjoint runs the conjugate-transpose chain and sums over coils.
struct ForwardOp {
    const Mask* mask = nullptr;
    const std::vector<Image>* sens = nullptr;  // nullptr/empty => unit single coil
    std::optional<WaveletSpec> wavelet;

    std::size_t rows() const { return mask->rows; }
    std::size_t cols() const { return mask->cols; }
    std::size_t n_coils() const { return (sens && !sens->empty()) ? sens->size() : 1; }
    std::size_t n_image() const { return mask->size(); }
    std::size_t n_sampled() const { return popcount(*mask); }
    std::size_t n_meas() const { return n_sampled() * n_coils(); }

    // sum of squared singular-vector row norms; the GAMP variance scaling
    double frob2() const {
        const double m = double(n_sampled());
        if (!sens || sens->empty()) return m;
        double s = 0;
        for (const Image& sc : *sens) {
            double p = 0;
            for (const cplx& z : sc.v) p += std::norm(z);
            s += p / double(sc.size());
        }
        return m * s;
    }

    std::vector<Image> apply(const Image& x) const {
        if (x.rows != rows() || x.cols != cols()) throw DataError("operator: input shape mismatch");
        Image img = wavelet ? wav_inverse(x, *wavelet) : x;
        const std::size_t C = n_coils();
        std::vector<Image> out;
        out.reserve(C);
        for (std::size_t c = 0; c < C; ++c) {
            Image weighted = img;
            if (sens && !sens->empty()) {
                const Image& sc = (*sens)[c];
                for (std::size_t n = 0; n < weighted.size(); ++n) weighted.v[n] *= sc.v[n];
            }
            Image k = fft2c(weighted);
            for (std::size_t n = 0; n < k.size(); ++n)
                if (!mask->v[n]) k.v[n] = 0;
            out.push_back(std::move(k));
        }
        return out;
    }

    Image adjoint(const std::vector<Image>& y) const {
        const std::size_t C = n_coils();
        if (y.size() != C) throw DataError("operator: coil count mismatch");
        Image acc(rows(), cols());
        for (std::size_t c = 0; c < C; ++c) {
            if (y[c].rows != rows() || y[c].cols != cols())
                throw DataError("operator: measurement shape mismatch");
            Image k = y[c];
            for (std::size_t n = 0; n < k.size(); ++n)
                if (!mask->v[n]) k.v[n] = 0;
            Image img = ifft2c(k);
            if (sens && !sens->empty()) {
                const Image& sc = (*sens)[c];
                for (std::size_t n = 0; n < img.size(); ++n)
                    acc.v[n] += std::conj(sc.v[n]) * img.v[n];
            } else {
                for (std::size_t n = 0; n < img.size(); ++n) acc.v[n] += img.v[n];
            }
        }
        return wavelet ? wav_forward(acc, *wavelet) : acc;
    }

    // A^H A x, used by the conjugate-gradient solver
    Image normal(const Image& x) const { return adjoint(apply(x)); }
};

inline double norm2_stack(const std::vector<Image>& ys) {
    double s = 0;
    for (const Image& y : ys)
        for (const cplx& z : y.v) s += std::norm(z);
    return std::sqrt(s);
}

inline cplx dot_stack(const std::vector<Image>& a, const std::vector<Image>& b) {
    if (a.size() != b.size()) throw DataError("dot_stack: coil count mismatch");
    cplx s = 0;
    for (std::size_t c = 0; c < a.size(); ++c) s += dot(a[c], b[c]);
    return s;
}

}  // namespace qmri

#endif
