#ifndef QMRI_FFT_HPP
#define QMRI_FFT_HPP

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include <fftw3.h>

#include "qmri/array.hpp"
#include "qmri/errors.hpp"

namespace qmri {

// Unitary centered 2-D DFT: DC sits in the middle of the grid and
// ||fft2c(x)|| = ||x||. Plans use FFTW_ESTIMATE so the chosen algorithm, and
// therefore the bit-level output, is reproducible run to run.

namespace detail {

class FftPlans {
  public:
    static FftPlans& instance() {
        static FftPlans p;
        return p;
    }

    fftw_plan get(std::size_t rows, std::size_t cols, int sign) {
        std::lock_guard<std::mutex> lk(mu_);
        auto key = std::make_tuple(rows, cols, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        // planned once on scratch buffers; executed on caller arrays via
        // fftw_execute_dft, so FFTW_UNALIGNED is required
        std::vector<cplx> scratch(rows * cols);
        fftw_plan p = fftw_plan_dft_2d(
            int(rows), int(cols), reinterpret_cast<fftw_complex*>(scratch.data()),
            reinterpret_cast<fftw_complex*>(scratch.data()), sign,
            FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!p) throw DataError("fft: planning failed");
        plans_.emplace(key, p);
        return p;
    }

  private:
    FftPlans() = default;
    ~FftPlans() {
        for (auto& [k, p] : plans_) fftw_destroy_plan(p);
    }
    std::mutex mu_;
    std::map<std::tuple<std::size_t, std::size_t, int>, fftw_plan> plans_;
};

// circular shift rows by dr and columns by dc
inline Image circshift(const Image& x, std::size_t dr, std::size_t dc) {
    Image out(x.rows, x.cols);
    for (std::size_t r = 0; r < x.rows; ++r) {
        const std::size_t rr = (r + dr) % x.rows;
        for (std::size_t c = 0; c < x.cols; ++c)
            out(rr, (c + dc) % x.cols) = x(r, c);
    }
    return out;
}

}  // namespace detail

inline Image fftshift(const Image& x) {
    return detail::circshift(x, x.rows / 2, x.cols / 2);
}

inline Image ifftshift(const Image& x) {
    return detail::circshift(x, (x.rows + 1) / 2, (x.cols + 1) / 2);
}

inline Image fft2c(const Image& x) {
    Image in = ifftshift(x);
    Image out(x.rows, x.cols);
    fftw_plan p = detail::FftPlans::instance().get(x.rows, x.cols, FFTW_FORWARD);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
    const double s = 1.0 / std::sqrt(double(x.size()));
    for (cplx& z : out.v) z *= s;
    return fftshift(out);
}

inline Image ifft2c(const Image& x) {
    Image in = ifftshift(x);
    Image out(x.rows, x.cols);
    fftw_plan p = detail::FftPlans::instance().get(x.rows, x.cols, FFTW_BACKWARD);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
    const double s = 1.0 / std::sqrt(double(x.size()));
    for (cplx& z : out.v) z *= s;
    return fftshift(out);
}

}  // namespace qmri

#endif
