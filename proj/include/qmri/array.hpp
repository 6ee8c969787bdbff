#ifndef QMRI_ARRAY_HPP
#define QMRI_ARRAY_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace qmri {

using cplx = std::complex<double>;

// Dense row-major 2-D array. The workhorse container for images, k-space
// grids, wavelet coefficient planes, masks and parameter maps.
template <typename T>
struct Array2D {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<T> v;

    Array2D() = default;
    Array2D(std::size_t r, std::size_t c, T fill = T{}) : rows(r), cols(c), v(r * c, fill) {}

    T& operator()(std::size_t r, std::size_t c) { return v[r * cols + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return v[r * cols + c]; }

    std::size_t size() const { return v.size(); }
    T* data() { return v.data(); }
    const T* data() const { return v.data(); }

    bool same_shape(const Array2D& o) const { return rows == o.rows && cols == o.cols; }

    friend bool operator==(const Array2D& a, const Array2D& b) {
        return a.rows == b.rows && a.cols == b.cols && a.v == b.v;
    }
};

using Image = Array2D<cplx>;
using RealMap = Array2D<double>;
using Mask = Array2D<std::uint8_t>;

inline double norm2(const Image& x) {
    double s = 0;
    for (const cplx& e : x.v) s += std::norm(e);
    return std::sqrt(s);
}

inline double norm2(const RealMap& x) {
    double s = 0;
    for (double e : x.v) s += e * e;
    return std::sqrt(s);
}

inline cplx dot(const Image& a, const Image& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("dot: shape mismatch");
    cplx s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a.v[i]) * b.v[i];
    return s;
}

inline std::size_t popcount(const Mask& m) {
    std::size_t n = 0;
    for (auto b : m.v) n += (b != 0);
    return n;
}

template <typename T>
inline bool all_finite(const Array2D<T>& a) {
    if constexpr (std::is_same_v<T, cplx>) {
        for (const cplx& e : a.v)
            if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) return false;
    } else if constexpr (std::is_floating_point_v<T>) {
        for (T e : a.v)
            if (!std::isfinite(e)) return false;
    }
    return true;
}

inline RealMap magnitude(const Image& x) {
    RealMap m(x.rows, x.cols);
    for (std::size_t i = 0; i < x.size(); ++i) m.v[i] = std::abs(x.v[i]);
    return m;
}

// a + alpha*(b - a); alpha == 1 short-circuits so the damped path is
// bit-identical to adopting b outright.
inline cplx damp(cplx a, cplx b, double alpha) {
    return alpha == 1.0 ? b : a + alpha * (b - a);
}

inline double damp(double a, double b, double alpha) {
    return alpha == 1.0 ? b : a + alpha * (b - a);
}

}  // namespace qmri

#endif
