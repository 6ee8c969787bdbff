#ifndef QMRI_WAVELET_HPP
#define QMRI_WAVELET_HPP

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "qmri/array.hpp"
#include "qmri/errors.hpp"

namespace qmri {

// Orthonormal Daubechies analysis/synthesis with periodic boundary handling.
// Periodization keeps the transform exactly orthonormal on dyadic lengths,
// which the AMP variance bookkeeping relies on. Coefficients are stored in
// the standard in-place Mallat quadrant layout (LL at the top-left).

struct WaveletSpec {
    int family_order = 6;  // db-k, filter length 2k
    int levels = 4;
};

namespace daub {

// Extremal-phase Daubechies scaling filters, sum h = sqrt(2).
inline constexpr std::array<double, 2> db1{
    0.7071067811865475244, 0.7071067811865475244};
inline constexpr std::array<double, 4> db2{
    0.4829629131445341434, 0.8365163037378079056, 0.2241438680420133810,
    -0.1294095225512603812};
inline constexpr std::array<double, 6> db3{
    0.3326705529500826160, 0.8068915093110925765, 0.4598775021184915701,
    -0.1350110200102545887, -0.08544127388202666169, 0.03522629188570953660};
inline constexpr std::array<double, 8> db4{
    0.2303778133088965009, 0.7148465705529156471, 0.6308807679298589079,
    -0.02798376941685985421, -0.1870348117190930841, 0.03084138183556076363,
    0.03288301166688519974, -0.01059740178506903210};
inline constexpr std::array<double, 10> db5{
    0.1601023979741929145, 0.6038292697971896705, 0.7243085284377729277,
    0.1384281459013207315, -0.2422948870663820319, -0.03224486958463837465,
    0.07757149384004571352, -0.006241490212798274274, -0.01258075199908199947,
    0.003335725285473771278};
inline constexpr std::array<double, 12> db6{
    0.1115407433501094636, 0.4946238903984530857, 0.7511339080210953507,
    0.3152503517091976291, -0.2262646939654398201, -0.1297668675672619356,
    0.09750160558732304910, 0.02752286553030572863, -0.03158203931748602957,
    0.0005538422011614961393, 0.004777257510945510640, -0.001077301085308479565};
inline constexpr std::array<double, 14> db7{
    0.07785205408500917902, 0.3965393194819173065, 0.7291320908462351199,
    0.4697822874051931225, -0.1439060039285649754, -0.2240361849938749826,
    0.07130921926683026475, 0.08061260915108307191, -0.03802993693501441358,
    -0.01657454163066688065, 0.01255099855609984061, 0.0004295779729213665211,
    -0.001801640704047490915, 0.0003537137999745202484};
inline constexpr std::array<double, 16> db8{
    0.05441584224310400996, 0.3128715909142999707, 0.6756307362972898068,
    0.5853546836542067128, -0.01582910525634930567, -0.2840155429615469265,
    0.0004724845739132827704, 0.1287474266204784589, -0.01736930100180754617,
    -0.04408825393079475151, 0.01398102791739828165, 0.008746094047405776716,
    -0.004870352993451574310, -0.0003917403733769470463, 0.0006754494064505693664,
    -0.0001174767841247695337};
inline constexpr std::array<double, 18> db9{
    0.03807794736387834659, 0.2438346746125903537, 0.6048231236901111119,
    0.6572880780513005381, 0.1331973858250075762, -0.2932737832791749088,
    -0.09684078322297646051, 0.1485407493381063801, 0.03072568147933337921,
    -0.06763282906132997368, 0.0002509471148314519576, 0.02236166212367909721,
    -0.004723204757751397278, -0.004281503682463429834, 0.001847646883056226477,
    0.0002303857635231959672, -0.0002519631889427101370, 0.00003934732031627159948};
inline constexpr std::array<double, 20> db10{
    0.02667005790055555359, 0.1881768000776914890, 0.5272011889317255865,
    0.6884590394536035657, 0.2811723436605774607, -0.2498464243273153794,
    -0.1959462743773770435, 0.1273693403357932601, 0.09305736460357235116,
    -0.07139414716639708715, -0.02945753682187581286, 0.03321267405934100174,
    0.003606553566956169655, -0.01073317548333057504, 0.001395351747052901166,
    0.001992405295185056117, -0.0006858566949597116266, -0.0001164668551292854510,
    0.00009358867032006959133, -0.00001326420289452124481};

inline std::span<const double> lowpass(int order) {
    switch (order) {
        case 1: return db1;
        case 2: return db2;
        case 3: return db3;
        case 4: return db4;
        case 5: return db5;
        case 6: return db6;
        case 7: return db7;
        case 8: return db8;
        case 9: return db9;
        case 10: return db10;
        default: throw DataError("wavelet: family order must be in [1, 10]");
    }
}

// quadrature-mirror highpass g[k] = (-1)^k h[L-1-k]
inline std::vector<double> highpass(std::span<const double> h) {
    const std::size_t L = h.size();
    std::vector<double> g(L);
    for (std::size_t k = 0; k < L; ++k)
        g[k] = ((k & 1) ? -1.0 : 1.0) * h[L - 1 - k];
    return g;
}

}  // namespace daub

struct WaveletCoeffs {
    Image data;        // Mallat in-place layout
    WaveletSpec spec;  // subband map is implied by (shape, levels)
};

namespace detail {

inline void check_dyadic(std::size_t rows, std::size_t cols, const WaveletSpec& spec) {
    if (spec.family_order < 1 || spec.family_order > 10)
        throw DataError("wavelet: family order must be in [1, 10]");
    if (spec.levels < 1) throw DataError("wavelet: levels must be >= 1");
    const std::size_t div = std::size_t{1} << spec.levels;
    if (rows % div || cols % div || rows < 2 || cols < 2)
        throw DataError("wavelet: image sides must be divisible by 2^levels");
}

// one periodic analysis pass over a strided length-n signal
inline void analyze_1d(cplx* x, std::size_t stride, std::size_t n,
                       std::span<const double> h, std::span<const double> g,
                       std::vector<cplx>& tmp) {
    const std::size_t half = n / 2, L = h.size();
    tmp.resize(n);
    for (std::size_t i = 0; i < half; ++i) {
        cplx a{}, d{};
        for (std::size_t k = 0; k < L; ++k) {
            const cplx xv = x[((2 * i + k) % n) * stride];
            a += h[k] * xv;
            d += g[k] * xv;
        }
        tmp[i] = a;
        tmp[half + i] = d;
    }
    for (std::size_t i = 0; i < n; ++i) x[i * stride] = tmp[i];
}

// transpose of analyze_1d; exact inverse for orthonormal filters
inline void synthesize_1d(cplx* x, std::size_t stride, std::size_t n,
                          std::span<const double> h, std::span<const double> g,
                          std::vector<cplx>& tmp) {
    const std::size_t half = n / 2, L = h.size();
    tmp.assign(n, cplx{});
    for (std::size_t i = 0; i < half; ++i) {
        const cplx a = x[i * stride], d = x[(half + i) * stride];
        for (std::size_t k = 0; k < L; ++k)
            tmp[(2 * i + k) % n] += h[k] * a + g[k] * d;
    }
    for (std::size_t i = 0; i < n; ++i) x[i * stride] = tmp[i];
}

}  // namespace detail

inline WaveletCoeffs dwt2(const Image& image, const WaveletSpec& spec) {
    detail::check_dyadic(image.rows, image.cols, spec);
    auto h = daub::lowpass(spec.family_order);
    auto gvec = daub::highpass(h);
    std::span<const double> g(gvec);

    WaveletCoeffs out{image, spec};
    std::vector<cplx> tmp;
    std::size_t r = image.rows, c = image.cols;
    for (int lvl = 0; lvl < spec.levels; ++lvl) {
        for (std::size_t i = 0; i < r; ++i)  // rows
            detail::analyze_1d(&out.data(i, 0), 1, c, h, g, tmp);
        for (std::size_t j = 0; j < c; ++j)  // columns
            detail::analyze_1d(&out.data(0, j), out.data.cols, r, h, g, tmp);
        r /= 2;
        c /= 2;
    }
    return out;
}

inline Image idwt2(const WaveletCoeffs& coeffs, const WaveletSpec& spec) {
    if (coeffs.spec.family_order != spec.family_order || coeffs.spec.levels != spec.levels)
        throw DataError("wavelet: coefficient layout does not match spec");
    detail::check_dyadic(coeffs.data.rows, coeffs.data.cols, spec);
    auto h = daub::lowpass(spec.family_order);
    auto gvec = daub::highpass(h);
    std::span<const double> g(gvec);

    Image out = coeffs.data;
    std::vector<cplx> tmp;
    const std::size_t div = std::size_t{1} << (spec.levels - 1);
    std::size_t r = coeffs.data.rows / div, c = coeffs.data.cols / div;
    for (int lvl = spec.levels - 1; lvl >= 0; --lvl) {
        for (std::size_t j = 0; j < c; ++j)
            detail::synthesize_1d(&out(0, j), out.cols, r, h, g, tmp);
        for (std::size_t i = 0; i < r; ++i)
            detail::synthesize_1d(&out(i, 0), 1, c, h, g, tmp);
        r *= 2;
        c *= 2;
    }
    return out;
}

// Convenience wrappers used by the operators: image <-> coefficient plane.
inline Image wav_forward(const Image& img, const WaveletSpec& spec) {
    return dwt2(img, spec).data;
}

inline Image wav_inverse(const Image& coeff, const WaveletSpec& spec) {
    return idwt2(WaveletCoeffs{coeff, spec}, spec);
}

}  // namespace qmri

#endif
