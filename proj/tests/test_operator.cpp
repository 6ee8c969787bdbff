#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qmri/operator.hpp"
#include "qmri/rng.hpp"
#include "qmri/sampling.hpp"

using namespace qmri;

namespace {

Image random_image(std::size_t r, std::size_t c, std::uint64_t seed) {
    Rng rng(seed);
    Image x(r, c);
    for (cplx& z : x.v) z = {rng.gauss(), rng.gauss()};
    return x;
}

std::vector<Image> random_meas(const ForwardOp& op, std::uint64_t seed) {
    // random k-space data supported on the mask
    std::vector<Image> y(op.n_coils(), Image(op.rows(), op.cols()));
    Rng rng(seed);
    for (auto& img : y)
        for (std::size_t n = 0; n < img.size(); ++n)
            if (op.mask->v[n]) img.v[n] = {rng.gauss(), rng.gauss()};
    return y;
}

std::vector<Image> smooth_sens(std::size_t rows, std::size_t cols, std::size_t coils) {
    std::vector<Image> s(coils, Image(rows, cols));
    for (std::size_t c = 0; c < coils; ++c)
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t k = 0; k < cols; ++k) {
                const double y = double(r) / double(rows), x = double(k) / double(cols);
                const double mag = 0.5 + 0.5 * std::cos(M_PI * (x - 0.3 * double(c)));
                const double ph = 2.0 * M_PI * (0.2 * y + 0.1 * double(c));
                s[c](r, k) = mag * cplx(std::cos(ph), std::sin(ph));
            }
    return s;
}

}  // namespace

TEST_CASE("unit impulse at the center maps to a flat spectrum") {
    Mask full(16, 16, 1);
    ForwardOp op{&full, nullptr, std::nullopt};
    Image x(16, 16);
    x(8, 8) = 1.0;
    auto y = op.apply(x);
    const double expect = 1.0 / std::sqrt(256.0);
    for (const cplx& z : y[0].v) CHECK_THAT(std::abs(z), Catch::Matchers::WithinAbs(expect, 1e-14));
}

TEST_CASE("zero input gives zero output both ways") {
    Mask full(8, 8, 1);
    ForwardOp op{&full, nullptr, WaveletSpec{2, 1}};
    CHECK(norm2_stack(op.apply(Image(8, 8))) == 0.0);
    CHECK(norm2(op.adjoint({Image(8, 8)})) == 0.0);
}

TEST_CASE("apply is non-expansive, tight at full sampling") {
    Image x = random_image(32, 32, 5);
    Mask full(32, 32, 1);
    ForwardOp op_full{&full, nullptr, std::nullopt};
    CHECK_THAT(norm2_stack(op_full.apply(x)) / norm2(x), Catch::Matchers::WithinAbs(1.0, 1e-12));

    MaskParams p;
    p.rows = p.cols = 32;
    p.rate = 0.3;
    p.calib = 8;
    p.seed = 4;
    Mask part = gen_mask(p);
    ForwardOp op_part{&part, nullptr, std::nullopt};
    CHECK(norm2_stack(op_part.apply(x)) <= norm2(x) + 1e-12);
}

TEST_CASE("adjoint inverts apply at full sampling without weights") {
    Mask full(16, 16, 1);
    ForwardOp op{&full, nullptr, std::nullopt};
    Image x = random_image(16, 16, 6);
    Image back = op.adjoint(op.apply(x));
    double err = 0;
    for (std::size_t n = 0; n < x.size(); ++n) err += std::norm(back.v[n] - x.v[n]);
    CHECK(std::sqrt(err) / norm2(x) < 1e-12);
}

TEST_CASE("apply after adjoint is the identity on the sampled subspace") {
    MaskParams p;
    p.rows = p.cols = 32;
    p.rate = 0.25;
    p.calib = 8;
    p.seed = 9;
    Mask m = gen_mask(p);
    ForwardOp op{&m, nullptr, std::nullopt};
    auto y = random_meas(op, 17);
    auto back = op.apply(op.adjoint(y));
    double err = 0;
    for (std::size_t n = 0; n < y[0].size(); ++n) err += std::norm(back[0].v[n] - y[0].v[n]);
    CHECK(std::sqrt(err) / norm2_stack(y) < 1e-12);
}

TEST_CASE("dot-product adjoint identity holds in every configuration") {
    MaskParams p;
    p.rows = p.cols = 32;
    p.rate = 0.3;
    p.calib = 8;
    p.seed = 2;
    Mask m = gen_mask(p);
    auto sens = smooth_sens(32, 32, 4);

    struct Config {
        bool use_sens;
        bool use_wav;
    };
    for (Config cfg : {Config{false, false}, Config{true, false}, Config{false, true},
                       Config{true, true}}) {
        ForwardOp op{&m, cfg.use_sens ? &sens : nullptr,
                     cfg.use_wav ? std::optional<WaveletSpec>(WaveletSpec{6, 3}) : std::nullopt};
        for (std::uint64_t trial = 0; trial < 25; ++trial) {
            Image x = random_image(32, 32, 1000 + trial);
            auto y = random_meas(op, 2000 + trial);
            const cplx lhs = dot_stack(op.apply(x), y);
            const cplx rhs = dot(x, op.adjoint(y));
            const double rel = std::abs(lhs - rhs) / (norm2(x) * norm2_stack(y));
            CHECK(rel <= 1e-12);
        }
    }
}

TEST_CASE("both maps are linear") {
    MaskParams p;
    p.rows = p.cols = 16;
    p.rate = 0.4;
    p.calib = 4;
    p.seed = 3;
    Mask m = gen_mask(p);
    ForwardOp op{&m, nullptr, WaveletSpec{3, 2}};
    Image x = random_image(16, 16, 31), y = random_image(16, 16, 32);
    const cplx a{1.5, -0.5};
    Image combo(16, 16);
    for (std::size_t n = 0; n < combo.size(); ++n) combo.v[n] = a * x.v[n] + y.v[n];
    auto lhs = op.apply(combo);
    auto rx = op.apply(x), ry = op.apply(y);
    double err = 0;
    for (std::size_t n = 0; n < lhs[0].size(); ++n)
        err += std::norm(lhs[0].v[n] - (a * rx[0].v[n] + ry[0].v[n]));
    CHECK(std::sqrt(err) <= 1e-12 * norm2_stack(lhs));
}

TEST_CASE("shape mismatches are rejected") {
    Mask m(16, 16, 1);
    ForwardOp op{&m, nullptr, std::nullopt};
    CHECK_THROWS_AS(op.apply(Image(8, 8)), DataError);
    CHECK_THROWS_AS(op.adjoint({Image(8, 8)}), DataError);
    CHECK_THROWS_AS(op.adjoint({Image(16, 16), Image(16, 16)}), DataError);
}
