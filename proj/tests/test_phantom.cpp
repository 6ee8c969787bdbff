#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qmri/phantom.hpp"

using namespace qmri;

namespace {

AcqParams paper_acq() {
    AcqParams a;
    a.flip_angles_deg = {5, 10, 20};
    a.echo_times_ms = {7, 15, 23, 31};
    a.tr_ms = 36;
    return a;
}

}  // namespace

TEST_CASE("a single full-support ellipse gives constant maps") {
    PhantomSpec spec;
    spec.rows = spec.cols = 32;
    spec.regions = {{0, 0, 0.9, 0.9, 0, 1.0, 1000, 50}};
    QuantMaps maps = make_phantom(spec);
    for (std::size_t n = 0; n < maps.mask.size(); ++n) {
        if (maps.mask.v[n]) {
            CHECK(maps.z0.v[n] == 1.0);
            CHECK(maps.t1.v[n] == 1000.0);
            CHECK(maps.t2s.v[n] == 50.0);
        } else {
            CHECK(maps.z0.v[n] == 0.0);
        }
    }
}

TEST_CASE("later regions overwrite earlier ones") {
    PhantomSpec spec;
    spec.rows = spec.cols = 64;
    spec.regions = {{0, 0, 0.9, 0.9, 0, 1.0, 1000, 50}, {0, 0, 0.3, 0.3, 0, 0.5, 2000, 80}};
    QuantMaps maps = make_phantom(spec);
    CHECK(maps.t1(32, 32) == 2000.0);
    CHECK(maps.t1(32, 60) == 1000.0);
}

TEST_CASE("region voxel counts track the analytic ellipse areas") {
    PhantomSpec spec;
    spec.rows = spec.cols = 256;
    spec.regions = {{-0.4, -0.4, 0.35, 0.25, 0, 1, 1000, 50},
                    {0.45, 0.45, 0.3, 0.4, 0, 2, 2000, 80}};
    QuantMaps maps = make_phantom(spec);
    std::size_t c1 = 0, c2 = 0;
    for (std::size_t n = 0; n < maps.mask.size(); ++n) {
        if (maps.z0.v[n] == 1.0) ++c1;
        if (maps.z0.v[n] == 2.0) ++c2;
    }
    // normalized area pi*rx*ry maps to pi*rx*ry*rows*cols/4 pixels
    const double a1 = M_PI * 0.35 * 0.25 * 256.0 * 256.0 / 4.0;
    const double a2 = M_PI * 0.3 * 0.4 * 256.0 * 256.0 / 4.0;
    CHECK(std::abs(double(c1) - a1) / a1 < 0.02);
    CHECK(std::abs(double(c2) - a2) / a2 < 0.02);
}

TEST_CASE("phantom generation is deterministic") {
    auto spec = default_phantom(64, 64);
    QuantMaps a = make_phantom(spec), b = make_phantom(spec);
    CHECK(a.z0 == b.z0);
    CHECK(a.t1 == b.t1);
    CHECK(a.t2s == b.t2s);
    CHECK(a.mask == b.mask);
}

TEST_CASE("simulated image magnitudes equal the signal equation voxelwise") {
    auto spec = default_phantom(32, 32);
    spec.phase_order = 3;
    spec.seed = 5;
    auto acq = paper_acq();
    QuantMaps maps = make_phantom(spec);
    EchoStack stack = simulate_images(maps, acq, spec);
    for (std::size_t i = 0; i < stack.I; ++i)
        for (std::size_t j = 0; j < stack.J; ++j)
            for (std::size_t n = 0; n < maps.mask.size(); ++n) {
                const double expect =
                    maps.mask.v[n] ? gre_signal(maps.z0.v[n], maps.t1.v[n], maps.t2s.v[n],
                                                acq.flip_angles_deg[i], acq.echo_times_ms[j],
                                                acq.tr_ms)
                                   : 0.0;
                CHECK_THAT(std::abs(stack.at(i, j).v[n]),
                           Catch::Matchers::WithinAbs(expect, 1e-13));
            }
}

TEST_CASE("noiseless full sampling round-trips through k-space, any phase") {
    auto spec = default_phantom(32, 32);
    spec.noise_tau = 0;
    auto acq = paper_acq();
    QuantMaps maps = make_phantom(spec);

    for (int order : {0, 3}) {
        spec.phase_order = order;
        KSpaceSet set = simulate_acquisition(maps, acq, spec,
                                             full_masks(3, 4, 32, 32));
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 4; ++j) {
                Image img = ifft2c(set.sample(i, j));
                for (std::size_t n = 0; n < img.size(); ++n) {
                    const double expect =
                        maps.mask.v[n] ? gre_signal(maps.z0.v[n], maps.t1.v[n], maps.t2s.v[n],
                                                    acq.flip_angles_deg[i],
                                                    acq.echo_times_ms[j], acq.tr_ms)
                                       : 0.0;
                    CHECK(std::abs(std::abs(img.v[n]) - expect) < 1e-12);
                }
            }
    }
}

TEST_CASE("added noise has the requested variance") {
    auto spec = default_phantom(64, 64);
    spec.noise_tau = 0.01;
    spec.seed = 77;
    auto acq = paper_acq();
    QuantMaps maps = make_phantom(spec);

    PhantomSpec clean = spec;
    clean.noise_tau = 0;
    auto masks = full_masks(3, 4, 64, 64);
    KSpaceSet noisy = simulate_acquisition(maps, acq, spec, masks);
    KSpaceSet ref = simulate_acquisition(maps, acq, clean, masks);

    double power = 0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < noisy.samples.size(); ++k)
        for (std::size_t n = 0; n < noisy.samples[k].size(); ++n) {
            power += std::norm(noisy.samples[k].v[n] - ref.samples[k].v[n]);
            ++count;
        }
    REQUIRE(count >= 10000);
    CHECK(std::abs(power / double(count) - spec.noise_tau) / spec.noise_tau < 0.05);
}

TEST_CASE("noise is attached to locations, not masks") {
    auto spec = default_phantom(32, 32);
    spec.noise_tau = 0.05;
    spec.seed = 3;
    auto acq = paper_acq();
    QuantMaps maps = make_phantom(spec);

    Mask half(32, 32);
    for (std::size_t n = 0; n < half.size(); n += 2) half.v[n] = 1;
    std::vector<Mask> partial(12, half);
    KSpaceSet sub = simulate_acquisition(maps, acq, spec, partial);
    KSpaceSet full = simulate_acquisition(maps, acq, spec, full_masks(3, 4, 32, 32));
    for (std::size_t n = 0; n < half.size(); ++n) {
        if (half.v[n]) {
            CHECK(sub.sample(1, 2).v[n] == full.sample(1, 2).v[n]);
        } else {
            CHECK(sub.sample(1, 2).v[n] == cplx(0.0, 0.0));
        }
    }
}

TEST_CASE("empty region lists are rejected") {
    PhantomSpec spec;
    spec.regions.clear();
    CHECK_THROWS_AS(make_phantom(spec), DataError);
}
