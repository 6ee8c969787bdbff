#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "qmri/bundle.hpp"
#include "qmri/rng.hpp"

using namespace qmri;
namespace fs = std::filesystem;

namespace {

std::string tmp_path(const std::string& stem) {
    static const fs::path base = [] {
        fs::path p = fs::temp_directory_path() / "qmri_bundle_test";
        fs::create_directories(p);
        return p;
    }();
    return (base / stem).string();
}

std::vector<std::uint8_t> slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("mask payload is one byte per element") {
    Mask m(2, 2);
    m(0, 0) = 1;
    m(1, 1) = 1;
    const auto path = tmp_path("mask2x2");
    write_bundle(m, path, "mask");
    const auto raw = slurp(path + ".bin");
    REQUIRE(raw == std::vector<std::uint8_t>({1, 0, 0, 1}));

    const Bundle b = read_bundle(path);
    REQUIRE(b.dtype == Dtype::u8);
    REQUIRE(b.shape == std::vector<std::size_t>({2, 2}));
    REQUIRE(b.role == "mask");
    REQUIRE(bundle_as_mask(b) == m);
}

TEST_CASE("complex scalar is interleaved f32 little-endian") {
    const auto path = tmp_path("scalar");
    write_bundle(std::vector<cplx>{{1.0, 2.0}}, {1}, path, "kspace");
    const auto raw = slurp(path + ".bin");
    REQUIRE(raw.size() == 8);
    // f32(1.0) = 00 00 80 3f, f32(2.0) = 00 00 00 40
    REQUIRE(raw == std::vector<std::uint8_t>({0x00, 0x00, 0x80, 0x3f, 0x00, 0x00, 0x00, 0x40}));
}

TEST_CASE("c64 round trip is bit-identical") {
    Rng rng(11);
    Image img(64, 64);
    for (cplx& z : img.v) z = {double(float(rng.gauss())), double(float(rng.gauss()))};
    const auto path = tmp_path("c64rt");
    write_bundle(img, path, "echo");
    const Image back = bundle_as_image(read_bundle(path));
    REQUIRE(back == img);
}

TEST_CASE("f32 round trip is bit-identical") {
    Rng rng(12);
    RealMap m(33, 17);
    for (double& x : m.v) x = double(float(rng.uniform(-5, 5)));
    const auto path = tmp_path("f32rt");
    write_bundle(m, path, "map_t1");
    REQUIRE(bundle_as_map(read_bundle(path)) == m);
}

TEST_CASE("payload size must match the sidecar") {
    const auto path = tmp_path("mismatch");
    write_bundle(std::vector<std::uint8_t>{1, 0, 0, 1}, {2, 2}, path, "mask");
    {  // rewrite the sidecar claiming c64
        std::ofstream js(path + ".json", std::ios::trunc);
        js << R"({"shape":[2,2],"dtype":"c64","order":"row-major","endian":"little","role":"x"})";
    }
    REQUIRE_THROWS_AS(read_bundle(path), DataError);
}

TEST_CASE("unknown dtype and missing files are rejected") {
    const auto path = tmp_path("bad");
    write_bundle(std::vector<std::uint8_t>{1}, {1}, path, "mask");
    {
        std::ofstream js(path + ".json", std::ios::trunc);
        js << R"({"shape":[1],"dtype":"i16","order":"row-major","endian":"little","role":"x"})";
    }
    REQUIRE_THROWS_AS(read_bundle(path), DataError);
    REQUIRE_THROWS_AS(read_bundle(tmp_path("never_written")), DataError);
}

TEST_CASE("non-finite values refuse to serialize") {
    Image img(1, 1);
    img(0, 0) = {std::nan(""), 0.0};
    REQUIRE_THROWS_AS(write_bundle(img, tmp_path("nan"), "echo"), DataError);
}

TEST_CASE("metadata survives the sidecar") {
    const auto path = tmp_path("meta");
    nlohmann::json meta{{"tr_ms", 36.0}, {"flip_angles_deg", {5.0, 10.0, 20.0}}};
    write_bundle(std::vector<double>{1.0, 2.0}, {2}, path, "acq", meta);
    const Bundle b = read_bundle(path);
    REQUIRE(b.meta["tr_ms"] == 36.0);
    REQUIRE(b.meta["flip_angles_deg"].size() == 3);
}
