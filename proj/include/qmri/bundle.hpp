#ifndef QMRI_BUNDLE_HPP
#define QMRI_BUNDLE_HPP

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmri/array.hpp"
#include "qmri/errors.hpp"

// On-disk array format: `<path>.bin` holds the flat payload (little-endian,
// row-major; c64 = interleaved real/imag f32, reals = f32, masks = u8 0/1),
// `<path>.json` is the sidecar {shape, dtype, order, endian, role, meta}.

namespace qmri {

enum class Dtype { c64, f32, u8 };

inline std::string dtype_name(Dtype d) {
    switch (d) {
        case Dtype::c64: return "c64";
        case Dtype::f32: return "f32";
        default: return "u8";
    }
}

inline std::size_t dtype_size(Dtype d) {
    switch (d) {
        case Dtype::c64: return 8;
        case Dtype::f32: return 4;
        default: return 1;
    }
}

struct Bundle {
    std::vector<std::size_t> shape;
    Dtype dtype = Dtype::f32;
    std::string role;
    nlohmann::json meta;  // free-form acquisition metadata
    // exactly one of these is populated, per dtype
    std::vector<cplx> cdata;
    std::vector<double> fdata;
    std::vector<std::uint8_t> bdata;

    std::size_t count() const {
        return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                               std::multiplies<>());
    }
};

namespace detail {

inline void put_f32(std::vector<std::uint8_t>& out, float f) {
    auto u = std::bit_cast<std::uint32_t>(f);
    out.push_back(std::uint8_t(u));
    out.push_back(std::uint8_t(u >> 8));
    out.push_back(std::uint8_t(u >> 16));
    out.push_back(std::uint8_t(u >> 24));
}

inline float get_f32(const std::uint8_t* p) {
    std::uint32_t u = std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 |
                      std::uint32_t(p[2]) << 16 | std::uint32_t(p[3]) << 24;
    return std::bit_cast<float>(u);
}

inline void write_files(const std::string& path, const std::vector<std::uint8_t>& payload,
                        const std::vector<std::size_t>& shape, Dtype d,
                        const std::string& role, const nlohmann::json& meta) {
    nlohmann::json side;
    side["shape"] = shape;
    side["dtype"] = dtype_name(d);
    side["order"] = "row-major";
    side["endian"] = "little";
    side["role"] = role;
    if (!meta.is_null()) side["meta"] = meta;

    std::ofstream bin(path + ".bin", std::ios::binary | std::ios::trunc);
    if (!bin) throw DataError("write_bundle: cannot open " + path + ".bin");
    bin.write(reinterpret_cast<const char*>(payload.data()),
              std::streamsize(payload.size()));
    if (!bin) throw DataError("write_bundle: short write to " + path + ".bin");
    bin.close();

    std::ofstream js(path + ".json", std::ios::trunc);
    if (!js) throw DataError("write_bundle: cannot open " + path + ".json");
    js << side.dump(2) << "\n";
}

}  // namespace detail

inline void write_bundle(const std::vector<cplx>& data, const std::vector<std::size_t>& shape,
                         const std::string& path, const std::string& role,
                         const nlohmann::json& meta = nullptr) {
    std::vector<std::uint8_t> payload;
    payload.reserve(data.size() * 8);
    for (const cplx& z : data) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw DataError("write_bundle: non-finite value in " + path);
        detail::put_f32(payload, float(z.real()));
        detail::put_f32(payload, float(z.imag()));
    }
    detail::write_files(path, payload, shape, Dtype::c64, role, meta);
}

inline void write_bundle(const std::vector<double>& data, const std::vector<std::size_t>& shape,
                         const std::string& path, const std::string& role,
                         const nlohmann::json& meta = nullptr) {
    std::vector<std::uint8_t> payload;
    payload.reserve(data.size() * 4);
    for (double x : data) {
        if (!std::isfinite(x)) throw DataError("write_bundle: non-finite value in " + path);
        detail::put_f32(payload, float(x));
    }
    detail::write_files(path, payload, shape, Dtype::f32, role, meta);
}

inline void write_bundle(const std::vector<std::uint8_t>& data,
                         const std::vector<std::size_t>& shape, const std::string& path,
                         const std::string& role, const nlohmann::json& meta = nullptr) {
    std::vector<std::uint8_t> payload;
    payload.reserve(data.size());
    for (auto b : data) payload.push_back(b ? 1 : 0);
    detail::write_files(path, payload, shape, Dtype::u8, role, meta);
}

inline void write_bundle(const Image& img, const std::string& path, const std::string& role,
                         const nlohmann::json& meta = nullptr) {
    write_bundle(img.v, {img.rows, img.cols}, path, role, meta);
}

inline void write_bundle(const RealMap& m, const std::string& path, const std::string& role,
                         const nlohmann::json& meta = nullptr) {
    write_bundle(m.v, {m.rows, m.cols}, path, role, meta);
}

inline void write_bundle(const Mask& m, const std::string& path, const std::string& role,
                         const nlohmann::json& meta = nullptr) {
    write_bundle(m.v, {m.rows, m.cols}, path, role, meta);
}

inline Bundle read_bundle(const std::string& path) {
    namespace fs = std::filesystem;
    if (!fs::exists(path + ".json") || !fs::exists(path + ".bin"))
        throw DataError("read_bundle: missing " + path + ".{json,bin}");

    std::ifstream js(path + ".json");
    nlohmann::json side;
    try {
        js >> side;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("read_bundle: bad sidecar " + path + ".json: " + e.what());
    }

    Bundle b;
    b.shape = side.at("shape").get<std::vector<std::size_t>>();
    b.role = side.value("role", "");
    if (side.contains("meta")) b.meta = side["meta"];
    const std::string dt = side.at("dtype").get<std::string>();
    if (dt == "c64") b.dtype = Dtype::c64;
    else if (dt == "f32") b.dtype = Dtype::f32;
    else if (dt == "u8") b.dtype = Dtype::u8;
    else throw DataError("read_bundle: unknown dtype '" + dt + "' in " + path);

    std::ifstream bin(path + ".bin", std::ios::binary);
    std::vector<std::uint8_t> raw((std::istreambuf_iterator<char>(bin)),
                                  std::istreambuf_iterator<char>());
    const std::size_t expect = b.count() * dtype_size(b.dtype);
    if (raw.size() != expect)
        throw DataError("read_bundle: payload size " + std::to_string(raw.size()) +
                        " != shape requires " + std::to_string(expect) + " in " + path);

    switch (b.dtype) {
        case Dtype::c64:
            b.cdata.resize(b.count());
            for (std::size_t i = 0; i < b.cdata.size(); ++i)
                b.cdata[i] = {detail::get_f32(&raw[8 * i]), detail::get_f32(&raw[8 * i + 4])};
            break;
        case Dtype::f32:
            b.fdata.resize(b.count());
            for (std::size_t i = 0; i < b.fdata.size(); ++i)
                b.fdata[i] = detail::get_f32(&raw[4 * i]);
            break;
        case Dtype::u8:
            b.bdata = std::move(raw);
            break;
    }
    return b;
}

inline Image bundle_as_image(const Bundle& b) {
    if (b.dtype != Dtype::c64 || b.shape.size() != 2)
        throw DataError("bundle: expected 2-D c64 array, role=" + b.role);
    Image img(b.shape[0], b.shape[1]);
    img.v = b.cdata;
    return img;
}

inline RealMap bundle_as_map(const Bundle& b) {
    if (b.dtype != Dtype::f32 || b.shape.size() != 2)
        throw DataError("bundle: expected 2-D f32 array, role=" + b.role);
    RealMap m(b.shape[0], b.shape[1]);
    m.v = b.fdata;
    return m;
}

inline Mask bundle_as_mask(const Bundle& b) {
    if (b.dtype != Dtype::u8 || b.shape.size() != 2)
        throw DataError("bundle: expected 2-D u8 array, role=" + b.role);
    Mask m(b.shape[0], b.shape[1]);
    m.v = b.bdata;
    return m;
}

}  // namespace qmri

#endif
