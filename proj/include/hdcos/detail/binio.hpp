#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "hdcos/errors.hpp"
#include "hdcos/fixed_ring.hpp"

namespace hdcos::detail {

inline void put_u16le(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(std::uint8_t(v));
    out.push_back(std::uint8_t(v >> 8));
}

inline void put_u32le(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(std::uint8_t(v >> (8 * i)));
}

inline void put_u64le(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(std::uint8_t(v >> (8 * i)));
}

inline std::uint16_t get_u16le(const std::uint8_t* p) {
    return std::uint16_t(p[0]) | std::uint16_t(p[1]) << 8;
}

inline std::uint32_t get_u32le(const std::uint8_t* p) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(p[i]) << (8 * i);
    return v;
}

inline std::uint64_t get_u64le(const std::uint8_t* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(p[i]) << (8 * i);
    return v;
}

inline std::vector<std::uint8_t> pack_rings(std::span<const RingVal> vals) {
    std::vector<std::uint8_t> out;
    out.reserve(vals.size() * 8);
    for (const RingVal& r : vals) put_u64le(out, r.v);
    return out;
}

inline std::vector<RingVal> unpack_rings(std::span<const std::uint8_t> bytes) {
    if (bytes.size() % 8 != 0) throw FormatError("ring payload not a multiple of 8 bytes");
    std::vector<RingVal> out(bytes.size() / 8);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = RingVal{get_u64le(bytes.data() + 8 * i)};
    return out;
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot open for writing: " + path);
    return f;
}

inline std::ifstream open_in(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot open for reading: " + path);
    return f;
}

inline void write_bytes(std::ofstream& f, std::span<const std::uint8_t> bytes) {
    f.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
}

inline std::vector<std::uint8_t> read_bytes(std::ifstream& f, std::size_t n, const char* what) {
    std::vector<std::uint8_t> buf(n);
    f.read(reinterpret_cast<char*>(buf.data()), std::streamsize(n));
    if (std::size_t(f.gcount()) != n) throw FormatError(std::string("truncated file reading ") + what);
    return buf;
}

}  // namespace hdcos::detail
