#pragma once

#include <zlib.h>

#include <cstdint>
#include <cstring>
#include <fstream>

#include "apf/integrate.hpp"

namespace apf {

struct SnapshotError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// On-disk field snapshot. Layout (little-endian):
///   magic "APFS" | u8 version=1 | u8 dim | u8 reserved x2
///   | u32 n[axis] per axis | f64 box[axis] per axis | f64 time
///   | payload: dim components, each row-major f64 collocation values
///   | u32 CRC-32 of the payload bytes
/// The payload is real-space so files do not depend on any transform
/// normalization. read(write(s)) is bit-exact at this level.
struct Snapshot {
    Grid grid;
    double time = 0.0;
    std::vector<double> payload;  // dim * real_size values, component-major
};

namespace snap_detail {
inline void put_bytes(std::vector<std::uint8_t>& out, const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out.insert(out.end(), b, b + n);
}

template <class T>
inline T take(const std::vector<std::uint8_t>& in, std::size_t& pos) {
    if (pos + sizeof(T) > in.size()) throw SnapshotError("snapshot truncated");
    T v;
    std::memcpy(&v, in.data() + pos, sizeof(T));
    pos += sizeof(T);
    return v;
}
}  // namespace snap_detail

inline std::vector<std::uint8_t> encode_snapshot(const Snapshot& s) {
    using namespace snap_detail;
    s.grid.validate();
    if (s.payload.size() != s.grid.real_size() * static_cast<std::size_t>(s.grid.dim))
        throw SnapshotError("snapshot payload size mismatch");
    std::vector<std::uint8_t> out;
    out.reserve(24 + s.payload.size() * 8 + 4);
    put_bytes(out, "APFS", 4);
    const std::uint8_t version = 1, dim = static_cast<std::uint8_t>(s.grid.dim), zero = 0;
    put_bytes(out, &version, 1);
    put_bytes(out, &dim, 1);
    put_bytes(out, &zero, 1);
    put_bytes(out, &zero, 1);
    for (int a = 0; a < s.grid.dim; ++a) {
        const std::uint32_t n = static_cast<std::uint32_t>(s.grid.n[a]);
        put_bytes(out, &n, 4);
    }
    for (int a = 0; a < s.grid.dim; ++a) put_bytes(out, &s.grid.box[a], 8);
    put_bytes(out, &s.time, 8);
    const std::size_t payload_at = out.size();
    put_bytes(out, s.payload.data(), s.payload.size() * 8);
    const auto crc = static_cast<std::uint32_t>(
        crc32(0L, out.data() + payload_at, static_cast<uInt>(s.payload.size() * 8)));
    put_bytes(out, &crc, 4);
    return out;
}

inline Snapshot decode_snapshot(const std::vector<std::uint8_t>& bytes) {
    using namespace snap_detail;
    std::size_t pos = 0;
    if (bytes.size() < 8 || std::memcmp(bytes.data(), "APFS", 4) != 0)
        throw SnapshotError("bad snapshot magic");
    pos = 4;
    const auto version = take<std::uint8_t>(bytes, pos);
    if (version != 1) throw SnapshotError("unsupported snapshot version");
    const auto dim = take<std::uint8_t>(bytes, pos);
    if (dim != 2 && dim != 3) throw SnapshotError("bad snapshot dimension");
    pos += 2;  // reserved
    Snapshot s;
    s.grid.dim = dim;
    for (int a = 0; a < dim; ++a) s.grid.n[a] = static_cast<int>(take<std::uint32_t>(bytes, pos));
    if (dim == 2) {
        s.grid.n[2] = 0;
        s.grid.box[2] = 0.0;
    }
    for (int a = 0; a < dim; ++a) s.grid.box[a] = take<double>(bytes, pos);
    s.time = take<double>(bytes, pos);
    s.grid.validate();
    const std::size_t count = s.grid.real_size() * dim;
    if (pos + count * 8 + 4 != bytes.size()) throw SnapshotError("snapshot truncated");
    s.payload.resize(count);
    std::memcpy(s.payload.data(), bytes.data() + pos, count * 8);
    const auto crc = static_cast<std::uint32_t>(
        crc32(0L, bytes.data() + pos, static_cast<uInt>(count * 8)));
    pos += count * 8;
    if (crc != take<std::uint32_t>(bytes, pos)) throw SnapshotError("snapshot checksum failure");
    return s;
}

inline Snapshot to_snapshot(const State& st, const Transformer& t) {
    Snapshot s;
    s.grid = st.p.grid;
    s.time = st.t;
    const RealField f = t.inverse(st.p);
    s.payload.reserve(s.grid.real_size() * s.grid.dim);
    for (int c = 0; c < s.grid.dim; ++c)
        s.payload.insert(s.payload.end(), f.comp[c].begin(), f.comp[c].end());
    return s;
}

inline State to_state(const Snapshot& s, const Transformer& t) {
    RealField f(s.grid);
    const std::size_t nr = s.grid.real_size();
    for (int c = 0; c < s.grid.dim; ++c)
        std::copy(s.payload.begin() + c * nr, s.payload.begin() + (c + 1) * nr,
                  f.comp[c].begin());
    State st;
    st.t = s.time;
    st.p = t.forward(f);
    leray_project_inplace(st.p);
    return st;
}

inline void write_snapshot(const State& st, const std::string& path, const Transformer& t) {
    const auto bytes = encode_snapshot(to_snapshot(st, t));
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw SnapshotError("cannot open '" + path + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw SnapshotError("write failed for '" + path + "'");
}

inline std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SnapshotError("cannot open '" + path + "'");
    return std::vector<std::uint8_t>((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
}

inline State read_snapshot(const std::string& path, const Transformer& t) {
    return to_state(decode_snapshot(read_file_bytes(path)), t);
}

}  // namespace apf
