#pragma once

// Binary checkpoint of a run in progress. Byte layout, little-endian:
//
//   offset  size  field
//   0       8     magic "BWCKPT\0\0"
//   8       4     u32 format version (1)
//   12      4     u32 reserved, 0
//   16      8     u64 height h
//   24      8     u64 columns applied so far
//   32      8     f64 leak_top
//   40      8     f64 leak_bottom
//   48      16h   up-mode amplitudes, (f64 re, f64 im) for rows 0..h-1
//   48+16h  16h   down-mode amplitudes, same layout

#include <braggwalk/errors.hpp>
#include <braggwalk/walk.hpp>

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

namespace braggwalk {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

inline constexpr std::array<char, 8> kCheckpointMagic{'B', 'W', 'C', 'K', 'P', 'T', '\0', '\0'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
    WalkState state;
    std::uint64_t column = 0;
};

namespace detail {

template <class T>
void write_pod(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_pod(std::istream& is) {
    T v{};
    if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw ConfigError("checkpoint: truncated file");
    return v;
}

}  // namespace detail

inline void save_checkpoint(std::ostream& os, const WalkState& state, std::uint64_t column) {
    os.write(kCheckpointMagic.data(), kCheckpointMagic.size());
    detail::write_pod(os, kCheckpointVersion);
    detail::write_pod(os, std::uint32_t{0});
    detail::write_pod(os, static_cast<std::uint64_t>(state.height()));
    detail::write_pod(os, column);
    detail::write_pod(os, state.leak_top());
    detail::write_pod(os, state.leak_bottom());
    for (auto plane : {state.up(), state.down()})
        for (const cplx& v : plane) {
            detail::write_pod(os, v.real());
            detail::write_pod(os, v.imag());
        }
}

inline Checkpoint load_checkpoint(std::istream& is) {
    std::array<char, 8> magic{};
    if (!is.read(magic.data(), magic.size()) || magic != kCheckpointMagic)
        throw ConfigError("checkpoint: bad magic");
    const auto version = detail::read_pod<std::uint32_t>(is);
    if (version != kCheckpointVersion)
        throw ConfigError("checkpoint: unsupported version " + std::to_string(version));
    detail::read_pod<std::uint32_t>(is);
    const auto height = detail::read_pod<std::uint64_t>(is);
    const auto column = detail::read_pod<std::uint64_t>(is);
    const auto top = detail::read_pod<double>(is);
    const auto bottom = detail::read_pod<double>(is);
    if (height == 0 || height > (std::uint64_t{1} << 32)) throw ConfigError("checkpoint: implausible height");
    std::vector<cplx> up(height), down(height);
    for (auto* plane : {&up, &down})
        for (auto& v : *plane) {
            const double re = detail::read_pod<double>(is);
            const double im = detail::read_pod<double>(is);
            v = {re, im};
        }
    return Checkpoint{restore_walk_state(std::move(up), std::move(down), top, bottom), column};
}

inline void save_checkpoint(const std::string& path, const WalkState& state, std::uint64_t column) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("checkpoint: cannot open " + path + " for writing");
    save_checkpoint(os, state, column);
}

inline Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("checkpoint: cannot open " + path);
    return load_checkpoint(is);
}

}  // namespace braggwalk
