// SPDX-License-Identifier: Apache-2.0
#include "dfsq/tensor_io.hpp"

#include "dfsq/errors.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace dfsq {

namespace {

constexpr char kMagic[8] = {'D', 'F', 'S', 'Q', 'T', 'N', 'S', 'R'};
constexpr unsigned char kVersion = 0x01;
constexpr unsigned char kDtypeF32 = 0x01;
constexpr unsigned char kRank = 4;

void put_u64_le(std::ofstream& os, std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t get_u64_le(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}

} // namespace

Tensor read_tensor(const std::filesystem::path& path, bool allow_nonfinite) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError(IoError::Kind::OpenFailed, "cannot open " + path.string());

    unsigned char header[11];
    if (!is.read(reinterpret_cast<char*>(header), sizeof(header)))
        throw IoError(IoError::Kind::Truncated, path.string() + ": truncated header");
    if (std::memcmp(header, kMagic, 8) != 0)
        throw IoError(IoError::Kind::BadMagic, path.string() + ": bad magic bytes");
    if (header[8] != kVersion)
        throw IoError(IoError::Kind::UnsupportedVersion,
                      path.string() + ": unsupported version " + std::to_string(header[8]));
    if (header[9] != kDtypeF32)
        throw IoError(IoError::Kind::UnsupportedDtype,
                      path.string() + ": unsupported dtype " + std::to_string(header[9]));
    if (header[10] != kRank)
        throw IoError(IoError::Kind::UnsupportedRank,
                      path.string() + ": expected rank 4, got " + std::to_string(header[10]));

    unsigned char dims[8 * kRank];
    if (!is.read(reinterpret_cast<char*>(dims), sizeof(dims)))
        throw IoError(IoError::Kind::Truncated, path.string() + ": truncated dimensions");

    Tensor t;
    std::uint64_t count = 1;
    for (int d = 0; d < kRank; ++d) {
        t.shape[d] = get_u64_le(dims + 8 * d);
        if (t.shape[d] == 0)
            throw IoError(IoError::Kind::MalformedHeader,
                          path.string() + ": zero-sized dimension");
        count *= t.shape[d];
    }
    if (count > (std::uint64_t{1} << 34))
        throw IoError(IoError::Kind::MalformedHeader, path.string() + ": tensor too large");

    t.data.resize(static_cast<std::size_t>(count));
    std::vector<unsigned char> raw(static_cast<std::size_t>(count) * 4);
    if (!is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size())))
        throw IoError(IoError::Kind::Truncated, path.string() + ": truncated payload");
    for (std::size_t i = 0; i < t.data.size(); ++i) {
        std::uint32_t bits = 0;
        for (int b = 0; b < 4; ++b)
            bits |= static_cast<std::uint32_t>(raw[4 * i + b]) << (8 * b);
        t.data[i] = std::bit_cast<float>(bits);
    }

    if (!allow_nonfinite) {
        for (std::size_t i = 0; i < t.data.size(); ++i)
            if (!std::isfinite(t.data[i]))
                throw IoError(IoError::Kind::NonFinite,
                              path.string() + ": non-finite value at index " + std::to_string(i));
    }
    return t;
}

void write_tensor(const Tensor& t, const std::filesystem::path& path) {
    std::uint64_t count = 1;
    for (int d = 0; d < kRank; ++d) count *= t.shape[d];
    if (t.data.size() != count)
        throw ValidationError("write_tensor: data length does not match shape");

    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError(IoError::Kind::OpenFailed, "cannot create " + path.string());

    os.write(kMagic, 8);
    const unsigned char meta[3] = {kVersion, kDtypeF32, kRank};
    os.write(reinterpret_cast<const char*>(meta), 3);
    for (int d = 0; d < kRank; ++d) put_u64_le(os, t.shape[d]);

    std::vector<unsigned char> raw(t.data.size() * 4);
    for (std::size_t i = 0; i < t.data.size(); ++i) {
        const auto bits = std::bit_cast<std::uint32_t>(t.data[i]);
        for (int b = 0; b < 4; ++b)
            raw[4 * i + b] = static_cast<unsigned char>(bits >> (8 * b));
    }
    os.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!os) throw IoError(IoError::Kind::WriteFailed, "write failed: " + path.string());
}

} // namespace dfsq
