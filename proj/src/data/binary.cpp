// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfmgcn/data/binary.hpp"

#include "mfmgcn/errors.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <istream>
#include <ostream>

namespace mfmgcn::data {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
void to_le(T v, unsigned char* out)
{
    std::memcpy(out, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(out, out + sizeof(T));
}

template <typename T>
T from_le(const unsigned char* in)
{
    unsigned char tmp[sizeof(T)];
    std::memcpy(tmp, in, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(tmp, tmp + sizeof(T));
    T v;
    std::memcpy(&v, tmp, sizeof(T));
    return v;
}

constexpr std::uint32_t kMaxString = 1u << 20;

} // namespace

void BinaryWriter::magic(std::string_view four_chars)
{
    os_.write(four_chars.data(), 4);
}

void BinaryWriter::u32(std::uint32_t v)
{
    unsigned char b[4];
    to_le(v, b);
    os_.write(reinterpret_cast<const char*>(b), 4);
}

void BinaryWriter::i64(std::int64_t v)
{
    unsigned char b[8];
    to_le(v, b);
    os_.write(reinterpret_cast<const char*>(b), 8);
}

void BinaryWriter::f64(double v)
{
    unsigned char b[8];
    to_le(v, b);
    os_.write(reinterpret_cast<const char*>(b), 8);
}

void BinaryWriter::str(std::string_view s)
{
    u32(static_cast<std::uint32_t>(s.size()));
    os_.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void BinaryWriter::f64_array(std::span<const double> v)
{
    std::vector<unsigned char> buf(v.size() * 8);
    for (std::size_t i = 0; i < v.size(); ++i) to_le(v[i], buf.data() + 8 * i);
    os_.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
}

void BinaryWriter::bits(std::span<const std::uint8_t> flags)
{
    std::vector<char> packed((flags.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < flags.size(); ++i)
        if (flags[i]) packed[i / 8] = static_cast<char>(packed[i / 8] | (1 << (i % 8)));
    os_.write(packed.data(), static_cast<std::streamsize>(packed.size()));
}

void BinaryReader::read(void* dst, std::size_t n)
{
    is_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is_.gcount()) != n) throw FormatError(context_ + ": unexpected end of file");
}

void BinaryReader::expect_magic(std::string_view four_chars)
{
    char b[4];
    read(b, 4);
    if (std::string_view(b, 4) != four_chars) {
        throw FormatError(context_ + ": bad magic bytes, expected '" + std::string(four_chars) + "'");
    }
}

std::uint32_t BinaryReader::u32()
{
    unsigned char b[4];
    read(b, 4);
    return from_le<std::uint32_t>(b);
}

std::int64_t BinaryReader::i64()
{
    unsigned char b[8];
    read(b, 8);
    return from_le<std::int64_t>(b);
}

double BinaryReader::f64()
{
    unsigned char b[8];
    read(b, 8);
    return from_le<double>(b);
}

std::string BinaryReader::str()
{
    const std::uint32_t n = u32();
    if (n > kMaxString) throw FormatError(context_ + ": implausible string length " + std::to_string(n));
    std::string s(n, '\0');
    read(s.data(), n);
    return s;
}

std::vector<double> BinaryReader::f64_array(std::size_t n)
{
    std::vector<unsigned char> buf(n * 8);
    read(buf.data(), buf.size());
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = from_le<double>(buf.data() + 8 * i);
    return out;
}

std::vector<std::uint8_t> BinaryReader::bits(std::size_t n)
{
    std::vector<unsigned char> packed((n + 7) / 8);
    read(packed.data(), packed.size());
    std::vector<std::uint8_t> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = (packed[i / 8] >> (i % 8)) & 1u;
    return out;
}

bool BinaryReader::at_end()
{
    return is_.peek() == std::char_traits<char>::eof();
}

} // namespace mfmgcn::data
