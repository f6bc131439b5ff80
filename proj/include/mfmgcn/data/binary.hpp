// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// Little-endian primitives shared by the packed dataset, prediction,
// graph and checkpoint formats.
namespace mfmgcn::data {

class BinaryWriter {
public:
    explicit BinaryWriter(std::ostream& os) : os_(os) {}

    void magic(std::string_view four_chars);
    void u32(std::uint32_t v);
    void i64(std::int64_t v);
    void f64(double v);
    void str(std::string_view s);  // u32 length + bytes
    void f64_array(std::span<const double> v);
    void bits(std::span<const std::uint8_t> flags);  // LSB-first bit packing

private:
    std::ostream& os_;
};

class BinaryReader {
public:
    BinaryReader(std::istream& is, std::string context) : is_(is), context_(std::move(context)) {}

    // Throws FormatError when the next four bytes differ.
    void expect_magic(std::string_view four_chars);
    std::uint32_t u32();
    std::int64_t i64();
    double f64();
    std::string str();
    std::vector<double> f64_array(std::size_t n);
    std::vector<std::uint8_t> bits(std::size_t n);
    bool at_end();

private:
    void read(void* dst, std::size_t n);

    std::istream& is_;
    std::string context_;
};

} // namespace mfmgcn::data
