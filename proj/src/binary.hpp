#pragma once

#include "holodepth/error.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

namespace holodepth::detail {

class ByteWriter {
 public:
  void bytes(std::string_view raw) { out_.append(raw); }
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int shift = 0; shift < 32; shift += 8) out_.push_back(static_cast<char>((v >> shift) & 0xFF));
  }
  void u64(std::uint64_t v) {
    for (int shift = 0; shift < 64; shift += 8) out_.push_back(static_cast<char>((v >> shift) & 0xFF));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

  std::string take() { return std::move(out_); }
  std::size_t size() const { return out_.size(); }

 private:
  std::string out_;
};

class ByteReader {
 public:
  ByteReader(std::string_view data, std::string context) : data_(data), context_(std::move(context)) {}

  std::string_view bytes(std::size_t n) {
    require(n);
    const auto view = data_.substr(pos_, n);
    pos_ += n;
    return view;
  }
  std::uint8_t u8() {
    require(1);
    return static_cast<std::uint8_t>(data_[pos_++]);
  }
  std::uint32_t u32() {
    require(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_++])) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    require(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_++])) << (8 * i);
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }

  std::size_t remaining() const { return data_.size() - pos_; }
  void require(std::size_t n) const {
    if (remaining() < n) throw FormatError(context_ + ": truncated file");
  }
  void expect_end() const {
    if (remaining() != 0)
      throw FormatError(context_ + ": " + std::to_string(remaining()) + " trailing bytes");
  }

 private:
  std::string_view data_;
  std::string context_;
  std::size_t pos_ = 0;
};

}  // namespace holodepth::detail
