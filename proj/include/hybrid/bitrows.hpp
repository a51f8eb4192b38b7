// bitrows.hpp - dense bit matrix with row-wise set operations
#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <vector>

namespace hybrid {

class BitRows {
 public:
  BitRows() = default;
  BitRows(std::size_t rows, std::size_t bits)
      : rows_(rows), bits_(bits), stride_((bits + 63) / 64), data_(rows * stride_, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t bits() const { return bits_; }
  std::size_t stride() const { return stride_; }

  void set(std::size_t r, std::size_t b) { data_[r * stride_ + b / 64] |= std::uint64_t{1} << (b % 64); }
  bool test(std::size_t r, std::size_t b) const {
    return (data_[r * stride_ + b / 64] >> (b % 64)) & 1;
  }
  std::span<std::uint64_t> row(std::size_t r) { return {data_.data() + r * stride_, stride_}; }
  std::span<const std::uint64_t> row(std::size_t r) const { return {data_.data() + r * stride_, stride_}; }

  std::size_t count(std::size_t r) const {
    std::size_t c = 0;
    for (auto w : row(r)) c += std::popcount(w);
    return c;
  }
  void fill_row(std::size_t r) {
    auto rw = row(r);
    for (auto& w : rw) w = ~std::uint64_t{0};
    if (bits_ % 64) rw[stride_ - 1] = (std::uint64_t{1} << (bits_ % 64)) - 1;
  }
  void clear() { std::fill(data_.begin(), data_.end(), 0); }

  // First set bit at or after `from`, wrapping around; bits() if the row is empty.
  std::size_t next_set_cyclic(std::size_t r, std::size_t from) const {
    auto rw = row(r);
    for (std::size_t pass = 0; pass < 2; ++pass) {
      std::size_t start = pass == 0 ? from : 0;
      std::size_t stop = pass == 0 ? bits_ : from;
      for (std::size_t w = start / 64; w * 64 < stop; ++w) {
        std::uint64_t word = rw[w];
        if (w == start / 64) word &= ~std::uint64_t{0} << (start % 64);
        if (word) {
          std::size_t b = w * 64 + std::countr_zero(word);
          if (b < stop) return b;
          break;
        }
      }
    }
    return bits_;
  }

 private:
  std::size_t rows_ = 0, bits_ = 0, stride_ = 0;
  std::vector<std::uint64_t> data_;
};

inline void or_into(std::span<std::uint64_t> dst, std::span<const std::uint64_t> src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] |= src[i];
}

inline void and_into(std::span<std::uint64_t> dst, std::span<const std::uint64_t> src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] &= src[i];
}

}  // namespace hybrid
