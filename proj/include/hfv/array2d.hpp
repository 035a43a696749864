#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace hfv {

// Dense 2D array over the index box [i_lo, i_hi) x [j_lo, j_hi), i fastest.
// Lower bounds may be negative so ghost layers index naturally.
template <class T>
class Array2D {
 public:
  Array2D() = default;
  Array2D(int i_lo, int i_hi, int j_lo, int j_hi, const T& init = T{})
      : i_lo_(i_lo), i_hi_(i_hi), j_lo_(j_lo), j_hi_(j_hi),
        data_(static_cast<std::size_t>(i_hi - i_lo) * static_cast<std::size_t>(j_hi - j_lo), init) {
    assert(i_hi >= i_lo && j_hi >= j_lo);
  }

  T& operator()(int i, int j) { return data_[offset(i, j)]; }
  const T& operator()(int i, int j) const { return data_[offset(i, j)]; }

  int i_lo() const { return i_lo_; }
  int i_hi() const { return i_hi_; }
  int j_lo() const { return j_lo_; }
  int j_hi() const { return j_hi_; }
  std::size_t size() const { return data_.size(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

  friend bool operator==(const Array2D&, const Array2D&) = default;

 private:
  std::size_t offset(int i, int j) const {
    assert(i >= i_lo_ && i < i_hi_ && j >= j_lo_ && j < j_hi_);
    return static_cast<std::size_t>(j - j_lo_) * static_cast<std::size_t>(i_hi_ - i_lo_) +
           static_cast<std::size_t>(i - i_lo_);
  }

  int i_lo_ = 0, i_hi_ = 0, j_lo_ = 0, j_hi_ = 0;
  std::vector<T> data_;
};

}  // namespace hfv
