#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace patchsim {

/// Dense row-major matrix of bits, 64 columns per word.
class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), words_per_row_((cols + 63) / 64),
          words_(rows * words_per_row_, 0) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    bool get(std::size_t r, std::size_t c) const {
        return (words_[r * words_per_row_ + c / 64] >> (c % 64)) & 1u;
    }
    void set(std::size_t r, std::size_t c, bool value = true) {
        auto& w = words_[r * words_per_row_ + c / 64];
        const std::uint64_t mask = std::uint64_t{1} << (c % 64);
        w = value ? (w | mask) : (w & ~mask);
    }
    /// Sets columns [from, cols) of row r.
    void set_suffix(std::size_t r, std::size_t from) {
        for (std::size_t c = from; c < cols_; ++c) set(r, c);
    }

    bool row_any(std::size_t r) const {
        for (std::size_t w = 0; w < words_per_row_; ++w) {
            if (words_[r * words_per_row_ + w] != 0) return true;
        }
        return false;
    }
    bool column_any(std::size_t c) const {
        for (std::size_t r = 0; r < rows_; ++r) {
            if (get(r, c)) return true;
        }
        return false;
    }
    bool any() const {
        for (auto w : words_) {
            if (w != 0) return true;
        }
        return false;
    }
    std::size_t count() const {
        std::size_t n = 0;
        for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
        return n;
    }

    bool same_shape(const BitMatrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

    /// Element-wise product. Shapes must match.
    BitMatrix operator&(const BitMatrix& o) const {
        BitMatrix out(*this);
        for (std::size_t i = 0; i < words_.size(); ++i) out.words_[i] &= o.words_[i];
        return out;
    }
    BitMatrix& operator|=(const BitMatrix& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
        return *this;
    }
    bool is_subset_of(const BitMatrix& o) const {
        for (std::size_t i = 0; i < words_.size(); ++i) {
            if ((words_[i] & ~o.words_[i]) != 0) return false;
        }
        return true;
    }

    friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t words_per_row_ = 0;
    std::vector<std::uint64_t> words_;
};

}  // namespace patchsim
