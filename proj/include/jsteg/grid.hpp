#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace jsteg {

/// Dense row-major 2-D array. The workhorse container for pixel planes,
/// coefficient planes, probability/cost maps and kernels.
template <typename T>
class Grid {
public:
    Grid() = default;

    Grid(std::size_t height, std::size_t width, T fill = T{})
        : height_(height), width_(width), data_(height * width, fill) {}

    std::size_t height() const { return height_; }
    std::size_t width() const { return width_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    T& operator()(std::size_t row, std::size_t col) {
        return data_[row * width_ + col];
    }
    const T& operator()(std::size_t row, std::size_t col) const {
        return data_[row * width_ + col];
    }

    T& operator[](std::size_t index) { return data_[index]; }
    const T& operator[](std::size_t index) const { return data_[index]; }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }

    auto begin() { return data_.begin(); }
    auto end() { return data_.end(); }
    auto begin() const { return data_.begin(); }
    auto end() const { return data_.end(); }

    bool same_shape(const Grid& other) const {
        return height_ == other.height_ && width_ == other.width_;
    }

    friend bool operator==(const Grid& a, const Grid& b) {
        return a.height_ == b.height_ && a.width_ == b.width_ && a.data_ == b.data_;
    }

private:
    std::size_t height_ = 0;
    std::size_t width_ = 0;
    std::vector<T> data_;
};

using GridD = Grid<double>;

inline void require_same_shape(const GridD& a, const GridD& b, const char* what) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument(std::string(what) + ": shape mismatch");
    }
}

}  // namespace jsteg
