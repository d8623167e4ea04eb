#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace hcran {

// Dense row-major matrix.
template <class T>
class Grid {
public:
    Grid() = default;
    Grid(int rows, int cols, T value = T{})
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, value) {
        if (rows < 0 || cols < 0) throw std::invalid_argument("negative grid dimension");
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    T& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
    const T& operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

    T& at(int r, int c) {
        check(r, c);
        return (*this)(r, c);
    }
    const T& at(int r, int c) const {
        check(r, c);
        return (*this)(r, c);
    }

    void fill(T value) { std::fill(data_.begin(), data_.end(), value); }
    std::vector<T>& data() { return data_; }
    const std::vector<T>& data() const { return data_; }

    bool same_shape(int rows, int cols) const { return rows_ == rows && cols_ == cols; }
    template <class U>
    bool same_shape(const Grid<U>& o) const { return rows_ == o.rows() && cols_ == o.cols(); }

    friend bool operator==(const Grid& a, const Grid& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    void check(int r, int c) const {
        if (r < 0 || r >= rows_ || c < 0 || c >= cols_)
            throw std::out_of_range("grid index (" + std::to_string(r) + "," + std::to_string(c) + ")");
    }

    int rows_ = 0;
    int cols_ = 0;
    std::vector<T> data_;
};

}  // namespace hcran
