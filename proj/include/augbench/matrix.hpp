#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace augbench {

// Dense row-major matrix of doubles. Rows are the unit of most operations
// here (datasets are row collections), hence the span-based row access.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
        Matrix m;
        for (const auto& r : rows) m.append_row(std::vector<double>(r));
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const {
        return {data_.data() + r * cols_, cols_};
    }

    void append_row(std::span<const double> values) {
        if (rows_ == 0 && cols_ == 0) cols_ = values.size();
        if (values.size() != cols_)
            throw std::invalid_argument("Matrix::append_row: width mismatch");
        data_.insert(data_.end(), values.begin(), values.end());
        ++rows_;
    }

    void append_rows(const Matrix& other) {
        for (std::size_t r = 0; r < other.rows(); ++r) append_row(other.row(r));
    }

    Matrix select_rows(std::span<const std::size_t> indices) const {
        Matrix out(indices.size(), cols_);
        for (std::size_t i = 0; i < indices.size(); ++i) {
            auto src = row(indices[i]);
            auto dst = out.row(i);
            for (std::size_t c = 0; c < cols_; ++c) dst[c] = src[c];
        }
        return out;
    }

    Matrix select_cols(std::span<const std::size_t> indices) const {
        Matrix out(rows_, indices.size());
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t i = 0; i < indices.size(); ++i) out(r, i) = (*this)(r, indices[i]);
        return out;
    }

    std::vector<double> column(std::size_t c) const {
        std::vector<double> out(rows_);
        for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
        return out;
    }

    bool all_finite() const {
        for (double v : data_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

}  // namespace augbench
