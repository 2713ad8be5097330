#pragma once

#include "credo/rational.hpp"

#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace credo {

class DimensionError : public std::runtime_error {
public:
    explicit DimensionError(const std::string& message) : std::runtime_error(message) {}
};

class SingularMatrixError : public std::runtime_error {
public:
    explicit SingularMatrixError(const std::string& message) : std::runtime_error(message) {}
};

// Dense row-major matrix of exact rationals. Controller dimensions are tiny,
// so everything is by-value and exact.
class RationalMatrix {
public:
    RationalMatrix() : rows_(0), cols_(0) {}
    RationalMatrix(int rows, int cols)
        : rows_(rows), cols_(cols), entries_(static_cast<std::size_t>(rows) * cols) {
        if (rows < 0 || cols < 0) throw DimensionError("negative matrix dimension");
    }
    RationalMatrix(std::initializer_list<std::initializer_list<Rational>> rows);

    static RationalMatrix identity(int n);
    static RationalMatrix zero(int rows, int cols) { return RationalMatrix(rows, cols); }
    // Parses every entry with parse_decimal.
    static RationalMatrix from_strings(const std::vector<std::vector<std::string>>& rows);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    Rational& at(int i, int j) { return entries_[index(i, j)]; }
    const Rational& at(int i, int j) const { return entries_[index(i, j)]; }
    Rational& operator()(int i, int j) { return at(i, j); }
    const Rational& operator()(int i, int j) const { return at(i, j); }

    bool operator==(const RationalMatrix& other) const = default;

    bool is_symmetric() const;
    bool is_zero() const;
    std::string shape_string() const;
    std::string to_string() const;  // debugging aid

private:
    std::size_t index(int i, int j) const {
        if (i < 0 || i >= rows_ || j < 0 || j >= cols_)
            throw DimensionError("index (" + std::to_string(i) + "," + std::to_string(j) +
                                 ") out of range for " + shape_string());
        return static_cast<std::size_t>(i) * cols_ + j;
    }

    int rows_;
    int cols_;
    std::vector<Rational> entries_;
};

RationalMatrix add(const RationalMatrix& a, const RationalMatrix& b);
RationalMatrix sub(const RationalMatrix& a, const RationalMatrix& b);
RationalMatrix multiply(const RationalMatrix& a, const RationalMatrix& b);
RationalMatrix transpose(const RationalMatrix& m);
RationalMatrix scalar_mult(const Rational& s, const RationalMatrix& m);
RationalMatrix block_diag(std::span<const RationalMatrix> blocks);
RationalMatrix extract_submatrix(const RationalMatrix& m, std::span<const int> row_indices,
                                 std::span<const int> col_indices);

// Exact inverse by Gauss-Jordan elimination; throws SingularMatrixError.
RationalMatrix invert(const RationalMatrix& m);

std::vector<Rational> multiply_vec(const RationalMatrix& m, std::span<const Rational> v);
Rational quadratic_form(const RationalMatrix& m, std::span<const Rational> v);  // v^T M v

inline RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b) {
    return multiply(a, b);
}
inline RationalMatrix operator+(const RationalMatrix& a, const RationalMatrix& b) {
    return add(a, b);
}
inline RationalMatrix operator-(const RationalMatrix& a, const RationalMatrix& b) {
    return sub(a, b);
}

}  // namespace credo
