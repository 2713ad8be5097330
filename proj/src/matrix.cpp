#include "credo/matrix.hpp"

#include <sstream>

namespace credo {

RationalMatrix::RationalMatrix(std::initializer_list<std::initializer_list<Rational>> rows) {
    rows_ = static_cast<int>(rows.size());
    cols_ = rows_ == 0 ? 0 : static_cast<int>(rows.begin()->size());
    entries_.reserve(static_cast<std::size_t>(rows_) * cols_);
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != cols_)
            throw DimensionError("ragged initializer for RationalMatrix");
        for (const auto& v : row) entries_.push_back(v);
    }
}

RationalMatrix RationalMatrix::identity(int n) {
    RationalMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

RationalMatrix RationalMatrix::from_strings(const std::vector<std::vector<std::string>>& rows) {
    int r = static_cast<int>(rows.size());
    int c = r == 0 ? 0 : static_cast<int>(rows.front().size());
    RationalMatrix m(r, c);
    for (int i = 0; i < r; ++i) {
        if (static_cast<int>(rows[i].size()) != c)
            throw DimensionError("ragged rows in matrix literal");
        for (int j = 0; j < c; ++j) m.at(i, j) = parse_decimal(rows[i][j]);
    }
    return m;
}

bool RationalMatrix::is_symmetric() const {
    if (rows_ != cols_) return false;
    for (int i = 0; i < rows_; ++i)
        for (int j = i + 1; j < cols_; ++j)
            if (at(i, j) != at(j, i)) return false;
    return true;
}

bool RationalMatrix::is_zero() const {
    for (const auto& e : entries_)
        if (e != 0) return false;
    return true;
}

std::string RationalMatrix::shape_string() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
}

std::string RationalMatrix::to_string() const {
    std::ostringstream os;
    os << "[";
    for (int i = 0; i < rows_; ++i) {
        os << (i ? "; " : "");
        for (int j = 0; j < cols_; ++j) os << (j ? ", " : "") << to_display_decimal(at(i, j));
    }
    os << "]";
    return os.str();
}

RationalMatrix add(const RationalMatrix& a, const RationalMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionError("add: shape mismatch " + a.shape_string() + " vs " + b.shape_string());
    RationalMatrix r(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) r.at(i, j) = a.at(i, j) + b.at(i, j);
    return r;
}

RationalMatrix sub(const RationalMatrix& a, const RationalMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionError("sub: shape mismatch " + a.shape_string() + " vs " + b.shape_string());
    RationalMatrix r(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) r.at(i, j) = a.at(i, j) - b.at(i, j);
    return r;
}

RationalMatrix multiply(const RationalMatrix& a, const RationalMatrix& b) {
    if (a.cols() != b.rows())
        throw DimensionError("multiply: shape mismatch " + a.shape_string() + " vs " +
                             b.shape_string());
    RationalMatrix r(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) {
            if (a.at(i, k) == 0) continue;
            for (int j = 0; j < b.cols(); ++j) r.at(i, j) += a.at(i, k) * b.at(k, j);
        }
    return r;
}

RationalMatrix transpose(const RationalMatrix& m) {
    RationalMatrix r(m.cols(), m.rows());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) r.at(j, i) = m.at(i, j);
    return r;
}

RationalMatrix scalar_mult(const Rational& s, const RationalMatrix& m) {
    RationalMatrix r(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) r.at(i, j) = s * m.at(i, j);
    return r;
}

RationalMatrix block_diag(std::span<const RationalMatrix> blocks) {
    int rows = 0, cols = 0;
    for (const auto& b : blocks) {
        rows += b.rows();
        cols += b.cols();
    }
    RationalMatrix r(rows, cols);
    int ro = 0, co = 0;
    for (const auto& b : blocks) {
        for (int i = 0; i < b.rows(); ++i)
            for (int j = 0; j < b.cols(); ++j) r.at(ro + i, co + j) = b.at(i, j);
        ro += b.rows();
        co += b.cols();
    }
    return r;
}

RationalMatrix extract_submatrix(const RationalMatrix& m, std::span<const int> row_indices,
                                 std::span<const int> col_indices) {
    RationalMatrix r(static_cast<int>(row_indices.size()), static_cast<int>(col_indices.size()));
    for (int i = 0; i < r.rows(); ++i)
        for (int j = 0; j < r.cols(); ++j) r.at(i, j) = m.at(row_indices[i], col_indices[j]);
    return r;
}

RationalMatrix invert(const RationalMatrix& m) {
    if (m.rows() != m.cols())
        throw DimensionError("invert: matrix is " + m.shape_string() + ", need square");
    int n = m.rows();
    RationalMatrix a = m;
    RationalMatrix inv = RationalMatrix::identity(n);
    for (int col = 0; col < n; ++col) {
        int pivot = -1;
        for (int i = col; i < n; ++i)
            if (a.at(i, col) != 0) {
                pivot = i;
                break;
            }
        if (pivot < 0) throw SingularMatrixError("invert: singular matrix (column " +
                                                 std::to_string(col) + ")");
        if (pivot != col)
            for (int j = 0; j < n; ++j) {
                std::swap(a.at(pivot, j), a.at(col, j));
                std::swap(inv.at(pivot, j), inv.at(col, j));
            }
        Rational p = a.at(col, col);
        for (int j = 0; j < n; ++j) {
            a.at(col, j) /= p;
            inv.at(col, j) /= p;
        }
        for (int i = 0; i < n; ++i) {
            if (i == col || a.at(i, col) == 0) continue;
            Rational f = a.at(i, col);
            for (int j = 0; j < n; ++j) {
                a.at(i, j) -= f * a.at(col, j);
                inv.at(i, j) -= f * inv.at(col, j);
            }
        }
    }
    return inv;
}

std::vector<Rational> multiply_vec(const RationalMatrix& m, std::span<const Rational> v) {
    if (m.cols() != static_cast<int>(v.size()))
        throw DimensionError("multiply_vec: " + m.shape_string() + " times vector of size " +
                             std::to_string(v.size()));
    std::vector<Rational> r(m.rows());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) r[i] += m.at(i, j) * v[j];
    return r;
}

Rational quadratic_form(const RationalMatrix& m, std::span<const Rational> v) {
    std::vector<Rational> mv = multiply_vec(m, v);
    Rational sum(0);
    for (std::size_t i = 0; i < v.size(); ++i) sum += v[i] * mv[i];
    return sum;
}

}  // namespace credo
