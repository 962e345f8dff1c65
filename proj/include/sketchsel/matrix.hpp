#pragma once

#include <cstddef>
#include <vector>

namespace sketchsel {

// Dense real matrix, row-major, 64-bit IEEE-754 entries. The universal numeric
// carrier of the library; all operators, covariances, bases and sketches are
// DenseMatrix values.
struct DenseMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;  // row-major, size rows*cols

    DenseMatrix() = default;
    DenseMatrix(int r, int c);  // zero-filled

    // Validating constructor: checks length and that every entry is finite.
    static DenseMatrix from_data(int r, int c, std::vector<double> d);

    double& operator()(int i, int j) {
        return data[static_cast<std::size_t>(i) * cols + j];
    }
    double operator()(int i, int j) const {
        return data[static_cast<std::size_t>(i) * cols + j];
    }

    bool same_shape(const DenseMatrix& other) const {
        return rows == other.rows && cols == other.cols;
    }
};

DenseMatrix identity(int n);
DenseMatrix diag_matrix(const std::vector<double>& d);
std::vector<double> diagonal(const DenseMatrix& a);

DenseMatrix transpose(const DenseMatrix& a);
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator*(double s, const DenseMatrix& a);

std::vector<double> matvec(const DenseMatrix& a, const std::vector<double>& x);

// C*A for a row-selection C given by `idx`: picks rows of A in the order listed.
DenseMatrix gather_rows(const DenseMatrix& a, const std::vector<int>& idx);
// A*C^T: picks columns of A in the order listed.
DenseMatrix gather_cols(const DenseMatrix& a, const std::vector<int>& idx);

// (A + A^T)/2
DenseMatrix symmetrize(const DenseMatrix& a);

double trace(const DenseMatrix& a);
double max_abs(const DenseMatrix& a);
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);
double fro_norm(const DenseMatrix& a);

}  // namespace sketchsel
