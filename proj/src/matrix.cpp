#include "sketchsel/matrix.hpp"

#include <cmath>
#include <string>

#include "sketchsel/errors.hpp"

namespace sketchsel {

DenseMatrix::DenseMatrix(int r, int c) : rows(r), cols(c) {
    if (r < 0 || c < 0) throw ModelError("DenseMatrix: negative dimension");
    data.assign(static_cast<std::size_t>(r) * c, 0.0);
}

DenseMatrix DenseMatrix::from_data(int r, int c, std::vector<double> d) {
    if (r < 0 || c < 0) throw ModelError("DenseMatrix: negative dimension");
    if (d.size() != static_cast<std::size_t>(r) * c)
        throw ModelError("DenseMatrix: data length " + std::to_string(d.size()) +
                         " does not match " + std::to_string(r) + "x" + std::to_string(c));
    for (double v : d)
        if (!std::isfinite(v)) throw ModelError("DenseMatrix: non-finite entry");
    DenseMatrix m;
    m.rows = r;
    m.cols = c;
    m.data = std::move(d);
    return m;
}

DenseMatrix identity(int n) {
    DenseMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix diag_matrix(const std::vector<double>& d) {
    const int n = static_cast<int>(d.size());
    DenseMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = d[i];
    return m;
}

std::vector<double> diagonal(const DenseMatrix& a) {
    const int n = a.rows < a.cols ? a.rows : a.cols;
    std::vector<double> d(n);
    for (int i = 0; i < n; ++i) d[i] = a(i, i);
    return d;
}

DenseMatrix transpose(const DenseMatrix& a) {
    DenseMatrix t(a.cols, a.rows);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
    return t;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols != b.rows)
        throw ModelError("matmul: inner dimensions " + std::to_string(a.cols) + " vs " +
                         std::to_string(b.rows));
    DenseMatrix c(a.rows, b.cols);
    // i-k-j order keeps both B and C row accesses contiguous.
    for (int i = 0; i < a.rows; ++i) {
        double* ci = &c.data[static_cast<std::size_t>(i) * c.cols];
        for (int k = 0; k < a.cols; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            const double* bk = &b.data[static_cast<std::size_t>(k) * b.cols];
            for (int j = 0; j < b.cols; ++j) ci[j] += aik * bk[j];
        }
    }
    return c;
}

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
    if (!a.same_shape(b)) throw ModelError("matrix add: shape mismatch");
    DenseMatrix c = a;
    for (std::size_t i = 0; i < c.data.size(); ++i) c.data[i] += b.data[i];
    return c;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
    if (!a.same_shape(b)) throw ModelError("matrix sub: shape mismatch");
    DenseMatrix c = a;
    for (std::size_t i = 0; i < c.data.size(); ++i) c.data[i] -= b.data[i];
    return c;
}

DenseMatrix operator*(double s, const DenseMatrix& a) {
    DenseMatrix c = a;
    for (double& v : c.data) v *= s;
    return c;
}

std::vector<double> matvec(const DenseMatrix& a, const std::vector<double>& x) {
    if (x.size() != static_cast<std::size_t>(a.cols))
        throw ModelError("matvec: dimension mismatch");
    std::vector<double> y(a.rows, 0.0);
    for (int i = 0; i < a.rows; ++i) {
        const double* ai = &a.data[static_cast<std::size_t>(i) * a.cols];
        double s = 0.0;
        for (int j = 0; j < a.cols; ++j) s += ai[j] * x[j];
        y[i] = s;
    }
    return y;
}

DenseMatrix gather_rows(const DenseMatrix& a, const std::vector<int>& idx) {
    DenseMatrix g(static_cast<int>(idx.size()), a.cols);
    for (std::size_t r = 0; r < idx.size(); ++r) {
        const int i = idx[r];
        if (i < 0 || i >= a.rows) throw ModelError("gather_rows: index out of range");
        for (int j = 0; j < a.cols; ++j) g(static_cast<int>(r), j) = a(i, j);
    }
    return g;
}

DenseMatrix gather_cols(const DenseMatrix& a, const std::vector<int>& idx) {
    DenseMatrix g(a.rows, static_cast<int>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) {
        const int j = idx[c];
        if (j < 0 || j >= a.cols) throw ModelError("gather_cols: index out of range");
        for (int i = 0; i < a.rows; ++i) g(i, static_cast<int>(c)) = a(i, j);
    }
    return g;
}

DenseMatrix symmetrize(const DenseMatrix& a) {
    if (a.rows != a.cols) throw ModelError("symmetrize: matrix not square");
    DenseMatrix s(a.rows, a.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) s(i, j) = 0.5 * (a(i, j) + a(j, i));
    return s;
}

double trace(const DenseMatrix& a) {
    double t = 0.0;
    const int n = a.rows < a.cols ? a.rows : a.cols;
    for (int i = 0; i < n; ++i) t += a(i, i);
    return t;
}

double max_abs(const DenseMatrix& a) {
    double m = 0.0;
    for (double v : a.data) {
        const double av = std::fabs(v);
        if (av > m) m = av;
    }
    return m;
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
    if (!a.same_shape(b)) throw ModelError("max_abs_diff: shape mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double d = std::fabs(a.data[i] - b.data[i]);
        if (d > m) m = d;
    }
    return m;
}

double fro_norm(const DenseMatrix& a) {
    double s = 0.0;
    for (double v : a.data) s += v * v;
    return std::sqrt(s);
}

}  // namespace sketchsel
