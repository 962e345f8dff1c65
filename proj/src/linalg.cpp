#include "sketchsel/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sketchsel/errors.hpp"

namespace sketchsel {

namespace {

void require_square(const DenseMatrix& a, const char* who) {
    if (a.rows != a.cols)
        throw ModelError(std::string(who) + ": matrix is " + std::to_string(a.rows) + "x" +
                         std::to_string(a.cols) + ", expected square");
}

void require_symmetric(const DenseMatrix& a, const char* who) {
    require_square(a, who);
    const double scale = max_abs(a);
    const double tol = 1e-12 * (scale > 0.0 ? scale : 1.0);
    for (int i = 0; i < a.rows; ++i)
        for (int j = i + 1; j < a.cols; ++j)
            if (std::fabs(a(i, j) - a(j, i)) > tol)
                throw ModelError(std::string(who) + ": matrix is not symmetric at (" +
                                 std::to_string(i) + "," + std::to_string(j) + ")");
}

double off_norm(const DenseMatrix& a) {
    double s = 0.0;
    for (int i = 0; i < a.rows; ++i)
        for (int j = i + 1; j < a.cols; ++j) s += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(s);
}

// One Jacobi rotation zeroing B(p,q); accumulates the rotation into V.
void jacobi_rotate(DenseMatrix& b, DenseMatrix& v, int p, int q) {
    const int n = b.rows;
    const double bpq = b(p, q);
    const double theta = (b(q, q) - b(p, p)) / (2.0 * bpq);
    double t;
    if (std::fabs(theta) > 1e150) {
        t = 1.0 / (2.0 * theta);  // avoid theta^2 overflow
    } else {
        t = ((theta >= 0.0) ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
    }
    const double c = 1.0 / std::sqrt(t * t + 1.0);
    const double s = t * c;
    const double tau = s / (1.0 + c);

    b(p, p) -= t * bpq;
    b(q, q) += t * bpq;
    b(p, q) = 0.0;
    b(q, p) = 0.0;
    for (int r = 0; r < n; ++r) {
        if (r != p && r != q) {
            const double brp = b(r, p);
            const double brq = b(r, q);
            b(r, p) = b(p, r) = brp - s * (brq + tau * brp);
            b(r, q) = b(q, r) = brq + s * (brp - tau * brq);
        }
        const double vrp = v(r, p);
        const double vrq = v(r, q);
        v(r, p) = vrp - s * (vrq + tau * vrp);
        v(r, q) = vrq + s * (vrp - tau * vrq);
    }
}

}  // namespace

EigResult sym_eig(const DenseMatrix& a) {
    require_symmetric(a, "sym_eig");
    const int n = a.rows;
    DenseMatrix b = symmetrize(a);
    DenseMatrix v = identity(n);

    const double fnorm = fro_norm(b);
    const double thresh = 1e-12 * fnorm;
    int sweeps = 0;
    while (off_norm(b) > thresh) {
        if (++sweeps > 100)
            throw NumericError("sym_eig: Jacobi iteration did not converge in 100 sweeps");
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q)
                if (b(p, q) != 0.0) jacobi_rotate(b, v, p, q);
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int i, int j) { return b(i, i) > b(j, j); });

    EigResult res;
    res.values.resize(n);
    res.vectors = DenseMatrix(n, n);
    for (int j = 0; j < n; ++j) {
        const int src = order[j];
        res.values[j] = b(src, src);
        int imax = 0;
        double vmax = 0.0;
        for (int i = 0; i < n; ++i) {
            const double av = std::fabs(v(i, src));
            if (av > vmax) {
                vmax = av;
                imax = i;
            }
        }
        const double sign = v(imax, src) < 0.0 ? -1.0 : 1.0;
        for (int i = 0; i < n; ++i) res.vectors(i, j) = sign * v(i, src);
    }
    return res;
}

DenseMatrix solve_spd(const DenseMatrix& a, const DenseMatrix& b) {
    require_symmetric(a, "solve_spd");
    if (a.rows != b.rows)
        throw ModelError("solve_spd: right-hand side has " + std::to_string(b.rows) +
                         " rows, expected " + std::to_string(a.rows));
    const int n = a.rows;
    const double pivot_floor = 1e-13 * max_abs(a);

    DenseMatrix l(n, n);
    for (int j = 0; j < n; ++j) {
        double d = a(j, j);
        for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > pivot_floor) || d <= 0.0)
            throw NumericError("solve_spd: non-positive pivot at index " + std::to_string(j) +
                               " (value " + std::to_string(d) + ")");
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (int i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / ljj;
        }
    }

    DenseMatrix x = b;
    for (int col = 0; col < b.cols; ++col) {
        // L y = b
        for (int i = 0; i < n; ++i) {
            double s = x(i, col);
            for (int k = 0; k < i; ++k) s -= l(i, k) * x(k, col);
            x(i, col) = s / l(i, i);
        }
        // L^T x = y
        for (int i = n - 1; i >= 0; --i) {
            double s = x(i, col);
            for (int k = i + 1; k < n; ++k) s -= l(k, i) * x(k, col);
            x(i, col) = s / l(i, i);
        }
    }
    return x;
}

namespace {

// V f(lambda) V^T for a spectral function f; result explicitly symmetrized.
template <class F>
DenseMatrix spectral_map(const EigResult& e, F&& f) {
    const int n = e.vectors.rows;
    DenseMatrix scaled = e.vectors;
    for (int j = 0; j < n; ++j) {
        const double fj = f(e.values[j]);
        for (int i = 0; i < n; ++i) scaled(i, j) *= fj;
    }
    return symmetrize(matmul(scaled, transpose(e.vectors)));
}

}  // namespace

DenseMatrix inv_sqrt_spd(const DenseMatrix& a) {
    const EigResult e = sym_eig(a);
    for (std::size_t i = 0; i < e.values.size(); ++i)
        if (e.values[i] <= 0.0)
            throw NumericError("inv_sqrt_spd: eigenvalue " + std::to_string(e.values[i]) +
                               " at position " + std::to_string(i) + " is not positive");
    return spectral_map(e, [](double lam) { return 1.0 / std::sqrt(lam); });
}

DenseMatrix psd_sqrt(const DenseMatrix& a) {
    const EigResult e = sym_eig(a);
    const double lmax = e.values.empty() ? 0.0 : std::fabs(e.values.front());
    const double floor = -1e-10 * (lmax > 0.0 ? lmax : 1.0);
    for (std::size_t i = 0; i < e.values.size(); ++i)
        if (e.values[i] < floor)
            throw NumericError("psd_sqrt: matrix has negative eigenvalue " +
                               std::to_string(e.values[i]));
    return spectral_map(e, [](double lam) { return lam > 0.0 ? std::sqrt(lam) : 0.0; });
}

DenseMatrix pinv(const DenseMatrix& a, double tol) {
    if (a.rows == 0 || a.cols == 0) return DenseMatrix(a.cols, a.rows);
    const bool use_gram = a.cols <= a.rows;  // eig of the smaller Gram matrix
    const DenseMatrix at = transpose(a);
    const DenseMatrix gram = use_gram ? matmul(at, a) : matmul(a, at);
    const EigResult e = sym_eig(gram);

    const double lmax = std::max(e.values.front(), 0.0);
    if (lmax == 0.0) return DenseMatrix(a.cols, a.rows);
    // sigma < tol*sigma_max <=> lambda < tol^2*lambda_max. The Jacobi sweep stops
    // at off(G) <= 1e-12*||G||_F, which by Weyl bounds the eigenvalue error, so
    // anything below that is indistinguishable from an exact zero.
    const double noise_floor = 1e-12 * fro_norm(gram);
    const double cut = std::max(tol * tol * lmax, noise_floor);

    const int s = gram.rows;
    DenseMatrix scaled = e.vectors;  // columns scaled by 1/lambda over the kept spectrum
    for (int j = 0; j < s; ++j) {
        const double lam = e.values[j];
        const double inv = (lam > cut) ? 1.0 / lam : 0.0;
        for (int i = 0; i < s; ++i) scaled(i, j) *= inv;
    }
    const DenseMatrix p = matmul(scaled, transpose(e.vectors));
    return use_gram ? matmul(p, at) : matmul(at, p);
}

double min_eigenvalue(const DenseMatrix& a) {
    const EigResult e = sym_eig(a);
    return e.values.back();
}

}  // namespace sketchsel
