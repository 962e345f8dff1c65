#pragma once

// Shared helpers for the test suites: seeded random matrices and a
// multivariate normal sampler used as an independent Monte-Carlo oracle.

#include <cmath>
#include <vector>

#include "sketchsel/linalg.hpp"
#include "sketchsel/matrix.hpp"
#include "sketchsel/rng.hpp"

namespace testutil {

using sketchsel::DenseMatrix;
using sketchsel::Rng;

inline DenseMatrix random_matrix(int rows, int cols, Rng& rng) {
    DenseMatrix m(rows, cols);
    for (double& v : m.data) v = rng.gaussian();
    return m;
}

inline DenseMatrix random_symmetric(int n, Rng& rng) {
    DenseMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const double v = rng.gaussian();
            m(i, j) = v;
            m(j, i) = v;
        }
    return m;
}

// A^T A + ridge*I for a Gaussian A: SPD with high probability 1 for ridge > 0.
inline DenseMatrix random_spd(int n, Rng& rng, double ridge = 1.0) {
    const DenseMatrix a = random_matrix(n, n, rng);
    DenseMatrix s = matmul(transpose(a), a);
    for (int i = 0; i < n; ++i) s(i, i) += ridge;
    return s;
}

// Rank-r PSD matrix B B^T with B n-by-r Gaussian.
inline DenseMatrix random_psd_rank(int n, int r, Rng& rng) {
    const DenseMatrix b = random_matrix(n, r, rng);
    return matmul(b, transpose(b));
}

// Draws from N(0, cov) through the symmetric PSD square root; independent of
// the library's signal-model sampling path.
class MvnSampler {
 public:
    MvnSampler(const DenseMatrix& cov, Rng rng)
        : root_(sketchsel::psd_sqrt(cov)), rng_(rng) {}

    std::vector<double> draw() {
        std::vector<double> g(root_.rows);
        for (double& v : g) v = rng_.gaussian();
        return matvec(root_, g);
    }

 private:
    DenseMatrix root_;
    Rng rng_;
};

inline double sq_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

inline std::vector<double> vec_sub(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return d;
}

inline std::vector<double> vec_add(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> s(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) s[i] = a[i] + b[i];
    return s;
}

// Mean and standard error of the mean.
struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
};

inline MeanStderr mean_stderr(const std::vector<double>& xs) {
    MeanStderr r;
    const double n = static_cast<double>(xs.size());
    for (double x : xs) r.mean += x;
    r.mean /= n;
    double var = 0.0;
    for (double x : xs) var += (x - r.mean) * (x - r.mean);
    var /= (n - 1.0);
    r.stderr_ = std::sqrt(var / n);
    return r;
}

}  // namespace testutil
