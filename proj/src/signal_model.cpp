#include "sketchsel/signal_model.hpp"

#include <cmath>
#include <string>

#include "sketchsel/errors.hpp"
#include "sketchsel/linalg.hpp"
#include "sketchsel/rng.hpp"

namespace sketchsel {

BandlimitedModel BandlimitedModel::white(SpectralBasis basis) {
    BandlimitedModel m;
    m.template_t = identity(basis.k);
    m.basis = std::move(basis);
    return m;
}

BandlimitedModel BandlimitedModel::with_template(SpectralBasis basis, DenseMatrix t) {
    if (t.rows != basis.k || t.cols != basis.k)
        throw ModelError("BandlimitedModel: template is " + std::to_string(t.rows) + "x" +
                         std::to_string(t.cols) + ", expected " + std::to_string(basis.k) +
                         "x" + std::to_string(basis.k));
    const double scale = std::max(max_abs(t), 1.0);
    for (int i = 0; i < t.rows; ++i)
        for (int j = i + 1; j < t.cols; ++j)
            if (std::fabs(t(i, j) - t(j, i)) > 1e-12 * scale)
                throw ModelError("BandlimitedModel: template not symmetric");
    BandlimitedModel m;
    m.template_t = std::move(t);
    m.basis = std::move(basis);
    return m;
}

NoiseModel NoiseModel::iso(int n, double sigma2) {
    if (!(sigma2 > 0.0)) throw ModelError("NoiseModel: sigma2 must be positive");
    NoiseModel nm;
    nm.r_w = diag_matrix(std::vector<double>(n, sigma2));
    return nm;
}

NoiseModel NoiseModel::with_covariance(DenseMatrix r_w) {
    if (r_w.rows != r_w.cols) throw ModelError("NoiseModel: covariance must be square");
    NoiseModel nm;
    nm.r_w = std::move(r_w);
    return nm;
}

SignalBatch SignalBatch::from_matrix(DenseMatrix m) {
    SignalBatch b;
    b.n = m.rows;
    b.count = m.cols;
    b.data = std::move(m);
    return b;
}

std::vector<double> SignalBatch::column(int c) const {
    if (c < 0 || c >= count) throw ModelError("SignalBatch: column out of range");
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = data(i, c);
    return x;
}

DenseMatrix covariance_from_model(const BandlimitedModel& model) {
    const DenseMatrix vt = matmul(model.basis.v_k, model.template_t);
    return symmetrize(matmul(vt, transpose(model.basis.v_k)));
}

SignalBatch sample_signals(const BandlimitedModel& model, int count, std::uint64_t seed) {
    if (count < 1) throw ModelError("sample_signals: count must be >= 1");
    const int n = model.basis.v_k.rows;
    const int k = model.basis.k;
    const DenseMatrix root = psd_sqrt(model.template_t);

    SignalBatch batch;
    batch.n = n;
    batch.count = count;
    batch.data = DenseMatrix(n, count);
    std::vector<double> g(k), z(k);
    for (int c = 0; c < count; ++c) {
        Rng rng = Rng::stream(seed, "signal", static_cast<std::uint64_t>(c));
        for (int i = 0; i < k; ++i) g[i] = rng.gaussian();
        z = matvec(root, g);
        const std::vector<double> x = matvec(model.basis.v_k, z);
        for (int i = 0; i < n; ++i) batch.data(i, c) = x[i];
    }
    return batch;
}

SignalBatch add_noise(const SignalBatch& batch, const NoiseModel& noise, std::uint64_t seed) {
    if (noise.r_w.rows != batch.n)
        throw ModelError("add_noise: noise covariance is " + std::to_string(noise.r_w.rows) +
                         "-dimensional, batch is " + std::to_string(batch.n));
    const int n = batch.n;

    // Fast path for isotropic covariance; general covariances go through the
    // symmetric square root.
    bool iso = true;
    const double sigma2 = noise.r_w(0, 0);
    for (int i = 0; i < n && iso; ++i)
        for (int j = 0; j < n; ++j)
            if (noise.r_w(i, j) != (i == j ? sigma2 : 0.0)) {
                iso = false;
                break;
            }

    DenseMatrix root;
    double sigma = 0.0;
    if (iso) {
        if (!(sigma2 > 0.0)) throw ModelError("add_noise: noise covariance must be PD");
        sigma = std::sqrt(sigma2);
    } else {
        root = psd_sqrt(noise.r_w);
    }

    SignalBatch out = batch;
    std::vector<double> g(n);
    for (int c = 0; c < batch.count; ++c) {
        Rng rng = Rng::stream(seed, "noise", static_cast<std::uint64_t>(c));
        for (int i = 0; i < n; ++i) g[i] = rng.gaussian();
        if (iso) {
            for (int i = 0; i < n; ++i) out.data(i, c) += sigma * g[i];
        } else {
            const std::vector<double> w = matvec(root, g);
            for (int i = 0; i < n; ++i) out.data(i, c) += w[i];
        }
    }
    return out;
}

double noise_power(double sigma_coeff, const SignalBatch& batch) {
    if (batch.count < 1) throw ModelError("noise_power: empty batch");
    double total = 0.0;
    for (double v : batch.data.data) total += v * v;
    return sigma_coeff * total / batch.count;
}

DenseMatrix empirical_covariance(const SignalBatch& batch, bool center) {
    if (batch.count < 1) throw ModelError("empirical_covariance: empty batch");
    DenseMatrix x = batch.data;
    if (center) {
        for (int i = 0; i < batch.n; ++i) {
            double mean = 0.0;
            for (int c = 0; c < batch.count; ++c) mean += x(i, c);
            mean /= batch.count;
            for (int c = 0; c < batch.count; ++c) x(i, c) -= mean;
        }
    }
    return symmetrize((1.0 / batch.count) * matmul(x, transpose(x)));
}

}  // namespace sketchsel
