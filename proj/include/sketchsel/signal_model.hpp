#pragma once

#include <cstdint>

#include "sketchsel/graph.hpp"
#include "sketchsel/matrix.hpp"

namespace sketchsel {

// Bandlimited stochastic signal model: x = V_k z with z zero mean and
// covariance given by the k x k frequency template T. Induces the singular
// input covariance R_x = V_k T V_k^T of rank at most k.
struct BandlimitedModel {
    SpectralBasis basis;
    DenseMatrix template_t;  // k x k symmetric PSD

    static BandlimitedModel white(SpectralBasis basis);  // T = I_k
    static BandlimitedModel with_template(SpectralBasis basis, DenseMatrix t);
};

// Additive noise model with full covariance; must be positive definite.
struct NoiseModel {
    DenseMatrix r_w;

    static NoiseModel iso(int n, double sigma2);  // sigma2 * I, sigma2 > 0
    static NoiseModel with_covariance(DenseMatrix r_w);
};

// A batch of signals, one per column.
struct SignalBatch {
    int n = 0;
    int count = 0;
    DenseMatrix data;  // n x count

    static SignalBatch from_matrix(DenseMatrix m);
    std::vector<double> column(int c) const;
};

DenseMatrix covariance_from_model(const BandlimitedModel& model);

// Each column is V_k * T^{1/2} * g with independent standard normal g; column
// c draws from the substream (seed, "signal", c), so batches are identical no
// matter how generation is scheduled.
SignalBatch sample_signals(const BandlimitedModel& model, int count, std::uint64_t seed);

SignalBatch add_noise(const SignalBatch& batch, const NoiseModel& noise, std::uint64_t seed);

// sigma_coeff times the mean squared column norm of the batch.
double noise_power(double sigma_coeff, const SignalBatch& batch);

// Uncentered second moment (1/count) X X^T; `center` subtracts the sample
// mean first, for ingested real data.
DenseMatrix empirical_covariance(const SignalBatch& batch, bool center = false);

}  // namespace sketchsel
