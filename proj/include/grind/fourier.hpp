#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "grind/numerics.hpp"

namespace grind {

/// Multi-index set K = K_{N_1} x ... x K_{N_M} of retained Fourier modes.
/// Per dimension the 1-D set is {-N/2, ..., N/2 - 1} for even N and
/// {-(N-1)/2, ..., (N-1)/2} for odd N. Rows of `indices` are the
/// multi-indices in lexicographic order.
struct FrequencySet {
    std::vector<int> per_dim_counts;
    Eigen::MatrixXi indices;

    int dims() const { return static_cast<int>(per_dim_counts.size()); }
    Eigen::Index size() const { return indices.rows(); }
};

FrequencySet frequency_set(const std::vector<int>& per_dim_counts);

/// Scattered observations: H points in [0,1]^M with C value channels.
struct ScatteredField {
    Eigen::MatrixXd points;  // H x M
    Eigen::MatrixXd values;  // H x C

    int dims() const { return static_cast<int>(points.cols()); }
    Eigen::Index n_points() const { return points.rows(); }
    int n_channels() const { return static_cast<int>(values.cols()); }

    void validate() const;
};

struct FourierCoefficients {
    FrequencySet freq;
    ComplexMatrix coeffs;  // |K| x C
};

/// Basis exponentials e^{2 pi i k.x}: rows follow `points`, columns follow
/// freq.indices order.
ComplexMatrix design_matrix(const Eigen::MatrixXd& points, const FrequencySet& freq);

FourierCoefficients fit_coefficients(const ScatteredField& field, const FrequencySet& freq, double ridge);

/// Series evaluation Re(sum_k c_k e^{2 pi i k.x}) per channel.
Eigen::MatrixXd evaluate(const FourierCoefficients& coeffs, const Eigen::MatrixXd& targets);

namespace detail {

/// Underdetermined fits (|K| > H) get a tiny ridge when none was requested;
/// well-posed fits keep the plain SVD route.
inline double effective_ridge(double ridge, Eigen::Index n_samples, Eigen::Index n_coeffs) {
    if (ridge == 0.0 && n_coeffs > n_samples) return 1e-8;
    return ridge;
}

/// Embedding into the subdomain [1/2, 1]^M, p -> (1 + p) / 2.
Eigen::MatrixXd embed_subdomain(const Eigen::MatrixXd& points);

/// Sample replication across the 2^M mirror images y -> 1 - y.
Eigen::MatrixXd mirror_points(const Eigen::MatrixXd& embedded);

}  // namespace detail

/// The fold phi(x) = 2|1/2 - x| identifying mirrored preimages.
inline double mirror_fold(double x) { return 2.0 * std::abs(0.5 - x); }

/// Cached Fourier interpolation operator for fixed sample and target
/// locations: factorizes the design matrix once, then maps value matrices
/// (H x C) to interpolated values (T x C). With `mirror` the samples are
/// replicated across all 2^M mirror images of the subdomain embedding and
/// targets are evaluated at their embedded positions, which extends the
/// periodic fit to non-periodic data.
class FiOperator {
public:
    FiOperator(const Eigen::MatrixXd& sample_points, const Eigen::MatrixXd& target_points, int n_freq,
               double ridge, bool mirror = false);

    const FrequencySet& freq() const { return freq_; }

    ComplexMatrix fit(const Eigen::MatrixXd& values) const;

    Eigen::MatrixXd apply(const Eigen::MatrixXd& values) const;

private:
    bool mirror_;
    Eigen::Index n_samples_;
    FrequencySet freq_;
    std::optional<ComplexLlsSolver> solver_;
    ComplexMatrix eval_matrix_;
};

/// One-shot FI layer: fit coefficients to the scattered field with the same
/// frequency count in every dimension, then evaluate at the targets.
Eigen::MatrixXd fi_layer(const ScatteredField& field, const Eigen::MatrixXd& targets, int n_freq,
                         double ridge);

/// Non-periodic variant via the mirror extension.
Eigen::MatrixXd mirror_fi_layer(const ScatteredField& field, const Eigen::MatrixXd& targets, int n_freq,
                                double ridge);

}  // namespace grind
