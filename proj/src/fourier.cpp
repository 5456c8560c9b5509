#include "grind/fourier.hpp"

#include <numbers>

namespace grind {

FrequencySet frequency_set(const std::vector<int>& per_dim_counts) {
    if (per_dim_counts.empty())
        throw std::invalid_argument("frequency_set: need at least one dimension");
    std::vector<std::vector<int>> axes;
    Eigen::Index total = 1;
    for (int n : per_dim_counts) {
        if (n < 1)
            throw std::invalid_argument("frequency_set: per-dimension count must be >= 1");
        std::vector<int> axis;
        const int lo = (n % 2 == 0) ? -n / 2 : -(n - 1) / 2;
        const int hi = (n % 2 == 0) ? n / 2 - 1 : (n - 1) / 2;
        for (int k = lo; k <= hi; ++k) axis.push_back(k);
        axes.push_back(std::move(axis));
        total *= n;
    }
    const int m = static_cast<int>(per_dim_counts.size());
    FrequencySet fs;
    fs.per_dim_counts = per_dim_counts;
    fs.indices.resize(total, m);
    for (Eigen::Index row = 0; row < total; ++row) {
        Eigen::Index rem = row;
        for (int d = m - 1; d >= 0; --d) {
            const auto& axis = axes[static_cast<std::size_t>(d)];
            fs.indices(row, d) = axis[static_cast<std::size_t>(rem % axis.size())];
            rem /= static_cast<Eigen::Index>(axis.size());
        }
    }
    return fs;
}

void ScatteredField::validate() const {
    if (points.rows() != values.rows() || points.rows() < 1)
        throw std::invalid_argument("ScatteredField: points/values length mismatch or empty");
    if ((points.array() < 0.0).any() || (points.array() > 1.0).any())
        throw std::invalid_argument("ScatteredField: coordinates must lie in [0,1]");
    if (!values.allFinite())
        throw std::invalid_argument("ScatteredField: non-finite values");
}

ComplexMatrix design_matrix(const Eigen::MatrixXd& points, const FrequencySet& freq) {
    if (points.cols() != freq.dims())
        throw std::invalid_argument("design_matrix: point dimension does not match frequency set");
    const double two_pi = 2.0 * std::numbers::pi;
    ComplexMatrix A(points.rows(), freq.size());
    for (Eigen::Index j = 0; j < points.rows(); ++j) {
        for (Eigen::Index l = 0; l < freq.size(); ++l) {
            double phase = 0.0;
            for (int d = 0; d < freq.dims(); ++d)
                phase += freq.indices(l, d) * points(j, d);
            phase *= two_pi;
            A(j, l) = Complex(std::cos(phase), std::sin(phase));
        }
    }
    return A;
}

FourierCoefficients fit_coefficients(const ScatteredField& field, const FrequencySet& freq, double ridge) {
    field.validate();
    ComplexLlsSolver solver(design_matrix(field.points, freq), ridge);
    FourierCoefficients out;
    out.freq = freq;
    out.coeffs = solver.solve(ComplexMatrix(field.values.cast<Complex>()));
    return out;
}

Eigen::MatrixXd evaluate(const FourierCoefficients& coeffs, const Eigen::MatrixXd& targets) {
    return (design_matrix(targets, coeffs.freq) * coeffs.coeffs).real();
}

namespace detail {

Eigen::MatrixXd embed_subdomain(const Eigen::MatrixXd& points) {
    return (1.0 + points.array()) / 2.0;
}

Eigen::MatrixXd mirror_points(const Eigen::MatrixXd& embedded) {
    const int m = static_cast<int>(embedded.cols());
    const Eigen::Index h = embedded.rows();
    const int copies = 1 << m;
    Eigen::MatrixXd out(h * copies, m);
    for (int mask = 0; mask < copies; ++mask)
        for (Eigen::Index j = 0; j < h; ++j)
            for (int d = 0; d < m; ++d) {
                const double y = embedded(j, d);
                out(static_cast<Eigen::Index>(mask) * h + j, d) = (mask >> d & 1) ? 1.0 - y : y;
            }
    return out;
}

}  // namespace detail

FiOperator::FiOperator(const Eigen::MatrixXd& sample_points, const Eigen::MatrixXd& target_points,
                       int n_freq, double ridge, bool mirror)
    : mirror_(mirror), n_samples_(sample_points.rows()) {
    if (n_freq < 1)
        throw std::invalid_argument("FiOperator: n_freq must be >= 1");
    if (sample_points.cols() != target_points.cols())
        throw std::invalid_argument("FiOperator: sample/target dimension mismatch");
    const int m = static_cast<int>(sample_points.cols());
    freq_ = frequency_set(std::vector<int>(static_cast<std::size_t>(m), n_freq));
    Eigen::MatrixXd fit_points = mirror_ ? detail::mirror_points(detail::embed_subdomain(sample_points))
                                         : sample_points;
    Eigen::MatrixXd eval_points = mirror_ ? detail::embed_subdomain(target_points) : target_points;
    const double eff = detail::effective_ridge(ridge, fit_points.rows(), freq_.size());
    solver_.emplace(design_matrix(fit_points, freq_), eff);
    eval_matrix_ = design_matrix(eval_points, freq_);
}

ComplexMatrix FiOperator::fit(const Eigen::MatrixXd& values) const {
    if (values.rows() != n_samples_)
        throw std::invalid_argument("FiOperator: value row count does not match sample points");
    Eigen::MatrixXd v = values;
    if (mirror_) {
        const Eigen::Index copies = solver_->rows() / n_samples_;
        v.resize(n_samples_ * copies, values.cols());
        for (Eigen::Index r = 0; r < copies; ++r)
            v.middleRows(r * n_samples_, n_samples_) = values;
    }
    return solver_->solve(ComplexMatrix(v.cast<Complex>()));
}

Eigen::MatrixXd FiOperator::apply(const Eigen::MatrixXd& values) const {
    return (eval_matrix_ * fit(values)).real();
}

Eigen::MatrixXd fi_layer(const ScatteredField& field, const Eigen::MatrixXd& targets, int n_freq,
                         double ridge) {
    field.validate();
    return FiOperator(field.points, targets, n_freq, ridge).apply(field.values);
}

Eigen::MatrixXd mirror_fi_layer(const ScatteredField& field, const Eigen::MatrixXd& targets, int n_freq,
                                double ridge) {
    field.validate();
    return FiOperator(field.points, targets, n_freq, ridge, /*mirror=*/true).apply(field.values);
}

}  // namespace grind
