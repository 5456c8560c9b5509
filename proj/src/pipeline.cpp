#include "grind/pipeline.hpp"

#include <fstream>

namespace grind {

void GrindConfig::validate() const {
    if (n_freq < 1) throw std::invalid_argument("GrindConfig: n_freq must be >= 1");
    if (grid_nx < 3 || grid_ny < 3)
        throw std::invalid_argument("GrindConfig: grid resolution must be >= 3 per dimension");
    if (ridge < 0.0) throw std::invalid_argument("GrindConfig: ridge must be >= 0");
    if (!(dt > 0.0)) throw std::invalid_argument("GrindConfig: dt must be > 0");
    if (substeps < 1) throw std::invalid_argument("GrindConfig: substeps must be >= 1");
}

GrindPipeline::GrindPipeline(const Eigen::MatrixXd& low_points, StencilModel model, GrindConfig cfg)
    : model_(std::move(model)), cfg_(cfg) {
    cfg_.validate();
    model_.validate();
    grid_points_ = grid_targets({cfg_.grid_nx, cfg_.grid_ny});
    fi_up_ = std::make_unique<FiOperator>(low_points, grid_points_, cfg_.n_freq, cfg_.ridge, cfg_.use_mirror);
    fi_down_ = std::make_unique<FiOperator>(grid_points_, low_points, cfg_.n_freq, cfg_.ridge, cfg_.use_mirror);
}

ScatteredField GrindPipeline::step(const ScatteredField& u_low) const {
    u_low.validate();
    const Eigen::MatrixXd grid_values = fi_up_->apply(u_low.values);
    GridField state = points_to_grid(grid_values, cfg_.grid_nx, cfg_.grid_ny);
    if (!state.all_finite())
        throw std::runtime_error("grind_step: non-finite grid after FI up-interpolation");
    const auto frames = forecast(model_, state, cfg_.dt, 1, cfg_.substeps);
    ScatteredField out;
    out.points = u_low.points;
    out.values = fi_down_->apply(grid_to_points(frames.back()));
    if (!out.values.allFinite())
        throw std::runtime_error("grind_step: non-finite output after FI down-mapping");
    return out;
}

std::vector<ScatteredField> GrindPipeline::rollout(const ScatteredField& u0_low, int horizon) const {
    if (horizon < 1) throw std::invalid_argument("rollout: horizon must be >= 1");
    std::vector<ScatteredField> out;
    out.reserve(static_cast<std::size_t>(horizon));
    ScatteredField current = u0_low;
    for (int t = 0; t < horizon; ++t) {
        current = step(current);
        out.push_back(current);
    }
    return out;
}

ScatteredField grind_step(const ScatteredField& u_low, const StencilModel& model, const GrindConfig& cfg) {
    return GrindPipeline(u_low.points, model, cfg).step(u_low);
}

std::vector<ScatteredField> rollout(const ScatteredField& u0_low, const StencilModel& model,
                                    const GrindConfig& cfg, int horizon) {
    if (cfg.cache_factorization)
        return GrindPipeline(u0_low.points, model, cfg).rollout(u0_low, horizon);
    if (horizon < 1) throw std::invalid_argument("rollout: horizon must be >= 1");
    std::vector<ScatteredField> out;
    ScatteredField current = u0_low;
    for (int t = 0; t < horizon; ++t) {
        current = grind_step(current, model, cfg);
        out.push_back(current);
    }
    return out;
}

std::vector<ScatteredField> persistence(const ScatteredField& u0_low, int horizon) {
    if (horizon < 1) throw std::invalid_argument("persistence: horizon must be >= 1");
    return std::vector<ScatteredField>(static_cast<std::size_t>(horizon), u0_low);
}

double scattered_mse(const ScatteredField& a, const ScatteredField& b) {
    if (a.values.rows() != b.values.rows() || a.values.cols() != b.values.cols())
        throw std::invalid_argument("scattered_mse: shape mismatch");
    return (a.values - b.values).squaredNorm() / static_cast<double>(a.values.size());
}

RolloutReport evaluate_rollout(const std::vector<ScatteredField>& predictions,
                               const std::vector<ScatteredField>& truth, const std::string& system,
                               const std::string& model) {
    if (predictions.size() != truth.size())
        throw std::invalid_argument("evaluate_rollout: prediction/truth length mismatch");
    RolloutReport report;
    report.system = system;
    report.model = model;
    report.per_step_mse.reserve(predictions.size());
    for (std::size_t t = 0; t < predictions.size(); ++t)
        report.per_step_mse.push_back(scattered_mse(predictions[t], truth[t]));
    return report;
}

void write_report_csv(const std::vector<RolloutReport>& reports, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write report CSV: " + path);
    out << "system,model,step,mse\n";
    for (const auto& r : reports)
        for (std::size_t t = 0; t < r.per_step_mse.size(); ++t)
            out << r.system << "," << r.model << "," << (t + 1) << ","
                << detail::format_double(r.per_step_mse[t]) << "\n";
    if (!out) throw std::runtime_error("short write on report CSV: " + path);
}

}  // namespace grind
