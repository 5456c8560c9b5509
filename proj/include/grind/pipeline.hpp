#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "grind/dataset.hpp"
#include "grind/fourier.hpp"
#include "grind/grid.hpp"
#include "grind/stencil.hpp"

namespace grind {

struct GrindConfig {
    int n_freq = 18;
    int grid_nx = 64;
    int grid_ny = 64;
    double ridge = 0.0;
    double dt = 0.01;      // one recorded step per grind_step
    int substeps = 4;
    bool use_mirror = false;
    bool cache_factorization = true;

    void validate() const;
};

/// Per-step MSE of a forecasting run against scattered ground truth.
struct RolloutReport {
    std::string system;
    std::string model;
    std::vector<double> per_step_mse;

    int horizon() const { return static_cast<int>(per_step_mse.size()); }
};

/// The GrINd composition for a fixed set of observation locations:
/// scattered -> grid (FI up), stencil forecast on the grid, grid ->
/// scattered (FI down). The two FI operators share n_freq and are
/// factorized once, since both point sets are fixed across rollout steps.
class GrindPipeline {
public:
    GrindPipeline(const Eigen::MatrixXd& low_points, StencilModel model, GrindConfig cfg);

    ScatteredField step(const ScatteredField& u_low) const;

    std::vector<ScatteredField> rollout(const ScatteredField& u0_low, int horizon) const;

private:
    StencilModel model_;
    GrindConfig cfg_;
    Eigen::MatrixXd grid_points_;
    std::unique_ptr<FiOperator> fi_up_, fi_down_;
};

/// One GrINd step without a persistent pipeline (factorizes on every call).
ScatteredField grind_step(const ScatteredField& u_low, const StencilModel& model, const GrindConfig& cfg);

std::vector<ScatteredField> rollout(const ScatteredField& u0_low, const StencilModel& model,
                                    const GrindConfig& cfg, int horizon);

/// Baseline predicting no change of the system at all.
std::vector<ScatteredField> persistence(const ScatteredField& u0_low, int horizon);

double scattered_mse(const ScatteredField& a, const ScatteredField& b);

/// Per-step MSE over points and channels.
RolloutReport evaluate_rollout(const std::vector<ScatteredField>& predictions,
                               const std::vector<ScatteredField>& truth, const std::string& system = "",
                               const std::string& model = "");

void write_report_csv(const std::vector<RolloutReport>& reports, const std::string& path);

}  // namespace grind
