#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "grind/grid.hpp"
#include "grind/numerics.hpp"
#include "grind/pde.hpp"

namespace grind {

/// 3x3 convolution kernel realizing a finite-difference operator.
/// apply_stencil computes the cross-correlation under periodic wrap:
/// out(i,j) = sum_{a,b} kernel(a,b) U(i+a-1, j+b-1 mod n), rows a along
/// the y index i, columns b along the x index j.
struct Stencil {
    Eigen::Matrix3d kernel = Eigen::Matrix3d::Zero();
    std::string name;
};

Stencil stencil_identity();
Stencil stencil_centered_x();
Stencil stencil_centered_y();
Stencil stencil_laplacian();

Eigen::ArrayXXd apply_stencil(const Stencil& s, const GridField& field, int channel);

/// One regression feature: a stencil applied to a channel, optionally
/// multiplied pointwise by a second such term.
struct FeatureTerm {
    Stencil stencil;
    int channel = 0;
};

struct Feature {
    FeatureTerm first;
    std::optional<FeatureTerm> second;

    std::string name() const;
};

struct FeatureLibrary {
    std::vector<Feature> features;

    int size() const { return static_cast<int>(features.size()); }

    void validate(int n_channels) const;
};

/// Default basis: identity, centered-x, centered-y, 5-point Laplacian per
/// channel, plus the quadratic terms u * (centered-x u) and
/// u * (centered-y u) per channel for Burgers-type transport.
FeatureLibrary default_library(int n_channels);

Eigen::ArrayXXd feature_values(const Feature& f, const GridField& state);

/// Linear combination of stencil features parametrizing the method-of-lines
/// right-hand side: d state_c / dt = sum_f weights(c, f) feature_f(state).
struct StencilModel {
    FeatureLibrary library;
    Eigen::MatrixXd weights;  // C_out x |features|

    int n_channels() const { return static_cast<int>(weights.rows()); }

    void validate() const;
};

GridField apply_model(const StencilModel& model, const GridField& state);

/// Exact discrete RHS of the simulator in stencil-feature form; applying
/// the returned model reproduces analytic_rhs. Laplacian-based systems
/// require a square grid (the single 5-point kernel assumes dx == dy).
StencilModel analytic_model(const SystemSpec& spec, int nx, int ny);

/// Per output channel, least-squares fit of the feature weights over all
/// grid cells of all snapshots. ridge == 0 uses a pseudo-inverse of the
/// small Gram matrix (min-norm on rank deficiency); degenerate all-zero
/// feature columns are rejected.
StencilModel fit_model(const std::vector<std::pair<GridField, GridField>>& snapshots,
                       const FeatureLibrary& library, double ridge);

/// Derivative labels from centered time differences of recorded frames:
/// (frame[t+1] - frame[t-1]) / (2 dt_record), paired with frame[t].
std::vector<std::pair<GridField, GridField>> centered_difference_snapshots(const SimulationRun& run);

/// Closed-loop RK4 forecast: one output frame per outer step of dt, each
/// integrated with internal step dt / substeps and fed back as the next
/// input. Stability guidance as for simulate (CFL <= 0.25 on the
/// dominant stencil weight).
std::vector<GridField> forecast(const StencilModel& model, const GridField& state, double dt, int n_steps,
                                int substeps);

inline constexpr const char* kModelSchema = "grind-model-1";

/// Model files mirror the dataset format: a key = value manifest at `path`
/// and `path`.bin holding kernels (9 doubles per feature term, absent
/// second terms zero-filled) followed by the weight matrix row-major.
void save_model(const StencilModel& model, const std::string& path);

StencilModel load_model(const std::string& path);

}  // namespace grind
