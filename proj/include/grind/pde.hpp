#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "grind/fourier.hpp"
#include "grind/grid.hpp"
#include "grind/numerics.hpp"

namespace grind {

enum class SystemKind { advection, burgers, diffusion, wave };

std::string system_name(SystemKind k);
SystemKind system_from_name(const std::string& name);

/// Periodic 2-D system on the unit box. Channel layout: scalar systems use
/// one channel u; the wave equation uses (u, v) with du/dt = v.
struct SystemSpec {
    SystemKind kind = SystemKind::advection;
    double advect_x = 1.0;   // advection velocity c_x
    double advect_y = 0.5;   // advection velocity c_y
    double viscosity = 0.02; // Burgers nu
    double diffusivity = 0.05;
    double wave_speed = 1.0;

    int n_channels() const { return kind == SystemKind::wave ? 2 : 1; }

    void validate() const;
};

struct SimulationRun {
    SystemSpec spec;
    double dt = 0.0;          // outer (recorded) step
    int record_stride = 1;    // outer steps between recorded frames
    int substeps = 1;         // internal RK4 steps per outer step
    std::uint64_t seed = 0;
    std::vector<GridField> frames;
};

namespace detail {

Eigen::ArrayXXd shift_x(const Eigen::ArrayXXd& u, int by);
Eigen::ArrayXXd shift_y(const Eigen::ArrayXXd& u, int by);
Eigen::ArrayXXd ddx(const Eigen::ArrayXXd& u, double dx);
Eigen::ArrayXXd ddy(const Eigen::ArrayXXd& u, double dy);
Eigen::ArrayXXd laplacian(const Eigen::ArrayXXd& u, double dx, double dy);

}  // namespace detail

/// Discrete right-hand side of the governing PDE: centered differences and
/// the 5-point Laplacian with periodic wrap.
GridField analytic_rhs(const SystemSpec& spec, const GridField& state);

/// Smooth random periodic field: per channel a sum of Fourier modes with
/// integer wave vectors |k| <= 3 and seeded unit-normal amplitudes,
/// normalized to zero mean and unit max-absolute-value. The wave system's
/// velocity channel starts at zero.
GridField initial_condition(const SystemSpec& spec, int nx, int ny, std::uint64_t seed);

/// Integrates analytic_rhs with fixed-step RK4 at internal step
/// dt / substeps, recording a frame every record_stride outer steps.
/// Frame 0 is the initial condition. Stability is the caller's contract:
/// advective CFL |c| dt_int n <= 0.25 and diffusive D dt_int n^2 <= 0.25;
/// any non-finite state aborts with the offending step in the message.
SimulationRun simulate(const SystemSpec& spec, const GridField& ic, double dt, int n_steps,
                       int record_stride = 1, int substeps = 4, std::uint64_t seed = 0);

/// Seeded uniform-random observation locations in [0,1)^2.
Eigen::MatrixXd generate_points(int n, std::uint64_t seed);

/// Bilinear interpolation from the periodic grid to scattered points.
ScatteredField sample_scattered(const GridField& frame, const Eigen::MatrixXd& points);

}  // namespace grind
