#include "grind/pde.hpp"

#include <numbers>
#include <random>

namespace grind {

std::string system_name(SystemKind k) {
    switch (k) {
        case SystemKind::advection: return "advection";
        case SystemKind::burgers: return "burgers";
        case SystemKind::diffusion: return "diffusion";
        case SystemKind::wave: return "wave";
    }
    throw std::invalid_argument("system_name: unknown kind");
}

SystemKind system_from_name(const std::string& name) {
    if (name == "advection") return SystemKind::advection;
    if (name == "burgers") return SystemKind::burgers;
    if (name == "diffusion") return SystemKind::diffusion;
    if (name == "wave") return SystemKind::wave;
    throw std::invalid_argument("unknown system name: " + name);
}

void SystemSpec::validate() const {
    if (!(std::isfinite(advect_x) && std::isfinite(advect_y) && std::isfinite(viscosity) &&
          std::isfinite(diffusivity) && std::isfinite(wave_speed)))
        throw std::invalid_argument("SystemSpec: non-finite parameter");
    if (viscosity < 0.0 || diffusivity < 0.0)
        throw std::invalid_argument("SystemSpec: viscosity/diffusivity must be >= 0");
    if (wave_speed <= 0.0)
        throw std::invalid_argument("SystemSpec: wave speed must be > 0");
}

namespace detail {

Eigen::ArrayXXd shift_x(const Eigen::ArrayXXd& u, int by) {
    const int nx = static_cast<int>(u.cols());
    Eigen::ArrayXXd out(u.rows(), nx);
    for (int j = 0; j < nx; ++j) out.col(j) = u.col(((j + by) % nx + nx) % nx);
    return out;
}

Eigen::ArrayXXd shift_y(const Eigen::ArrayXXd& u, int by) {
    const int ny = static_cast<int>(u.rows());
    Eigen::ArrayXXd out(ny, u.cols());
    for (int i = 0; i < ny; ++i) out.row(i) = u.row(((i + by) % ny + ny) % ny);
    return out;
}

Eigen::ArrayXXd ddx(const Eigen::ArrayXXd& u, double dx) {
    return (shift_x(u, 1) - shift_x(u, -1)) / (2.0 * dx);
}

Eigen::ArrayXXd ddy(const Eigen::ArrayXXd& u, double dy) {
    return (shift_y(u, 1) - shift_y(u, -1)) / (2.0 * dy);
}

Eigen::ArrayXXd laplacian(const Eigen::ArrayXXd& u, double dx, double dy) {
    return (shift_x(u, 1) + shift_x(u, -1) - 2.0 * u) / (dx * dx) +
           (shift_y(u, 1) + shift_y(u, -1) - 2.0 * u) / (dy * dy);
}

}  // namespace detail

GridField analytic_rhs(const SystemSpec& spec, const GridField& state) {
    spec.validate();
    if (state.n_channels() != spec.n_channels())
        throw std::invalid_argument("analytic_rhs: channel count does not match system");
    const double dx = state.dx(), dy = state.dy();
    GridField out(state.nx, state.ny, state.n_channels());
    const Eigen::ArrayXXd& u = state.channels[0];
    switch (spec.kind) {
        case SystemKind::advection:
            out.channels[0] = -spec.advect_x * detail::ddx(u, dx) - spec.advect_y * detail::ddy(u, dy);
            break;
        case SystemKind::diffusion:
            out.channels[0] = spec.diffusivity * detail::laplacian(u, dx, dy);
            break;
        case SystemKind::burgers:
            out.channels[0] = -u * (detail::ddx(u, dx) + detail::ddy(u, dy)) +
                              spec.viscosity * detail::laplacian(u, dx, dy);
            break;
        case SystemKind::wave:
            out.channels[0] = state.channels[1];
            out.channels[1] = spec.wave_speed * spec.wave_speed * detail::laplacian(u, dx, dy);
            break;
    }
    return out;
}

GridField initial_condition(const SystemSpec& spec, int nx, int ny, std::uint64_t seed) {
    spec.validate();
    GridField f(nx, ny, spec.n_channels());
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double two_pi = 2.0 * std::numbers::pi;
    const int n_value_channels = spec.kind == SystemKind::wave ? 1 : spec.n_channels();
    for (int c = 0; c < n_value_channels; ++c) {
        Eigen::ArrayXXd& u = f.channels[static_cast<std::size_t>(c)];
        for (int kx = -3; kx <= 3; ++kx)
            for (int ky = -3; ky <= 3; ++ky) {
                if (kx * kx + ky * ky > 9 || (kx == 0 && ky == 0)) continue;
                const double a = normal(rng), b = normal(rng);
                for (int iy = 0; iy < ny; ++iy)
                    for (int ix = 0; ix < nx; ++ix) {
                        const double phase = two_pi * (kx * static_cast<double>(ix) / nx +
                                                       ky * static_cast<double>(iy) / ny);
                        u(iy, ix) += a * std::cos(phase) + b * std::sin(phase);
                    }
            }
        u -= u.mean();
        const double peak = u.abs().maxCoeff();
        if (peak > 0.0) u /= peak;
    }
    return f;
}

SimulationRun simulate(const SystemSpec& spec, const GridField& ic, double dt, int n_steps,
                       int record_stride, int substeps, std::uint64_t seed) {
    spec.validate();
    if (n_steps < 1) throw std::invalid_argument("simulate: n_steps must be >= 1");
    if (record_stride < 1 || substeps < 1)
        throw std::invalid_argument("simulate: record_stride and substeps must be >= 1");
    if (ic.n_channels() != spec.n_channels())
        throw std::invalid_argument("simulate: initial condition channel count mismatch");

    const int nx = ic.nx, ny = ic.ny, nc = ic.n_channels();
    auto rhs = [&](const Eigen::VectorXd& packed) {
        return analytic_rhs(spec, GridField::unpack(packed, nx, ny, nc)).pack();
    };

    SimulationRun run;
    run.spec = spec;
    run.dt = dt;
    run.record_stride = record_stride;
    run.substeps = substeps;
    run.seed = seed;
    run.frames.push_back(ic);

    Eigen::VectorXd state = ic.pack();
    const double dt_int = dt / substeps;
    for (int step = 1; step <= n_steps; ++step) {
        for (int s = 0; s < substeps; ++s) state = rk4_step(rhs, state, dt_int);
        if (!state.allFinite())
            throw std::runtime_error("simulate: non-finite state at outer step " + std::to_string(step) +
                                     " (" + system_name(spec.kind) + "); reduce dt or increase substeps");
        if (step % record_stride == 0)
            run.frames.push_back(GridField::unpack(state, nx, ny, nc));
    }
    if (run.frames.size() < 2) throw std::runtime_error("simulate: run recorded fewer than 2 frames");
    return run;
}

Eigen::MatrixXd generate_points(int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("generate_points: n must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    Eigen::MatrixXd pts(n, 2);
    for (int i = 0; i < n; ++i) {
        pts(i, 0) = uni(rng);
        pts(i, 1) = uni(rng);
    }
    return pts;
}

ScatteredField sample_scattered(const GridField& frame, const Eigen::MatrixXd& points) {
    if (points.cols() != 2)
        throw std::invalid_argument("sample_scattered: points must be 2-D");
    if ((points.array() < 0.0).any() || (points.array() > 1.0).any())
        throw std::invalid_argument("sample_scattered: points outside the unit box");
    ScatteredField out;
    out.points = points;
    out.values.resize(points.rows(), frame.n_channels());
    for (Eigen::Index p = 0; p < points.rows(); ++p) {
        const double gx = points(p, 0) * frame.nx;
        const double gy = points(p, 1) * frame.ny;
        const int ix0 = static_cast<int>(std::floor(gx)) % frame.nx;
        const int iy0 = static_cast<int>(std::floor(gy)) % frame.ny;
        const int ix1 = (ix0 + 1) % frame.nx;
        const int iy1 = (iy0 + 1) % frame.ny;
        const double fx = gx - std::floor(gx);
        const double fy = gy - std::floor(gy);
        for (int c = 0; c < frame.n_channels(); ++c) {
            const auto& u = frame.channels[static_cast<std::size_t>(c)];
            out.values(p, c) = (1.0 - fx) * (1.0 - fy) * u(iy0, ix0) + fx * (1.0 - fy) * u(iy0, ix1) +
                               (1.0 - fx) * fy * u(iy1, ix0) + fx * fy * u(iy1, ix1);
        }
    }
    return out;
}

}  // namespace grind
