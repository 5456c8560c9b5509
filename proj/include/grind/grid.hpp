#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace grind {

/// Multi-channel field on a regular periodic grid over the unit box.
/// Channel c is an (ny x nx) array; entry (iy, ix) sits at coordinate
/// (ix / nx, iy / ny). The point at 1 wraps onto the point at 0.
struct GridField {
    int nx = 0;
    int ny = 0;
    std::vector<Eigen::ArrayXXd> channels;

    GridField() = default;
    GridField(int nx_, int ny_, int n_channels) : nx(nx_), ny(ny_) {
        if (nx < 3 || ny < 3)
            throw std::invalid_argument("GridField: resolution must be >= 3 per dimension");
        channels.assign(static_cast<std::size_t>(n_channels), Eigen::ArrayXXd::Zero(ny, nx));
    }

    int n_channels() const { return static_cast<int>(channels.size()); }
    double dx() const { return 1.0 / nx; }
    double dy() const { return 1.0 / ny; }

    bool all_finite() const {
        for (const auto& ch : channels)
            if (!ch.allFinite()) return false;
        return true;
    }

    /// Channel-major packing: channel, then row iy, then column ix.
    Eigen::VectorXd pack() const {
        Eigen::VectorXd out(static_cast<Eigen::Index>(n_channels()) * nx * ny);
        Eigen::Index p = 0;
        for (const auto& ch : channels)
            for (int iy = 0; iy < ny; ++iy)
                for (int ix = 0; ix < nx; ++ix)
                    out[p++] = ch(iy, ix);
        return out;
    }

    static GridField unpack(const Eigen::VectorXd& v, int nx, int ny, int n_channels) {
        if (v.size() != static_cast<Eigen::Index>(n_channels) * nx * ny)
            throw std::invalid_argument("GridField::unpack: size mismatch");
        GridField f(nx, ny, n_channels);
        Eigen::Index p = 0;
        for (auto& ch : f.channels)
            for (int iy = 0; iy < ny; ++iy)
                for (int ix = 0; ix < nx; ++ix)
                    ch(iy, ix) = v[p++];
        return f;
    }
};

/// Regular endpoint-open grid over [0,1]^M: per dimension the coordinates
/// {0, 1/n, ..., (n-1)/n}, combined as a lexicographic Cartesian product
/// (first dimension outermost). Rows are points, columns dimensions.
inline Eigen::MatrixXd grid_targets(const std::vector<int>& resolution) {
    if (resolution.empty())
        throw std::invalid_argument("grid_targets: need at least one dimension");
    Eigen::Index total = 1;
    for (int n : resolution) {
        if (n < 1)
            throw std::invalid_argument("grid_targets: resolution must be >= 1 per dimension");
        total *= n;
    }
    const int m = static_cast<int>(resolution.size());
    Eigen::MatrixXd pts(total, m);
    for (Eigen::Index row = 0; row < total; ++row) {
        Eigen::Index rem = row;
        for (int d = m - 1; d >= 0; --d) {
            const int n = resolution[static_cast<std::size_t>(d)];
            pts(row, d) = static_cast<double>(rem % n) / n;
            rem /= n;
        }
    }
    return pts;
}

/// Grid values flattened to match grid_targets({nx, ny}) row order:
/// row ix*ny + iy, one column per channel.
inline Eigen::MatrixXd grid_to_points(const GridField& f) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(f.nx) * f.ny, f.n_channels());
    for (int c = 0; c < f.n_channels(); ++c)
        for (int ix = 0; ix < f.nx; ++ix)
            for (int iy = 0; iy < f.ny; ++iy)
                out(static_cast<Eigen::Index>(ix) * f.ny + iy, c) = f.channels[static_cast<std::size_t>(c)](iy, ix);
    return out;
}

inline GridField points_to_grid(const Eigen::MatrixXd& values, int nx, int ny) {
    if (values.rows() != static_cast<Eigen::Index>(nx) * ny)
        throw std::invalid_argument("points_to_grid: row count does not match resolution");
    GridField f(nx, ny, static_cast<int>(values.cols()));
    for (int c = 0; c < f.n_channels(); ++c)
        for (int ix = 0; ix < nx; ++ix)
            for (int iy = 0; iy < ny; ++iy)
                f.channels[static_cast<std::size_t>(c)](iy, ix) = values(static_cast<Eigen::Index>(ix) * ny + iy, c);
    return f;
}

inline double grid_mse(const GridField& a, const GridField& b) {
    if (a.nx != b.nx || a.ny != b.ny || a.n_channels() != b.n_channels())
        throw std::invalid_argument("grid_mse: shape mismatch");
    double acc = 0.0;
    for (int c = 0; c < a.n_channels(); ++c)
        acc += (a.channels[static_cast<std::size_t>(c)] - b.channels[static_cast<std::size_t>(c)]).square().sum();
    return acc / (static_cast<double>(a.nx) * a.ny * a.n_channels());
}

}  // namespace grind
