#include "grind/stencil.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "grind/dataset.hpp"

namespace grind {

Stencil stencil_identity() {
    Stencil s;
    s.kernel(1, 1) = 1.0;
    s.name = "identity";
    return s;
}

Stencil stencil_centered_x() {
    Stencil s;
    s.kernel(1, 0) = -1.0;
    s.kernel(1, 2) = 1.0;
    s.name = "centered_x";
    return s;
}

Stencil stencil_centered_y() {
    Stencil s;
    s.kernel(0, 1) = -1.0;
    s.kernel(2, 1) = 1.0;
    s.name = "centered_y";
    return s;
}

Stencil stencil_laplacian() {
    Stencil s;
    s.kernel << 0, 1, 0, 1, -4, 1, 0, 1, 0;
    s.name = "laplacian";
    return s;
}

Eigen::ArrayXXd apply_stencil(const Stencil& s, const GridField& field, int channel) {
    if (channel < 0 || channel >= field.n_channels())
        throw std::invalid_argument("apply_stencil: channel out of range");
    const Eigen::ArrayXXd& u = field.channels[static_cast<std::size_t>(channel)];
    Eigen::ArrayXXd out = Eigen::ArrayXXd::Zero(field.ny, field.nx);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            const double w = s.kernel(a, b);
            if (w == 0.0) continue;
            out += w * detail::shift_x(detail::shift_y(u, a - 1), b - 1);
        }
    return out;
}

std::string Feature::name() const {
    std::string n = first.stencil.name + "[ch" + std::to_string(first.channel) + "]";
    if (second)
        n += "*" + second->stencil.name + "[ch" + std::to_string(second->channel) + "]";
    return n;
}

void FeatureLibrary::validate(int n_channels) const {
    if (features.empty()) throw std::invalid_argument("FeatureLibrary: empty");
    for (const auto& f : features) {
        if (f.first.channel < 0 || f.first.channel >= n_channels ||
            (f.second && (f.second->channel < 0 || f.second->channel >= n_channels)))
            throw std::invalid_argument("FeatureLibrary: feature references invalid channel");
    }
}

FeatureLibrary default_library(int n_channels) {
    if (n_channels < 1) throw std::invalid_argument("default_library: need >= 1 channel");
    FeatureLibrary lib;
    for (int c = 0; c < n_channels; ++c) {
        for (const auto& s : {stencil_identity(), stencil_centered_x(), stencil_centered_y(), stencil_laplacian()})
            lib.features.push_back({{s, c}, std::nullopt});
        lib.features.push_back({{stencil_identity(), c}, FeatureTerm{stencil_centered_x(), c}});
        lib.features.push_back({{stencil_identity(), c}, FeatureTerm{stencil_centered_y(), c}});
    }
    return lib;
}

Eigen::ArrayXXd feature_values(const Feature& f, const GridField& state) {
    Eigen::ArrayXXd v = apply_stencil(f.first.stencil, state, f.first.channel);
    if (f.second) v *= apply_stencil(f.second->stencil, state, f.second->channel);
    return v;
}

void StencilModel::validate() const {
    if (weights.cols() != library.size())
        throw std::invalid_argument("StencilModel: weight column count does not match library");
    if (!weights.allFinite()) throw std::invalid_argument("StencilModel: non-finite weights");
    library.validate(n_channels());
}

GridField apply_model(const StencilModel& model, const GridField& state) {
    model.validate();
    if (state.n_channels() != model.n_channels())
        throw std::invalid_argument("apply_model: channel count mismatch");
    GridField out(state.nx, state.ny, state.n_channels());
    for (int f = 0; f < model.library.size(); ++f) {
        if ((model.weights.col(f).array() == 0.0).all()) continue;
        const Eigen::ArrayXXd v = feature_values(model.library.features[static_cast<std::size_t>(f)], state);
        for (int c = 0; c < model.n_channels(); ++c)
            if (model.weights(c, f) != 0.0) out.channels[static_cast<std::size_t>(c)] += model.weights(c, f) * v;
    }
    return out;
}

StencilModel analytic_model(const SystemSpec& spec, int nx, int ny) {
    spec.validate();
    StencilModel model;
    model.library = default_library(spec.n_channels());
    model.weights = Eigen::MatrixXd::Zero(spec.n_channels(), model.library.size());
    const double dx = 1.0 / nx, dy = 1.0 / ny;
    const bool needs_laplacian = spec.kind != SystemKind::advection;
    if (needs_laplacian && nx != ny)
        throw std::invalid_argument("analytic_model: Laplacian systems require a square grid");
    // per-channel feature order: identity, centered_x, centered_y, laplacian, u*dx(u), u*dy(u)
    constexpr int kIdentity = 0, kCenteredX = 1, kCenteredY = 2, kLaplacian = 3, kUdxU = 4, kUdyU = 5;
    constexpr int kPerChannel = 6;
    switch (spec.kind) {
        case SystemKind::advection:
            model.weights(0, kCenteredX) = -spec.advect_x / (2.0 * dx);
            model.weights(0, kCenteredY) = -spec.advect_y / (2.0 * dy);
            break;
        case SystemKind::diffusion:
            model.weights(0, kLaplacian) = spec.diffusivity / (dx * dx);
            break;
        case SystemKind::burgers:
            model.weights(0, kUdxU) = -1.0 / (2.0 * dx);
            model.weights(0, kUdyU) = -1.0 / (2.0 * dy);
            model.weights(0, kLaplacian) = spec.viscosity / (dx * dx);
            break;
        case SystemKind::wave:
            model.weights(0, kPerChannel + kIdentity) = 1.0;  // du/dt = v
            model.weights(1, kLaplacian) = spec.wave_speed * spec.wave_speed / (dx * dx);
            break;
    }
    return model;
}

StencilModel fit_model(const std::vector<std::pair<GridField, GridField>>& snapshots,
                       const FeatureLibrary& library, double ridge) {
    if (snapshots.empty()) throw std::invalid_argument("fit_model: no snapshots");
    if (ridge < 0.0) throw std::invalid_argument("fit_model: ridge must be >= 0");
    const GridField& first = snapshots.front().first;
    const int nc = first.n_channels();
    library.validate(nc);

    const Eigen::Index cells = static_cast<Eigen::Index>(first.nx) * first.ny;
    const Eigen::Index rows = cells * static_cast<Eigen::Index>(snapshots.size());
    Eigen::MatrixXd X(rows, library.size());
    Eigen::MatrixXd Y(rows, nc);
    for (std::size_t s = 0; s < snapshots.size(); ++s) {
        const auto& [state, label] = snapshots[s];
        if (state.nx != first.nx || state.ny != first.ny || state.n_channels() != nc ||
            label.nx != first.nx || label.ny != first.ny || label.n_channels() != nc)
            throw std::invalid_argument("fit_model: inconsistent snapshot shapes");
        const Eigen::Index row0 = static_cast<Eigen::Index>(s) * cells;
        for (int f = 0; f < library.size(); ++f) {
            const Eigen::ArrayXXd v = feature_values(library.features[static_cast<std::size_t>(f)], state);
            X.block(row0, f, cells, 1) = v.reshaped(cells, 1);
        }
        for (int c = 0; c < nc; ++c)
            Y.block(row0, c, cells, 1) = label.channels[static_cast<std::size_t>(c)].reshaped(cells, 1);
    }

    bool labels_zero = (Y.array() == 0.0).all();
    for (int f = 0; f < library.size(); ++f)
        if (!labels_zero && X.col(f).norm() == 0.0)
            throw std::invalid_argument("fit_model: degenerate all-zero feature column: " +
                                        library.features[static_cast<std::size_t>(f)].name());

    Eigen::MatrixXd gram = X.transpose() * X;
    gram.diagonal().array() += ridge;
    const Eigen::MatrixXd xty = X.transpose() * Y;
    Eigen::MatrixXd coeffs;
    if (ridge > 0.0) {
        coeffs = gram.llt().solve(xty);
    } else {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(gram, Eigen::ComputeThinU | Eigen::ComputeThinV);
        svd.setThreshold(1e-12);
        coeffs = svd.solve(xty);
    }

    StencilModel model;
    model.library = library;
    model.weights = coeffs.transpose();
    model.validate();
    return model;
}

std::vector<std::pair<GridField, GridField>> centered_difference_snapshots(const SimulationRun& run) {
    if (run.frames.size() < 3)
        throw std::invalid_argument("centered_difference_snapshots: need >= 3 frames");
    const double dt_record = run.dt * run.record_stride;
    std::vector<std::pair<GridField, GridField>> out;
    for (std::size_t t = 1; t + 1 < run.frames.size(); ++t) {
        GridField label(run.frames[t].nx, run.frames[t].ny, run.frames[t].n_channels());
        for (int c = 0; c < label.n_channels(); ++c)
            label.channels[static_cast<std::size_t>(c)] =
                (run.frames[t + 1].channels[static_cast<std::size_t>(c)] -
                 run.frames[t - 1].channels[static_cast<std::size_t>(c)]) /
                (2.0 * dt_record);
        out.emplace_back(run.frames[t], std::move(label));
    }
    return out;
}

std::vector<GridField> forecast(const StencilModel& model, const GridField& state, double dt, int n_steps,
                                int substeps) {
    model.validate();
    if (n_steps < 0) throw std::invalid_argument("forecast: n_steps must be >= 0");
    if (substeps < 1) throw std::invalid_argument("forecast: substeps must be >= 1");
    const int nx = state.nx, ny = state.ny, nc = state.n_channels();
    auto rhs = [&](const Eigen::VectorXd& packed) {
        return apply_model(model, GridField::unpack(packed, nx, ny, nc)).pack();
    };
    std::vector<GridField> frames;
    Eigen::VectorXd s = state.pack();
    const double dt_int = dt / substeps;
    for (int step = 1; step <= n_steps; ++step) {
        for (int i = 0; i < substeps; ++i) s = rk4_step(rhs, s, dt_int);
        if (!s.allFinite())
            throw std::runtime_error("forecast: non-finite state at step " + std::to_string(step));
        frames.push_back(GridField::unpack(s, nx, ny, nc));
    }
    return frames;
}

void save_model(const StencilModel& model, const std::string& path) {
    model.validate();
    std::vector<double> payload;
    for (const auto& f : model.library.features) {
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) payload.push_back(f.first.stencil.kernel(a, b));
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) payload.push_back(f.second ? f.second->stencil.kernel(a, b) : 0.0);
    }
    for (Eigen::Index c = 0; c < model.weights.rows(); ++c)
        for (Eigen::Index f = 0; f < model.weights.cols(); ++f) payload.push_back(model.weights(c, f));

    const std::string payload_path = path + ".bin";
    detail::write_payload(payload_path, payload);

    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write model manifest: " + path);
    out << "schema = " << kModelSchema << "\n";
    out << "channels = " << model.n_channels() << "\n";
    out << "features = " << model.library.size() << "\n";
    for (int f = 0; f < model.library.size(); ++f) {
        const auto& feat = model.library.features[static_cast<std::size_t>(f)];
        out << "feature_" << f << " = " << feat.first.stencil.name << " " << feat.first.channel;
        if (feat.second) out << " * " << feat.second->stencil.name << " " << feat.second->channel;
        out << "\n";
    }
    out << "payload = " << std::filesystem::path(payload_path).filename().string() << "\n";
    out << "payload_doubles = " << payload.size() << "\n";
    out << "checksum = " << detail::fnv1a64(payload.data(), payload.size() * sizeof(double)) << "\n";
    if (!out) throw std::runtime_error("short write on model manifest: " + path);
}

StencilModel load_model(const std::string& path) {
    const auto kv = detail::read_manifest(path);
    if (detail::require_key(kv, "schema", path) != kModelSchema)
        throw std::runtime_error("model " + path + " has unsupported schema '" + kv.at("schema") + "'");
    const int nc = std::stoi(detail::require_key(kv, "channels", path));
    const int nf = std::stoi(detail::require_key(kv, "features", path));
    const auto payload_doubles = std::stoul(detail::require_key(kv, "payload_doubles", path));
    const std::uint64_t checksum = std::stoull(detail::require_key(kv, "checksum", path));
    if (payload_doubles != static_cast<std::size_t>(nf) * 18 + static_cast<std::size_t>(nc) * nf)
        throw std::runtime_error("model " + path + " manifest is inconsistent with its payload size");
    const std::string payload_path =
        (std::filesystem::path(path).parent_path() / detail::require_key(kv, "payload", path)).string();
    const auto payload = detail::read_payload(payload_path, payload_doubles, checksum);

    StencilModel model;
    std::size_t p = 0;
    for (int f = 0; f < nf; ++f) {
        std::istringstream desc(detail::require_key(kv, "feature_" + std::to_string(f), path));
        Feature feat;
        std::string star;
        desc >> feat.first.stencil.name >> feat.first.channel;
        if (desc >> star) {
            if (star != "*") throw std::runtime_error("model " + path + ": malformed feature_" + std::to_string(f));
            FeatureTerm second;
            desc >> second.stencil.name >> second.channel;
            feat.second = second;
        }
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) feat.first.stencil.kernel(a, b) = payload[p++];
        Eigen::Matrix3d second_kernel;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) second_kernel(a, b) = payload[p++];
        if (feat.second) feat.second->stencil.kernel = second_kernel;
        model.library.features.push_back(std::move(feat));
    }
    model.weights.resize(nc, nf);
    for (int c = 0; c < nc; ++c)
        for (int f = 0; f < nf; ++f) model.weights(c, f) = payload[p++];
    model.validate();
    return model;
}

}  // namespace grind
