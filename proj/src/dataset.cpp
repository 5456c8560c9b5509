#include "grind/dataset.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace grind {

namespace detail {

std::uint64_t fnv1a64(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 1469598103934665603ull;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::map<std::string, std::string> read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open manifest: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("malformed manifest line in " + path + ": " + line);
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

const std::string& require_key(const std::map<std::string, std::string>& kv, const std::string& key,
                               const std::string& path) {
    auto it = kv.find(key);
    if (it == kv.end()) throw std::runtime_error("manifest " + path + " is missing key: " + key);
    return it->second;
}

void write_payload(const std::string& path, const std::vector<double>& payload) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write payload: " + path);
    out.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size() * sizeof(double)));
    if (!out) throw std::runtime_error("short write on payload: " + path);
}

std::vector<double> read_payload(const std::string& path, std::size_t expected_doubles,
                                 std::uint64_t expected_checksum) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open payload: " + path);
    in.seekg(0, std::ios::end);
    const auto bytes = static_cast<std::size_t>(in.tellg());
    if (bytes != expected_doubles * sizeof(double))
        throw std::runtime_error("payload " + path + " is truncated or oversized: expected " +
                                 std::to_string(expected_doubles * sizeof(double)) + " bytes, found " +
                                 std::to_string(bytes));
    in.seekg(0);
    std::vector<double> payload(expected_doubles);
    in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(bytes));
    if (!in) throw std::runtime_error("short read on payload: " + path);
    if (fnv1a64(payload.data(), bytes) != expected_checksum)
        throw std::runtime_error("payload checksum mismatch: " + path);
    return payload;
}

}  // namespace detail

Dataset Dataset::from_run(SimulationRun run, Eigen::MatrixXd points) {
    Dataset d;
    d.observations.reserve(run.frames.size());
    for (const auto& frame : run.frames) d.observations.push_back(sample_scattered(frame, points));
    d.truth = std::move(run);
    d.points = std::move(points);
    return d;
}

void write_dataset(const SimulationRun& run, const Eigen::MatrixXd& points, const std::string& path) {
    if (run.frames.size() < 2) throw std::invalid_argument("write_dataset: run must hold >= 2 frames");
    const GridField& f0 = run.frames.front();
    std::vector<double> payload;
    payload.reserve(static_cast<std::size_t>(points.size()) +
                    run.frames.size() * static_cast<std::size_t>(f0.nx) * f0.ny * f0.n_channels());
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        payload.push_back(points(i, 0));
        payload.push_back(points(i, 1));
    }
    for (const auto& frame : run.frames) {
        const Eigen::VectorXd packed = frame.pack();
        payload.insert(payload.end(), packed.data(), packed.data() + packed.size());
    }

    const std::string payload_path = path + ".bin";
    detail::write_payload(payload_path, payload);
    const std::uint64_t checksum = detail::fnv1a64(payload.data(), payload.size() * sizeof(double));

    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write manifest: " + path);
    out << "schema = " << kDatasetSchema << "\n";
    out << "system = " << system_name(run.spec.kind) << "\n";
    out << "seed = " << run.seed << "\n";
    out << "dt = " << detail::format_double(run.dt) << "\n";
    out << "record_stride = " << run.record_stride << "\n";
    out << "substeps = " << run.substeps << "\n";
    out << "resolution_x = " << f0.nx << "\n";
    out << "resolution_y = " << f0.ny << "\n";
    out << "channels = " << f0.n_channels() << "\n";
    out << "frames = " << run.frames.size() << "\n";
    out << "points = " << points.rows() << "\n";
    out << "advect_x = " << detail::format_double(run.spec.advect_x) << "\n";
    out << "advect_y = " << detail::format_double(run.spec.advect_y) << "\n";
    out << "viscosity = " << detail::format_double(run.spec.viscosity) << "\n";
    out << "diffusivity = " << detail::format_double(run.spec.diffusivity) << "\n";
    out << "wave_speed = " << detail::format_double(run.spec.wave_speed) << "\n";
    out << "payload = " << std::filesystem::path(payload_path).filename().string() << "\n";
    out << "payload_doubles = " << payload.size() << "\n";
    out << "checksum = " << checksum << "\n";
    if (!out) throw std::runtime_error("short write on manifest: " + path);
}

Dataset read_dataset(const std::string& path) {
    const auto kv = detail::read_manifest(path);
    if (detail::require_key(kv, "schema", path) != kDatasetSchema)
        throw std::runtime_error("dataset " + path + " has unsupported schema '" + kv.at("schema") + "'");

    SimulationRun run;
    run.spec.kind = system_from_name(detail::require_key(kv, "system", path));
    run.spec.advect_x = std::stod(detail::require_key(kv, "advect_x", path));
    run.spec.advect_y = std::stod(detail::require_key(kv, "advect_y", path));
    run.spec.viscosity = std::stod(detail::require_key(kv, "viscosity", path));
    run.spec.diffusivity = std::stod(detail::require_key(kv, "diffusivity", path));
    run.spec.wave_speed = std::stod(detail::require_key(kv, "wave_speed", path));
    run.seed = std::stoull(detail::require_key(kv, "seed", path));
    run.dt = std::stod(detail::require_key(kv, "dt", path));
    run.record_stride = std::stoi(detail::require_key(kv, "record_stride", path));
    run.substeps = std::stoi(detail::require_key(kv, "substeps", path));
    const int nx = std::stoi(detail::require_key(kv, "resolution_x", path));
    const int ny = std::stoi(detail::require_key(kv, "resolution_y", path));
    const int nc = std::stoi(detail::require_key(kv, "channels", path));
    const auto n_frames = std::stoul(detail::require_key(kv, "frames", path));
    const auto n_points = std::stol(detail::require_key(kv, "points", path));
    const auto payload_doubles = std::stoul(detail::require_key(kv, "payload_doubles", path));
    const std::uint64_t checksum = std::stoull(detail::require_key(kv, "checksum", path));

    const std::size_t per_frame = static_cast<std::size_t>(nx) * ny * nc;
    if (payload_doubles != 2 * static_cast<std::size_t>(n_points) + n_frames * per_frame)
        throw std::runtime_error("dataset " + path + " manifest is inconsistent with its payload size");

    const std::string payload_path =
        (std::filesystem::path(path).parent_path() / detail::require_key(kv, "payload", path)).string();
    const auto payload = detail::read_payload(payload_path, payload_doubles, checksum);

    Eigen::MatrixXd points(n_points, 2);
    std::size_t p = 0;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        points(i, 0) = payload[p++];
        points(i, 1) = payload[p++];
    }
    run.frames.reserve(n_frames);
    for (std::size_t f = 0; f < n_frames; ++f) {
        Eigen::VectorXd packed = Eigen::Map<const Eigen::VectorXd>(payload.data() + p, static_cast<Eigen::Index>(per_frame));
        run.frames.push_back(GridField::unpack(packed, nx, ny, nc));
        p += per_frame;
    }
    return Dataset::from_run(std::move(run), std::move(points));
}

void write_dataset_csv(const SimulationRun& run, const Eigen::MatrixXd& points, const std::string& prefix) {
    {
        std::ofstream out(prefix + ".points.csv", std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + prefix + ".points.csv");
        out << "index,x,y\n";
        for (Eigen::Index i = 0; i < points.rows(); ++i)
            out << i << "," << detail::format_double(points(i, 0)) << "," << detail::format_double(points(i, 1))
                << "\n";
    }
    std::ofstream out(prefix + ".frames.csv", std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + prefix + ".frames.csv");
    out << "frame,channel,iy,ix,value\n";
    for (std::size_t f = 0; f < run.frames.size(); ++f) {
        const GridField& frame = run.frames[f];
        for (int c = 0; c < frame.n_channels(); ++c)
            for (int iy = 0; iy < frame.ny; ++iy)
                for (int ix = 0; ix < frame.nx; ++ix)
                    out << f << "," << c << "," << iy << "," << ix << ","
                        << detail::format_double(frame.channels[static_cast<std::size_t>(c)](iy, ix)) << "\n";
    }
}

}  // namespace grind
