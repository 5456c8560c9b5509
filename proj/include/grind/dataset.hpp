#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "grind/pde.hpp"

namespace grind {

inline constexpr const char* kDatasetSchema = "grind-dataset-1";

namespace detail {

std::uint64_t fnv1a64(const void* data, std::size_t n);

/// 17 significant digits, enough for a bit-exact double round trip.
std::string format_double(double v);

std::map<std::string, std::string> read_manifest(const std::string& path);

const std::string& require_key(const std::map<std::string, std::string>& kv, const std::string& key,
                               const std::string& path);

void write_payload(const std::string& path, const std::vector<double>& payload);

std::vector<double> read_payload(const std::string& path, std::size_t expected_doubles,
                                 std::uint64_t expected_checksum);

}  // namespace detail

/// A generated dataset: the full-resolution truth run, the scattered
/// observation locations, and the per-frame scattered samples (derived
/// deterministically from the truth by bilinear sampling).
struct Dataset {
    SimulationRun truth;
    Eigen::MatrixXd points;
    std::vector<ScatteredField> observations;

    static Dataset from_run(SimulationRun run, Eigen::MatrixXd points);
};

/// Writes `path` (plain-text key = value manifest) plus `path`.bin, a
/// little-endian payload of 64-bit floats: points row-major, then frames
/// in channel-major pack order. Numbers in the manifest carry 17
/// significant digits, so the round trip is bit-exact.
void write_dataset(const SimulationRun& run, const Eigen::MatrixXd& points, const std::string& path);

Dataset read_dataset(const std::string& path);

/// Inspection export: <prefix>.points.csv and <prefix>.frames.csv.
void write_dataset_csv(const SimulationRun& run, const Eigen::MatrixXd& points, const std::string& prefix);

}  // namespace grind
