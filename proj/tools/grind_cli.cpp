// Experiment front end: dataset generation, interpolation frequency sweeps,
// stencil-model fitting, closed-loop rollout evaluation, and report
// aggregation. All outputs are deterministic given flags and seeds.

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "grind/dataset.hpp"
#include "grind/pipeline.hpp"

namespace {

using namespace grind;

int worker_count() {
    if (const char* env = std::getenv("GRIND_WORKERS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

SystemSpec make_spec(const std::string& system, double advect_x, double advect_y, double viscosity,
                     double diffusivity, double wave_speed) {
    SystemSpec spec;
    spec.kind = system_from_name(system);
    spec.advect_x = advect_x;
    spec.advect_y = advect_y;
    spec.viscosity = viscosity;
    spec.diffusivity = diffusivity;
    spec.wave_speed = wave_speed;
    spec.validate();
    return spec;
}

int default_substeps(SystemKind kind) {
    switch (kind) {
        case SystemKind::diffusion:
        case SystemKind::burgers: return 16;
        default: return 4;
    }
}

struct SweepRow {
    std::string system;
    Eigen::Index n_points = 0;
    int n_freq = 0;
    double mse = 0.0;
};

// Mean grid MSE of the FI interpolation over every frame of every dataset,
// one row per n_freq. Datasets must share system and point count.
std::vector<SweepRow> run_sweep(const std::vector<Dataset>& datasets, int freq_min, int freq_max) {
    if (datasets.empty()) throw std::runtime_error("interp-sweep: no datasets");
    if (freq_min < 1 || freq_max < freq_min) throw std::runtime_error("interp-sweep: empty frequency range");
    const std::string system = system_name(datasets.front().truth.spec.kind);
    const Eigen::Index n_points = datasets.front().points.rows();
    const int nx = datasets.front().truth.frames.front().nx;
    const int ny = datasets.front().truth.frames.front().ny;
    for (const auto& d : datasets)
        if (system_name(d.truth.spec.kind) != system || d.points.rows() != n_points)
            throw std::runtime_error("interp-sweep: datasets disagree on system or point count");

    const Eigen::MatrixXd targets = grid_targets({nx, ny});
    std::vector<int> freqs;
    for (int f = freq_min; f <= freq_max; ++f) freqs.push_back(f);

    auto evaluate_freq = [&](int n_freq) {
        double acc = 0.0;
        Eigen::Index count = 0;
        for (const auto& d : datasets) {
            FiOperator fi(d.points, targets, n_freq, 0.0);
            for (std::size_t t = 0; t < d.truth.frames.size(); ++t) {
                const Eigen::MatrixXd predicted = fi.apply(d.observations[t].values);
                const Eigen::MatrixXd truth = grid_to_points(d.truth.frames[t]);
                acc += (predicted - truth).squaredNorm();
                count += truth.size();
            }
        }
        return acc / static_cast<double>(count);
    };

    // worker pool with deterministic ordering: results land by index
    std::vector<SweepRow> rows(freqs.size());
    const int workers = std::min<int>(worker_count(), static_cast<int>(freqs.size()));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < freqs.size(); i = next.fetch_add(1))
                rows[i] = {system, n_points, freqs[i], evaluate_freq(freqs[i])};
        });
    for (auto& t : pool) t.join();
    return rows;
}

std::vector<std::map<std::string, std::string>> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open CSV: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty CSV: " + path);
    std::vector<std::string> header;
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) header.push_back(cell);
    std::vector<std::map<std::string, std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::map<std::string, std::string> row;
        for (const auto& key : header) {
            if (!std::getline(ls, cell, ',')) throw std::runtime_error("short CSV row in " + path);
            row[key] = cell;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

int cmd_generate(const std::string& system, int resolution, int n_points, int n_frames, std::uint64_t seed,
                 double dt, int substeps, double advect_x, double advect_y, double viscosity, double diffusivity,
                 double wave_speed, const std::string& out, bool csv) {
    SystemSpec spec = make_spec(system, advect_x, advect_y, viscosity, diffusivity, wave_speed);
    if (substeps == 0) substeps = default_substeps(spec.kind);
    GridField ic = initial_condition(spec, resolution, resolution, seed);
    SimulationRun run = simulate(spec, ic, dt, n_frames - 1, 1, substeps, seed);
    Eigen::MatrixXd points = generate_points(n_points, seed + 1);
    write_dataset(run, points, out);
    if (csv) write_dataset_csv(run, points, out);
    const auto bytes = std::filesystem::file_size(out + ".bin");
    std::cout << "generated " << system << ": " << run.frames.size() << " frames, " << n_points << " points, "
              << bytes << " payload bytes -> " << out << "\n";
    return 0;
}

int cmd_interp_sweep(const std::vector<std::string>& data_paths, int freq_min, int freq_max,
                     const std::string& out) {
    std::vector<Dataset> datasets;
    for (const auto& p : data_paths) datasets.push_back(read_dataset(p));
    const auto rows = run_sweep(datasets, freq_min, freq_max);

    std::ofstream csv(out, std::ios::trunc);
    if (!csv) throw std::runtime_error("cannot write " + out);
    csv << "system,n_points,n_freq,mse\n";  // mse is the mean over all frames, channels, and datasets
    const SweepRow* best = &rows.front();
    for (const auto& r : rows) {
        csv << r.system << "," << r.n_points << "," << r.n_freq << "," << detail::format_double(r.mse) << "\n";
        if (r.mse < best->mse) best = &r;
    }
    std::cout << "sweep " << rows.front().system << " (" << rows.front().n_points << " points, "
              << datasets.size() << " dataset(s)): best n_freq = " << best->n_freq
              << " with MSE = " << best->mse << " -> " << out << "\n";
    return 0;
}

int cmd_fit(const std::string& data_path, double ridge, const std::string& out) {
    Dataset d = read_dataset(data_path);
    if (d.truth.frames.size() < 3)
        throw std::runtime_error("fit: dataset needs >= 3 frames for centered time differences");
    const auto snapshots = centered_difference_snapshots(d.truth);
    StencilModel model = fit_model(snapshots, default_library(d.truth.frames.front().n_channels()), ridge);
    save_model(model, out);

    std::cout << "fitted " << system_name(d.truth.spec.kind) << " model (" << snapshots.size()
              << " snapshots) -> " << out << "\n";
    for (int f = 0; f < model.library.size(); ++f)
        for (int c = 0; c < model.n_channels(); ++c)
            if (std::abs(model.weights(c, f)) > 1e-10)
                std::cout << "  weight[ch" << c << "][" << model.library.features[static_cast<std::size_t>(f)].name()
                          << "] = " << model.weights(c, f) << "\n";

    const GridField& f0 = d.truth.frames.front();
    StencilModel analytic = analytic_model(d.truth.spec, f0.nx, f0.ny);
    double worst = 0.0;
    for (int f = 0; f < analytic.library.size(); ++f)
        for (int c = 0; c < analytic.n_channels(); ++c)
            if (std::abs(analytic.weights(c, f)) > 0.0)
                worst = std::max(worst, std::abs(model.weights(c, f) - analytic.weights(c, f)) /
                                            std::abs(analytic.weights(c, f)));
    std::cout << "  max deviation from analytic weights: " << worst * 100.0 << "%\n";
    return 0;
}

int cmd_rollout(const std::string& data_path, const std::string& model_arg, int horizon, int n_freq, double ridge,
                bool use_mirror, bool no_cache, const std::string& out) {
    Dataset d = read_dataset(data_path);
    if (horizon + 1 > static_cast<int>(d.observations.size()))
        throw std::runtime_error("rollout: horizon " + std::to_string(horizon) + " exceeds the " +
                                 std::to_string(d.observations.size() - 1) + " available truth frames");
    const ScatteredField& u0 = d.observations.front();
    std::vector<ScatteredField> truth(d.observations.begin() + 1, d.observations.begin() + 1 + horizon);
    const std::string system = system_name(d.truth.spec.kind);

    GrindConfig cfg;
    cfg.n_freq = n_freq;
    cfg.grid_nx = d.truth.frames.front().nx;
    cfg.grid_ny = d.truth.frames.front().ny;
    cfg.ridge = ridge;
    cfg.dt = d.truth.dt * d.truth.record_stride;
    cfg.substeps = d.truth.substeps;
    cfg.use_mirror = use_mirror;
    cfg.cache_factorization = !no_cache;

    std::vector<RolloutReport> reports;
    if (model_arg != "persistence") {
        StencilModel model = model_arg == "analytic"
                                 ? analytic_model(d.truth.spec, cfg.grid_nx, cfg.grid_ny)
                                 : load_model(model_arg);
        const std::string label = model_arg == "analytic" ? "analytic" : "fitted";
        reports.push_back(evaluate_rollout(rollout(u0, model, cfg, horizon), truth, system, label));
    }
    reports.push_back(evaluate_rollout(persistence(u0, horizon), truth, system, "persistence"));
    write_report_csv(reports, out);

    for (const auto& r : reports) {
        std::cout << system << "/" << r.model << ": step-1 MSE = " << r.per_step_mse.front() << ", step-"
                  << horizon << " MSE = " << r.per_step_mse.back() << "\n";
    }
    std::cout << "wrote " << out << "\n";
    return 0;
}

int cmd_report(const std::vector<std::string>& inputs, const std::string& out) {
    if (inputs.empty()) throw std::runtime_error("report: no input CSVs");
    // (system, model) -> step -> (sum, count); sweeps aggregate separately
    std::map<std::pair<std::string, std::string>, std::map<int, std::pair<double, int>>> rollouts;
    std::map<std::pair<std::string, std::string>, std::pair<int, double>> sweep_best;
    for (const auto& path : inputs) {
        const auto rows = read_csv(path);
        if (rows.empty()) throw std::runtime_error("report: CSV has no data rows: " + path);
        for (const auto& row : rows) {
            if (row.count("step")) {
                auto& slot = rollouts[{row.at("system"), row.at("model")}][std::stoi(row.at("step"))];
                slot.first += std::stod(row.at("mse"));
                slot.second += 1;
            } else if (row.count("n_freq")) {
                const auto key = std::make_pair(row.at("system"), row.at("n_points"));
                const double mse = std::stod(row.at("mse"));
                auto it = sweep_best.find(key);
                if (it == sweep_best.end() || mse < it->second.second)
                    sweep_best[key] = {std::stoi(row.at("n_freq")), mse};
            } else {
                throw std::runtime_error("report: unrecognized CSV columns in " + path);
            }
        }
    }

    std::ofstream csv(out, std::ios::trunc);
    if (!csv) throw std::runtime_error("cannot write " + out);
    std::ostringstream table;
    if (!rollouts.empty()) {
        csv << "system,model,mse_step_1,mse_step_final\n";
        table << "system        model        step-1 MSE    final-step MSE\n";
        for (const auto& [key, steps] : rollouts) {
            const auto& first = steps.begin()->second;
            const auto& last = steps.rbegin()->second;
            const double m1 = first.first / first.second;
            const double mT = last.first / last.second;
            csv << key.first << "," << key.second << "," << detail::format_double(m1) << ","
                << detail::format_double(mT) << "\n";
            table << key.first << "  " << key.second << "  " << m1 << "  " << mT << "\n";
        }
    }
    if (!sweep_best.empty()) {
        csv << "system,n_points,best_n_freq,best_mse\n";
        table << "system        n_points    best n_freq    best MSE\n";
        for (const auto& [key, best] : sweep_best) {
            csv << key.first << "," << key.second << "," << best.first << "," << detail::format_double(best.second)
                << "\n";
            table << key.first << "  " << key.second << "  " << best.first << "  " << best.second << "\n";
        }
    }
    std::cout << table.str() << "wrote " << out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GrINd experiments: Fourier interpolation of scattered observations and grid-space forecasting"};
    app.set_config("--config")->description("key = value config file; flags take precedence");
    app.require_subcommand(1);

    // generate
    std::string system = "advection", out_path;
    int resolution = 64, n_points = 900, n_frames = 32, substeps = 0;
    std::uint64_t seed = 0;
    double dt = 0.01, advect_x = 1.0, advect_y = 0.5, viscosity = 0.02, diffusivity = 0.05, wave_speed = 1.0;
    bool csv_export = false;
    auto* generate = app.add_subcommand("generate", "simulate a system and write a scattered-observation dataset");
    generate->add_option("--system", system, "advection|burgers|diffusion|wave")->capture_default_str();
    generate->add_option("--resolution", resolution, "square grid resolution")->check(CLI::Range(3, 512))->capture_default_str();
    generate->add_option("--points", n_points, "observation locations")->check(CLI::PositiveNumber)->capture_default_str();
    generate->add_option("--frames", n_frames, "recorded frames")->check(CLI::Range(2, 100000))->capture_default_str();
    generate->add_option("--seed", seed)->capture_default_str();
    generate->add_option("--dt", dt, "recorded time step")->check(CLI::PositiveNumber)->capture_default_str();
    generate->add_option("--substeps", substeps, "internal RK4 substeps (0 = per-system default)")->capture_default_str();
    generate->add_option("--advect-x", advect_x)->capture_default_str();
    generate->add_option("--advect-y", advect_y)->capture_default_str();
    generate->add_option("--viscosity", viscosity)->capture_default_str();
    generate->add_option("--diffusivity", diffusivity)->capture_default_str();
    generate->add_option("--wave-speed", wave_speed)->capture_default_str();
    generate->add_option("--out", out_path, "dataset manifest path")->required();
    generate->add_flag("--csv", csv_export, "also export CSV for inspection");

    // interp-sweep
    std::vector<std::string> data_paths;
    int freq_min = 3, freq_max = 25;
    std::string sweep_out;
    auto* sweep = app.add_subcommand("interp-sweep", "MSE of FI interpolation vs n_freq against full-resolution truth");
    sweep->add_option("--data", data_paths, "dataset path(s); repeat for multiple seeds")->required();
    sweep->add_option("--freq-min", freq_min)->check(CLI::PositiveNumber)->capture_default_str();
    sweep->add_option("--freq-max", freq_max)->check(CLI::PositiveNumber)->capture_default_str();
    sweep->add_option("--out", sweep_out, "output CSV")->required();

    // fit
    std::string fit_data, fit_out;
    double fit_ridge = 0.0;
    auto* fit = app.add_subcommand("fit", "fit stencil-feature weights to derivative labels");
    fit->add_option("--data", fit_data)->required();
    fit->add_option("--ridge", fit_ridge)->check(CLI::NonNegativeNumber)->capture_default_str();
    fit->add_option("--out", fit_out, "model file path")->required();

    // rollout
    std::string ro_data, ro_model = "analytic", ro_out;
    int horizon = 16, ro_nfreq = 18;
    double ro_ridge = 0.0;
    bool ro_mirror = false, ro_no_cache = false;
    auto* ro = app.add_subcommand("rollout", "closed-loop GrINd rollout vs the persistence baseline");
    ro->add_option("--data", ro_data)->required();
    ro->add_option("--model", ro_model, "model file, 'analytic', or 'persistence'")->capture_default_str();
    ro->add_option("--horizon", horizon)->check(CLI::PositiveNumber)->capture_default_str();
    ro->add_option("--n-freq", ro_nfreq)->check(CLI::PositiveNumber)->capture_default_str();
    ro->add_option("--ridge", ro_ridge)->check(CLI::NonNegativeNumber)->capture_default_str();
    ro->add_flag("--mirror", ro_mirror, "use the non-periodic mirror extension in both FI layers");
    ro->add_flag("--no-cache", ro_no_cache, "refit FI factorizations every step");
    ro->add_option("--out", ro_out, "per-step MSE CSV")->required();

    // report
    std::vector<std::string> report_inputs;
    std::string report_out;
    auto* report = app.add_subcommand("report", "aggregate sweep/rollout CSVs into summary tables");
    report->add_option("--input", report_inputs, "result CSV path(s)")->required();
    report->add_option("--out", report_out, "aggregated CSV")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) {
            std::cout << "config: system=" << system << " resolution=" << resolution << " points=" << n_points
                      << " frames=" << n_frames << " seed=" << seed << " dt=" << dt << "\n";
            return cmd_generate(system, resolution, n_points, n_frames, seed, dt, substeps, advect_x, advect_y,
                                viscosity, diffusivity, wave_speed, out_path, csv_export);
        }
        if (sweep->parsed()) {
            std::cout << "config: datasets=" << data_paths.size() << " freq-range=[" << freq_min << "," << freq_max
                      << "] workers=" << worker_count() << "\n";
            return cmd_interp_sweep(data_paths, freq_min, freq_max, sweep_out);
        }
        if (fit->parsed()) return cmd_fit(fit_data, fit_ridge, fit_out);
        if (ro->parsed()) {
            std::cout << "config: model=" << ro_model << " horizon=" << horizon << " n_freq=" << ro_nfreq << "\n";
            return cmd_rollout(ro_data, ro_model, horizon, ro_nfreq, ro_ridge, ro_mirror, ro_no_cache, ro_out);
        }
        if (report->parsed()) return cmd_report(report_inputs, report_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
