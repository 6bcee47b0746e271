#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "tdinv/harness/config.hpp"
#include "tdinv/methods.hpp"

namespace tdinv::harness {

struct BenchmarkInstance {
    TriplePtr triple;
    ProblemPtr problem;
    TimeGrid grid;

    Instance instance() const { return {problem, grid}; }
};

/// Semilinear diffusion with Phi(s) = gain * sign(s) s^2 on n_x interior nodes.
BenchmarkInstance make_instance(const InstanceConfig& c);

struct TruthData {
    Vector theta;  ///< theta(x) = amplitude * sin(2 pi x) on interior nodes
    Trajectory u;  ///< S(theta)
    Trajectory y;  ///< g(., u, theta)
};

TruthData synthesize_truth(const TruthConfig& c, const BenchmarkInstance& inst);

struct NoisyDataset {
    Trajectory w_delta;  ///< dual_load, ||.||_W = delta_w
    Trajectory z_delta;  ///< observation, ||.||_Y = delta_z
    Trajectory y_delta;
    Trajectory y;
    double delta = 0.0;        ///< ||y_delta - y||_Y
    double c_hat = 0.0;        ///< sampled ||g(u) - g(u_delta)||_Y / ||w_delta||_W
    double delta_bound = 0.0;  ///< c_hat * delta_w + delta_z
};

/// Gaussian white nodal fields from mt19937_64(seed), each rescaled to its exact
/// target norm; the model perturbation drives a fresh state solve.
NoisyDataset add_noise(const BenchmarkInstance& inst, const TruthData& truth, const NoiseConfig& noise);

struct ExperimentResult {
    RunRecord record;
    NoisyDataset data;
    nlohmann::json summary;
};

/// Relative parameter error ||theta - theta_true|| / ||theta_true|| in the dx-weighted L2 norm.
double relative_error(const Vector& theta, const Vector& theta_true);

/// Runs one method on a prepared dataset and builds the summary record.
ExperimentResult run_on_dataset(const ExperimentConfig& config, const BenchmarkInstance& inst,
                                const TruthData& truth, const NoisyDataset& data);

/// Writes <dir>/<prefix>_iterations.csv, _reconstruction.csv and _summary.json.
void write_outputs(const std::string& dir, const std::string& prefix, const BenchmarkInstance& inst,
                   const TruthData& truth, const ExperimentResult& result);

/// Synthesizes truth and data, runs the configured method and writes the three output files.
ExperimentResult run_experiment(const ExperimentConfig& config, bool write_files = true);

/// Runs several methods on one shared dataset, one after another so timings are comparable,
/// and writes compare_summary.json next to the per-method files.
std::vector<ExperimentResult> compare(const ExperimentConfig& config, const std::vector<MethodTag>& tags,
                                      bool write_files = true);

struct SweepEntry {
    MethodTag tag;
    double relative_delta_z;
    std::uint64_t seed;
    ExperimentResult result;
};

struct SweepResult {
    std::vector<SweepEntry> entries;
    nlohmann::json summary;
};

/// delta_z = relative_delta_z * ||y||_Y for every listed level; seeds base, base+1, ...
/// Jobs run concurrently; each writes its own files under <output_dir>/sweep.
SweepResult sweep(const ExperimentConfig& config, const std::vector<MethodTag>& tags,
                  const std::vector<double>& relative_deltas, int seed_count, bool write_files = true);

}  // namespace tdinv::harness
