#include "tdinv/harness/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <random>

#include "tdinv/errors.hpp"
#include "tdinv/harness/report.hpp"

namespace tdinv::harness {

using nlohmann::json;

BenchmarkInstance make_instance(const InstanceConfig& c) {
    BenchmarkInstance inst;
    inst.triple = build_triple(c.n_x);
    inst.problem = std::make_shared<SemilinearDiffusion>(inst.triple, c.gain);
    inst.grid = make_time_grid(c.T, c.n_t);
    return inst;
}

TruthData synthesize_truth(const TruthConfig& c, const BenchmarkInstance& inst) {
    if (c.kind != "sine") throw ValidationError("unknown truth kind '" + c.kind + "'");
    TruthData t;
    const Vector x = inst.triple->nodes();
    t.theta = c.amplitude * (2.0 * std::numbers::pi * x.array()).sin().matrix();
    const ReducedOperator op(inst.problem, inst.grid);
    t.u = op.solve_state(t.theta);
    t.y = op.observe(t.theta, t.u);
    return t;
}

namespace {

Trajectory white_field(std::mt19937_64& rng, const TimeGrid& grid, Index n, SpaceTag tag) {
    std::normal_distribution<double> normal;
    Trajectory f = Trajectory::zeros(grid, n, tag);
    for (int s = 1; s <= grid.steps(); ++s)
        for (Index i = 0; i < n; ++i) f.values(i, s) = normal(rng);
    return f;
}

void rescale(const GelfandTriple& tr, Trajectory& f, double target) {
    if (target == 0.0) {
        f.values.setZero();
        return;
    }
    f *= target / norm(tr, f);
}

constexpr int kCouplingSamples = 4;

}  // namespace

NoisyDataset add_noise(const BenchmarkInstance& inst, const TruthData& truth, const NoiseConfig& noise) {
    if (!(noise.delta_w >= 0.0) || !(noise.delta_z >= 0.0)) throw ValidationError("noise levels must be nonnegative");
    const GelfandTriple& tr = *inst.triple;
    const Problem& pb = *inst.problem;
    const ReducedOperator op(inst.problem, inst.grid);

    std::mt19937_64 rng(noise.seed);
    NoisyDataset d;
    d.w_delta = white_field(rng, inst.grid, pb.state_dim(), SpaceTag::dual_load);
    d.z_delta = white_field(rng, inst.grid, pb.observation_dim(), SpaceTag::observation);
    rescale(tr, d.w_delta, noise.delta_w);
    rescale(tr, d.z_delta, noise.delta_z);
    d.y = truth.y;

    if (noise.delta_w > 0.0) {
        const Trajectory u_delta = op.solve_state(truth.theta, &d.w_delta);
        d.y_delta = op.observe(truth.theta, u_delta);
        d.c_hat = norm(tr, truth.y - d.y_delta) / noise.delta_w;
        // Extra draws from a separate stream refine the coupling constant.
        std::mt19937_64 aux(noise.seed ^ 0x9e3779b97f4a7c15ULL);
        for (int s = 0; s < kCouplingSamples; ++s) {
            Trajectory w = white_field(aux, inst.grid, pb.state_dim(), SpaceTag::dual_load);
            rescale(tr, w, noise.delta_w);
            const Trajectory y_s = op.observe(truth.theta, op.solve_state(truth.theta, &w));
            d.c_hat = std::max(d.c_hat, norm(tr, truth.y - y_s) / noise.delta_w);
        }
    } else {
        d.y_delta = truth.y;
    }
    d.y_delta += d.z_delta;
    d.delta = norm(tr, d.y_delta - d.y);
    d.delta_bound = d.c_hat * noise.delta_w + noise.delta_z;
    return d;
}

double relative_error(const Vector& theta, const Vector& theta_true) {
    const double denom = theta_true.norm();
    if (denom == 0.0) throw ValidationError("relative error against a zero parameter");
    return (theta - theta_true).norm() / denom;
}

ExperimentResult run_on_dataset(const ExperimentConfig& config, const BenchmarkInstance& inst,
                                const TruthData& truth, const NoisyDataset& data) {
    ExperimentResult res;
    res.data = data;
    res.record = run(config.method, inst.instance(), data.y_delta, data.delta, Truth{truth.theta, truth.u});
    const RunRecord& r = res.record;
    const long long steps = static_cast<long long>(r.rows.size()) - 1;
    const IterationRow& last = r.rows.back();
    json s;
    s["method"] = to_string(r.tag);
    s["k_star"] = r.k_star;
    s["stop_reason"] = to_string(r.reason);
    if (!r.error_message.empty()) s["error"] = r.error_message;
    s["delta_achieved"] = data.delta;
    s["delta_bound"] = data.delta_bound;
    s["c_hat"] = data.c_hat;
    s["discrepancy_threshold"] = r.threshold;
    if (!is_irgnm(r.tag)) s["mu"] = r.mu;
    if (is_irgnm(r.tag)) s["alpha_schedule"] = r.alpha_schedule;
    s["initial_residual"] = r.rows.front().res_total;
    s["final_residual"] = last.res_total;
    s["final_err_theta"] = last.err_theta;
    s["final_rel_err_theta"] = relative_error(r.theta_final, truth.theta);
    s["final_err_u_L2V"] = last.err_u_L2V;
    s["total_ms"] = r.total_ms;
    double step_sum = 0.0;
    for (long long k = 0; k < steps; ++k) step_sum += r.rows[static_cast<std::size_t>(k)].step_ms;
    s["mean_step_ms"] = steps > 0 ? step_sum / static_cast<double>(steps) : 0.0;
    s["config"] = to_json(config);
    res.summary = std::move(s);
    return res;
}

void write_outputs(const std::string& dir, const std::string& prefix, const BenchmarkInstance& inst,
                   const TruthData& truth, const ExperimentResult& result) {
    const std::string base = dir + "/" + prefix;
    write_text(base + "_iterations.csv", iterations_csv(result.record));
    const int last = inst.grid.steps();
    Vector u_err = Vector::Zero(inst.triple->size());
    if (result.record.u_final.values.cols() == truth.u.values.cols())
        u_err = result.record.u_final.values.col(last) - truth.u.values.col(last);
    write_text(base + "_reconstruction.csv",
               reconstruction_csv(inst.triple->nodes(), truth.theta, result.record.theta_final, u_err));
    write_json(base + "_summary.json", result.summary);
}

ExperimentResult run_experiment(const ExperimentConfig& config, bool write_files) {
    config.validate();
    const BenchmarkInstance inst = make_instance(config.instance);
    const TruthData truth = synthesize_truth(config.truth, inst);
    const NoisyDataset data = add_noise(inst, truth, config.noise);
    ExperimentResult res = run_on_dataset(config, inst, truth, data);
    if (write_files) write_outputs(config.output_dir, to_string(config.method.tag), inst, truth, res);
    return res;
}

std::vector<ExperimentResult> compare(const ExperimentConfig& config, const std::vector<MethodTag>& tags,
                                      bool write_files) {
    if (tags.empty()) throw ValidationError("compare needs at least one method");
    config.validate();
    const BenchmarkInstance inst = make_instance(config.instance);
    const TruthData truth = synthesize_truth(config.truth, inst);
    const NoisyDataset data = add_noise(inst, truth, config.noise);
    std::vector<ExperimentResult> out;
    json table = json::array();
    for (MethodTag tag : tags) {
        ExperimentConfig c = config;
        c.method.tag = tag;
        c.validate();
        out.push_back(run_on_dataset(c, inst, truth, data));
        if (write_files) write_outputs(config.output_dir, to_string(tag), inst, truth, out.back());
        const json& s = out.back().summary;
        table.push_back({{"method", to_string(tag)},
                         {"k_star", s["k_star"]},
                         {"stop_reason", s["stop_reason"]},
                         {"final_rel_err_theta", s["final_rel_err_theta"]},
                         {"final_residual", s["final_residual"]},
                         {"mean_step_ms", s["mean_step_ms"]},
                         {"total_ms", s["total_ms"]}});
    }
    if (write_files) {
        json summary{{"delta_achieved", data.delta}, {"methods", table}, {"config", to_json(config)}};
        write_json(config.output_dir + "/compare_summary.json", summary);
    }
    return out;
}

SweepResult sweep(const ExperimentConfig& config, const std::vector<MethodTag>& tags,
                  const std::vector<double>& relative_deltas, int seed_count, bool write_files) {
    if (tags.empty()) throw ValidationError("sweep needs at least one method");
    if (relative_deltas.empty()) throw ValidationError("sweep needs at least one noise level");
    if (seed_count < 1) throw ValidationError("sweep needs at least one seed");
    for (double d : relative_deltas)
        if (!(d >= 0.0)) throw ValidationError("relative noise levels must be nonnegative");
    config.validate();
    const BenchmarkInstance inst = make_instance(config.instance);
    const TruthData truth = synthesize_truth(config.truth, inst);
    const double y_norm = norm(*inst.triple, truth.y);
    const std::string dir = config.output_dir + "/sweep";

    SweepResult result;
    for (MethodTag tag : tags)
        for (double rel : relative_deltas)
            for (int s = 0; s < seed_count; ++s)
                result.entries.push_back({tag, rel, config.noise.seed + static_cast<std::uint64_t>(s), {}});

    const int jobs = static_cast<int>(result.entries.size());
    std::vector<std::exception_ptr> failures(static_cast<std::size_t>(jobs));
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < jobs; ++i) {
        SweepEntry& e = result.entries[static_cast<std::size_t>(i)];
        try {
            ExperimentConfig c = config;
            c.method.tag = e.tag;
            c.noise.delta_z = e.relative_delta_z * y_norm;
            c.noise.seed = e.seed;
            const NoisyDataset data = add_noise(inst, truth, c.noise);
            e.result = run_on_dataset(c, inst, truth, data);
            if (write_files) {
                const std::string prefix = to_string(e.tag) + "_d" + format_double(e.relative_delta_z) + "_s" +
                                           std::to_string(e.seed);
                write_outputs(dir, prefix, inst, truth, e.result);
            }
        } catch (...) {
            failures[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (const auto& f : failures)
        if (f) std::rethrow_exception(f);

    // Aggregation: median final error per (method, level) and the discrepancy check.
    json groups = json::array();
    for (MethodTag tag : tags) {
        for (double rel : relative_deltas) {
            std::vector<double> errs;
            bool all_below = true;
            json runs = json::array();
            for (const SweepEntry& e : result.entries) {
                if (e.tag != tag || e.relative_delta_z != rel) continue;
                const RunRecord& r = e.result.record;
                errs.push_back(r.rows.back().err_theta);
                all_below = all_below && r.reason == StopReason::discrepancy && r.rows.back().res_total <= r.threshold;
                runs.push_back({{"seed", e.seed},
                                {"k_star", r.k_star},
                                {"stop_reason", to_string(r.reason)},
                                {"delta", e.result.data.delta},
                                {"final_residual", r.rows.back().res_total},
                                {"err_theta", r.rows.back().err_theta}});
            }
            std::sort(errs.begin(), errs.end());
            const std::size_t n = errs.size();
            const double median = n % 2 ? errs[n / 2] : 0.5 * (errs[n / 2 - 1] + errs[n / 2]);
            groups.push_back({{"method", to_string(tag)},
                              {"relative_delta_z", rel},
                              {"median_err_theta", median},
                              {"all_stopped_by_discrepancy", all_below},
                              {"runs", runs}});
        }
    }
    result.summary = json{{"y_norm", y_norm}, {"groups", groups}, {"config", to_json(config)}};
    if (write_files) write_json(dir + "/sweep_summary.json", result.summary);
    return result;
}

}  // namespace tdinv::harness
