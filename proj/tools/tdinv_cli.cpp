#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tdinv/errors.hpp"
#include "tdinv/harness/config.hpp"
#include "tdinv/harness/experiment.hpp"
#include "tdinv/harness/selftest.hpp"

namespace {

enum Exit { ok = 0, validation = 1, solver = 2, selftest_failed = 3 };

std::vector<tdinv::MethodTag> parse_tags(const std::string& list) {
    std::vector<tdinv::MethodTag> tags;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) tags.push_back(tdinv::parse_method_tag(item));
    if (tags.empty()) throw tdinv::ValidationError("empty method list");
    return tags;
}

int status_of(const tdinv::RunRecord& r) { return r.reason == tdinv::StopReason::error ? solver : ok; }

void print_summary(const tdinv::harness::ExperimentResult& res) {
    const auto& s = res.summary;
    std::printf("%-7s k*=%-7lld stop=%-11s rel_err=%.6e residual=%.6e mean_step_ms=%.4f\n",
                s["method"].get<std::string>().c_str(), s["k_star"].get<long long>(),
                s["stop_reason"].get<std::string>().c_str(), s["final_rel_err_theta"].get<double>(),
                s["final_residual"].get<double>(), s["mean_step_ms"].get<double>());
    if (s.contains("error")) std::printf("        error: %s\n", s["error"].get<std::string>().c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Iterative regularization for time-dependent inverse problems"};
    app.require_subcommand(1);

    std::string config_path, output_dir, methods = "aLW,rLW", deltas = "4e-3,2e-3,1e-3";
    int seeds = 5;
    tdinv::harness::SelfTestOptions st;

    auto* run = app.add_subcommand("run", "Run one experiment from a JSON config");
    run->add_option("config", config_path, "Config file")->required();
    run->add_option("-o,--output-dir", output_dir, "Override output_dir");

    auto* cmp = app.add_subcommand("compare", "Run several methods on one dataset");
    cmp->add_option("config", config_path, "Config file")->required();
    cmp->add_option("-m,--methods", methods, "Comma-separated method tags")->capture_default_str();
    cmp->add_option("-o,--output-dir", output_dir, "Override output_dir");

    auto* self = app.add_subcommand("selftest", "Adjoint, Taylor and dense-oracle checks");
    self->add_option("--n-x", st.n_x, "Interior nodes for the dot-product suite")->capture_default_str();
    self->add_option("--n-t", st.n_t, "Time steps for the dot-product suite")->capture_default_str();
    self->add_option("--draws", st.draws, "Random draws per dot-product test")->capture_default_str();

    auto* swp = app.add_subcommand("sweep", "Noise-level study with discrepancy stopping");
    swp->add_option("config", config_path, "Config file")->required();
    swp->add_option("-m,--methods", methods, "Comma-separated method tags")->capture_default_str();
    swp->add_option("-d,--deltas", deltas, "delta_z as fractions of ||y||")->capture_default_str();
    swp->add_option("-s,--seeds", seeds, "Seeds per level")->capture_default_str();
    swp->add_option("-o,--output-dir", output_dir, "Override output_dir");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : validation;
    }

    try {
        if (*self) {
            const auto rep = tdinv::harness::run_selftest(st);
            for (const auto& c : rep.checks)
                std::printf("[%s] %-36s value=%.3e limit=%.1e\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.value,
                            c.tolerance);
            return rep.all_passed() ? ok : selftest_failed;
        }
        auto config = tdinv::harness::load_config(config_path);
        if (!output_dir.empty()) config.output_dir = output_dir;
        if (*run) {
            const auto res = tdinv::harness::run_experiment(config);
            print_summary(res);
            return status_of(res.record);
        }
        if (*cmp) {
            int status = ok;
            for (const auto& res : tdinv::harness::compare(config, parse_tags(methods))) {
                print_summary(res);
                if (status_of(res.record) != ok) status = solver;
            }
            return status;
        }
        if (*swp) {
            std::vector<double> levels;
            std::stringstream ss(deltas);
            std::string item;
            while (std::getline(ss, item, ',')) {
                try {
                    levels.push_back(std::stod(item));
                } catch (const std::exception&) {
                    throw tdinv::ValidationError("bad noise level '" + item + "'");
                }
            }
            const auto result = tdinv::harness::sweep(config, parse_tags(methods), levels, seeds);
            int status = ok;
            for (const auto& g : result.summary["groups"]) {
                std::printf("%-7s delta_z/|y|=%-8g median_err=%.6e all_discrepancy=%s\n",
                            g["method"].get<std::string>().c_str(), g["relative_delta_z"].get<double>(),
                            g["median_err_theta"].get<double>(), g["all_stopped_by_discrepancy"].get<bool>() ? "yes" : "no");
            }
            for (const auto& e : result.entries)
                if (status_of(e.result.record) != ok) status = solver;
            return status;
        }
    } catch (const tdinv::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return validation;
    } catch (const tdinv::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return validation;
    } catch (const tdinv::SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return solver;
    }
    return ok;
}
