#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "tdinv/methods.hpp"

namespace tdinv::harness {

struct InstanceConfig {
    int n_x = 100;
    int n_t = 100;
    double T = 0.1;
    double gain = 10.0;
};

struct TruthConfig {
    std::string kind = "sine";  ///< theta(x) = amplitude * sin(2 pi x)
    double amplitude = 0.1;
};

struct NoiseConfig {
    double delta_w = 0.0;  ///< target norm of the model perturbation in L2(0,T;V*)
    double delta_z = 0.0;  ///< target norm of the observation perturbation in L2(0,T;H)
    std::uint64_t seed = 0;
};

struct ExperimentConfig {
    InstanceConfig instance;
    TruthConfig truth;
    MethodConfig method;
    NoiseConfig noise;
    std::string output_dir = "out";

    /// Throws ValidationError naming the offending key.
    void validate() const;
};

/// Missing keys take the defaults above; unknown keys are rejected.
/// method.mu accepts a number (fixed step) or the string "norm".
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& c);

}  // namespace tdinv::harness
