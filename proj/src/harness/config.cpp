#include "tdinv/harness/config.hpp"

#include <fstream>
#include <set>

#include "tdinv/errors.hpp"

namespace tdinv::harness {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ValidationError(where + " must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key())) throw ValidationError("unknown key '" + where + "." + it.key() + "'");
}

template <class T>
void read(const json& obj, const std::string& where, const char* key, T& out) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ValidationError("bad value for '" + where + "." + key + "'");
    }
}

}  // namespace

void ExperimentConfig::validate() const {
    if (instance.n_x < 1) throw ValidationError("instance.n_x must be at least 1");
    if (instance.n_t < 1) throw ValidationError("instance.n_t must be at least 1");
    if (!(instance.T > 0.0)) throw ValidationError("instance.T must be positive");
    if (!(instance.gain >= 0.0)) throw ValidationError("instance.gain must be nonnegative");
    if (truth.kind != "sine") throw ValidationError("truth.kind must be \"sine\"");
    if (!(noise.delta_w >= 0.0)) throw ValidationError("noise.delta_w must be nonnegative");
    if (!(noise.delta_z >= 0.0)) throw ValidationError("noise.delta_z must be nonnegative");
    if (is_kaczmarz(method.tag) && instance.n_t % method.slabs != 0)
        throw ValidationError("method.m must divide instance.n_t");
    if (output_dir.empty()) throw ValidationError("output_dir must not be empty");
    method.validate();
}

ExperimentConfig parse_config(const json& j) {
    ExperimentConfig c;
    reject_unknown(j, "config", {"instance", "truth", "method", "noise", "output_dir"});
    if (j.contains("instance")) {
        const json& s = j.at("instance");
        reject_unknown(s, "instance", {"n_x", "n_t", "T", "gain"});
        read(s, "instance", "n_x", c.instance.n_x);
        read(s, "instance", "n_t", c.instance.n_t);
        read(s, "instance", "T", c.instance.T);
        read(s, "instance", "gain", c.instance.gain);
    }
    if (j.contains("truth")) {
        const json& s = j.at("truth");
        reject_unknown(s, "truth", {"kind", "amplitude"});
        read(s, "truth", "kind", c.truth.kind);
        read(s, "truth", "amplitude", c.truth.amplitude);
    }
    if (j.contains("method")) {
        const json& s = j.at("method");
        reject_unknown(s, "method", {"tag", "mu", "alpha0", "q", "tau_disc", "k_max", "m", "cg_tol", "cg_max",
                                     "stopping", "norm_iterations", "record_timing"});
        MethodConfig& m = c.method;
        if (s.contains("tag")) {
            std::string tag;
            read(s, "method", "tag", tag);
            m.tag = parse_method_tag(tag);
        }
        if (s.contains("mu")) {
            const json& mu = s.at("mu");
            if (mu.is_string()) {
                if (mu.get<std::string>() != "norm") throw ValidationError("method.mu must be a number or \"norm\"");
                m.step_policy = StepPolicy::norm_based;
            } else {
                read(s, "method", "mu", m.mu);
                m.step_policy = StepPolicy::fixed;
            }
        }
        read(s, "method", "alpha0", m.alpha0);
        read(s, "method", "q", m.q);
        read(s, "method", "tau_disc", m.tau_disc);
        read(s, "method", "k_max", m.k_max);
        read(s, "method", "m", m.slabs);
        read(s, "method", "cg_tol", m.cg_tol);
        read(s, "method", "cg_max", m.cg_max);
        read(s, "method", "norm_iterations", m.norm_iterations);
        read(s, "method", "record_timing", m.record_timing);
        if (s.contains("stopping")) {
            std::string rule;
            read(s, "method", "stopping", rule);
            if (rule == "discrepancy") m.stopping = StoppingRule::discrepancy;
            else if (rule == "a_priori") m.stopping = StoppingRule::a_priori;
            else throw ValidationError("method.stopping must be \"discrepancy\" or \"a_priori\"");
        }
    }
    if (j.contains("noise")) {
        const json& s = j.at("noise");
        reject_unknown(s, "noise", {"delta_w", "delta_z", "seed"});
        read(s, "noise", "delta_w", c.noise.delta_w);
        read(s, "noise", "delta_z", c.noise.delta_z);
        read(s, "noise", "seed", c.noise.seed);
    }
    read(j, "config", "output_dir", c.output_dir);
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ValidationError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
    const MethodConfig& m = c.method;
    json method = {{"tag", to_string(m.tag)},
                   {"alpha0", m.alpha0},
                   {"q", m.q},
                   {"tau_disc", m.tau_disc},
                   {"k_max", m.k_max},
                   {"m", m.slabs},
                   {"cg_tol", m.cg_tol},
                   {"cg_max", m.cg_max},
                   {"stopping", m.stopping == StoppingRule::discrepancy ? "discrepancy" : "a_priori"},
                   {"norm_iterations", m.norm_iterations},
                   {"record_timing", m.record_timing}};
    if (m.step_policy == StepPolicy::norm_based) method["mu"] = "norm";
    else method["mu"] = m.mu;
    return json{{"instance", {{"n_x", c.instance.n_x}, {"n_t", c.instance.n_t}, {"T", c.instance.T},
                              {"gain", c.instance.gain}}},
                {"truth", {{"kind", c.truth.kind}, {"amplitude", c.truth.amplitude}}},
                {"method", method},
                {"noise", {{"delta_w", c.noise.delta_w}, {"delta_z", c.noise.delta_z}, {"seed", c.noise.seed}}},
                {"output_dir", c.output_dir}};
}

}  // namespace tdinv::harness
