#pragma once

// Iteration drivers: Landweber, Landweber-Kaczmarz and the iteratively
// regularized Gauss-Newton method, each in all-at-once (a*) and reduced (r*)
// form, plus the run loop with discrepancy or a-priori stopping.

#include <optional>
#include <string>
#include <vector>

#include "tdinv/aao.hpp"
#include "tdinv/krylov.hpp"
#include "tdinv/reduced.hpp"

namespace tdinv {

enum class MethodTag { aLW, aLWK, aIRGNM, rLW, rLWK, rIRGNM };

std::string to_string(MethodTag tag);
/// Throws ValidationError for an unknown tag.
MethodTag parse_method_tag(const std::string& text);
bool is_aao(MethodTag tag) noexcept;
bool is_kaczmarz(MethodTag tag) noexcept;
bool is_irgnm(MethodTag tag) noexcept;

enum class StepPolicy { fixed, norm_based };
enum class StoppingRule { discrepancy, a_priori };
enum class StopReason { discrepancy, k_max, a_priori, error };

std::string to_string(StopReason reason);

struct MethodConfig {
    MethodTag tag = MethodTag::rLW;
    StepPolicy step_policy = StepPolicy::fixed;
    double mu = 1.0;
    double alpha0 = 1.0;
    double q = 2.0 / 3.0;
    double tau_disc = 2.5;
    long long k_max = 1000;
    int slabs = 1;
    StoppingRule stopping = StoppingRule::discrepancy;
    double cg_tol = 1e-8;
    int cg_max = 500;
    int norm_iterations = 100;  ///< power-iteration cap for the norm-based step size
    bool record_timing = true;  ///< false writes zero step times (byte-reproducible output)

    // Prior (u_bar, theta_bar) for IRGNM and the starting point; empty means zero.
    std::optional<Trajectory> prior_u;
    std::optional<Vector> prior_theta;
    std::optional<Trajectory> initial_u;
    std::optional<Vector> initial_theta;

    /// Throws ValidationError on out-of-range values.
    void validate() const;
    double alpha(long long k) const;
};

struct Instance {
    ProblemPtr problem;
    TimeGrid grid;
};

struct Truth {
    Vector theta;
    Trajectory u;
};

struct IterationRow {
    long long k = 0;
    double res_total = 0.0;
    double res_w = 0.0;
    double res_h = 0.0;
    double res_y = 0.0;
    double err_theta = 0.0;
    double err_u_L2V = 0.0;
    double step_ms = 0.0;
    int cg_iterations = 0;
};

struct RunRecord {
    MethodTag tag = MethodTag::rLW;
    std::vector<IterationRow> rows;
    long long k_star = 0;
    StopReason reason = StopReason::k_max;
    std::string error_message;
    double mu = 0.0;                    ///< step size actually used (Landweber variants)
    double delta = 0.0;                 ///< noise level handed to the run
    double threshold = 0.0;             ///< tau_disc * effective delta
    std::vector<double> alpha_schedule; ///< alpha_k for k = 0..k*-1 (IRGNM)
    Vector theta_final;
    Trajectory u_final;
    double total_ms = 0.0;
};

// --- single steps ----------------------------------------------------------

/// x - mu bF'(x)* bF(x). `residual` may pass a precomputed bF(x).
AaoPoint step_alw(const AaoOperator& op, const AaoPoint& x, double mu, const ResidualTriple* residual = nullptr);

/// Landweber step on slab k mod m.
AaoPoint step_alwk(const AaoOperator& op, const AaoPoint& x, double mu, long long k,
                   const ResidualTriple* residual = nullptr);

template <class Point>
struct IrgnmStep {
    Point next;
    CgResult cg;
};

/// Solves (bF'* bF' + alpha) (x_next - x_bar) = -bF'*(bF(x) - bF'(x)(x - x_bar)) by CG.
/// Throws SolverError when CG hits its cap.
IrgnmStep<AaoPoint> step_airgnm(const AaoOperator& op, const AaoPoint& x, double alpha, const AaoPoint& prior,
                                const CgOptions& cg, const ResidualTriple* residual = nullptr);

/// theta - mu F'(theta)* (F(theta) - y). `state` may pass S(theta).
Vector step_rlw(const ReducedOperator& op, const Vector& theta, const Trajectory& y, double mu,
                const Trajectory* state = nullptr);
Vector step_rlwk(const ReducedOperator& op, const Vector& theta, const Trajectory& y, double mu, long long k,
                 const Trajectory* state = nullptr);
IrgnmStep<Vector> step_rirgnm(const ReducedOperator& op, const Vector& theta, const Trajectory& y, double alpha,
                              const Vector& prior, const CgOptions& cg, const Trajectory* state = nullptr);

// --- norms -----------------------------------------------------------------

/// ||bF'(x)|| by power iteration from a fixed pseudo-random start.
NormEstimate estimate_aao_norm(const AaoOperator& op, const AaoPoint& x, int iterations);
/// ||F'(theta)|| about the state S(theta).
NormEstimate estimate_reduced_norm(const ReducedOperator& op, const Vector& theta, const Trajectory& state,
                                   int iterations);

// --- driver ----------------------------------------------------------------

/// Iterates until the full residual drops below tau_disc * delta (checked every
/// step, or once per sweep for Kaczmarz variants) or k reaches k_max. Rows are
/// recorded for k = 0..k*, each evaluated at x_k before its step. A zero delta is
/// replaced by 1e-10 * ||y||. Solver failures end the run with reason `error`.
RunRecord run(const MethodConfig& config, const Instance& instance, const Trajectory& y_delta, double delta,
              const std::optional<Truth>& truth = std::nullopt);

}  // namespace tdinv
