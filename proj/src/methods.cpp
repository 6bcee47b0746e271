#include "tdinv/methods.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include "tdinv/errors.hpp"

namespace tdinv {

std::string to_string(MethodTag tag) {
    switch (tag) {
        case MethodTag::aLW: return "aLW";
        case MethodTag::aLWK: return "aLWK";
        case MethodTag::aIRGNM: return "aIRGNM";
        case MethodTag::rLW: return "rLW";
        case MethodTag::rLWK: return "rLWK";
        case MethodTag::rIRGNM: return "rIRGNM";
    }
    return "?";
}

MethodTag parse_method_tag(const std::string& text) {
    for (MethodTag t : {MethodTag::aLW, MethodTag::aLWK, MethodTag::aIRGNM, MethodTag::rLW, MethodTag::rLWK,
                        MethodTag::rIRGNM})
        if (to_string(t) == text) return t;
    throw ValidationError("unknown method tag '" + text + "'");
}

bool is_aao(MethodTag tag) noexcept {
    return tag == MethodTag::aLW || tag == MethodTag::aLWK || tag == MethodTag::aIRGNM;
}
bool is_kaczmarz(MethodTag tag) noexcept { return tag == MethodTag::aLWK || tag == MethodTag::rLWK; }
bool is_irgnm(MethodTag tag) noexcept { return tag == MethodTag::aIRGNM || tag == MethodTag::rIRGNM; }

std::string to_string(StopReason reason) {
    switch (reason) {
        case StopReason::discrepancy: return "discrepancy";
        case StopReason::k_max: return "k_max";
        case StopReason::a_priori: return "a_priori";
        case StopReason::error: return "error";
    }
    return "?";
}

void MethodConfig::validate() const {
    if (!(mu > 0.0) && step_policy == StepPolicy::fixed) throw ValidationError("step size mu must be positive");
    if (!(alpha0 > 0.0)) throw ValidationError("alpha0 must be positive");
    if (!(q > 0.0 && q < 1.0)) throw ValidationError("q must lie in (0,1)");
    if (!(tau_disc > 1.0)) throw ValidationError("tau_disc must exceed 1");
    if (k_max < 0) throw ValidationError("k_max must be nonnegative");
    if (slabs < 1) throw ValidationError("slab count must be at least 1");
    if (!(cg_tol > 0.0)) throw ValidationError("cg_tol must be positive");
    if (cg_max < 1) throw ValidationError("cg_max must be at least 1");
    if (norm_iterations < 1) throw ValidationError("norm_iterations must be at least 1");
}

double MethodConfig::alpha(long long k) const { return alpha0 * std::pow(q, static_cast<double>(k)); }

// ---------------------------------------------------------------------------

AaoPoint step_alw(const AaoOperator& op, const AaoPoint& x, double mu, const ResidualTriple* residual) {
    const ResidualTriple r = residual ? *residual : op.apply_bF(x);
    return x - mu * op.apply_bFprime_adj(x, r);
}

AaoPoint step_alwk(const AaoOperator& op, const AaoPoint& x, double mu, long long k, const ResidualTriple* residual) {
    const int slab = op.partition().slab_of_iteration(k);
    const ResidualTriple r = residual ? op.restrict(*residual, slab) : op.apply_bFj(x, slab);
    return x - mu * op.apply_bFj_adj(x, r, slab);
}

IrgnmStep<AaoPoint> step_airgnm(const AaoOperator& op, const AaoPoint& x, double alpha, const AaoPoint& prior,
                                const CgOptions& cg, const ResidualTriple* residual) {
    if (!(alpha > 0.0)) throw ValidationError("alpha must be positive");
    const ResidualTriple r = residual ? *residual : op.apply_bF(x);
    const AaoPoint offset = x - prior;
    const AaoPoint rhs = -1.0 * op.apply_bFprime_adj(x, r - op.apply_bFprime(x, offset));
    auto apply = [&](const AaoPoint& d) { return op.apply_bFprime_adj(x, op.apply_bFprime(x, d)) + alpha * d; };
    auto inner = [&](const AaoPoint& a, const AaoPoint& b) { return op.domain_inner(a, b); };
    IrgnmStep<AaoPoint> out{offset, {}};
    out.cg = conjugate_gradient(apply, inner, rhs, out.next, cg);
    if (!out.cg.converged)
        throw SolverError("IRGNM inner CG did not converge", out.cg.iterations, out.cg.residual);
    out.next += prior;
    return out;
}

namespace {

Trajectory reduced_residual(const ReducedOperator& op, const Vector& theta, const Trajectory& state,
                            const Trajectory& y) {
    Trajectory r = op.observe(theta, state);
    r -= y;
    r.values.col(0).setZero();
    return r;
}

}  // namespace

Vector step_rlw(const ReducedOperator& op, const Vector& theta, const Trajectory& y, double mu,
                const Trajectory* state) {
    const Trajectory u = state ? *state : op.solve_state(theta);
    return theta - mu * op.apply_Fprime_adj(theta, u, reduced_residual(op, theta, u, y));
}

Vector step_rlwk(const ReducedOperator& op, const Vector& theta, const Trajectory& y, double mu, long long k,
                 const Trajectory* state) {
    const Trajectory u = state ? *state : op.solve_state(theta);
    const int slab = op.partition().slab_of_iteration(k);
    const Trajectory r = restrict_to_slab(reduced_residual(op, theta, u, y), op.partition(), slab);
    return theta - mu * op.apply_Fj_adj(theta, u, r, slab);
}

IrgnmStep<Vector> step_rirgnm(const ReducedOperator& op, const Vector& theta, const Trajectory& y, double alpha,
                              const Vector& prior, const CgOptions& cg, const Trajectory* state) {
    if (!(alpha > 0.0)) throw ValidationError("alpha must be positive");
    const Trajectory u = state ? *state : op.solve_state(theta);
    const Vector offset = theta - prior;
    const Trajectory r = reduced_residual(op, theta, u, y) - op.apply_Fprime(theta, u, offset);
    const Vector rhs = -op.apply_Fprime_adj(theta, u, r);
    auto apply = [&](const Vector& d) -> Vector {
        return op.apply_Fprime_adj(theta, u, op.apply_Fprime(theta, u, d)) + alpha * d;
    };
    auto inner = [&](const Vector& a, const Vector& b) { return op.parameter_inner(a, b); };
    IrgnmStep<Vector> out{offset, {}};
    out.cg = conjugate_gradient(apply, inner, rhs, out.next, cg);
    if (!out.cg.converged)
        throw SolverError("IRGNM inner CG did not converge", out.cg.iterations, out.cg.residual);
    out.next += prior;
    return out;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::uint64_t kPowerSeed = 0x5eed1234abcdULL;

Matrix random_matrix(std::mt19937_64& rng, Index rows, Index cols) {
    std::normal_distribution<double> normal;
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
    return m;
}

}  // namespace

NormEstimate estimate_aao_norm(const AaoOperator& op, const AaoPoint& x, int iterations) {
    std::mt19937_64 rng(kPowerSeed);
    AaoPoint start = op.zero_point();
    start.u.values = random_matrix(rng, start.u.space_size(), start.u.node_count());
    start.theta = random_matrix(rng, start.theta.size(), 1);
    return estimate_operator_norm(
        [&](const AaoPoint& d) { return op.apply_bFprime(x, d); },
        [&](const ResidualTriple& r) { return op.apply_bFprime_adj(x, r); },
        [&](const AaoPoint& a, const AaoPoint& b) { return op.domain_inner(a, b); }, start, iterations);
}

NormEstimate estimate_reduced_norm(const ReducedOperator& op, const Vector& theta, const Trajectory& state,
                                   int iterations) {
    std::mt19937_64 rng(kPowerSeed);
    const Vector start = random_matrix(rng, op.problem().parameter_dim(), 1);
    return estimate_operator_norm(
        [&](const Vector& d) { return op.apply_Fprime(theta, state, d); },
        [&](const Trajectory& z) { return op.apply_Fprime_adj(theta, state, z); },
        [&](const Vector& a, const Vector& b) { return op.parameter_inner(a, b); }, start, iterations);
}

// ---------------------------------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

Trajectory initial_state(const MethodConfig& c, const Instance& inst) {
    if (c.initial_u) return *c.initial_u;
    return Trajectory::zeros(inst.grid, inst.problem->state_dim(), SpaceTag::state);
}

Vector initial_theta(const MethodConfig& c, const Instance& inst) {
    return c.initial_theta ? *c.initial_theta : Vector::Zero(inst.problem->parameter_dim());
}

double parameter_error(const GelfandTriple& tr, const Vector& theta, const std::optional<Truth>& truth) {
    if (!truth) return std::numeric_limits<double>::quiet_NaN();
    return std::sqrt(tr.dx() * (theta - truth->theta).squaredNorm());
}

double state_error(const GelfandTriple& tr, const Trajectory& u, const std::optional<Truth>& truth) {
    if (!truth) return std::numeric_limits<double>::quiet_NaN();
    return norm_L2V(tr, u - truth->u);
}

// Shared loop. `Body` exposes evaluate(row) -> residual total, and step(k).
template <class Body>
void iterate(const MethodConfig& c, double threshold, RunRecord& rec, Body& body) {
    const auto run_start = Clock::now();
    const long long m = is_kaczmarz(c.tag) ? c.slabs : 1;
    for (long long k = 0;; ++k) {
        const auto t0 = Clock::now();
        IterationRow row;
        row.k = k;
        try {
            body.evaluate(row);
            const bool check = c.stopping == StoppingRule::discrepancy && k % m == 0;
            if (check && row.res_total <= threshold) {
                rec.reason = StopReason::discrepancy;
            } else if (k >= c.k_max) {
                rec.reason = c.stopping == StoppingRule::a_priori ? StopReason::a_priori : StopReason::k_max;
            } else {
                if (is_irgnm(c.tag)) rec.alpha_schedule.push_back(c.alpha(k));
                row.cg_iterations = body.step(k);
                if (c.record_timing) row.step_ms = elapsed_ms(t0);
                rec.rows.push_back(row);
                continue;
            }
        } catch (const SolverError& e) {
            rec.reason = StopReason::error;
            rec.error_message = e.what();
        }
        if (c.record_timing) row.step_ms = elapsed_ms(t0);
        rec.rows.push_back(row);
        rec.k_star = k;
        break;
    }
    rec.total_ms = c.record_timing ? elapsed_ms(run_start) : 0.0;
}

struct AaoBody {
    const MethodConfig& c;
    const AaoOperator& op;
    const std::optional<Truth>& truth;
    AaoPoint x;
    AaoPoint prior;
    double mu;
    ResidualTriple r;

    void evaluate(IterationRow& row) {
        r = op.apply_bF(x);
        const ResidualNorms n = op.residual_norms(r);
        row.res_total = n.total;
        row.res_w = n.w;
        row.res_h = n.h;
        row.res_y = n.y;
        row.err_theta = parameter_error(op.triple(), x.theta, truth);
        row.err_u_L2V = state_error(op.triple(), x.u, truth);
    }

    int step(long long k) {
        switch (c.tag) {
            case MethodTag::aLW: x = step_alw(op, x, mu, &r); return 0;
            case MethodTag::aLWK: x = step_alwk(op, x, mu, k, &r); return 0;
            default: {
                auto s = step_airgnm(op, x, c.alpha(k), prior, {c.cg_tol, c.cg_max}, &r);
                x = std::move(s.next);
                return s.cg.iterations;
            }
        }
    }
};

struct ReducedBody {
    const MethodConfig& c;
    const ReducedOperator& op;
    const Trajectory& y;
    const std::optional<Truth>& truth;
    Vector theta;
    Vector prior;
    double mu;
    Trajectory u;

    void evaluate(IterationRow& row) {
        u = op.solve_state(theta);
        Trajectory r = reduced_residual(op, theta, u, y);
        row.res_y = op.observation_norm(r);
        row.res_total = row.res_y;
        row.err_theta = parameter_error(op.triple(), theta, truth);
        row.err_u_L2V = state_error(op.triple(), u, truth);
    }

    int step(long long k) {
        switch (c.tag) {
            case MethodTag::rLW: theta = step_rlw(op, theta, y, mu, &u); return 0;
            case MethodTag::rLWK: theta = step_rlwk(op, theta, y, mu, k, &u); return 0;
            default: {
                auto s = step_rirgnm(op, theta, y, c.alpha(k), prior, {c.cg_tol, c.cg_max}, &u);
                theta = std::move(s.next);
                return s.cg.iterations;
            }
        }
    }
};

}  // namespace

RunRecord run(const MethodConfig& config, const Instance& instance, const Trajectory& y_delta, double delta,
              const std::optional<Truth>& truth) {
    config.validate();
    if (!instance.problem) throw ValidationError("instance has no problem");
    if (!(delta >= 0.0)) throw ValidationError("noise level must be nonnegative");
    if (config.stopping == StoppingRule::a_priori && !is_irgnm(config.tag))
        throw ValidationError("a-priori stopping applies to IRGNM only");
    const Problem& pb = *instance.problem;
    const GelfandTriple& tr = pb.triple();
    const auto partition = make_partition(instance.grid, is_kaczmarz(config.tag) ? config.slabs : 1);

    Trajectory y = y_delta;
    y.tag = SpaceTag::observation;
    const double y_norm = norm(tr, y);

    RunRecord rec;
    rec.tag = config.tag;
    rec.delta = delta;
    rec.threshold = config.tau_disc * std::max(delta, 1e-10 * y_norm);

    if (is_aao(config.tag)) {
        const AaoOperator op(instance.problem, instance.grid, AaoOperator::make_data(pb, y), partition);
        AaoPoint x0{initial_state(config, instance), initial_theta(config, instance)};
        x0.u.tag = SpaceTag::state;
        AaoPoint prior{config.prior_u ? *config.prior_u : op.zero_point().u,
                       config.prior_theta ? *config.prior_theta : Vector::Zero(pb.parameter_dim())};
        double mu = config.mu;
        if (!is_irgnm(config.tag) && config.step_policy == StepPolicy::norm_based) {
            const double nrm = estimate_aao_norm(op, x0, config.norm_iterations).norm;
            mu = 1.0 / (nrm * nrm);
        }
        rec.mu = is_irgnm(config.tag) ? 0.0 : mu;
        AaoBody body{config, op, truth, std::move(x0), std::move(prior), mu, op.zero_residual()};
        iterate(config, rec.threshold, rec, body);
        rec.theta_final = body.x.theta;
        rec.u_final = body.x.u;
    } else {
        const ReducedOperator op(instance.problem, instance.grid, partition);
        Vector theta0 = initial_theta(config, instance);
        Vector prior = config.prior_theta ? *config.prior_theta : Vector::Zero(pb.parameter_dim());
        double mu = config.mu;
        if (!is_irgnm(config.tag) && config.step_policy == StepPolicy::norm_based) {
            const Trajectory u0 = op.solve_state(theta0);
            const double nrm = estimate_reduced_norm(op, theta0, u0, config.norm_iterations).norm;
            mu = 1.0 / (nrm * nrm);
        }
        rec.mu = is_irgnm(config.tag) ? 0.0 : mu;
        ReducedBody body{config, op, y, truth, std::move(theta0), std::move(prior), mu, Trajectory{}};
        iterate(config, rec.threshold, rec, body);
        rec.theta_final = body.theta;
        rec.u_final = body.u;
    }
    return rec;
}

}  // namespace tdinv
