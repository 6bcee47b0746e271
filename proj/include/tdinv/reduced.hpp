#pragma once

// Reduced formulation: the state is eliminated through the parameter-to-state
// map S, and the forward operator is F(theta) = g(., S(theta), theta).
//
// The discrete state equation is implicit Euler with f evaluated at the new
// time level,
//     u^n - tau f(t_n, u^n, theta) = u^{n-1} + tau w^n,   u^0 = u0(theta),
// and every derivative below is the exact linearization of that scheme. The
// adjoint sweep is the exact transpose of the sensitivity sweep, so
// <F'(theta) xi, z>_Y = (xi, F'(theta)* z)_X holds to solver precision.

#include <optional>

#include "tdinv/grids.hpp"
#include "tdinv/problem.hpp"
#include "tdinv/spaces.hpp"

namespace tdinv {

enum class StatePolicy {
    imex,    ///< implicit diffusion, explicit remainder; one spectral solve per step
    newton,  ///< fully implicit step, Newton from the IMEX predictor
};

struct ReducedOptions {
    StatePolicy policy = StatePolicy::newton;
    double newton_tolerance = 1e-14;  ///< max-norm residual, relative to 1 + |u|_inf
    int newton_max_iterations = 25;
    double linear_tolerance = 1e-14;  ///< inner PCG solves of Id - tau f_u'
    int linear_max_iterations = 200;
};

class ReducedOperator {
public:
    ReducedOperator(ProblemPtr problem, TimeGrid grid, std::optional<KaczmarzPartition> partition = std::nullopt,
                    ReducedOptions options = {});

    const Problem& problem() const noexcept { return *problem_; }
    const GelfandTriple& triple() const noexcept { return problem_->triple(); }
    const TimeGrid& grid() const noexcept { return grid_; }
    const KaczmarzPartition& partition() const noexcept { return partition_; }
    const ReducedOptions& options() const noexcept { return options_; }

    /// S(theta), optionally driven by an additive model perturbation (dual_load trajectory).
    /// Throws SolverError carrying the time step when Newton stalls.
    Trajectory solve_state(const Vector& theta, const Trajectory* perturbation = nullptr) const;

    /// Same, with an explicit policy (used for self-convergence comparisons).
    Trajectory solve_state(const Vector& theta, const Trajectory* perturbation, StatePolicy policy) const;

    /// g(t_n, u^n, theta) for n = 1..N; node 0 is left at zero.
    Trajectory observe(const Vector& theta, const Trajectory& state) const;

    /// Linearized state v = S'(theta) xi about the supplied state u = S(theta).
    Trajectory solve_sensitivity(const Vector& theta, const Trajectory& state, const Vector& xi) const;

    /// Backward sweep p with p^N = 0 driven by g_u'* z; the transpose of solve_sensitivity.
    Trajectory solve_adjoint(const Vector& theta, const Trajectory& state, const Trajectory& z) const;

    Trajectory apply_F(const Vector& theta) const;
    Trajectory apply_Fprime(const Vector& theta, const Trajectory& state, const Vector& xi) const;
    Vector apply_Fprime_adj(const Vector& theta, const Trajectory& state, const Trajectory& z) const;

    /// Slab j of F: the observation restricted to the slab (zero elsewhere).
    Trajectory apply_Fj(const Vector& theta, const Trajectory& state, int slab) const;
    Trajectory apply_Fj_prime(const Vector& theta, const Trajectory& state, const Vector& xi, int slab) const;
    Vector apply_Fj_adj(const Vector& theta, const Trajectory& state, const Trajectory& z_slab, int slab) const;

    double parameter_inner(const Vector& a, const Vector& b) const;
    double parameter_norm(const Vector& a) const;
    double observation_norm(const Trajectory& z) const;

private:
    // Solves (Id - tau f_u'(t,u,theta)) x = rhs, or its transpose, by PCG
    // preconditioned with (Id + tau A)^{-1}.
    Vector implicit_solve(double t, ConstVectorRef u, const Vector& theta, const Vector& rhs, JacobianMode mode,
                          int step) const;
    void check_theta(const Vector& theta) const;
    void check_state(const Trajectory& state) const;

    ProblemPtr problem_;
    TimeGrid grid_;
    KaczmarzPartition partition_;
    ReducedOptions options_;
};

}  // namespace tdinv
