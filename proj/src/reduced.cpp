#include "tdinv/reduced.hpp"

#include <cmath>
#include <string>

#include "tdinv/errors.hpp"
#include "tdinv/krylov.hpp"

namespace tdinv {

ReducedOperator::ReducedOperator(ProblemPtr problem, TimeGrid grid, std::optional<KaczmarzPartition> partition,
                                 ReducedOptions options)
    : problem_(std::move(problem)), grid_(grid), options_(options) {
    if (!problem_) throw ValidationError("reduced operator needs a problem");
    partition_ = partition ? *partition : make_partition(grid_, 1);
    if (!(partition_.grid() == grid_)) throw ValidationError("partition built on a different grid");
}

void ReducedOperator::check_theta(const Vector& theta) const {
    if (theta.size() != problem_->parameter_dim()) throw ValidationError("parameter has wrong dimension");
}

void ReducedOperator::check_state(const Trajectory& state) const {
    if (!(state.grid == grid_) || state.space_size() != problem_->state_dim())
        throw ValidationError("state trajectory does not match the operator grid");
}

double ReducedOperator::parameter_inner(const Vector& a, const Vector& b) const { return triple().dx() * a.dot(b); }
double ReducedOperator::parameter_norm(const Vector& a) const { return std::sqrt(parameter_inner(a, a)); }
double ReducedOperator::observation_norm(const Trajectory& z) const { return norm(triple(), z); }

Vector ReducedOperator::implicit_solve(double t, ConstVectorRef u, const Vector& theta, const Vector& rhs,
                                       JacobianMode mode, int step) const {
    const double tau = grid_.step();
    const Problem& pb = *problem_;
    Vector scratch(pb.state_dim());
    auto apply = [&](const Vector& x) -> Vector {
        pb.apply_jac(Jacobian::f_u, mode, t, u, theta, x, scratch);
        return x - tau * scratch;
    };
    auto dot = [](const Vector& a, const Vector& b) { return a.dot(b); };
    auto precond = [&](const Vector& r) -> Vector { return triple().solve_shifted(tau, r); };
    Vector x = precond(rhs);
    const CgResult res = conjugate_gradient(apply, dot, rhs, x, {options_.linear_tolerance, options_.linear_max_iterations},
                                            precond);
    // Stagnation just above the requested level is rounding, not failure.
    if (!res.converged && !(res.residual < 1e3 * options_.linear_tolerance)) {
        throw SolverError("implicit linear solve did not converge at step " + std::to_string(step), step,
                          res.residual);
    }
    return x;
}

Trajectory ReducedOperator::solve_state(const Vector& theta, const Trajectory* perturbation) const {
    return solve_state(theta, perturbation, options_.policy);
}

Trajectory ReducedOperator::solve_state(const Vector& theta, const Trajectory* perturbation,
                                        StatePolicy policy) const {
    check_theta(theta);
    const Problem& pb = *problem_;
    const Index n = pb.state_dim();
    if (perturbation) {
        if (!(perturbation->grid == grid_) || perturbation->space_size() != n)
            throw ValidationError("model perturbation does not match the operator grid");
    }
    const double tau = grid_.step();
    Trajectory u = Trajectory::zeros(grid_, n, SpaceTag::state);
    pb.u0(theta, u.node(0));
    Vector fx(n), ax(n), rhs(n), residual(n), dfx(n);
    for (int step = 1; step <= grid_.steps(); ++step) {
        const double t = grid_.node(step);
        auto prev = u.values.col(step - 1);
        // IMEX predictor: (Id + tau A) x = u^{n-1} + tau (f(u^{n-1}) + A u^{n-1} + w^n).
        pb.f(t, prev, theta, fx);
        triple().apply_A(prev, ax);
        rhs = prev + tau * (fx + ax);
        if (perturbation) rhs += tau * perturbation->values.col(step);
        Vector x = triple().solve_shifted(tau, rhs);
        if (policy == StatePolicy::newton) {
            bool converged = false;
            double res_norm = 0.0;
            for (int it = 0; it <= options_.newton_max_iterations; ++it) {
                pb.f(t, x, theta, fx);
                residual = x - prev - tau * fx;
                if (perturbation) residual -= tau * perturbation->values.col(step);
                res_norm = residual.lpNorm<Eigen::Infinity>();
                if (res_norm <= options_.newton_tolerance * (1.0 + x.lpNorm<Eigen::Infinity>())) {
                    converged = true;
                    break;
                }
                if (it == options_.newton_max_iterations) break;
                x -= implicit_solve(t, x, theta, residual, JacobianMode::forward, step);
            }
            if (!converged) {
                throw SolverError("Newton iteration did not converge at time step " + std::to_string(step), step,
                                  res_norm);
            }
        }
        u.node(step) = x;
    }
    return u;
}

Trajectory ReducedOperator::observe(const Vector& theta, const Trajectory& state) const {
    check_theta(theta);
    check_state(state);
    const Problem& pb = *problem_;
    Trajectory y = Trajectory::zeros(grid_, pb.observation_dim(), SpaceTag::observation);
    for (int step = 1; step <= grid_.steps(); ++step) pb.g(grid_.node(step), state.node(step), theta, y.node(step));
    return y;
}

Trajectory ReducedOperator::solve_sensitivity(const Vector& theta, const Trajectory& state, const Vector& xi) const {
    check_theta(theta);
    check_theta(xi);
    check_state(state);
    const Problem& pb = *problem_;
    const double tau = grid_.step();
    Trajectory v = Trajectory::zeros(grid_, pb.state_dim(), SpaceTag::state);
    pb.apply_jac(Jacobian::u0, JacobianMode::forward, 0.0, state.node(0), theta, xi, v.node(0));
    Vector src(pb.state_dim());
    for (int step = 1; step <= grid_.steps(); ++step) {
        const double t = grid_.node(step);
        pb.apply_jac(Jacobian::f_theta, JacobianMode::forward, t, state.node(step), theta, xi, src);
        const Vector rhs = v.node(step - 1) + tau * src;
        v.node(step) = implicit_solve(t, state.node(step), theta, rhs, JacobianMode::forward, step);
    }
    return v;
}

Trajectory ReducedOperator::solve_adjoint(const Vector& theta, const Trajectory& state, const Trajectory& z) const {
    check_theta(theta);
    check_state(state);
    const Problem& pb = *problem_;
    if (!(z.grid == grid_) || z.space_size() != pb.observation_dim())
        throw ValidationError("observation trajectory does not match the operator grid");
    const double tau = grid_.step();
    Trajectory p = Trajectory::zeros(grid_, pb.state_dim(), SpaceTag::pointwise_h);
    Vector src(pb.state_dim());
    for (int step = grid_.steps(); step >= 1; --step) {
        const double t = grid_.node(step);
        pb.apply_jac(Jacobian::g_u, JacobianMode::adjoint, t, state.node(step), theta, z.node(step), src);
        const Vector rhs = p.node(step) + tau * src;
        p.node(step - 1) = implicit_solve(t, state.node(step), theta, rhs, JacobianMode::adjoint, step);
    }
    return p;
}

Trajectory ReducedOperator::apply_F(const Vector& theta) const { return observe(theta, solve_state(theta)); }

Trajectory ReducedOperator::apply_Fprime(const Vector& theta, const Trajectory& state, const Vector& xi) const {
    const Trajectory v = solve_sensitivity(theta, state, xi);
    const Problem& pb = *problem_;
    Trajectory z = Trajectory::zeros(grid_, pb.observation_dim(), SpaceTag::observation);
    Vector tmp(pb.observation_dim());
    for (int step = 1; step <= grid_.steps(); ++step) {
        const double t = grid_.node(step);
        pb.apply_jac(Jacobian::g_u, JacobianMode::forward, t, state.node(step), theta, v.node(step), z.node(step));
        pb.apply_jac(Jacobian::g_theta, JacobianMode::forward, t, state.node(step), theta, xi, tmp);
        z.node(step) += tmp;
    }
    return z;
}

Vector ReducedOperator::apply_Fprime_adj(const Vector& theta, const Trajectory& state, const Trajectory& z) const {
    const Trajectory p = solve_adjoint(theta, state, z);
    const Problem& pb = *problem_;
    const double tau = grid_.step();
    Vector out(pb.parameter_dim());
    pb.apply_jac(Jacobian::u0, JacobianMode::adjoint, 0.0, state.node(0), theta, p.node(0), out);
    Vector acc = Vector::Zero(pb.parameter_dim());
    Vector tmp(pb.parameter_dim());
    for (int step = 1; step <= grid_.steps(); ++step) {
        const double t = grid_.node(step);
        pb.apply_jac(Jacobian::f_theta, JacobianMode::adjoint, t, state.node(step), theta, p.node(step - 1), tmp);
        acc += tmp;
        pb.apply_jac(Jacobian::g_theta, JacobianMode::adjoint, t, state.node(step), theta, z.node(step), tmp);
        acc += tmp;
    }
    return out + tau * acc;
}

Trajectory ReducedOperator::apply_Fj(const Vector& theta, const Trajectory& state, int slab) const {
    return restrict_to_slab(observe(theta, state), partition_, slab);
}

Trajectory ReducedOperator::apply_Fj_prime(const Vector& theta, const Trajectory& state, const Vector& xi,
                                           int slab) const {
    return restrict_to_slab(apply_Fprime(theta, state, xi), partition_, slab);
}

Vector ReducedOperator::apply_Fj_adj(const Vector& theta, const Trajectory& state, const Trajectory& z_slab,
                                     int slab) const {
    return apply_Fprime_adj(theta, state, restrict_to_slab(z_slab, partition_, slab));
}

}  // namespace tdinv
