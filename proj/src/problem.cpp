#include "tdinv/problem.hpp"

#include <cmath>

#include "tdinv/errors.hpp"

namespace tdinv {

Problem::Problem(TriplePtr triple) : triple_(std::move(triple)) {
    if (!triple_) throw ValidationError("problem needs a Gelfand triple");
}

void Problem::check_point(ConstVectorRef u, ConstVectorRef theta) const {
    if (u.size() != state_dim()) throw ValidationError("state has wrong dimension");
    if (theta.size() != parameter_dim()) throw ValidationError("parameter has wrong dimension");
}

Vector Problem::eval_f(double t, ConstVectorRef u, ConstVectorRef theta) const {
    check_point(u, theta);
    Vector out(state_dim());
    f(t, u, theta, out);
    return out;
}

Vector Problem::eval_g(double t, ConstVectorRef u, ConstVectorRef theta) const {
    check_point(u, theta);
    Vector out(observation_dim());
    g(t, u, theta, out);
    return out;
}

Vector Problem::eval_u0(ConstVectorRef theta) const {
    if (theta.size() != parameter_dim()) throw ValidationError("parameter has wrong dimension");
    Vector out(state_dim());
    u0(theta, out);
    return out;
}

std::pair<Index, Index> Problem::jac_shape(Jacobian which, JacobianMode mode) const {
    Index from = 0;
    Index to = 0;
    switch (which) {
        case Jacobian::f_u: from = state_dim(); to = state_dim(); break;
        case Jacobian::f_theta: from = parameter_dim(); to = state_dim(); break;
        case Jacobian::g_u: from = state_dim(); to = observation_dim(); break;
        case Jacobian::g_theta: from = parameter_dim(); to = observation_dim(); break;
        case Jacobian::u0: from = parameter_dim(); to = state_dim(); break;
        default: throw ValidationError("unknown Jacobian block");
    }
    if (mode == JacobianMode::adjoint) std::swap(from, to);
    return {from, to};
}

Vector Problem::jac(Jacobian which, JacobianMode mode, double t, ConstVectorRef u, ConstVectorRef theta,
                    ConstVectorRef arg) const {
    check_point(u, theta);
    auto [from, to] = jac_shape(which, mode);
    if (arg.size() != from) throw ValidationError("Jacobian argument has wrong dimension");
    Vector out(to);
    apply_jac(which, mode, t, u, theta, arg, out);
    return out;
}

double phi(double s, double gain) noexcept { return gain * (s < 0 ? -s * s : s * s); }
double phi_prime(double s, double gain) noexcept { return 2.0 * gain * std::abs(s); }

SemilinearDiffusion::SemilinearDiffusion(TriplePtr triple, double gain, Vector support)
    : Problem(std::move(triple)), gain_(gain), support_(std::move(support)) {
    if (support_.size() == 0) support_ = Vector::Ones(state_dim());
    if (support_.size() != state_dim()) throw ValidationError("source support mask has wrong length");
}

void SemilinearDiffusion::f(double, ConstVectorRef u, ConstVectorRef theta, VectorRef out) const {
    triple().apply_A(u, out);
    for (Index i = 0; i < out.size(); ++i) out(i) = -out(i) - phi(u(i), gain_) + support_(i) * theta(i);
}

void SemilinearDiffusion::g(double, ConstVectorRef u, ConstVectorRef, VectorRef out) const { out = u; }

void SemilinearDiffusion::u0(ConstVectorRef, VectorRef out) const { out.setZero(); }

void SemilinearDiffusion::apply_jac(Jacobian which, JacobianMode, double, ConstVectorRef u, ConstVectorRef,
                                    ConstVectorRef arg, VectorRef out) const {
    // Every block is symmetric in the dx-weighted pairing, so both modes coincide.
    switch (which) {
        case Jacobian::f_u:
            triple().apply_A(arg, out);
            for (Index i = 0; i < out.size(); ++i) out(i) = -out(i) - phi_prime(u(i), gain_) * arg(i);
            return;
        case Jacobian::f_theta:
            out = support_.cwiseProduct(arg);
            return;
        case Jacobian::g_u:
            out = arg;
            return;
        case Jacobian::g_theta:
        case Jacobian::u0:
            out.setZero();
            return;
    }
    throw ValidationError("unknown Jacobian block");
}

}  // namespace tdinv
