#pragma once

// Model u' = f(t,u,theta), u(0) = u0(theta), observed through y = g(t,u,theta).
//
// All spaces are discretized on the interior nodes of the triple and paired
// with the dx-weighted Euclidean product (V* through the H pairing, X and Z as
// L2 spaces). With that convention the adjoint-mode hooks are plain
// transposes of the forward-mode ones.
//
// The implicit state solver in the reduced formulation needs
// Id - tau * f_u' to be self-adjoint and positive definite in the H pairing,
// which holds for monotone semilinear reaction-diffusion models such as the
// benchmark below.

#include <memory>

#include "tdinv/spaces.hpp"
#include "tdinv/types.hpp"

namespace tdinv {

enum class Jacobian { f_u, f_theta, g_u, g_theta, u0 };
enum class JacobianMode { forward, adjoint };

class Problem {
public:
    explicit Problem(TriplePtr triple);
    virtual ~Problem() = default;

    const GelfandTriple& triple() const noexcept { return *triple_; }
    const TriplePtr& triple_ptr() const noexcept { return triple_; }
    Index state_dim() const noexcept { return triple_->size(); }

    virtual Index parameter_dim() const = 0;
    virtual Index observation_dim() const = 0;

    virtual void f(double t, ConstVectorRef u, ConstVectorRef theta, VectorRef out) const = 0;
    virtual void g(double t, ConstVectorRef u, ConstVectorRef theta, VectorRef out) const = 0;
    virtual void u0(ConstVectorRef theta, VectorRef out) const = 0;

    /// Directional derivative (forward) or its Banach adjoint (adjoint) at (t, u, theta).
    /// `out` must already have the size of the image space.
    virtual void apply_jac(Jacobian which, JacobianMode mode, double t, ConstVectorRef u, ConstVectorRef theta,
                           ConstVectorRef arg, VectorRef out) const = 0;

    // Allocating, dimension-checked wrappers.
    Vector eval_f(double t, ConstVectorRef u, ConstVectorRef theta) const;
    Vector eval_g(double t, ConstVectorRef u, ConstVectorRef theta) const;
    Vector eval_u0(ConstVectorRef theta) const;
    Vector jac(Jacobian which, JacobianMode mode, double t, ConstVectorRef u, ConstVectorRef theta,
               ConstVectorRef arg) const;

    /// Sizes of the domain and image of a Jacobian block in the given mode.
    std::pair<Index, Index> jac_shape(Jacobian which, JacobianMode mode) const;

protected:
    void check_point(ConstVectorRef u, ConstVectorRef theta) const;

private:
    TriplePtr triple_;
};

using ProblemPtr = std::shared_ptr<const Problem>;

/// Phi(s) = gain * sign(s) * s^2.
double phi(double s, double gain = 10.0) noexcept;
/// Phi'(s) = 2 * gain * |s|.
double phi_prime(double s, double gain = 10.0) noexcept;

/// u' = Δu - Phi(u) + chi_omega(theta), u(0) = 0, full observation y = u.
class SemilinearDiffusion final : public Problem {
public:
    /// `support` selects the source region omega by a 0/1 nodal mask; empty means omega = Omega.
    SemilinearDiffusion(TriplePtr triple, double gain = 10.0, Vector support = {});

    double gain() const noexcept { return gain_; }
    const Vector& support() const noexcept { return support_; }

    Index parameter_dim() const override { return state_dim(); }
    Index observation_dim() const override { return state_dim(); }

    void f(double t, ConstVectorRef u, ConstVectorRef theta, VectorRef out) const override;
    void g(double t, ConstVectorRef u, ConstVectorRef theta, VectorRef out) const override;
    void u0(ConstVectorRef theta, VectorRef out) const override;
    void apply_jac(Jacobian which, JacobianMode mode, double t, ConstVectorRef u, ConstVectorRef theta,
                   ConstVectorRef arg, VectorRef out) const override;

private:
    double gain_;
    Vector support_;
};

}  // namespace tdinv
