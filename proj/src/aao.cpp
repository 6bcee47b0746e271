#include "tdinv/aao.hpp"

#include <cmath>

#include "tdinv/errors.hpp"

namespace tdinv {

AaoPoint& AaoPoint::operator+=(const AaoPoint& o) {
    u += o.u;
    if (theta.size() != o.theta.size()) throw ValidationError("parameter dimensions differ");
    theta += o.theta;
    return *this;
}

AaoPoint& AaoPoint::operator-=(const AaoPoint& o) {
    u -= o.u;
    if (theta.size() != o.theta.size()) throw ValidationError("parameter dimensions differ");
    theta -= o.theta;
    return *this;
}

AaoPoint& AaoPoint::operator*=(double s) {
    u *= s;
    theta *= s;
    return *this;
}

AaoPoint operator+(AaoPoint a, const AaoPoint& b) { return a += b; }
AaoPoint operator-(AaoPoint a, const AaoPoint& b) { return a -= b; }
AaoPoint operator*(double s, AaoPoint a) { return a *= s; }

ResidualTriple& ResidualTriple::operator+=(const ResidualTriple& o) {
    w += o.w;
    if (h.size() != o.h.size()) throw ValidationError("initial-value channels differ");
    h += o.h;
    z += o.z;
    return *this;
}

ResidualTriple& ResidualTriple::operator-=(const ResidualTriple& o) {
    w -= o.w;
    if (h.size() != o.h.size()) throw ValidationError("initial-value channels differ");
    h -= o.h;
    z -= o.z;
    return *this;
}

ResidualTriple& ResidualTriple::operator*=(double s) {
    w *= s;
    h *= s;
    z *= s;
    return *this;
}

ResidualTriple operator+(ResidualTriple a, const ResidualTriple& b) { return a += b; }
ResidualTriple operator-(ResidualTriple a, const ResidualTriple& b) { return a -= b; }
ResidualTriple operator*(double s, ResidualTriple a) { return a *= s; }

// ---------------------------------------------------------------------------

AaoOperator::AaoOperator(ProblemPtr problem, TimeGrid grid, ResidualTriple data,
                         std::optional<KaczmarzPartition> partition)
    : problem_(std::move(problem)), grid_(grid), data_(std::move(data)) {
    if (!problem_) throw ValidationError("all-at-once operator needs a problem");
    partition_ = partition ? *partition : make_partition(grid_, 1);
    if (!(partition_.grid() == grid_)) throw ValidationError("partition built on a different grid");
    check_residual(data_);
    data_.w.tag = SpaceTag::dual_load;
    data_.z.tag = SpaceTag::observation;
}

ResidualTriple AaoOperator::make_data(const Problem& problem, const Trajectory& y) {
    if (y.space_size() != problem.observation_dim()) throw ValidationError("data has wrong observation size");
    Trajectory yd = y;
    yd.tag = SpaceTag::observation;
    yd.values.col(0).setZero();
    return ResidualTriple{Trajectory::zeros(y.grid, problem.state_dim(), SpaceTag::dual_load),
                          Vector::Zero(problem.state_dim()), yd};
}

void AaoOperator::check_point(const AaoPoint& x) const {
    if (!(x.u.grid == grid_) || x.u.space_size() != problem_->state_dim())
        throw ValidationError("state trajectory does not match the operator grid");
    if (x.theta.size() != problem_->parameter_dim()) throw ValidationError("parameter has wrong dimension");
}

void AaoOperator::check_residual(const ResidualTriple& r) const {
    if (!(r.w.grid == grid_) || r.w.space_size() != problem_->state_dim())
        throw ValidationError("model channel does not match the operator grid");
    if (r.h.size() != problem_->state_dim()) throw ValidationError("initial-value channel has wrong size");
    if (!(r.z.grid == grid_) || r.z.space_size() != problem_->observation_dim())
        throw ValidationError("observation channel does not match the operator grid");
}

AaoPoint AaoOperator::zero_point() const {
    return AaoPoint{Trajectory::zeros(grid_, problem_->state_dim(), SpaceTag::state),
                    Vector::Zero(problem_->parameter_dim())};
}

ResidualTriple AaoOperator::zero_residual() const {
    return ResidualTriple{Trajectory::zeros(grid_, problem_->state_dim(), SpaceTag::dual_load),
                          Vector::Zero(problem_->state_dim()),
                          Trajectory::zeros(grid_, problem_->observation_dim(), SpaceTag::observation)};
}

ResidualTriple AaoOperator::apply_bF(const AaoPoint& x) const {
    check_point(x);
    const Problem& pb = *problem_;
    const double tau = grid_.step();
    const int steps = grid_.steps();
    ResidualTriple r = zero_residual();
    const Matrix& u = x.u.values;
#pragma omp parallel for schedule(static)
    for (int n = 1; n <= steps; ++n) {
        const double t = grid_.node(n);
        auto wn = r.w.values.col(n);
        pb.f(t, u.col(n), x.theta, wn);
        wn = (u.col(n) - u.col(n - 1)) / tau - wn;
        pb.g(t, u.col(n), x.theta, r.z.values.col(n));
    }
    pb.u0(x.theta, r.h);
    r.h = u.col(0) - r.h;
    r -= data_;
    r.w.values.col(0).setZero();
    r.z.values.col(0).setZero();
    return r;
}

ResidualTriple AaoOperator::apply_bFprime(const AaoPoint& x, const AaoPoint& d) const {
    check_point(x);
    check_point(d);
    const Problem& pb = *problem_;
    const double tau = grid_.step();
    const int steps = grid_.steps();
    ResidualTriple r = zero_residual();
    const Matrix& u = x.u.values;
    const Matrix& du = d.u.values;
#pragma omp parallel for schedule(static)
    for (int n = 1; n <= steps; ++n) {
        const double t = grid_.node(n);
        Vector a(pb.state_dim()), b(pb.state_dim()), c(pb.observation_dim());
        pb.apply_jac(Jacobian::f_u, JacobianMode::forward, t, u.col(n), x.theta, du.col(n), a);
        pb.apply_jac(Jacobian::f_theta, JacobianMode::forward, t, u.col(n), x.theta, d.theta, b);
        r.w.values.col(n) = (du.col(n) - du.col(n - 1)) / tau - a - b;
        pb.apply_jac(Jacobian::g_u, JacobianMode::forward, t, u.col(n), x.theta, du.col(n), r.z.values.col(n));
        pb.apply_jac(Jacobian::g_theta, JacobianMode::forward, t, u.col(n), x.theta, d.theta, c);
        r.z.values.col(n) += c;
    }
    pb.apply_jac(Jacobian::u0, JacobianMode::forward, 0.0, u.col(0), x.theta, d.theta, r.h);
    r.h = du.col(0) - r.h;
    return r;
}

// Adjoint with respect to the U x X and W x H x Y products. With Iw = A^{-1} w:
//   backward: p^N = 0, (Id + tau A) p^{n-1} = p^n + tau r_n,
//             r_n = -w_n - f_u'^T Iw_n + g_u'^T z_n;
//   forward:  du = L^{-1}(w_n + A p^{n-1}, p^0 + h);
//   dtheta = sum_n tau (g_theta'^T z_n - f_theta'^T Iw_n) - u0'^T h.
AaoPoint AaoOperator::apply_bFprime_adj(const AaoPoint& x, const ResidualTriple& r) const {
    check_point(x);
    check_residual(r);
    const Problem& pb = *problem_;
    const GelfandTriple& tr = triple();
    const double tau = grid_.step();
    const int steps = grid_.steps();
    const Index ns = pb.state_dim();
    const Index np = pb.parameter_dim();
    const Matrix& u = x.u.values;

    const Matrix iw = tr.solve_A_columns(r.w.values);
    Trajectory src = Trajectory::zeros(grid_, ns, SpaceTag::pointwise_h);
    Matrix theta_terms = Matrix::Zero(np, steps + 1);
#pragma omp parallel for schedule(static)
    for (int n = 1; n <= steps; ++n) {
        const double t = grid_.node(n);
        Vector a(ns), b(ns), c(np), e(np);
        pb.apply_jac(Jacobian::f_u, JacobianMode::adjoint, t, u.col(n), x.theta, iw.col(n), a);
        pb.apply_jac(Jacobian::g_u, JacobianMode::adjoint, t, u.col(n), x.theta, r.z.values.col(n), b);
        src.values.col(n) = b - a - r.w.values.col(n);
        pb.apply_jac(Jacobian::f_theta, JacobianMode::adjoint, t, u.col(n), x.theta, iw.col(n), c);
        pb.apply_jac(Jacobian::g_theta, JacobianMode::adjoint, t, u.col(n), x.theta, r.z.values.col(n), e);
        theta_terms.col(n) = e - c;
    }
    const Trajectory p = propagate_Dstar_backward(tr, grid_, Vector::Zero(ns), src);

    // Source for the forward sweep sits in slot n and uses p^{n-1}.
    Trajectory fwd = Trajectory::zeros(grid_, ns, SpaceTag::dual_load);
    fwd.values.rightCols(steps) = tr.apply_A_columns(p.values.leftCols(steps));
    fwd.values.rightCols(steps) += r.w.values.rightCols(steps);
    const Vector init = p.values.col(0) + r.h;

    AaoPoint out{propagate_D(tr, grid_, init, fwd), Vector(np)};
    pb.apply_jac(Jacobian::u0, JacobianMode::adjoint, 0.0, u.col(0), x.theta, r.h, out.theta);
    Vector acc = Vector::Zero(np);
    for (int n = 1; n <= steps; ++n) acc += theta_terms.col(n);
    out.theta = tau * acc - out.theta;
    return out;
}

ResidualTriple AaoOperator::restrict(const ResidualTriple& r, int slab) const {
    check_residual(r);
    ResidualTriple out{restrict_to_slab(r.w, partition_, slab), r.h, restrict_to_slab(r.z, partition_, slab)};
    if (slab != 0) out.h.setZero();
    return out;
}

ResidualTriple AaoOperator::apply_bFj(const AaoPoint& x, int slab) const { return restrict(apply_bF(x), slab); }

ResidualTriple AaoOperator::apply_bFj_prime(const AaoPoint& x, const AaoPoint& d, int slab) const {
    return restrict(apply_bFprime(x, d), slab);
}

AaoPoint AaoOperator::apply_bFj_adj(const AaoPoint& x, const ResidualTriple& r_slab, int slab) const {
    return apply_bFprime_adj(x, restrict(r_slab, slab));
}

double AaoOperator::domain_inner(const AaoPoint& a, const AaoPoint& b) const {
    check_point(a);
    check_point(b);
    return inner_U(triple(), a.u, b.u) + triple().dx() * a.theta.dot(b.theta);
}

double AaoOperator::domain_norm(const AaoPoint& a) const { return std::sqrt(std::max(0.0, domain_inner(a, a))); }

double AaoOperator::codomain_inner(const ResidualTriple& a, const ResidualTriple& b) const {
    check_residual(a);
    check_residual(b);
    const GelfandTriple& tr = triple();
    Trajectory aw = a.w, az = a.z;
    aw.tag = SpaceTag::dual_load;
    az.tag = SpaceTag::observation;
    return inner(tr, aw, b.w) + tr.dx() * a.h.dot(b.h) + inner(tr, az, b.z);
}

double AaoOperator::codomain_norm(const ResidualTriple& a) const { return residual_norms(a).total; }

ResidualNorms AaoOperator::residual_norms(const ResidualTriple& r) const {
    check_residual(r);
    const GelfandTriple& tr = triple();
    Trajectory w = r.w, z = r.z;
    w.tag = SpaceTag::dual_load;
    z.tag = SpaceTag::observation;
    ResidualNorms out;
    out.w = norm(tr, w);
    out.h = std::sqrt(tr.dx() * r.h.squaredNorm());
    out.y = norm(tr, z);
    out.total = std::sqrt(out.w * out.w + out.h * out.h + out.y * out.y);
    return out;
}

}  // namespace tdinv
