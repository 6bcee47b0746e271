#include "tdinv/spaces.hpp"

#include <cmath>

#include "tdinv/errors.hpp"
#include "tdinv/kernels.hpp"

namespace tdinv {

namespace {

void check_length(const GelfandTriple& triple, Index got) {
    if (got != triple.size()) throw ValidationError("nodal vector length does not match the triple");
}

}  // namespace

GelfandTriple::GelfandTriple(int interior_points) {
    if (interior_points < 1) throw ValidationError("need at least one interior point");
    n_ = interior_points;
    dx_ = 1.0 / (interior_points + 1);
    inv_dx2_ = 1.0 / (dx_ * dx_);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(dense_operator());
    lambda_ = eig.eigenvalues();
    q_ = eig.eigenvectors();
}

TriplePtr build_triple(int interior_points) { return std::make_shared<const GelfandTriple>(interior_points); }

Vector GelfandTriple::nodes() const {
    Vector x(n_);
    for (Index i = 0; i < n_; ++i) x(i) = (i + 1) * dx_;
    return x;
}

Matrix GelfandTriple::dense_operator() const {
    Matrix a = Matrix::Zero(n_, n_);
    for (Index i = 0; i < n_; ++i) {
        a(i, i) = 2.0 * inv_dx2_;
        if (i > 0) a(i, i - 1) = -inv_dx2_;
        if (i + 1 < n_) a(i, i + 1) = -inv_dx2_;
    }
    return a;
}

void GelfandTriple::apply_A(ConstVectorRef v, VectorRef out) const {
    for (Index i = 0; i < n_; ++i) {
        double s = 2.0 * v(i);
        if (i > 0) s -= v(i - 1);
        if (i + 1 < n_) s -= v(i + 1);
        out(i) = s * inv_dx2_;
    }
}

Vector GelfandTriple::apply_A(ConstVectorRef v) const {
    check_length(*this, v.size());
    Vector out(n_);
    apply_A(v, out);
    return out;
}

Vector GelfandTriple::solve_A(ConstVectorRef b) const {
    check_length(*this, b.size());
    Vector c = q_.transpose() * b;
    c.array() /= lambda_.array();
    return q_ * c;
}

Vector GelfandTriple::solve_shifted(double step, ConstVectorRef b) const {
    Vector c = q_.transpose() * b;
    c.array() /= (1.0 + step * lambda_.array());
    return q_ * c;
}

double GelfandTriple::inner(Pairing pairing, ConstVectorRef a, ConstVectorRef b) const {
    check_length(*this, a.size());
    check_length(*this, b.size());
    switch (pairing) {
        case Pairing::H:
            return dx_ * a.dot(b);
        case Pairing::V:
            return dx_ * a.dot(apply_A(b));
        case Pairing::Vstar: {
            const Vector ca = q_.transpose() * a;
            const Vector cb = q_.transpose() * b;
            return dx_ * (ca.array() * cb.array() / lambda_.array()).sum();
        }
    }
    throw ValidationError("unknown pairing");
}

double GelfandTriple::norm(Pairing pairing, ConstVectorRef a) const { return std::sqrt(inner(pairing, a, a)); }

Vector GelfandTriple::riesz(RieszMap direction, ConstVectorRef v) const {
    return direction == RieszMap::D ? apply_A(v) : solve_A(v);
}

Matrix GelfandTriple::apply_A_columns(const Matrix& X) const {
    Matrix out;
    kernels::apply_stencil(inv_dx2_, X, out);
    return out;
}

Matrix GelfandTriple::solve_A_columns(const Matrix& X) const {
    Matrix modal = to_modal(X);
    Matrix scaled;
    kernels::scale_modes(lambda_.cwiseInverse(), modal, scaled);
    return from_modal(scaled);
}

Matrix GelfandTriple::to_modal(const Matrix& X) const {
    Matrix out;
    kernels::to_modal(q_, X, out);
    return out;
}

Matrix GelfandTriple::from_modal(const Matrix& X) const {
    Matrix out;
    kernels::from_modal(q_, X, out);
    return out;
}

// ---------------------------------------------------------------------------

Trajectory Trajectory::zeros(const TimeGrid& grid, Index space_size, SpaceTag tag) {
    return Trajectory{grid, tag, Matrix::Zero(space_size, grid.node_count())};
}

void check_compatible(const Trajectory& a, const Trajectory& b) {
    if (!(a.grid == b.grid) || a.values.rows() != b.values.rows() || a.values.cols() != b.values.cols())
        throw ValidationError("trajectories live on different grids or spaces");
}

Trajectory& Trajectory::operator+=(const Trajectory& other) {
    check_compatible(*this, other);
    values += other.values;
    return *this;
}

Trajectory& Trajectory::operator-=(const Trajectory& other) {
    check_compatible(*this, other);
    values -= other.values;
    return *this;
}

Trajectory& Trajectory::operator*=(double s) {
    values *= s;
    return *this;
}

Trajectory operator+(Trajectory a, const Trajectory& b) { return a += b; }
Trajectory operator-(Trajectory a, const Trajectory& b) { return a -= b; }
Trajectory operator*(double s, Trajectory a) { return a *= s; }

Trajectory propagate_D(const GelfandTriple& triple, const TimeGrid& grid, ConstVectorRef v0,
                       const Trajectory& source) {
    check_length(triple, v0.size());
    check_length(triple, source.space_size());
    if (!(source.grid == grid)) throw ValidationError("source lives on a different grid");
    const Matrix src_modal = triple.to_modal(source.values);
    const Vector v0_modal = triple.eigenvectors().transpose() * v0;
    Matrix out_modal;
    kernels::modal_forward(triple.eigenvalues(), grid.step(), v0_modal, src_modal, out_modal);
    return Trajectory{grid, SpaceTag::state, triple.from_modal(out_modal)};
}

Trajectory propagate_Dstar_backward(const GelfandTriple& triple, const TimeGrid& grid, ConstVectorRef pT,
                                    const Trajectory& source) {
    check_length(triple, pT.size());
    check_length(triple, source.space_size());
    if (!(source.grid == grid)) throw ValidationError("source lives on a different grid");
    const Matrix src_modal = triple.to_modal(source.values);
    const Vector pT_modal = triple.eigenvectors().transpose() * pT;
    Matrix out_modal;
    kernels::modal_backward(triple.eigenvalues(), grid.step(), pT_modal, src_modal, out_modal);
    return Trajectory{grid, SpaceTag::pointwise_h, triple.from_modal(out_modal)};
}

Trajectory parabolic_part(const GelfandTriple& triple, const Trajectory& u) {
    check_length(triple, u.space_size());
    const double tau = u.grid.step();
    Trajectory out{u.grid, SpaceTag::dual_load, triple.apply_A_columns(u.values)};
    const int steps = u.grid.steps();
    for (int n = steps; n >= 1; --n) out.values.col(n) += (u.values.col(n) - u.values.col(n - 1)) / tau;
    out.values.col(0).setZero();
    return out;
}

namespace {

// sum_{n>=1} tau * dx * a_n^T A^{-1} b_n, evaluated in the eigenbasis.
double inner_W_values(const GelfandTriple& triple, const TimeGrid& grid, const Matrix& a, const Matrix& b) {
    const Matrix ma = triple.to_modal(a.rightCols(grid.steps()));
    const Matrix mb = &a == &b ? ma : triple.to_modal(b.rightCols(grid.steps()));
    const Vector inv_lambda = triple.eigenvalues().cwiseInverse();
    double s = 0.0;
    for (Index c = 0; c < ma.cols(); ++c) s += (ma.col(c).array() * mb.col(c).array() * inv_lambda.array()).sum();
    return grid.step() * triple.dx() * s;
}

double inner_Y_values(const GelfandTriple& triple, const TimeGrid& grid, const Matrix& a, const Matrix& b) {
    const int steps = grid.steps();
    double s = 0.0;
    for (int n = 1; n <= steps; ++n) s += a.col(n).dot(b.col(n));
    return grid.step() * triple.dx() * s;
}

}  // namespace

double inner_U(const GelfandTriple& triple, const Trajectory& u, const Trajectory& v) {
    check_compatible(u, v);
    check_length(triple, u.space_size());
    const Trajectory lu = parabolic_part(triple, u);
    if (&u == &v) {
        return inner_W_values(triple, u.grid, lu.values, lu.values) +
               triple.dx() * u.values.col(0).squaredNorm();
    }
    const Trajectory lv = parabolic_part(triple, v);
    return inner_W_values(triple, u.grid, lu.values, lv.values) +
           triple.dx() * u.values.col(0).dot(v.values.col(0));
}

double inner(const GelfandTriple& triple, const Trajectory& a, const Trajectory& b) {
    check_compatible(a, b);
    check_length(triple, a.space_size());
    switch (a.tag) {
        case SpaceTag::state:
            return inner_U(triple, a, b);
        case SpaceTag::dual_load:
            return inner_W_values(triple, a.grid, a.values, &a == &b ? a.values : b.values);
        case SpaceTag::observation:
        case SpaceTag::pointwise_h:
            return inner_Y_values(triple, a.grid, a.values, b.values);
    }
    throw ValidationError("unknown space tag");
}

double norm(const GelfandTriple& triple, const Trajectory& a) { return std::sqrt(std::max(0.0, inner(triple, a, a))); }

double norm_L2V(const GelfandTriple& triple, const Trajectory& a) {
    check_length(triple, a.space_size());
    const Matrix av = triple.apply_A_columns(a.values);
    double s = 0.0;
    for (int n = 1; n <= a.grid.steps(); ++n) s += a.values.col(n).dot(av.col(n));
    return std::sqrt(std::max(0.0, a.grid.step() * triple.dx() * s));
}

Trajectory restrict_to_slab(const Trajectory& a, const KaczmarzPartition& partition, int slab) {
    if (!(a.grid == partition.grid())) throw ValidationError("partition built on a different grid");
    auto [first, last] = partition.slot_range(slab);
    Trajectory out = a;
    for (int n = 0; n < a.node_count(); ++n)
        if (n < first || n > last) out.values.col(n).setZero();
    return out;
}

}  // namespace tdinv
