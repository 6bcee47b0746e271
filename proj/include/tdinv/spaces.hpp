#pragma once

// Discrete Gelfand triple V ⊆ H ⊆ V* on (0,1) with homogeneous Dirichlet
// conditions, and the time-discrete function spaces built on top of it.
//
// Nodal convention: every element (including dual ones) is a vector of
// interior nodal values. Dual elements act through the H pairing
// <w, v> = dx * w^T v, so the Riesz map D is multiplication by the stiffness
// matrix A and I is a solve with A.
//
// Time convention: trajectories hold one column per grid node 0..N. State
// trajectories use all columns. Loads and observations are integrated with the
// right-endpoint rule, so only columns 1..N carry data and column 0 is kept at
// zero.

#include <memory>

#include "tdinv/grids.hpp"
#include "tdinv/types.hpp"

namespace tdinv {

enum class Pairing { H, V, Vstar };
enum class RieszMap { D, I };

enum class SpaceTag {
    state,        ///< element of the solution space U, all nodes used
    dual_load,    ///< element of W = L2(0,T;V*), nodes 1..N
    observation,  ///< element of Y = L2(0,T;H), nodes 1..N
    pointwise_h,  ///< adjoint states and other H-valued paths; L2(0,T;H) right-endpoint norm
};

class GelfandTriple {
public:
    /// Assembles A = tridiag(-1, 2, -1) / dx^2 and its eigendecomposition.
    explicit GelfandTriple(int interior_points);

    Index size() const noexcept { return n_; }
    double dx() const noexcept { return dx_; }
    Vector nodes() const;

    /// Ascending eigenvalues and the matching orthonormal (Euclidean) eigenvectors.
    const Vector& eigenvalues() const noexcept { return lambda_; }
    const Matrix& eigenvectors() const noexcept { return q_; }
    Matrix dense_operator() const;

    void apply_A(ConstVectorRef v, VectorRef out) const;
    Vector apply_A(ConstVectorRef v) const;
    Vector solve_A(ConstVectorRef b) const;
    /// (Id + step*A)^{-1} b through the eigenbasis.
    Vector solve_shifted(double step, ConstVectorRef b) const;

    double inner(Pairing pairing, ConstVectorRef a, ConstVectorRef b) const;
    double norm(Pairing pairing, ConstVectorRef a) const;
    Vector riesz(RieszMap direction, ConstVectorRef v) const;

    // Whole-trajectory versions, one column per time node.
    Matrix apply_A_columns(const Matrix& X) const;
    Matrix solve_A_columns(const Matrix& X) const;
    Matrix to_modal(const Matrix& X) const;
    Matrix from_modal(const Matrix& X) const;

private:
    Index n_;
    double dx_;
    double inv_dx2_;
    Vector lambda_;
    Matrix q_;
};

using TriplePtr = std::shared_ptr<const GelfandTriple>;

/// Throws ValidationError for interior_points < 1.
TriplePtr build_triple(int interior_points);

struct Trajectory {
    TimeGrid grid;
    SpaceTag tag = SpaceTag::state;
    Matrix values;  ///< space_size x node_count

    static Trajectory zeros(const TimeGrid& grid, Index space_size, SpaceTag tag);

    Index space_size() const noexcept { return values.rows(); }
    int node_count() const noexcept { return static_cast<int>(values.cols()); }
    auto node(int n) { return values.col(n); }
    auto node(int n) const { return values.col(n); }

    Trajectory& operator+=(const Trajectory& other);
    Trajectory& operator-=(const Trajectory& other);
    Trajectory& operator*=(double s);
};

Trajectory operator+(Trajectory a, const Trajectory& b);
Trajectory operator-(Trajectory a, const Trajectory& b);
Trajectory operator*(double s, Trajectory a);

/// Throws ValidationError unless both trajectories share grid and space size.
void check_compatible(const Trajectory& a, const Trajectory& b);

/// v' + D v = source, v(0) = v0, by implicit Euler:
///   (Id + tau A) v^n = v^{n-1} + tau * source^n.
Trajectory propagate_D(const GelfandTriple& triple, const TimeGrid& grid, ConstVectorRef v0,
                       const Trajectory& source);

/// -p' + D* p = source, p(T) = pT, as the exact transpose of propagate_D's step:
///   (Id + tau A) p^{n-1} = p^n + tau * source^n,  n = N..1.
Trajectory propagate_Dstar_backward(const GelfandTriple& triple, const TimeGrid& grid, ConstVectorRef pT,
                                    const Trajectory& source);

/// Implicit-Euler residual operator L u = ((u^n - u^{n-1})/tau + A u^n for n >= 1, u^0).
/// Returned as a dual_load trajectory plus the initial value. propagate_D inverts it.
Trajectory parabolic_part(const GelfandTriple& triple, const Trajectory& u);

/// (u, v)_U = sum_n tau (Lu^n, Lv^n)_{V*} + (u^0, v^0)_H.
double inner_U(const GelfandTriple& triple, const Trajectory& u, const Trajectory& v);

/// Time-integrated inner product selected by the tag of `a`:
/// state -> U, dual_load -> L2(0,T;V*), observation/pointwise_h -> L2(0,T;H).
double inner(const GelfandTriple& triple, const Trajectory& a, const Trajectory& b);
double norm(const GelfandTriple& triple, const Trajectory& a);

/// L2(0,T;V) norm with right-endpoint quadrature.
double norm_L2V(const GelfandTriple& triple, const Trajectory& a);

/// Zero every quadrature slot outside slab j (the extension-by-zero of a restriction).
Trajectory restrict_to_slab(const Trajectory& a, const KaczmarzPartition& partition, int slab);

}  // namespace tdinv
