#pragma once

// All-at-once formulation: state and parameter are unknowns together and the
// model equation becomes one more residual channel,
//     bF(u, theta) = ( u' - f(., u, theta) - w_data,
//                      u(0) - u0(theta)   - h_data,
//                      g(., u, theta)     - y_data ).
// Time derivative is the backward difference (u^n - u^{n-1}) / tau, all
// time-dependent channels live on slots 1..N.
//
// Domain U x X with (u, v)_U = (Lu, Lv)_{W x H}; codomain W x H x Y.

#include <optional>

#include "tdinv/grids.hpp"
#include "tdinv/problem.hpp"
#include "tdinv/spaces.hpp"

namespace tdinv {

struct AaoPoint {
    Trajectory u;  ///< state trajectory
    Vector theta;

    AaoPoint& operator+=(const AaoPoint& o);
    AaoPoint& operator-=(const AaoPoint& o);
    AaoPoint& operator*=(double s);
};

AaoPoint operator+(AaoPoint a, const AaoPoint& b);
AaoPoint operator-(AaoPoint a, const AaoPoint& b);
AaoPoint operator*(double s, AaoPoint a);

struct ResidualTriple {
    Trajectory w;  ///< model channel, dual_load
    Vector h;      ///< initial-value channel
    Trajectory z;  ///< observation channel

    ResidualTriple& operator+=(const ResidualTriple& o);
    ResidualTriple& operator-=(const ResidualTriple& o);
    ResidualTriple& operator*=(double s);
};

ResidualTriple operator+(ResidualTriple a, const ResidualTriple& b);
ResidualTriple operator-(ResidualTriple a, const ResidualTriple& b);
ResidualTriple operator*(double s, ResidualTriple a);

struct ResidualNorms {
    double total = 0.0;
    double w = 0.0;
    double h = 0.0;
    double y = 0.0;
};

class AaoOperator {
public:
    /// `data` supplies (w_data, h_data, y_data). Use make_data for the usual (0, 0, y).
    AaoOperator(ProblemPtr problem, TimeGrid grid, ResidualTriple data,
                std::optional<KaczmarzPartition> partition = std::nullopt);

    const Problem& problem() const noexcept { return *problem_; }
    const GelfandTriple& triple() const noexcept { return problem_->triple(); }
    const TimeGrid& grid() const noexcept { return grid_; }
    const KaczmarzPartition& partition() const noexcept { return partition_; }
    const ResidualTriple& data() const noexcept { return data_; }

    AaoPoint zero_point() const;
    ResidualTriple zero_residual() const;
    /// (0, 0, y) on this operator's grid.
    static ResidualTriple make_data(const Problem& problem, const Trajectory& y);

    ResidualTriple apply_bF(const AaoPoint& x) const;
    ResidualTriple apply_bFprime(const AaoPoint& x, const AaoPoint& dx) const;
    AaoPoint apply_bFprime_adj(const AaoPoint& x, const ResidualTriple& r) const;

    /// Slab j: model and observation channels restricted to the slab, the
    /// initial-value channel kept only on slab 0.
    ResidualTriple restrict(const ResidualTriple& r, int slab) const;
    ResidualTriple apply_bFj(const AaoPoint& x, int slab) const;
    ResidualTriple apply_bFj_prime(const AaoPoint& x, const AaoPoint& dx, int slab) const;
    AaoPoint apply_bFj_adj(const AaoPoint& x, const ResidualTriple& r_slab, int slab) const;

    double domain_inner(const AaoPoint& a, const AaoPoint& b) const;
    double domain_norm(const AaoPoint& a) const;
    double codomain_inner(const ResidualTriple& a, const ResidualTriple& b) const;
    double codomain_norm(const ResidualTriple& a) const;
    ResidualNorms residual_norms(const ResidualTriple& r) const;

private:
    void check_point(const AaoPoint& x) const;
    void check_residual(const ResidualTriple& r) const;

    ProblemPtr problem_;
    TimeGrid grid_;
    ResidualTriple data_;
    KaczmarzPartition partition_;
};

}  // namespace tdinv
