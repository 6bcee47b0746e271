#include "tdinv/harness/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "tdinv/errors.hpp"

namespace tdinv::harness {

namespace {

constexpr double kSkipBelow = 1e-14;

void check_args(int samples, double radius) {
    if (samples < 1) throw ValidationError("tangential cone estimate needs at least one sample");
    if (!(radius > 0.0)) throw ValidationError("tangential cone radius must be positive");
}

Matrix gaussian(std::mt19937_64& rng, Index rows, Index cols) {
    std::normal_distribution<double> normal;
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
    return m;
}

}  // namespace

ConeEstimate estimate_tangential_cone(const AaoOperator& op, const AaoPoint& center, int samples, double radius,
                                      std::uint64_t seed) {
    check_args(samples, radius);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto draw = [&]() {
        AaoPoint d = op.zero_point();
        d.u.values = gaussian(rng, d.u.space_size(), d.u.node_count());
        d.theta = gaussian(rng, d.theta.size(), 1);
        const double scale = radius * unit(rng) / op.domain_norm(d);
        return center + scale * d;
    };
    ConeEstimate est;
    for (int s = 0; s < samples; ++s) {
        const AaoPoint x = draw();
        const AaoPoint xt = draw();
        const ResidualTriple fx = op.apply_bF(x);
        const ResidualTriple diff = op.apply_bF(xt) - fx;
        const double denom = op.codomain_norm(diff);
        if (denom < kSkipBelow) {
            ++est.skipped;
            continue;
        }
        const ResidualNorms lin = op.residual_norms(diff - op.apply_bFprime(x, xt - x));
        ++est.used;
        est.c_tc = std::max(est.c_tc, lin.total / denom);
        est.c_w = std::max(est.c_w, lin.w / denom);
        est.c_h = std::max(est.c_h, lin.h / denom);
        est.c_y = std::max(est.c_y, lin.y / denom);
    }
    return est;
}

ConeEstimate estimate_tangential_cone(const ReducedOperator& op, const Vector& center, int samples, double radius,
                                      std::uint64_t seed) {
    check_args(samples, radius);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto draw = [&]() -> Vector {
        const Vector d = gaussian(rng, center.size(), 1);
        return center + (radius * unit(rng) / op.parameter_norm(d)) * d;
    };
    ConeEstimate est;
    for (int s = 0; s < samples; ++s) {
        const Vector x = draw();
        const Vector xt = draw();
        const Trajectory ux = op.solve_state(x);
        const Trajectory fx = op.observe(x, ux);
        const Trajectory diff = op.observe(xt, op.solve_state(xt)) - fx;
        const double denom = op.observation_norm(diff);
        if (denom < kSkipBelow) {
            ++est.skipped;
            continue;
        }
        const double lin = op.observation_norm(diff - op.apply_Fprime(x, ux, xt - x));
        ++est.used;
        est.c_tc = std::max(est.c_tc, lin / denom);
        est.c_y = est.c_tc;
    }
    return est;
}

}  // namespace tdinv::harness

namespace tdinv::harness {

namespace {

Trajectory gaussian_slots(std::mt19937_64& rng, const TimeGrid& grid, Index n, SpaceTag tag) {
    Trajectory t = Trajectory::zeros(grid, n, tag);
    t.values.rightCols(grid.steps()) = gaussian(rng, n, grid.steps());
    return t;
}

double order_of(const std::vector<double>& eps, const std::vector<double>& rem) {
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < eps.size(); ++i)
        worst = std::min(worst, std::log(rem[i - 1] / rem[i]) / std::log(eps[i - 1] / eps[i]));
    return worst;
}

}  // namespace

ResidualTriple random_residual(const AaoOperator& op, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    ResidualTriple r = op.zero_residual();
    r.w = gaussian_slots(rng, op.grid(), r.w.space_size(), SpaceTag::dual_load);
    r.h = gaussian(rng, r.h.size(), 1);
    r.z = gaussian_slots(rng, op.grid(), r.z.space_size(), SpaceTag::observation);
    return r;
}

AaoPoint random_point(const AaoOperator& op, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    AaoPoint x = op.zero_point();
    x.u.values = gaussian(rng, x.u.space_size(), x.u.node_count());
    x.theta = gaussian(rng, x.theta.size(), 1);
    return x;
}

double duality_gap(const AaoOperator& op, const AaoPoint& x, int slab, int draws, std::uint64_t seed) {
    double worst = 0.0;
    for (int i = 0; i < draws; ++i) {
        const AaoPoint d = random_point(op, seed + 2 * static_cast<std::uint64_t>(i));
        const ResidualTriple r = random_residual(op, seed + 2 * static_cast<std::uint64_t>(i) + 1);
        const ResidualTriple jd = slab < 0 ? op.apply_bFprime(x, d) : op.apply_bFj_prime(x, d, slab);
        const AaoPoint jr = slab < 0 ? op.apply_bFprime_adj(x, r) : op.apply_bFj_adj(x, r, slab);
        const double lhs = op.codomain_inner(jd, r);
        const double rhs = op.domain_inner(d, jr);
        const double scale = op.codomain_norm(jd) * op.codomain_norm(r);
        if (scale > 0.0) worst = std::max(worst, std::abs(lhs - rhs) / scale);
    }
    return worst;
}

double duality_gap(const ReducedOperator& op, const Vector& theta, const Trajectory& state, int slab, int draws,
                   std::uint64_t seed) {
    double worst = 0.0;
    std::mt19937_64 rng(seed);
    for (int i = 0; i < draws; ++i) {
        const Vector xi = gaussian(rng, theta.size(), 1);
        const Trajectory z = gaussian_slots(rng, op.grid(), op.problem().observation_dim(), SpaceTag::observation);
        const Trajectory jx = slab < 0 ? op.apply_Fprime(theta, state, xi) : op.apply_Fj_prime(theta, state, xi, slab);
        const Vector jz = slab < 0 ? op.apply_Fprime_adj(theta, state, z) : op.apply_Fj_adj(theta, state, z, slab);
        const double lhs = inner(op.triple(), jx, z);
        const double rhs = op.parameter_inner(xi, jz);
        const double scale = op.observation_norm(jx) * op.observation_norm(z);
        if (scale > 0.0) worst = std::max(worst, std::abs(lhs - rhs) / scale);
    }
    return worst;
}

TaylorResult taylor_test(const AaoOperator& op, const AaoPoint& x, const AaoPoint& d, const std::vector<double>& eps) {
    TaylorResult t;
    t.eps = eps;
    const ResidualTriple fx = op.apply_bF(x);
    const ResidualTriple jd = op.apply_bFprime(x, d);
    for (double e : eps) t.remainder.push_back(op.codomain_norm(op.apply_bF(x + e * d) - fx - e * jd));
    t.min_order = order_of(t.eps, t.remainder);
    return t;
}

TaylorResult taylor_test(const ReducedOperator& op, const Vector& theta, const Vector& xi,
                         const std::vector<double>& eps) {
    TaylorResult t;
    t.eps = eps;
    const Trajectory u = op.solve_state(theta);
    const Trajectory fx = op.observe(theta, u);
    const Trajectory jx = op.apply_Fprime(theta, u, xi);
    for (double e : eps) {
        const Vector th = theta + e * xi;
        t.remainder.push_back(op.observation_norm(op.observe(th, op.solve_state(th)) - fx - e * jx));
    }
    t.min_order = order_of(t.eps, t.remainder);
    return t;
}

}  // namespace tdinv::harness
