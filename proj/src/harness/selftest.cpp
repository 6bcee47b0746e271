#include "tdinv/harness/selftest.hpp"

#include <cmath>
#include <numbers>

#include "tdinv/harness/diagnostics.hpp"
#include "tdinv/harness/oracle.hpp"
#include "tdinv/problem.hpp"

namespace tdinv::harness {

bool SelfTestReport::all_passed() const {
    for (const auto& c : checks)
        if (!c.passed) return false;
    return !checks.empty();
}

namespace {

void add_max(SelfTestReport& rep, const std::string& name, double value, double tol) {
    rep.checks.push_back({name, value, tol, value <= tol});
}

void add_min(SelfTestReport& rep, const std::string& name, double value, double tol) {
    rep.checks.push_back({name, value, tol, value >= tol});
}

double rel(const Vector& a, const Vector& b) { return (a - b).norm() / std::max(1e-300, b.norm()); }

Vector positive_profile(const GelfandTriple& tr, double base, double bump) {
    return (base + bump * (std::numbers::pi * tr.nodes().array()).sin()).matrix();
}

}  // namespace

SelfTestReport run_selftest(const SelfTestOptions& o) {
    SelfTestReport rep;

    // Dense oracle at tiny scale.
    {
        const auto tr = build_triple(8);
        const auto pb = std::make_shared<SemilinearDiffusion>(tr);
        const TimeGrid grid = make_time_grid(0.1, 6);
        const auto part = make_partition(grid, 2);
        const ReducedOperator red(pb, grid, part);
        const Vector theta = positive_profile(*tr, 1.0, 0.5);
        const Trajectory state = red.solve_state(theta);
        const AaoOperator aao(pb, grid, AaoOperator::make_data(*pb, red.observe(theta, state)), part);
        const AaoPoint x = random_point(aao, 3);
        const DenseBundle dense = dense_oracle(aao, x, red, theta, state);
        const Matrix adj = dense.bFprime_adjoint();
        const Matrix radj = dense.Fprime_adjoint();
        double fwd = 0.0, bwd = 0.0, rfwd = 0.0, rbwd = 0.0;
        for (int i = 0; i < 5; ++i) {
            const AaoPoint d = random_point(aao, 100 + i);
            const ResidualTriple r = random_residual(aao, 200 + i);
            fwd = std::max(fwd, rel(flatten(aao.apply_bFprime(x, d)), dense.bFprime * flatten(d)));
            bwd = std::max(bwd, rel(flatten(aao.apply_bFprime_adj(x, r)), adj * flatten(r)));
            const Vector xi = d.theta;
            rfwd = std::max(rfwd, rel(flatten_observation(red.apply_Fprime(theta, state, xi)), dense.Fprime * xi));
            rbwd = std::max(rbwd, rel(red.apply_Fprime_adj(theta, state, r.z), radj * flatten_observation(r.z)));
        }
        add_max(rep, "dense aao derivative", fwd, 1e-12);
        add_max(rep, "dense aao adjoint", bwd, 1e-10);
        add_max(rep, "dense reduced derivative", rfwd, 1e-12);
        add_max(rep, "dense reduced adjoint", rbwd, 1e-10);
    }

    // Dot-product and Taylor tests at the working scale.
    const auto tr = build_triple(o.n_x);
    const auto pb = std::make_shared<SemilinearDiffusion>(tr);
    const TimeGrid grid = make_time_grid(0.1, o.n_t);
    const Vector theta = positive_profile(*tr, 1.0, 0.5);
    const ReducedOperator red1(pb, grid);
    const Trajectory state = red1.solve_state(theta);
    const Trajectory y = red1.observe(theta, state);
    for (int m : {1, 4}) {
        // Slabs must align with grid nodes; round the step count up to a multiple of m.
        const int steps = (o.n_t + m - 1) / m * m;
        const TimeGrid g = make_time_grid(0.1, steps);
        const auto part = make_partition(g, m);
        const ReducedOperator red(pb, g, part);
        const Trajectory u = red.solve_state(theta);
        const AaoOperator aao(pb, g, AaoOperator::make_data(*pb, red.observe(theta, u)), part);
        const AaoPoint x{u, theta};
        const std::string tag = " m=" + std::to_string(m) + " N=" + std::to_string(steps);
        add_max(rep, "aao duality" + tag, duality_gap(aao, x, -1, o.draws), 1e-10);
        add_max(rep, "reduced duality" + tag, duality_gap(red, theta, u, -1, o.draws), 1e-10);
        double slab_aao = 0.0, slab_red = 0.0;
        for (int j = 0; j < m; ++j) {
            slab_aao = std::max(slab_aao, duality_gap(aao, x, j, std::max(1, o.draws / m)));
            slab_red = std::max(slab_red, duality_gap(red, theta, u, j, std::max(1, o.draws / m)));
        }
        add_max(rep, "aao slab duality" + tag, slab_aao, 1e-10);
        add_max(rep, "reduced slab duality" + tag, slab_red, 1e-10);
    }

    const AaoOperator aao(pb, grid, AaoOperator::make_data(*pb, y));
    const ResidualNorms consistency = aao.residual_norms(aao.apply_bF(AaoPoint{state, theta}));
    add_max(rep, "aao residual at reduced solution", consistency.total / norm(*tr, y), 1e-9);

    const std::vector<double> eps{1e-1, 1e-2, 1e-3};
    const Vector xi = positive_profile(*tr, 1.0, 0.0);
    add_min(rep, "reduced Taylor order", taylor_test(red1, theta, xi, eps).min_order, 1.9);
    AaoPoint dir = aao.zero_point();
    dir.theta = xi;
    for (int n = 1; n < dir.u.node_count(); ++n) dir.u.values.col(n) = positive_profile(*tr, 0.2, 0.3);
    add_min(rep, "aao Taylor order", taylor_test(aao, AaoPoint{state, theta}, dir, eps).min_order, 1.9);
    return rep;
}

}  // namespace tdinv::harness
