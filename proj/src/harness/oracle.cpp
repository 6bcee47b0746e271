#include "tdinv/harness/oracle.hpp"

#include "tdinv/errors.hpp"

namespace tdinv::harness {

Vector flatten(const AaoPoint& x) {
    const Index n = x.u.space_size();
    const Index cols = x.u.node_count();
    Vector v(n * cols + x.theta.size());
    for (Index c = 0; c < cols; ++c) v.segment(c * n, n) = x.u.values.col(c);
    v.tail(x.theta.size()) = x.theta;
    return v;
}

Vector flatten(const ResidualTriple& r) {
    const Index n = r.w.space_size();
    const Index no = r.z.space_size();
    const int steps = r.w.grid.steps();
    Vector v(n * steps + n + no * steps);
    for (int s = 1; s <= steps; ++s) v.segment((s - 1) * n, n) = r.w.values.col(s);
    v.segment(n * steps, n) = r.h;
    for (int s = 1; s <= steps; ++s) v.segment(n * steps + n + (s - 1) * no, no) = r.z.values.col(s);
    return v;
}

Vector flatten_observation(const Trajectory& z) {
    const Index n = z.space_size();
    const int steps = z.grid.steps();
    Vector v(n * steps);
    for (int s = 1; s <= steps; ++s) v.segment((s - 1) * n, n) = z.values.col(s);
    return v;
}

AaoPoint unflatten_point(const AaoOperator& op, const Vector& v) {
    AaoPoint x = op.zero_point();
    const Index n = x.u.space_size();
    const Index cols = x.u.node_count();
    if (v.size() != n * cols + x.theta.size()) throw ValidationError("flat domain vector has wrong length");
    for (Index c = 0; c < cols; ++c) x.u.values.col(c) = v.segment(c * n, n);
    x.theta = v.tail(x.theta.size());
    return x;
}

ResidualTriple unflatten_residual(const AaoOperator& op, const Vector& v) {
    ResidualTriple r = op.zero_residual();
    const Index n = r.w.space_size();
    const Index no = r.z.space_size();
    const int steps = op.grid().steps();
    if (v.size() != n * steps + n + no * steps) throw ValidationError("flat codomain vector has wrong length");
    for (int s = 1; s <= steps; ++s) r.w.values.col(s) = v.segment((s - 1) * n, n);
    r.h = v.segment(n * steps, n);
    for (int s = 1; s <= steps; ++s) r.z.values.col(s) = v.segment(n * steps + n + (s - 1) * no, no);
    return r;
}

Trajectory unflatten_observation(const TimeGrid& grid, Index space_size, const Vector& v) {
    if (v.size() != space_size * grid.steps()) throw ValidationError("flat observation vector has wrong length");
    Trajectory z = Trajectory::zeros(grid, space_size, SpaceTag::observation);
    for (int s = 1; s <= grid.steps(); ++s) z.values.col(s) = v.segment((s - 1) * space_size, space_size);
    return z;
}

Matrix DenseBundle::bFprime_adjoint() const {
    return gram_domain.ldlt().solve(bFprime.transpose() * gram_codomain);
}

Matrix DenseBundle::Fprime_adjoint() const {
    return gram_parameter.ldlt().solve(Fprime.transpose() * gram_observation);
}

namespace {

template <class Inner>
Matrix gram(Index dim, const Inner& inner_of_units) {
    Matrix g(dim, dim);
    for (Index i = 0; i < dim; ++i)
        for (Index j = i; j < dim; ++j) g(i, j) = g(j, i) = inner_of_units(i, j);
    return g;
}

}  // namespace

DenseBundle dense_oracle(const AaoOperator& aao, const AaoPoint& x, const ReducedOperator& reduced,
                         const Vector& theta, const Trajectory& state) {
    const Index n = aao.problem().state_dim();
    const int steps = aao.grid().steps();
    if (n > 12 || steps > 8) throw ValidationError("dense oracle is limited to n_x <= 12 and N <= 8");
    if (!(reduced.grid() == aao.grid())) throw ValidationError("operators live on different grids");

    const Index dom = flatten(x).size();
    const Index cod = flatten(aao.zero_residual()).size();
    const Index npar = reduced.problem().parameter_dim();
    const Index nobs = reduced.problem().observation_dim() * steps;

    DenseBundle b;
    b.bFprime.resize(cod, dom);
    for (Index j = 0; j < dom; ++j) {
        const AaoPoint e = unflatten_point(aao, Vector::Unit(dom, j));
        b.bFprime.col(j) = flatten(aao.apply_bFprime(x, e));
    }
    b.Fprime.resize(nobs, npar);
    for (Index j = 0; j < npar; ++j)
        b.Fprime.col(j) = flatten_observation(reduced.apply_Fprime(theta, state, Vector::Unit(npar, j)));

    std::vector<AaoPoint> dom_units;
    for (Index j = 0; j < dom; ++j) dom_units.push_back(unflatten_point(aao, Vector::Unit(dom, j)));
    b.gram_domain = gram(dom, [&](Index i, Index j) { return aao.domain_inner(dom_units[i], dom_units[j]); });

    std::vector<ResidualTriple> cod_units;
    for (Index j = 0; j < cod; ++j) cod_units.push_back(unflatten_residual(aao, Vector::Unit(cod, j)));
    b.gram_codomain = gram(cod, [&](Index i, Index j) { return aao.codomain_inner(cod_units[i], cod_units[j]); });

    b.gram_parameter = gram(npar, [&](Index i, Index j) {
        return reduced.parameter_inner(Vector::Unit(npar, i), Vector::Unit(npar, j));
    });
    const Index no = reduced.problem().observation_dim();
    std::vector<Trajectory> obs_units;
    for (Index j = 0; j < nobs; ++j) obs_units.push_back(unflatten_observation(aao.grid(), no, Vector::Unit(nobs, j)));
    b.gram_observation =
        gram(nobs, [&](Index i, Index j) { return inner(reduced.triple(), obs_units[i], obs_units[j]); });
    return b;
}

}  // namespace tdinv::harness
