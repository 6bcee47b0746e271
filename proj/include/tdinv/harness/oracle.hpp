#pragma once

// Explicit matrices for tiny instances, assembled column by column from the
// matrix-free operators, together with the Gram matrices of every discrete
// inner product. Used to cross-check the matrix-free adjoints.
//
// Coordinates:
//   domain       [u^0; ...; u^N; theta]
//   codomain     [w_1; ...; w_N; h; z_1; ...; z_N]
//   observation  [z_1; ...; z_N]

#include "tdinv/aao.hpp"
#include "tdinv/reduced.hpp"

namespace tdinv::harness {

Vector flatten(const AaoPoint& x);
Vector flatten(const ResidualTriple& r);
Vector flatten_observation(const Trajectory& z);
AaoPoint unflatten_point(const AaoOperator& op, const Vector& v);
ResidualTriple unflatten_residual(const AaoOperator& op, const Vector& v);
Trajectory unflatten_observation(const TimeGrid& grid, Index space_size, const Vector& v);

struct DenseBundle {
    Matrix bFprime;  ///< codomain x domain
    Matrix Fprime;   ///< observation x parameter
    Matrix gram_domain;
    Matrix gram_codomain;
    Matrix gram_parameter;
    Matrix gram_observation;

    /// Gram-weighted transposes G_dom^{-1} J^T G_cod.
    Matrix bFprime_adjoint() const;
    Matrix Fprime_adjoint() const;
};

/// Size guard: n_x <= 12 and N <= 8, otherwise ValidationError.
DenseBundle dense_oracle(const AaoOperator& aao, const AaoPoint& x, const ReducedOperator& reduced,
                         const Vector& theta, const Trajectory& state);

}  // namespace tdinv::harness
