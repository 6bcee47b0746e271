#pragma once

// Dense reference for the semilinear benchmark, written from the block
// formulas directly (explicit matrices, LU solves, dense Newton). Shares no
// code with the matrix-free operators.
//
// Flat coordinates:
//   domain       [u^0; ...; u^N; theta]
//   codomain     [w_1; ...; w_N; h; z_1; ...; z_N]
//   observation  [z_1; ...; z_N]

#include <Eigen/Dense>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Setup {
    int n = 0;
    int steps = 0;
    double T = 0.0;
    double gain = 10.0;
    double tau = 0.0;
    double dx = 0.0;
    Matrix A;
    Matrix Ainv;
};

Setup make_setup(int n, int steps, double T, double gain);

double phi(const Setup& s, double v);
double dphi(const Setup& s, double v);

Vector flatten_state(const Matrix& U);  ///< n x (N+1) -> n(N+1)
Matrix unflatten_state(const Setup& s, const Vector& v);
Vector flatten_obs(const Matrix& Z);    ///< drops column 0
Matrix unflatten_obs(const Setup& s, const Vector& v);

/// bF(u, theta) - (0, 0, y), flattened.
Vector aao_residual(const Setup& s, const Matrix& U, const Vector& theta, const Matrix& Y);
/// Jacobian of aao_residual, codomain x domain.
Matrix aao_jacobian(const Setup& s, const Matrix& U, const Vector& theta);

Matrix gram_domain(const Setup& s);
Matrix gram_codomain(const Setup& s);
Matrix gram_parameter(const Setup& s);
Matrix gram_observation(const Setup& s);

/// G_in^{-1} J^T G_out.
Matrix adjoint(const Matrix& J, const Matrix& G_in, const Matrix& G_out);

/// Diagonal 0/1 projector keeping slab j of the codomain (h only for j = 0).
Matrix codomain_slab(const Setup& s, int m, int j);
Matrix observation_slab(const Setup& s, int m, int j);

/// Fully implicit Euler by dense Newton; optional dual_load perturbation W (n x (N+1)).
Matrix state_solve(const Setup& s, const Vector& theta, const Matrix* W = nullptr);
/// Stacked sensitivities V_1..V_N, observation x parameter.
Matrix reduced_jacobian(const Setup& s, const Vector& theta, const Matrix& U);

/// Operator norm of J between the weighted spaces, by a generalized symmetric eigenproblem.
double weighted_norm(const Matrix& J, const Matrix& G_in, const Matrix& G_out);

}  // namespace oracle
