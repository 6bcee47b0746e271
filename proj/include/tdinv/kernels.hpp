#pragma once

// Data-parallel building blocks for whole-trajectory operations.
//
// Trajectories are stored column-major as (space nodes) x (time nodes). Every
// kernel exists in two flavours: a plain serial loop kept as the reference,
// and an OpenMP version used in production. Neither does cross-thread
// reductions, so results do not depend on the thread count.

#include "tdinv/types.hpp"

namespace tdinv::kernels {

enum class Exec { serial, parallel };

/// Process-wide default used when a call does not pass an explicit policy.
Exec default_exec() noexcept;
void set_default_exec(Exec exec) noexcept;

/// out = Q^T X, one column per time node.
void to_modal(const Matrix& Q, const Matrix& X, Matrix& out, Exec exec = default_exec());

/// out = Q X.
void from_modal(const Matrix& Q, const Matrix& X, Matrix& out, Exec exec = default_exec());

/// Implicit Euler in the eigenbasis, mode by mode:
///   out(:,0) = v0,  out(k,n) = (out(k,n-1) + step * src(k,n)) / (1 + step * lambda_k).
/// Column 0 of src is ignored.
void modal_forward(const Vector& lambda, double step, const Vector& v0, const Matrix& src, Matrix& out,
                   Exec exec = default_exec());

/// Time-reversed transpose of modal_forward:
///   out(:,N) = pT,  out(k,n-1) = (out(k,n) + step * src(k,n)) / (1 + step * lambda_k).
void modal_backward(const Vector& lambda, double step, const Vector& pT, const Matrix& src, Matrix& out,
                    Exec exec = default_exec());

/// Columnwise scaling out(k,n) = X(k,n) * weight(k).
void scale_modes(const Vector& weight, const Matrix& X, Matrix& out, Exec exec = default_exec());

/// Dirichlet three-point stencil (2 x_i - x_{i-1} - x_{i+1}) * inv_dx2 applied to every column.
void apply_stencil(double inv_dx2, const Matrix& X, Matrix& out, Exec exec = default_exec());

}  // namespace tdinv::kernels
