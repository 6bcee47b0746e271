#pragma once

// Matrix-free solvers over any Hilbert-space vector type that supports
// copy, x + y, x - y, s * x and +=, with the inner product passed in.

#include <algorithm>
#include <cmath>
#include <utility>

namespace tdinv {

struct CgOptions {
    double tolerance = 1e-8;  ///< relative to the right-hand side norm
    int max_iterations = 500;
};

struct CgResult {
    int iterations = 0;
    double residual = 0.0;  ///< final relative residual
    bool converged = false;
};

struct IdentityPreconditioner {
    template <class Vec>
    Vec operator()(const Vec& r) const { return r; }
};

/// Preconditioned CG for a self-adjoint positive definite `apply`. `x` holds the
/// initial guess on entry and the solution on return.
template <class Vec, class Apply, class Inner, class Precond = IdentityPreconditioner>
CgResult conjugate_gradient(const Apply& apply, const Inner& inner, const Vec& rhs, Vec& x, const CgOptions& opts,
                            const Precond& precond = {}) {
    CgResult result;
    const double rhs_norm = std::sqrt(inner(rhs, rhs));
    if (rhs_norm == 0.0) {
        x = 0.0 * rhs;
        result.converged = true;
        return result;
    }
    Vec r = rhs - apply(x);
    double res = std::sqrt(inner(r, r)) / rhs_norm;
    if (res <= opts.tolerance) {
        result.residual = res;
        result.converged = true;
        return result;
    }
    Vec z = precond(r);
    Vec p = z;
    double rz = inner(r, z);
    for (int it = 1; it <= opts.max_iterations; ++it) {
        const Vec ap = apply(p);
        const double pap = inner(p, ap);
        if (!(pap > 0.0)) {
            result.iterations = it;
            result.residual = res;
            return result;
        }
        const double alpha = rz / pap;
        x += alpha * p;
        r += (-alpha) * ap;
        res = std::sqrt(inner(r, r)) / rhs_norm;
        result.iterations = it;
        result.residual = res;
        if (res <= opts.tolerance) {
            result.converged = true;
            return result;
        }
        z = precond(r);
        const double rz_next = inner(r, z);
        p = z + (rz_next / rz) * p;
        rz = rz_next;
    }
    return result;
}

struct NormEstimate {
    double norm = 0.0;
    int iterations = 0;
};

/// Power iteration on adjoint∘forward. Returns sqrt of the dominant eigenvalue
/// after `max_iterations` steps or once successive estimates agree to `rel_tol`.
template <class Vec, class Forward, class Adjoint, class Inner>
NormEstimate estimate_operator_norm(const Forward& forward, const Adjoint& adjoint, const Inner& inner, Vec x,
                                    int max_iterations, double rel_tol = 1e-6) {
    NormEstimate est;
    double xx = inner(x, x);
    if (xx == 0.0) return est;
    x = (1.0 / std::sqrt(xx)) * x;
    double previous = -1.0;
    for (int it = 1; it <= max_iterations; ++it) {
        Vec y = adjoint(forward(x));
        const double rayleigh = inner(x, y);
        est.norm = std::sqrt(std::max(0.0, rayleigh));
        est.iterations = it;
        if (previous >= 0.0 && std::abs(rayleigh - previous) <= rel_tol * std::abs(rayleigh)) break;
        previous = rayleigh;
        const double yy = std::sqrt(inner(y, y));
        if (yy == 0.0) break;
        x = (1.0 / yy) * y;
    }
    return est;
}

}  // namespace tdinv
