#pragma once

#include <cstdint>
#include <vector>

#include "tdinv/aao.hpp"
#include "tdinv/reduced.hpp"

namespace tdinv::harness {

/// Sampled constant of the tangential cone condition
///   ||F(x~) - F(x) - F'(x)(x~ - x)|| <= c_tc ||F(x~) - F(x)||.
struct ConeEstimate {
    double c_tc = 0.0;  ///< largest sampled ratio
    int used = 0;       ///< pairs that entered the maximum
    int skipped = 0;    ///< pairs with residual difference below 1e-14
    // All-at-once only: largest per-channel share of the linearization error.
    double c_w = 0.0;
    double c_h = 0.0;
    double c_y = 0.0;
};

/// Pairs are drawn uniformly in norm within `radius` of the center along
/// Gaussian directions. Throws ValidationError for samples < 1 or radius <= 0.
ConeEstimate estimate_tangential_cone(const AaoOperator& op, const AaoPoint& center, int samples, double radius,
                                      std::uint64_t seed = 1);
ConeEstimate estimate_tangential_cone(const ReducedOperator& op, const Vector& center, int samples, double radius,
                                      std::uint64_t seed = 1);

/// Largest |<J d, r> - <d, J* r>| / (||J d|| ||r||) over Gaussian draws of d and r.
/// slab < 0 tests the full derivative, otherwise the slab operator.
double duality_gap(const AaoOperator& op, const AaoPoint& x, int slab, int draws, std::uint64_t seed = 7);
double duality_gap(const ReducedOperator& op, const Vector& theta, const Trajectory& state, int slab, int draws,
                   std::uint64_t seed = 7);

struct TaylorResult {
    std::vector<double> eps;
    std::vector<double> remainder;  ///< ||F(x + eps d) - F(x) - eps F'(x) d||
    double min_order = 0.0;         ///< smallest log10 ratio between consecutive remainders
};

TaylorResult taylor_test(const AaoOperator& op, const AaoPoint& x, const AaoPoint& d, const std::vector<double>& eps);
TaylorResult taylor_test(const ReducedOperator& op, const Vector& theta, const Vector& xi,
                         const std::vector<double>& eps);

/// Gaussian residual with zero node-0 columns.
ResidualTriple random_residual(const AaoOperator& op, std::uint64_t seed);
AaoPoint random_point(const AaoOperator& op, std::uint64_t seed);

}  // namespace tdinv::harness
