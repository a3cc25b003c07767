#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "distreg/moments.hpp"

namespace distreg {

/// A Gram matrix together with its triangular factorization, ready for kernel
/// and Christoffel-function evaluation. Immutable after factorize().
///
/// The factor is held as unit-lower L and diagonal D with L*D*L^T = gram
/// (plus the ridge term), carried in extended precision: conditional Gram
/// matrices of sharply concentrated measures run past double's conditioning
/// limit while remaining positive definite in exact arithmetic.
struct KernelState {
    BasisSpec spec;
    GramMatrix gram;
    std::vector<accum_real> factor_ext;  // row-major unit-lower L (diagonal implied 1)
    std::vector<accum_real> diag_ext;    // D
    Eigen::MatrixXd chol_lower;          // double view of L*sqrt(D)
    double ridge_used = 0.0;
    double condition_estimate = 1.0;
};

/// Factorization of `gram` (plus ridge*(trace/d)*I when `ridge` is given).
/// Throws NotPositiveDefinite when a pivot is nonpositive or falls below the
/// rank floor; that signals fewer distinct support points than basis elements.
KernelState factorize(const GramMatrix& gram, std::optional<double> ridge = {});

/// Reproducing kernel K(z, y) = Q(u_z)^T G^{-1} Q(u_y), evaluated through the
/// triangular factor (the explicit inverse is never formed).
double kernel(const KernelState& state, double z, double y);

/// Christoffel function lambda(y) = 1 / K(y, y); strictly positive.
double christoffel(const KernelState& state, double y);

namespace detail {

// Solves L*a = q for unit-lower L in extended precision.
std::vector<accum_real> unit_lower_solve(const std::vector<accum_real>& lower, int dim,
                                         std::vector<accum_real> rhs);

// sqrt in extended precision (double seed refined by Newton steps).
accum_real ext_sqrt(accum_real v);

}  // namespace detail

}  // namespace distreg
