#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "distreg/basis.hpp"

namespace distreg {

/// <Q_k> for k = 0..order under a discrete, optionally weighted measure.
/// Values are carried in extended precision; `value()` rounds to double.
class MomentVector {
public:
    MomentVector(BasisSpec spec, std::vector<accum_real> values);

    const BasisSpec& spec() const noexcept { return spec_; }
    int order() const noexcept { return static_cast<int>(values_.size()) - 1; }
    double value(int k) const;
    std::vector<double> values() const;
    std::span<const accum_real> raw() const noexcept { return values_; }

private:
    BasisSpec spec_;
    std::vector<accum_real> values_;
};

/// values[k] = sum_j w_j * Q_k(u_j), single pass over the points.
/// `weights` empty means unit weights. Throws ValidationError on a
/// points/weights length mismatch or a negative weight.
MomentVector accumulate_moments(const BasisSpec& spec,
                                std::span<const double> points,
                                std::span<const double> weights,
                                int order);
MomentVector accumulate_moments(const BasisSpec& spec,
                                std::span<const double> points,
                                int order);

/// Symmetric d x d matrix of inner products <Q_s Q_t> under the measure.
/// `entries_ext` (row-major, when present) carries the same values in
/// extended precision for downstream factorization; `entries` is the double
/// view used everywhere else.
struct GramMatrix {
    BasisSpec spec;
    Eigen::MatrixXd entries;
    std::vector<accum_real> entries_ext;
};

/// entries[s][t] = sum_k c_st[k] * moments[k] with c from linearize_product;
/// requires moments.order() >= 2*degree - 2.
GramMatrix gram_from_moments(const BasisSpec& spec, const MomentVector& moments);

/// <u * Q_s Q_t> under the moment measure (canonical coordinate u);
/// requires moments.order() >= 2*degree - 1.
GramMatrix ygram_from_moments(const BasisSpec& spec, const MomentVector& moments);

/// Reference double-sum route, sum_j w_j Q_s(u_j) Q_t(u_j). Used by the
/// diagnostics runner as the independent cross-check of the moments route.
GramMatrix gram_direct(const BasisSpec& spec,
                       std::span<const double> points,
                       std::span<const double> weights = {});

}  // namespace distreg
