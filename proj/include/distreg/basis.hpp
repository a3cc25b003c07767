#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace distreg {

// Extended-precision scalar used internally when assembling Gram matrices from
// moments. The product-linearization coefficients of the higher families
// (Laguerre especially) cancel by many orders of magnitude at degree ~12, so
// the accumulation runs wider than double and is rounded once at the end.
#if defined(__SIZEOF_FLOAT128__)
using accum_real = __float128;
#else
using accum_real = long double;
#endif

enum class BasisFamily { Chebyshev, Legendre, Hermite, Laguerre };

std::string_view family_name(BasisFamily family);
BasisFamily family_from_name(std::string_view name);  // throws ValidationError

/// Three-term recurrence  t*Q_k = alpha*Q_{k+1} + beta*Q_k + gamma*Q_{k-1}
/// with Q_0 = 1 and the family-standard Q_1.
struct Recurrence {
    double alpha;
    double beta;
    double gamma;
};

Recurrence recurrence(BasisFamily family, int k);

/// Affine change of coordinates u = scale*t + shift from the raw data
/// coordinate t to the canonical coordinate u the basis is evaluated in.
struct DomainMap {
    double scale = 1.0;
    double shift = 0.0;

    double to_canonical(double t) const noexcept { return scale * t + shift; }
    double to_raw(double u) const noexcept { return (u - shift) / scale; }
};

/// A concrete basis: family, element count `degree` (indices 0..degree-1),
/// and the domain map that fixes what every Q_k means on raw data.
struct BasisSpec {
    BasisFamily family = BasisFamily::Chebyshev;
    int degree = 1;
    DomainMap map{};
};

/// Fits a domain map so the canonical image of `samples` lies in the region
/// where the family is well conditioned:
///   Chebyshev/Legendre: [min-p, max+p] -> [-1, 1], p = 1e-6*(max-min)
///                       (p = 1 when the range is degenerate);
///   Hermite:            zero mean, unit standard deviation (unit scale when
///                       degenerate);
///   Laguerre:           min -> 0, scale 1/mean(t - min) (unit when degenerate).
DomainMap domain_map_from_data(std::span<const double> samples, BasisFamily family);

/// (Q_0(u), ..., Q_{d-1}(u)) at u = map(t), by the three-term recurrence.
std::vector<double> eval_basis(const BasisSpec& spec, double t);
void eval_basis(const BasisSpec& spec, double t, std::span<double> out);

/// Coefficients c with Q_q*Q_r = sum_k c[k]*Q_k, exactly; length q+r+1.
/// Memoized per (family, q, r).
std::vector<double> linearize_product(const BasisSpec& spec, int q, int r);

/// Coefficients of u*p(u) for p given by `coeffs` in the basis; length n+1.
/// Multiplies by the canonical coordinate; callers needing the raw coordinate
/// compose with the inverse domain map.
std::vector<double> multiply_by_argument(const BasisSpec& spec,
                                         std::span<const double> coeffs);

namespace detail {

// Shared extended-precision internals (moment accumulation and Gram assembly).
struct RecurrenceExt {
    accum_real inv_alpha;
    accum_real beta;
    accum_real gamma;
};

std::vector<RecurrenceExt> recurrence_table(BasisFamily family, int count);

// (Q_0(u), ..., Q_{count-1}(u)) at u = map(t), in extended precision.
std::vector<accum_real> basis_values_ext(BasisFamily family, const DomainMap& map,
                                         double t, int count);

// Memoized linearization coefficients; the reference stays valid for the
// lifetime of the process.
const std::vector<accum_real>& linearize_product_ext(BasisFamily family, int q, int r);

std::vector<accum_real> multiply_by_argument_ext(BasisFamily family,
                                                 std::span<const accum_real> coeffs);

}  // namespace detail

}  // namespace distreg
