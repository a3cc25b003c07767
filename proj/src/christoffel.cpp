#include "distreg/christoffel.hpp"

#include <cmath>

#include "distreg/errors.hpp"

namespace distreg {

namespace {

// Pivot floor relative to the largest diagonal entry, in the extended
// arithmetic the factorization runs in. Exact rank deficiency shows up at the
// extended epsilon; genuinely concentrated measures keep pivots far above it.
constexpr double kPivotFloor = 1e-30;

std::vector<accum_real> gram_ext_view(const GramMatrix& gram, double ridge_used) {
    const int d = static_cast<int>(gram.entries.rows());
    std::vector<accum_real> a(static_cast<std::size_t>(d) * d);
    if (gram.entries_ext.size() == a.size()) {
        a = gram.entries_ext;
    } else {
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                a[static_cast<std::size_t>(i) * d + j] =
                    static_cast<accum_real>(gram.entries(i, j));
    }
    if (ridge_used > 0.0) {
        accum_real trace = 0;
        for (int i = 0; i < d; ++i) trace += a[static_cast<std::size_t>(i) * d + i];
        const accum_real bump = static_cast<accum_real>(ridge_used) * trace / d;
        for (int i = 0; i < d; ++i) a[static_cast<std::size_t>(i) * d + i] += bump;
    }
    return a;
}

}  // namespace

namespace detail {

accum_real ext_sqrt(accum_real v) {
    if (!(v > 0)) return 0;
    accum_real s = static_cast<accum_real>(std::sqrt(static_cast<double>(v)));
    s = accum_real(0.5) * (s + v / s);
    s = accum_real(0.5) * (s + v / s);
    return s;
}

std::vector<accum_real> unit_lower_solve(const std::vector<accum_real>& lower, int dim,
                                         std::vector<accum_real> rhs) {
    for (int i = 0; i < dim; ++i) {
        accum_real acc = rhs[static_cast<std::size_t>(i)];
        for (int k = 0; k < i; ++k)
            acc -= lower[static_cast<std::size_t>(i) * dim + k] * rhs[static_cast<std::size_t>(k)];
        rhs[static_cast<std::size_t>(i)] = acc;
    }
    return rhs;
}

}  // namespace detail

KernelState factorize(const GramMatrix& gram, std::optional<double> ridge) {
    const int d = static_cast<int>(gram.entries.rows());
    if (d < 1 || gram.entries.cols() != d)
        throw ValidationError("factorize: Gram matrix must be square and nonempty");
    if (ridge && !(*ridge >= 0.0))
        throw ValidationError("factorize: ridge must be nonnegative");

    const double ridge_used = ridge.value_or(0.0);
    const std::vector<accum_real> a = gram_ext_view(gram, ridge_used);

    accum_real max_diag = 0;
    for (int i = 0; i < d; ++i)
        max_diag = std::max(max_diag, a[static_cast<std::size_t>(i) * d + i]);
    const accum_real floor = static_cast<accum_real>(kPivotFloor) * max_diag;

    // LDL^T, unit-lower L, pivots in D.
    std::vector<accum_real> lower(static_cast<std::size_t>(d) * d, accum_real(0));
    std::vector<accum_real> diag(static_cast<std::size_t>(d), accum_real(0));
    bool ok = max_diag > 0 && std::isfinite(static_cast<double>(max_diag));
    for (int j = 0; ok && j < d; ++j) {
        accum_real pivot = a[static_cast<std::size_t>(j) * d + j];
        for (int k = 0; k < j; ++k) {
            const accum_real ljk = lower[static_cast<std::size_t>(j) * d + k];
            pivot -= ljk * ljk * diag[static_cast<std::size_t>(k)];
        }
        if (!(pivot > floor)) {
            ok = false;
            break;
        }
        diag[static_cast<std::size_t>(j)] = pivot;
        lower[static_cast<std::size_t>(j) * d + j] = 1;
        for (int i = j + 1; i < d; ++i) {
            accum_real acc = a[static_cast<std::size_t>(i) * d + j];
            for (int k = 0; k < j; ++k)
                acc -= lower[static_cast<std::size_t>(i) * d + k] *
                       lower[static_cast<std::size_t>(j) * d + k] *
                       diag[static_cast<std::size_t>(k)];
            lower[static_cast<std::size_t>(i) * d + j] = acc / pivot;
        }
    }
    if (!ok) {
        std::string msg = "Gram matrix is not positive definite (rank below " +
                          std::to_string(d) + ")";
        if (ridge_used > 0.0) msg += " even with ridge " + std::to_string(ridge_used);
        throw NotPositiveDefinite(msg);
    }

    accum_real dmin = diag[0], dmax = diag[0];
    for (int i = 1; i < d; ++i) {
        dmin = std::min(dmin, diag[static_cast<std::size_t>(i)]);
        dmax = std::max(dmax, diag[static_cast<std::size_t>(i)]);
    }

    Eigen::MatrixXd view = Eigen::MatrixXd::Zero(d, d);
    for (int j = 0; j < d; ++j) {
        const accum_real s = detail::ext_sqrt(diag[static_cast<std::size_t>(j)]);
        for (int i = j; i < d; ++i)
            view(i, j) = static_cast<double>(lower[static_cast<std::size_t>(i) * d + j] * s);
    }

    return KernelState{gram.spec,
                       gram,
                       std::move(lower),
                       std::move(diag),
                       std::move(view),
                       ridge_used,
                       static_cast<double>(dmax / dmin)};
}

double kernel(const KernelState& state, double z, double y) {
    const int d = state.spec.degree;
    const std::vector<accum_real> az = detail::unit_lower_solve(
        state.factor_ext, d,
        detail::basis_values_ext(state.spec.family, state.spec.map, z, d));
    if (z == y) {
        accum_real acc = 0;
        for (int i = 0; i < d; ++i) {
            const accum_real v = az[static_cast<std::size_t>(i)];
            acc += v * v / state.diag_ext[static_cast<std::size_t>(i)];
        }
        return static_cast<double>(acc);
    }
    const std::vector<accum_real> ay = detail::unit_lower_solve(
        state.factor_ext, d,
        detail::basis_values_ext(state.spec.family, state.spec.map, y, d));
    accum_real acc = 0;
    for (int i = 0; i < d; ++i)
        acc += az[static_cast<std::size_t>(i)] * ay[static_cast<std::size_t>(i)] /
               state.diag_ext[static_cast<std::size_t>(i)];
    return static_cast<double>(acc);
}

double christoffel(const KernelState& state, double y) {
    return 1.0 / kernel(state, y, y);
}

}  // namespace distreg
