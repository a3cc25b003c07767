#include "distreg/quadrature.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "distreg/errors.hpp"

namespace distreg {

namespace {

// Upper-triangular solve with the transpose of a unit-lower factor.
std::vector<accum_real> unit_upper_solve(const std::vector<accum_real>& lower, int dim,
                                         std::vector<accum_real> rhs) {
    for (int i = dim - 1; i >= 0; --i) {
        accum_real acc = rhs[static_cast<std::size_t>(i)];
        for (int k = i + 1; k < dim; ++k)
            acc -= lower[static_cast<std::size_t>(k) * dim + i] * rhs[static_cast<std::size_t>(k)];
        rhs[static_cast<std::size_t>(i)] = acc;
    }
    return rhs;
}

}  // namespace

QuadratureRule gauss_rule(const GramMatrix& gram,
                          const GramMatrix& ygram,
                          const KernelState& state) {
    const int d = static_cast<int>(gram.entries.rows());
    if (ygram.entries.rows() != d || ygram.entries.cols() != d)
        throw ValidationError("gauss_rule: ygram dimensions do not match the Gram matrix");
    if (static_cast<int>(state.diag_ext.size()) != d)
        throw ValidationError("gauss_rule: kernel state does not match the Gram matrix");

    // Reduce ygram*psi = y*gram*psi through gram = L*D*L^T to the standard
    // symmetric problem B = D^{-1/2} L^{-1} ygram L^{-T} D^{-1/2}, whose
    // entries are of the order of the canonical node positions.
    std::vector<accum_real> y_ext(static_cast<std::size_t>(d) * d);
    if (ygram.entries_ext.size() == y_ext.size()) {
        y_ext = ygram.entries_ext;
    } else {
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                y_ext[static_cast<std::size_t>(i) * d + j] =
                    static_cast<accum_real>(ygram.entries(i, j));
    }

    // columns of W = L^{-1} * ygram
    std::vector<std::vector<accum_real>> w(static_cast<std::size_t>(d));
    for (int c = 0; c < d; ++c) {
        std::vector<accum_real> col(static_cast<std::size_t>(d));
        for (int r = 0; r < d; ++r) col[static_cast<std::size_t>(r)] = y_ext[static_cast<std::size_t>(r) * d + c];
        w[static_cast<std::size_t>(c)] = detail::unit_lower_solve(state.factor_ext, d, std::move(col));
    }
    // rows of B' = L^{-1} * W^T, then scale by D^{-1/2} on both sides
    std::vector<accum_real> scale(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i)
        scale[static_cast<std::size_t>(i)] =
            accum_real(1) / detail::ext_sqrt(state.diag_ext[static_cast<std::size_t>(i)]);
    Eigen::MatrixXd reduced(d, d);
    for (int r = 0; r < d; ++r) {
        std::vector<accum_real> row(static_cast<std::size_t>(d));
        for (int c = 0; c < d; ++c) row[static_cast<std::size_t>(c)] = w[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)];
        row = detail::unit_lower_solve(state.factor_ext, d, std::move(row));
        for (int c = 0; c < d; ++c)
            reduced(r, c) = static_cast<double>(row[static_cast<std::size_t>(c)] *
                                                scale[static_cast<std::size_t>(r)] *
                                                scale[static_cast<std::size_t>(c)]);
    }
    reduced = (0.5 * (reduced + reduced.transpose())).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(reduced);
    if (solver.info() != Eigen::Success)
        throw EigenFailure("gauss_rule: symmetric eigensolver did not converge");

    // psi = L^{-T} * D^{-1/2} * V, column by column
    Eigen::MatrixXd psi(d, d);
    for (int c = 0; c < d; ++c) {
        std::vector<accum_real> col(static_cast<std::size_t>(d));
        for (int r = 0; r < d; ++r)
            col[static_cast<std::size_t>(r)] =
                static_cast<accum_real>(solver.eigenvectors()(r, c)) *
                scale[static_cast<std::size_t>(r)];
        col = unit_upper_solve(state.factor_ext, d, std::move(col));
        for (int r = 0; r < d; ++r) psi(r, c) = static_cast<double>(col[static_cast<std::size_t>(r)]);
    }

    const DomainMap& map = state.spec.map;
    std::vector<double> raw_nodes(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i)
        raw_nodes[static_cast<std::size_t>(i)] = map.to_raw(solver.eigenvalues()(i));

    std::vector<int> perm(static_cast<std::size_t>(d));
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) {
        return raw_nodes[static_cast<std::size_t>(a)] < raw_nodes[static_cast<std::size_t>(b)];
    });

    QuadratureRule rule;
    rule.spec = state.spec;
    rule.nodes.resize(static_cast<std::size_t>(d));
    rule.weights.resize(static_cast<std::size_t>(d));
    rule.eigvecs.resize(d, d);
    for (int i = 0; i < d; ++i) {
        const int src = perm[static_cast<std::size_t>(i)];
        const double node = raw_nodes[static_cast<std::size_t>(src)];
        rule.nodes[static_cast<std::size_t>(i)] = node;
        rule.weights[static_cast<std::size_t>(i)] = christoffel(state, node);
        Eigen::VectorXd column = psi.col(src);
        if (column(0) < 0.0) column = -column;  // deterministic sign: Q_0 component >= 0
        rule.eigvecs.col(i) = column;
    }
    return rule;
}

OutcomeDistribution normalize(const QuadratureRule& rule) {
    for (double w : rule.weights)
        if (!(w > 0.0)) throw ValidationError("normalize: quadrature weights must be positive");
    const double total = std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0);
    OutcomeDistribution dist;
    dist.nodes = rule.nodes;
    dist.probabilities.resize(rule.weights.size());
    for (std::size_t i = 0; i < rule.weights.size(); ++i)
        dist.probabilities[i] = rule.weights[i] / total;
    dist.total_mass = total;
    return dist;
}

double rule_mean(const OutcomeDistribution& dist) {
    double mean = 0.0;
    for (std::size_t i = 0; i < dist.nodes.size(); ++i)
        mean += dist.probabilities[i] * dist.nodes[i];
    return mean;
}

}  // namespace distreg
