#pragma once

#include <Eigen/Dense>

#include <vector>

#include "distreg/christoffel.hpp"

namespace distreg {

/// d-point Gauss quadrature of a discrete measure: nodes in raw coordinates
/// (strictly ascending for measures with >= d distinct support points),
/// weights 1/K(node, node), and the generalized eigenvectors column-wise.
struct QuadratureRule {
    BasisSpec spec;
    std::vector<double> nodes;
    std::vector<double> weights;
    Eigen::MatrixXd eigvecs;
};

/// Nodes as possible outcomes with normalized weights as probabilities.
struct OutcomeDistribution {
    std::vector<double> nodes;
    std::vector<double> probabilities;
    double total_mass = 0.0;
};

/// Solves ygram*psi = y*gram*psi by reducing through the triangular factor of
/// `state` to a standard symmetric eigenproblem. Eigenvalues (canonical
/// coordinate) are mapped back through the inverse domain map; weights come
/// from the Christoffel function at the nodes. Eigenvector signs are fixed by
/// a nonnegative Q_0 component.
QuadratureRule gauss_rule(const GramMatrix& gram,
                          const GramMatrix& ygram,
                          const KernelState& state);

OutcomeDistribution normalize(const QuadratureRule& rule);

/// sum_i probabilities[i] * nodes[i]; matches the weighted sample mean of the
/// underlying measure.
double rule_mean(const OutcomeDistribution& dist);

}  // namespace distreg
