#pragma once

#include <optional>
#include <string>
#include <vector>

#include "distreg/quadrature.hpp"

namespace distreg {

/// One bag: N raw x-observations sharing a single outcome y.
struct Bag {
    std::string id;
    std::vector<double> xs;
    double y = 0.0;

    bool operator==(const Bag&) const = default;
};

/// M bags plus the basis specs for the x stage (degree d_x) and the y stage
/// (degree d_y). Domain maps cover the pooled x-observations and the outcomes.
struct Dataset {
    std::vector<Bag> bags;
    BasisSpec x_spec;
    BasisSpec y_spec;
};

/// Builds a Dataset from bags: fits both domain maps from the data via
/// domain_map_from_data. Degrees are capped at 64.
Dataset make_dataset(std::vector<Bag> bags, BasisFamily family, int dx, int dy);

/// Hard invariants (M >= d_y, every bag N >= d_x); throws ValidationError.
void validate_dataset(const Dataset& ds);

/// Non-fatal findings: overfit ratios d_x/N, d_y/M above 0.2 and degrees past
/// the intended operating range.
std::vector<std::string> dataset_warnings(const Dataset& ds);

/// Per-bag x-space Christoffel evaluator. The kernel state is built on a
/// support-matched copy of x_spec: same family and degree, domain map refit
/// to the bag's own observations. The bag Christoffel function is invariant
/// under that remap, and the bag Gram stays well conditioned even when the
/// bag occupies a narrow slice of the pooled x range.
struct BagEvaluator {
    std::string bag_id;
    KernelState state;
};

/// Moments to order 2*d_x-1, Gram via gram_from_moments, factorize.
/// Throws InsufficientRank (carrying the bag id) when the bag has fewer than
/// d_x distinct x-values.
BagEvaluator bag_evaluator(const Bag& bag, const BasisSpec& x_spec,
                           std::optional<double> ridge = {});

/// lambda^(l)(x): the bag's Christoffel value at x. Strictly positive, decays
/// polynomially outside the bag's support.
double bag_weight(const BagEvaluator& ev, double x);

/// The x-conditional (or unconditional, weights all 1) model over outcomes:
/// per-bag weights, weighted y-moments to order 2*d_y-1, the weighted Gram,
/// and its factorization.
struct ConditionalModel {
    double x;  // NaN for the unconditional model
    std::vector<double> weights;
    MomentVector moments;
    GramMatrix gram;
    KernelState state;
};

/// lambda(y|x) for a built model: the Christoffel value of the weighted
/// outcome measure at y.
double conditional_lambda(const ConditionalModel& model, double y);

/// Gauss rule of the model's weighted outcome measure (nodes = possible
/// outcomes, weights = lambda(node|x)).
QuadratureRule outcome_rule(const ConditionalModel& model);

/// The two-step model. Per-bag evaluators are built once at construction and
/// reused across queries; all query methods are const and safe to call
/// concurrently.
class TwoStepModel {
public:
    explicit TwoStepModel(Dataset ds, std::optional<double> ridge = {});

    const Dataset& dataset() const noexcept { return ds_; }
    const std::vector<BagEvaluator>& evaluators() const noexcept { return evaluators_; }
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

    /// lambda^(l)(x) for every bag, input order.
    std::vector<double> bag_weights(double x) const;

    ConditionalModel conditional(double x) const;
    ConditionalModel unconditional() const;

    /// The Eq.-(8)..(10) pipeline for explicitly supplied bag weights;
    /// `x_tag` is recorded on the model unchanged.
    ConditionalModel weighted_model(std::vector<double> weights, double x_tag) const;

    /// conditional(x) -> gauss rule -> normalized probabilities.
    OutcomeDistribution outcomes(double x) const;

private:
    Dataset ds_;
    std::optional<double> ridge_;
    std::vector<BagEvaluator> evaluators_;
    std::vector<std::string> warnings_;
};

// One-shot conveniences; each builds a TwoStepModel internally.
ConditionalModel conditional_model(const Dataset& ds, double x,
                                   std::optional<double> ridge = {});
OutcomeDistribution conditional_outcomes(const Dataset& ds, double x,
                                         std::optional<double> ridge = {});
ConditionalModel unconditional_model(const Dataset& ds,
                                     std::optional<double> ridge = {});

}  // namespace distreg
