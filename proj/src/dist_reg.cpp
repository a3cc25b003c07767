#include "distreg/dist_reg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "distreg/errors.hpp"

namespace distreg {

namespace {

constexpr int kDegreeCap = 15;  // paper guidance; hard cap enforced at 64

std::vector<double> outcomes_of(const Dataset& ds) {
    std::vector<double> ys;
    ys.reserve(ds.bags.size());
    for (const Bag& bag : ds.bags) ys.push_back(bag.y);
    return ys;
}

}  // namespace

Dataset make_dataset(std::vector<Bag> bags, BasisFamily family, int dx, int dy) {
    if (bags.empty()) throw ValidationError("make_dataset: dataset has no bags");
    if (dx < 1 || dx > 64 || dy < 1 || dy > 64)
        throw ValidationError("make_dataset: degrees must lie in [1, 64]");
    std::vector<double> pooled_x;
    std::vector<double> ys;
    ys.reserve(bags.size());
    for (const Bag& bag : bags) {
        if (bag.xs.empty())
            throw ValidationError("make_dataset: bag '" + bag.id + "' has no observations");
        pooled_x.insert(pooled_x.end(), bag.xs.begin(), bag.xs.end());
        ys.push_back(bag.y);
    }
    Dataset ds;
    ds.x_spec = BasisSpec{family, dx, domain_map_from_data(pooled_x, family)};
    ds.y_spec = BasisSpec{family, dy, domain_map_from_data(ys, family)};
    ds.bags = std::move(bags);
    return ds;
}

void validate_dataset(const Dataset& ds) {
    if (ds.bags.empty()) throw ValidationError("dataset has no bags");
    const int dx = ds.x_spec.degree;
    const int dy = ds.y_spec.degree;
    if (dx < 1 || dy < 1) throw ValidationError("basis degrees must be at least 1");
    for (const Bag& bag : ds.bags) {
        if (static_cast<int>(bag.xs.size()) < dx)
            throw ValidationError("bag '" + bag.id + "' has " +
                                  std::to_string(bag.xs.size()) +
                                  " observations, below d_x = " + std::to_string(dx));
    }
    if (static_cast<int>(ds.bags.size()) < dy)
        throw ValidationError("dataset has " + std::to_string(ds.bags.size()) +
                              " bags, below d_y = " + std::to_string(dy));
}

std::vector<std::string> dataset_warnings(const Dataset& ds) {
    std::vector<std::string> warnings;
    const int dx = ds.x_spec.degree;
    const int dy = ds.y_spec.degree;
    std::size_t min_n = std::numeric_limits<std::size_t>::max();
    for (const Bag& bag : ds.bags) min_n = std::min(min_n, bag.xs.size());
    const double m = static_cast<double>(ds.bags.size());
    const double first_stage = dx / static_cast<double>(min_n);
    const double second_stage = dy / m;
    if (first_stage > 0.2)
        warnings.push_back("overfit risk: d_x/N = " + std::to_string(first_stage) +
                           " exceeds 0.2 for the smallest bag");
    if (second_stage > 0.2)
        warnings.push_back("overfit risk: d_y/M = " + std::to_string(second_stage) +
                           " exceeds 0.2");
    if (dx > kDegreeCap || dy > kDegreeCap)
        warnings.push_back("degree above " + std::to_string(kDegreeCap) +
                           " is outside the intended operating range");
    return warnings;
}

BagEvaluator bag_evaluator(const Bag& bag, const BasisSpec& x_spec,
                           std::optional<double> ridge) {
    if (bag.xs.empty())
        throw ValidationError("bag_evaluator: bag '" + bag.id + "' has no observations");
    BasisSpec local = x_spec;
    local.map = domain_map_from_data(bag.xs, x_spec.family);
    const MomentVector moments = accumulate_moments(local, bag.xs, 2 * local.degree - 1);
    GramMatrix gram = gram_from_moments(local, moments);
    try {
        return BagEvaluator{bag.id, factorize(gram, ridge)};
    } catch (const NotPositiveDefinite&) {
        throw InsufficientRank(bag.id, "bag '" + bag.id + "' has fewer than " +
                                           std::to_string(local.degree) +
                                           " distinct x-values");
    }
}

double bag_weight(const BagEvaluator& ev, double x) {
    return christoffel(ev.state, x);
}

double conditional_lambda(const ConditionalModel& model, double y) {
    return christoffel(model.state, y);
}

QuadratureRule outcome_rule(const ConditionalModel& model) {
    const GramMatrix ygram = ygram_from_moments(model.gram.spec, model.moments);
    return gauss_rule(model.gram, ygram, model.state);
}

TwoStepModel::TwoStepModel(Dataset ds, std::optional<double> ridge)
    : ds_(std::move(ds)), ridge_(ridge) {
    validate_dataset(ds_);
    warnings_ = dataset_warnings(ds_);
    evaluators_.reserve(ds_.bags.size());
    for (const Bag& bag : ds_.bags) evaluators_.push_back(bag_evaluator(bag, ds_.x_spec, ridge_));
}

std::vector<double> TwoStepModel::bag_weights(double x) const {
    std::vector<double> weights;
    weights.reserve(evaluators_.size());
    for (const BagEvaluator& ev : evaluators_) weights.push_back(bag_weight(ev, x));
    return weights;
}

ConditionalModel TwoStepModel::weighted_model(std::vector<double> weights, double x_tag) const {
    if (weights.size() != ds_.bags.size())
        throw ValidationError("weighted_model: one weight per bag required");
    const std::vector<double> ys = outcomes_of(ds_);
    MomentVector moments =
        accumulate_moments(ds_.y_spec, ys, weights, 2 * ds_.y_spec.degree - 1);
    GramMatrix gram = gram_from_moments(ds_.y_spec, moments);
    try {
        KernelState state = factorize(gram, ridge_);
        return ConditionalModel{x_tag, std::move(weights), std::move(moments),
                                std::move(gram), std::move(state)};
    } catch (const NotPositiveDefinite& e) {
        throw SingularConditionalGram(std::string("weighted outcome Gram: ") + e.what());
    }
}

ConditionalModel TwoStepModel::conditional(double x) const {
    return weighted_model(bag_weights(x), x);
}

ConditionalModel TwoStepModel::unconditional() const {
    return weighted_model(std::vector<double>(ds_.bags.size(), 1.0),
                          std::numeric_limits<double>::quiet_NaN());
}

OutcomeDistribution TwoStepModel::outcomes(double x) const {
    return normalize(outcome_rule(conditional(x)));
}

ConditionalModel conditional_model(const Dataset& ds, double x, std::optional<double> ridge) {
    return TwoStepModel(ds, ridge).conditional(x);
}

OutcomeDistribution conditional_outcomes(const Dataset& ds, double x,
                                         std::optional<double> ridge) {
    return TwoStepModel(ds, ridge).outcomes(x);
}

ConditionalModel unconditional_model(const Dataset& ds, std::optional<double> ridge) {
    return TwoStepModel(ds, ridge).unconditional();
}

}  // namespace distreg
