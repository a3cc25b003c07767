#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numeric>
#include <vector>

#include "distreg/dist_reg.hpp"
#include "distreg/errors.hpp"
#include "distreg/synth.hpp"
#include "test_util.hpp"

using namespace distreg;
using testutil::rel_err;
using testutil::uniform;
using testutil::uniform_vec;

namespace {

// Three bags with outcomes {-1, 0, 1}; d_x = 1 forces every bag weight to 1,
// so the conditional model reduces to the unconditional {-1, 0, 1} measure.
// Specs use identity maps so the closed-form values apply exactly.
Dataset reduced_three_point() {
    Dataset ds;
    ds.bags = {{"a", {0.3}, -1.0}, {"b", {-0.2}, 0.0}, {"c", {0.9}, 1.0}};
    ds.x_spec = BasisSpec{BasisFamily::Chebyshev, 1, {}};
    ds.y_spec = BasisSpec{BasisFamily::Chebyshev, 2, {}};
    return ds;
}

Dataset synth_dataset(int M, int N, double R, std::uint64_t seed, int dx, int dy) {
    return make_dataset(generate({M, N, R, seed}), BasisFamily::Chebyshev, dx, dy);
}

}  // namespace

TEST_CASE("bag_evaluator: identical points and d_x = 1 give lambda = N") {
    const Bag bag{"flat", {2.5, 2.5, 2.5, 2.5}, 0.0};
    const BagEvaluator ev = bag_evaluator(bag, BasisSpec{BasisFamily::Chebyshev, 1, {}});
    CHECK(ev.bag_id == "flat");
    for (double x : {-3.0, 0.0, 2.5, 10.0})
        CHECK(bag_weight(ev, x) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("bag_evaluator: the {-1, 0, 1} bag reproduces the closed form") {
    const Bag bag{"tri", {-1.0, 0.0, 1.0}, 0.0};
    const BagEvaluator ev = bag_evaluator(bag, BasisSpec{BasisFamily::Chebyshev, 2, {}});
    CHECK(bag_weight(ev, 0.0) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(bag_weight(ev, 1.0) == doctest::Approx(1.2).epsilon(1e-12));
}

TEST_CASE("bag_evaluator: rank below degree raises InsufficientRank with the id") {
    const Bag bag{"thin", {0.0, 1.0, 2.0, 1.0, 0.0}, 0.0};
    try {
        bag_evaluator(bag, BasisSpec{BasisFamily::Chebyshev, 4, {}});
        FAIL("expected InsufficientRank");
    } catch (const InsufficientRank& e) {
        CHECK(e.bag_id == "thin");
    }
}

TEST_CASE("bag weights decay away from the support") {
    SplitMix64 rng(431);
    const Bag bag{"far", uniform_vec(rng, 60, -0.2, 0.2), 0.0};
    const BagEvaluator ev = bag_evaluator(bag, BasisSpec{BasisFamily::Chebyshev, 4, {}});
    const double inside = bag_weight(ev, 0.0);
    for (double x : {1.5, -2.0, 4.0}) {
        const double outside = bag_weight(ev, x);
        CHECK(outside > 0.0);
        CHECK(outside < inside);
    }
}

TEST_CASE("conditional model of the reduced dataset matches the closed form") {
    const TwoStepModel model(reduced_three_point());
    const ConditionalModel cond = model.conditional(0.4);
    REQUIRE(cond.weights.size() == 3);
    for (double w : cond.weights) CHECK(w == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cond.gram.entries(0, 0) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(cond.gram.entries(0, 1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(cond.gram.entries(1, 1) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(conditional_lambda(cond, 0.0) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(conditional_lambda(cond, 1.0) == doctest::Approx(1.2).epsilon(1e-12));
}

TEST_CASE("constant-weight reduction: lambda(y|x) = N * lambda(y)") {
    SplitMix64 rng(432);
    std::vector<Bag> bags;
    const int N = 7;
    for (int l = 0; l < 40; ++l) {
        Bag bag;
        bag.id = "b" + std::to_string(l);
        bag.y = uniform(rng, -1.0, 1.0);
        bag.xs = uniform_vec(rng, N, -1.0, 1.0);
        bags.push_back(bag);
    }
    const Dataset ds = make_dataset(std::move(bags), BasisFamily::Chebyshev, 1, 5);
    const TwoStepModel model(ds);
    const ConditionalModel cond = model.conditional(0.3);
    const ConditionalModel uncond = model.unconditional();
    for (int i = 0; i < 30; ++i) {
        const double y = uniform(rng, -1.0, 1.0);
        CHECK(rel_err(conditional_lambda(cond, y), N * conditional_lambda(uncond, y)) < 1e-8);
    }
}

TEST_CASE("conditional mass identity at random probes") {
    const Dataset ds = synth_dataset(120, 40, 0.5, 99, 4, 4);
    const TwoStepModel model(ds);
    SplitMix64 rng(433);
    for (int i = 0; i < 5; ++i) {
        const double x = uniform(rng, -1.0, 1.0);
        const ConditionalModel cond = model.conditional(x);
        const QuadratureRule rule = outcome_rule(cond);
        const double lhs = std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0);
        const double rhs = std::accumulate(cond.weights.begin(), cond.weights.end(), 0.0);
        CHECK(rel_err(lhs, rhs) < 1e-8);
    }
}

TEST_CASE("weight scaling leaves nodes and probabilities fixed, scales lambda") {
    const Dataset ds = synth_dataset(80, 30, 0.4, 7, 3, 4);
    const TwoStepModel model(ds);
    const double x = 0.25;
    const std::vector<double> base = model.bag_weights(x);
    const ConditionalModel ref = model.weighted_model(base, x);
    const OutcomeDistribution ref_dist = normalize(outcome_rule(ref));
    for (double c : {1e-3, 1e3}) {
        std::vector<double> scaled = base;
        for (double& w : scaled) w *= c;
        const ConditionalModel mod = model.weighted_model(scaled, x);
        const OutcomeDistribution dist = normalize(outcome_rule(mod));
        for (std::size_t i = 0; i < dist.nodes.size(); ++i) {
            CHECK(rel_err(dist.nodes[i], ref_dist.nodes[i]) < 1e-9);
            CHECK(rel_err(dist.probabilities[i], ref_dist.probabilities[i]) < 1e-9);
        }
        for (double y : {-0.6, 0.0, 0.7})
            CHECK(rel_err(conditional_lambda(mod, y), c * conditional_lambda(ref, y)) < 1e-9);
    }
}

TEST_CASE("conditional gram equals the direct weighted double sum") {
    const Dataset ds = synth_dataset(60, 25, 0.5, 3, 3, 5);
    const TwoStepModel model(ds);
    const ConditionalModel cond = model.conditional(-0.2);
    Eigen::MatrixXd direct = Eigen::MatrixXd::Zero(5, 5);
    for (std::size_t l = 0; l < ds.bags.size(); ++l) {
        const auto q = eval_basis(ds.y_spec, ds.bags[l].y);
        for (int s = 0; s < 5; ++s)
            for (int t = 0; t < 5; ++t)
                direct(s, t) += cond.weights[l] * q[static_cast<std::size_t>(s)] *
                                q[static_cast<std::size_t>(t)];
    }
    const double gap = (cond.gram.entries - direct).cwiseAbs().maxCoeff() /
                       direct.cwiseAbs().maxCoeff();
    CHECK(gap < 1e-10);
}

TEST_CASE("two model builds produce bit-identical outputs") {
    const Dataset ds = synth_dataset(50, 20, 0.3, 17, 3, 4);
    const TwoStepModel a(ds);
    const TwoStepModel b(ds);
    for (double x : {-0.4, 0.1, 0.8}) {
        const OutcomeDistribution da = a.outcomes(x);
        const OutcomeDistribution db = b.outcomes(x);
        REQUIRE(da.nodes.size() == db.nodes.size());
        CHECK(std::memcmp(da.nodes.data(), db.nodes.data(),
                          da.nodes.size() * sizeof(double)) == 0);
        CHECK(std::memcmp(da.probabilities.data(), db.probabilities.data(),
                          da.probabilities.size() * sizeof(double)) == 0);
        CHECK(da.total_mass == db.total_mass);
    }
}

TEST_CASE("unconditional model: spec examples") {
    {
        const TwoStepModel model(reduced_three_point());
        const ConditionalModel uncond = model.unconditional();
        CHECK(conditional_lambda(uncond, 0.0) == doctest::Approx(3.0).epsilon(1e-12));
    }
    {
        const Dataset ds = synth_dataset(12, 5, 0.2, 5, 2, 1);
        const ConditionalModel uncond = unconditional_model(ds);
        for (double y : {-0.5, 0.0, 0.9})
            CHECK(conditional_lambda(uncond, y) == doctest::Approx(12.0).epsilon(1e-12));
    }
    {
        const Dataset ds = synth_dataset(500, 4, 0.3, 11, 2, 8);
        const QuadratureRule rule = outcome_rule(unconditional_model(ds));
        const double mass = std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0);
        CHECK(rel_err(mass, 500.0) < 1e-6);
    }
}

TEST_CASE("validation: degree bounds against bag sizes and bag count") {
    {
        const Dataset ds = synth_dataset(20, 3, 0.3, 2, 4, 2);  // d_x > N
        CHECK_THROWS_AS(TwoStepModel{ds}, ValidationError);
    }
    {
        const Dataset ds = synth_dataset(3, 20, 0.3, 2, 2, 4);  // d_y > M
        CHECK_THROWS_AS(TwoStepModel{ds}, ValidationError);
    }
    CHECK_THROWS_AS(make_dataset({}, BasisFamily::Chebyshev, 2, 2), ValidationError);
    CHECK_THROWS_AS(synth_dataset(10, 10, 0.1, 1, 0, 2), ValidationError);
    CHECK_THROWS_AS(synth_dataset(10, 10, 0.1, 1, 2, 65), ValidationError);
}

TEST_CASE("overfit warnings appear above the 0.2 thresholds") {
    const Dataset hot = synth_dataset(30, 6, 0.4, 21, 3, 3);  // d_x/N = 0.5
    const TwoStepModel model(hot);
    bool found = false;
    for (const auto& w : model.warnings()) found = found || w.find("d_x/N") != std::string::npos;
    CHECK(found);

    const Dataset cool = synth_dataset(100, 40, 0.4, 21, 3, 3);
    CHECK(TwoStepModel(cool).warnings().empty());
}

TEST_CASE("collapsed outcomes raise SingularConditionalGram") {
    Dataset ds;
    ds.bags = {{"a", {0.1}, 0.5}, {"b", {0.3}, 0.5}, {"c", {-0.2}, 0.5}};
    ds.x_spec = BasisSpec{BasisFamily::Chebyshev, 1, {}};
    ds.y_spec = BasisSpec{BasisFamily::Chebyshev, 2,
                          domain_map_from_data(std::vector<double>{0.5, 0.5, 0.5},
                                               BasisFamily::Chebyshev)};
    CHECK_THROWS_AS(unconditional_model(ds), SingularConditionalGram);
}

TEST_CASE("rank-deficient bags fail fast at model build") {
    Dataset ds;
    ds.bags = {{"good", {-1.0, -0.5, 0.0, 0.5, 1.0}, 0.1},
               {"bad", {0.2, 0.2, 0.2, 0.2, 0.2}, -0.3},
               {"alsogood", {-0.9, -0.2, 0.3, 0.6, 0.95}, 0.7}};
    ds.x_spec = BasisSpec{BasisFamily::Chebyshev, 3, {}};
    ds.y_spec = BasisSpec{BasisFamily::Chebyshev, 2, {}};
    try {
        TwoStepModel model(ds);
        FAIL("expected InsufficientRank");
    } catch (const InsufficientRank& e) {
        CHECK(e.bag_id == "bad");
    }
}

TEST_CASE("one-shot helpers agree with the model methods") {
    const Dataset ds = synth_dataset(40, 15, 0.4, 13, 3, 3);
    const TwoStepModel model(ds);
    const double x = 0.15;
    const ConditionalModel a = conditional_model(ds, x);
    const ConditionalModel b = model.conditional(x);
    for (double y : {-0.3, 0.2})
        CHECK(conditional_lambda(a, y) == conditional_lambda(b, y));
    const OutcomeDistribution da = conditional_outcomes(ds, x);
    const OutcomeDistribution db = model.outcomes(x);
    CHECK(da.total_mass == db.total_mass);
}
