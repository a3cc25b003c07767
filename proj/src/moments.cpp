#include "distreg/moments.hpp"

#include <utility>

#include "distreg/errors.hpp"

namespace distreg {

MomentVector::MomentVector(BasisSpec spec, std::vector<accum_real> values)
    : spec_(spec), values_(std::move(values)) {
    if (values_.empty()) throw ValidationError("MomentVector: order must be nonnegative");
}

double MomentVector::value(int k) const {
    if (k < 0 || k > order()) throw ValidationError("MomentVector: index out of range");
    return static_cast<double>(values_[static_cast<std::size_t>(k)]);
}

std::vector<double> MomentVector::values() const {
    std::vector<double> out(values_.size());
    for (std::size_t k = 0; k < values_.size(); ++k) out[k] = static_cast<double>(values_[k]);
    return out;
}

MomentVector accumulate_moments(const BasisSpec& spec,
                                std::span<const double> points,
                                std::span<const double> weights,
                                int order) {
    if (order < 0) throw ValidationError("accumulate_moments: order must be nonnegative");
    if (!weights.empty() && weights.size() != points.size())
        throw ValidationError("accumulate_moments: points and weights differ in length");
    for (double w : weights)
        if (!(w >= 0.0)) throw ValidationError("accumulate_moments: negative weight");

    const int count = order + 1;
    const auto table = detail::recurrence_table(spec.family, count);
    std::vector<accum_real> acc(static_cast<std::size_t>(count), accum_real(0));
    std::vector<accum_real> q(static_cast<std::size_t>(count));
    for (std::size_t j = 0; j < points.size(); ++j) {
        const accum_real u = static_cast<accum_real>(spec.map.to_canonical(points[j]));
        q[0] = accum_real(1);
        if (count > 1) q[1] = (u - table[0].beta) * table[0].inv_alpha;
        for (int k = 1; k + 1 < count; ++k) {
            const auto& rc = table[static_cast<std::size_t>(k)];
            q[static_cast<std::size_t>(k) + 1] =
                ((u - rc.beta) * q[static_cast<std::size_t>(k)] -
                 rc.gamma * q[static_cast<std::size_t>(k) - 1]) *
                rc.inv_alpha;
        }
        const accum_real w =
            weights.empty() ? accum_real(1) : static_cast<accum_real>(weights[j]);
        for (int k = 0; k < count; ++k)
            acc[static_cast<std::size_t>(k)] += w * q[static_cast<std::size_t>(k)];
    }
    return MomentVector(spec, std::move(acc));
}

MomentVector accumulate_moments(const BasisSpec& spec,
                                std::span<const double> points,
                                int order) {
    return accumulate_moments(spec, points, {}, order);
}

GramMatrix gram_from_moments(const BasisSpec& spec, const MomentVector& moments) {
    const int d = spec.degree;
    if (d < 1) throw ValidationError("gram_from_moments: degree must be at least 1");
    if (moments.order() < 2 * d - 2)
        throw ValidationError("gram_from_moments: moment order " +
                              std::to_string(moments.order()) + " is below 2d-2 = " +
                              std::to_string(2 * d - 2));
    const auto raw = moments.raw();
    Eigen::MatrixXd entries(d, d);
    std::vector<accum_real> ext(static_cast<std::size_t>(d) * d);
    for (int s = 0; s < d; ++s) {
        for (int t = s; t < d; ++t) {
            const auto& c = detail::linearize_product_ext(spec.family, s, t);
            accum_real sum = 0;
            for (std::size_t k = 0; k < c.size(); ++k) sum += c[k] * raw[k];
            ext[static_cast<std::size_t>(s) * d + t] = ext[static_cast<std::size_t>(t) * d + s] = sum;
            entries(s, t) = entries(t, s) = static_cast<double>(sum);
        }
    }
    return GramMatrix{spec, std::move(entries), std::move(ext)};
}

GramMatrix ygram_from_moments(const BasisSpec& spec, const MomentVector& moments) {
    const int d = spec.degree;
    if (d < 1) throw ValidationError("ygram_from_moments: degree must be at least 1");
    if (moments.order() < 2 * d - 1)
        throw ValidationError("ygram_from_moments: moment order " +
                              std::to_string(moments.order()) + " is below 2d-1 = " +
                              std::to_string(2 * d - 1));
    const auto raw = moments.raw();
    Eigen::MatrixXd entries(d, d);
    std::vector<accum_real> ext(static_cast<std::size_t>(d) * d);
    for (int s = 0; s < d; ++s) {
        for (int t = s; t < d; ++t) {
            const auto& c = detail::linearize_product_ext(spec.family, s, t);
            const auto cu = detail::multiply_by_argument_ext(spec.family, c);
            accum_real sum = 0;
            for (std::size_t k = 0; k < cu.size(); ++k) sum += cu[k] * raw[k];
            ext[static_cast<std::size_t>(s) * d + t] = ext[static_cast<std::size_t>(t) * d + s] = sum;
            entries(s, t) = entries(t, s) = static_cast<double>(sum);
        }
    }
    return GramMatrix{spec, std::move(entries), std::move(ext)};
}

GramMatrix gram_direct(const BasisSpec& spec,
                       std::span<const double> points,
                       std::span<const double> weights) {
    if (!weights.empty() && weights.size() != points.size())
        throw ValidationError("gram_direct: points and weights differ in length");
    const int d = spec.degree;
    Eigen::MatrixXd entries = Eigen::MatrixXd::Zero(d, d);
    std::vector<double> q(static_cast<std::size_t>(d));
    for (std::size_t j = 0; j < points.size(); ++j) {
        eval_basis(spec, points[j], q);
        const double w = weights.empty() ? 1.0 : weights[j];
        for (int s = 0; s < d; ++s)
            for (int t = s; t < d; ++t)
                entries(s, t) += w * q[static_cast<std::size_t>(s)] * q[static_cast<std::size_t>(t)];
    }
    entries = entries.selfadjointView<Eigen::Upper>();
    return GramMatrix{spec, std::move(entries)};
}

}  // namespace distreg
