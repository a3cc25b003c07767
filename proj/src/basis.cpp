#include "distreg/basis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <tuple>

#include "distreg/errors.hpp"

namespace distreg {

std::string_view family_name(BasisFamily family) {
    switch (family) {
        case BasisFamily::Chebyshev: return "chebyshev";
        case BasisFamily::Legendre: return "legendre";
        case BasisFamily::Hermite: return "hermite";
        case BasisFamily::Laguerre: return "laguerre";
    }
    throw ValidationError("unknown basis family");
}

BasisFamily family_from_name(std::string_view name) {
    if (name == "chebyshev") return BasisFamily::Chebyshev;
    if (name == "legendre") return BasisFamily::Legendre;
    if (name == "hermite") return BasisFamily::Hermite;
    if (name == "laguerre") return BasisFamily::Laguerre;
    throw ValidationError("unknown basis family '" + std::string(name) +
                          "' (expected chebyshev|legendre|hermite|laguerre)");
}

Recurrence recurrence(BasisFamily family, int k) {
    if (k < 0) throw ValidationError("recurrence index must be nonnegative");
    const double kd = static_cast<double>(k);
    switch (family) {
        case BasisFamily::Chebyshev:
            return k == 0 ? Recurrence{1.0, 0.0, 0.0} : Recurrence{0.5, 0.0, 0.5};
        case BasisFamily::Legendre:
            return Recurrence{(kd + 1.0) / (2.0 * kd + 1.0), 0.0, kd / (2.0 * kd + 1.0)};
        case BasisFamily::Hermite:  // probabilists' convention, He_1(u) = u
            return Recurrence{1.0, 0.0, kd};
        case BasisFamily::Laguerre:
            return Recurrence{-(kd + 1.0), 2.0 * kd + 1.0, -kd};
    }
    throw ValidationError("unknown basis family");
}

namespace detail {

std::vector<RecurrenceExt> recurrence_table(BasisFamily family, int count) {
    std::vector<RecurrenceExt> table;
    table.reserve(static_cast<std::size_t>(std::max(count, 0)));
    for (int k = 0; k < count; ++k) {
        const accum_real kx = static_cast<accum_real>(k);
        switch (family) {
            case BasisFamily::Chebyshev:
                table.push_back(k == 0 ? RecurrenceExt{1.0, 0.0, 0.0}
                                       : RecurrenceExt{2.0, 0.0, 0.5});
                break;
            case BasisFamily::Legendre:
                table.push_back({(2.0 * kx + 1.0) / (kx + 1.0), 0.0, kx / (2.0 * kx + 1.0)});
                break;
            case BasisFamily::Hermite:
                table.push_back({1.0, 0.0, kx});
                break;
            case BasisFamily::Laguerre:
                table.push_back({accum_real(-1.0) / (kx + 1.0), 2.0 * kx + 1.0, -kx});
                break;
        }
    }
    return table;
}

std::vector<accum_real> basis_values_ext(BasisFamily family, const DomainMap& map,
                                         double t, int count) {
    std::vector<accum_real> q(static_cast<std::size_t>(count));
    const accum_real u = static_cast<accum_real>(map.to_canonical(t));
    q[0] = accum_real(1);
    if (count == 1) return q;
    const auto table = recurrence_table(family, count);
    q[1] = (u - table[0].beta) * table[0].inv_alpha;
    for (int k = 1; k + 1 < count; ++k) {
        const auto& rc = table[static_cast<std::size_t>(k)];
        q[static_cast<std::size_t>(k) + 1] =
            ((u - rc.beta) * q[static_cast<std::size_t>(k)] -
             rc.gamma * q[static_cast<std::size_t>(k) - 1]) *
            rc.inv_alpha;
    }
    return q;
}

std::vector<accum_real> multiply_by_argument_ext(BasisFamily family,
                                                 std::span<const accum_real> coeffs) {
    std::vector<accum_real> out(coeffs.size() + 1, accum_real(0));
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        const Recurrence rc = recurrence(family, static_cast<int>(k));
        const accum_real a = coeffs[k];
        out[k + 1] += a * static_cast<accum_real>(rc.alpha);
        out[k] += a * static_cast<accum_real>(rc.beta);
        if (k > 0) out[k - 1] += a * static_cast<accum_real>(rc.gamma);
    }
    return out;
}

namespace {

std::vector<accum_real> linearize_uncached(BasisFamily family, int q, int r) {
    // Walk Q_j*Q_r up in j through the recurrence applied to the coefficient
    // vector of Q_r:  Q_{j+1}*Q_r = ((u - beta_j)*(Q_j*Q_r) - gamma_j*(Q_{j-1}*Q_r)) / alpha_j.
    std::vector<accum_real> prev;
    std::vector<accum_real> cur(static_cast<std::size_t>(r) + 1, accum_real(0));
    cur[static_cast<std::size_t>(r)] = accum_real(1);
    for (int j = 0; j < q; ++j) {
        const Recurrence rc = recurrence(family, j);
        std::vector<accum_real> next = multiply_by_argument_ext(family, cur);
        const accum_real beta = static_cast<accum_real>(rc.beta);
        const accum_real gamma = static_cast<accum_real>(rc.gamma);
        const accum_real inv_alpha = accum_real(1) / static_cast<accum_real>(rc.alpha);
        for (std::size_t i = 0; i < cur.size(); ++i) next[i] -= beta * cur[i];
        for (std::size_t i = 0; i < prev.size(); ++i) next[i] -= gamma * prev[i];
        for (auto& v : next) v *= inv_alpha;
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

}  // namespace

const std::vector<accum_real>& linearize_product_ext(BasisFamily family, int q, int r) {
    if (q < 0 || r < 0) throw ValidationError("linearize_product: indices must be nonnegative");
    if (q > r) std::swap(q, r);  // Q_q*Q_r is symmetric
    using Key = std::tuple<int, int, int>;
    static std::map<Key, std::vector<accum_real>> cache;
    static std::shared_mutex mutex;
    const Key key{static_cast<int>(family), q, r};
    {
        std::shared_lock lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    std::vector<accum_real> coeffs = linearize_uncached(family, q, r);
    std::unique_lock lock(mutex);
    return cache.try_emplace(key, std::move(coeffs)).first->second;
}

}  // namespace detail

DomainMap domain_map_from_data(std::span<const double> samples, BasisFamily family) {
    if (samples.empty()) throw ValidationError("domain_map_from_data: empty sample list");
    const auto [min_it, max_it] = std::minmax_element(samples.begin(), samples.end());
    const double lo = *min_it;
    const double hi = *max_it;
    switch (family) {
        case BasisFamily::Chebyshev:
        case BasisFamily::Legendre: {
            const double pad = hi > lo ? 1e-6 * (hi - lo) : 1.0;
            const double a = lo - pad;
            const double b = hi + pad;
            const double scale = 2.0 / (b - a);
            return DomainMap{scale, -0.5 * (a + b) * scale};
        }
        case BasisFamily::Hermite: {
            const double n = static_cast<double>(samples.size());
            double mean = 0.0;
            for (double v : samples) mean += v;
            mean /= n;
            double var = 0.0;
            for (double v : samples) var += (v - mean) * (v - mean);
            const double sd = std::sqrt(var / n);
            const double scale = sd > 0.0 ? 1.0 / sd : 1.0;
            return DomainMap{scale, -mean * scale};
        }
        case BasisFamily::Laguerre: {
            const double n = static_cast<double>(samples.size());
            double dev = 0.0;
            for (double v : samples) dev += v - lo;
            dev /= n;
            const double scale = dev > 0.0 ? 1.0 / dev : 1.0;
            return DomainMap{scale, -lo * scale};
        }
    }
    throw ValidationError("unknown basis family");
}

void eval_basis(const BasisSpec& spec, double t, std::span<double> out) {
    const int d = spec.degree;
    if (d < 1) throw ValidationError("eval_basis: degree must be at least 1");
    if (static_cast<int>(out.size()) != d)
        throw ValidationError("eval_basis: output span size must equal the degree");
    const double u = spec.map.to_canonical(t);
    out[0] = 1.0;
    if (d == 1) return;
    const Recurrence r0 = recurrence(spec.family, 0);
    out[1] = (u - r0.beta) / r0.alpha;
    for (int k = 1; k + 1 < d; ++k) {
        const Recurrence rc = recurrence(spec.family, k);
        out[k + 1] = ((u - rc.beta) * out[k] - rc.gamma * out[k - 1]) / rc.alpha;
    }
}

std::vector<double> eval_basis(const BasisSpec& spec, double t) {
    std::vector<double> out(static_cast<std::size_t>(std::max(spec.degree, 0)));
    eval_basis(spec, t, out);
    return out;
}

std::vector<double> linearize_product(const BasisSpec& spec, int q, int r) {
    const auto& ext = detail::linearize_product_ext(spec.family, q, r);
    std::vector<double> out(ext.size());
    std::transform(ext.begin(), ext.end(), out.begin(),
                   [](accum_real v) { return static_cast<double>(v); });
    return out;
}

std::vector<double> multiply_by_argument(const BasisSpec& spec,
                                         std::span<const double> coeffs) {
    std::vector<double> out(coeffs.size() + 1, 0.0);
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        const Recurrence rc = recurrence(spec.family, static_cast<int>(k));
        out[k + 1] += coeffs[k] * rc.alpha;
        out[k] += coeffs[k] * rc.beta;
        if (k > 0) out[k - 1] += coeffs[k] * rc.gamma;
    }
    return out;
}

}  // namespace distreg
