#pragma once

#include <cstdint>
#include <vector>

#include "distreg/dist_reg.hpp"

namespace distreg {

/// Synthetic benchmark: y uniform on [-1, 1], each bag holds N draws of
/// x = y + R*eps with eps uniform on [-1, 1].
struct SynthConfig {
    int bag_count = 100;             // M
    int observations_per_bag = 100;  // N
    double noise_half_width = 0.1;   // R
    std::uint64_t seed = 1;
};

/// Deterministic for a given seed (splitmix64, one stream, bag-major order:
/// y^(l) first, then its N observations). Basis specs are attached later by
/// the caller, e.g. through make_dataset. Note R = 0 produces rank-1 bags:
/// use d_x = 1 or expect InsufficientRank downstream.
std::vector<Bag> generate(const SynthConfig& cfg);

}  // namespace distreg
