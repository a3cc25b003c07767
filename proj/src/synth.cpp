#include "distreg/synth.hpp"

#include <string>

#include "distreg/errors.hpp"
#include "distreg/rng.hpp"

namespace distreg {

std::vector<Bag> generate(const SynthConfig& cfg) {
    if (cfg.bag_count < 1 || cfg.observations_per_bag < 1)
        throw ValidationError("generate: M and N must be at least 1");
    if (!(cfg.noise_half_width >= 0.0))
        throw ValidationError("generate: R must be nonnegative");
    SplitMix64 rng(cfg.seed);
    std::vector<Bag> bags;
    bags.reserve(static_cast<std::size_t>(cfg.bag_count));
    for (int l = 0; l < cfg.bag_count; ++l) {
        Bag bag;
        bag.id = "b" + std::to_string(l + 1);
        bag.y = rng.next_symmetric();
        bag.xs.reserve(static_cast<std::size_t>(cfg.observations_per_bag));
        for (int j = 0; j < cfg.observations_per_bag; ++j)
            bag.xs.push_back(bag.y + cfg.noise_half_width * rng.next_symmetric());
        bags.push_back(std::move(bag));
    }
    return bags;
}

}  // namespace distreg
