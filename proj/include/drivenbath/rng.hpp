#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace drivenbath {

/// Counter-derived stream seed: realization i of a run seeded with `master`
/// always uses stream_seed(master, i), so ensembles are independent of worker
/// count and scheduling. splitmix64 finalizer over (master, index).
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic Gaussian/uniform stream. Box-Muller over mt19937_64 keeps the
/// sequence fully specified by the standard (std::normal_distribution is not).
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    /// uniform draw in (0, 1]
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1p-53;
    }

    /// standard normal draw
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double theta = 2.0 * M_PI * uniform();
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace drivenbath
