#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace moreas {

/// Counter-derived xoshiro256** stream.
///
/// Streams are derived from a (seed, key...) tuple by splitmix64 mixing, so
/// any (agent, round, purpose) combination yields an independent, replayable
/// substream regardless of scheduling or evaluation order. Normal variates
/// use the inverse-CDF transform, keeping every draw a pure function of the
/// stream state (portable across standard libraries).
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : RngStream(seed, 0, 0, 0) {}
    RngStream(std::uint64_t seed, std::uint64_t k1, std::uint64_t k2 = 0, std::uint64_t k3 = 0);

    /// Derived stream keyed by a purpose label plus numeric indices.
    RngStream substream(std::string_view purpose, std::uint64_t a = 0, std::uint64_t b = 0) const;

    std::uint64_t next_u64();

    /// Uniform on [0,1) with 53 random bits.
    double uniform01();

    double uniform(double lo, double hi);

    /// Uniform integer on [lo, hi] inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

    bool bernoulli(double p);

    double normal(double mu = 0.0, double sd = 1.0);
    double lognormal(double mu, double sigma);

    /// Gamma(shape, 1), Marsaglia-Tsang squeeze method.
    double gamma(double shape);
    double beta(double alpha, double beta);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(i) - 1));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    std::uint64_t state_[4];
};

}  // namespace moreas
