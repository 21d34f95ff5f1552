#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <vector>

namespace protozoa {

/// Individual index reserved for per-iteration coordinator draws (pf, Dr set).
inline constexpr std::uint64_t kCoordinatorIndex = std::numeric_limits<std::uint64_t>::max();

/// Full address of one uniform draw. Equal keys always yield equal values.
struct StreamKey {
    std::uint64_t seed = 0;
    std::uint64_t iteration = 0;
    std::uint64_t individual = 0;
    std::uint64_t counter = 0;

    friend bool operator==(const StreamKey&, const StreamKey&) = default;
};

using PhiloxCounter = std::array<std::uint64_t, 4>;
using PhiloxKey = std::array<std::uint64_t, 2>;

/// Philox4x64 with 10 rounds (Salmon et al., Random123).
PhiloxCounter philox4x64(PhiloxCounter counter, PhiloxKey key) noexcept;

/// Raw 64-bit output at `key`. Four consecutive counters share one Philox block.
std::uint64_t draw_bits(const StreamKey& key) noexcept;

/// Top 53 bits of draw_bits(key) scaled into [0, 1).
double draw_uniform(const StreamKey& key) noexcept;

/// Element j equals draw_uniform at counter key.counter + j. Throws
/// std::invalid_argument when dim is zero.
std::vector<double> draw_uniform_vector(StreamKey key, std::size_t dim);

/*
 * Sequential cursor over uniforms. The APO update rules consume draws through
 * this interface so that tests can substitute a scripted sequence.
 */
class UniformStream {
public:
    virtual ~UniformStream() = default;

    virtual double next() = 0;

    virtual void fill(std::span<double> out) {
        for (auto& v : out) {
            v = next();
        }
    }
};

/// Counter-based stream: the n-th call returns draw_uniform({seed, iteration, individual, start + n}).
class CounterStream final : public UniformStream {
public:
    explicit CounterStream(StreamKey key) noexcept : key_(key) {}

    double next() override;
    void fill(std::span<double> out) override;

    const StreamKey& key() const noexcept { return key_; }

    /// Number of draws taken since construction.
    std::uint64_t consumed() const noexcept { return key_.counter - start_; }

private:
    StreamKey key_;
    std::uint64_t start_ = key_.counter;
    std::uint64_t cached_block_ = std::numeric_limits<std::uint64_t>::max();
    PhiloxCounter cached_{};
};

/// Hands out one independent stream per (iteration, individual).
class StreamSource {
public:
    virtual ~StreamSource() = default;
    virtual std::unique_ptr<UniformStream> open(std::uint64_t iteration,
                                                std::uint64_t individual) const = 0;
};

class CounterStreamSource final : public StreamSource {
public:
    explicit CounterStreamSource(std::uint64_t seed) noexcept : seed_(seed) {}

    std::unique_ptr<UniformStream> open(std::uint64_t iteration,
                                        std::uint64_t individual) const override {
        return std::make_unique<CounterStream>(StreamKey{seed_, iteration, individual, 0});
    }

    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::uint64_t seed_;
};

/*
 * Partial Fisher-Yates shuffle: k distinct 1-based indices from [1, n], in
 * draw order. Consumes exactly k draws; step t picks position
 * t + floor(u * (n - t)). Throws std::invalid_argument when k > n.
 */
std::vector<std::size_t> randperm(std::size_t n, std::size_t k, UniformStream& stream);
std::vector<std::size_t> randperm(std::size_t n, std::size_t k, const StreamKey& key);

/// floor(u * n) for u in [0, 1), saturated to n - 1 to absorb rounding at u -> 1.
std::size_t scaled_index(double u, std::size_t n) noexcept;

}  // namespace protozoa
