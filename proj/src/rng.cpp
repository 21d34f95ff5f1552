#include "rng.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace protozoa {

namespace {

constexpr std::uint64_t kPhiloxM0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kPhiloxM1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kPhiloxW0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kPhiloxW1 = 0xBB67AE8584CAA73BULL;

// Second key word; fixed so the 64-bit seed alone determines the stream.
constexpr std::uint64_t kKeySalt = 0x41504F2D50524E47ULL;  // "APO-PRNG"

__extension__ using uint128 = unsigned __int128;

constexpr double kTwoPowMinus53 = 1.0 / 9007199254740992.0;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) noexcept {
    const uint128 product = static_cast<uint128>(a) * b;
    hi = static_cast<std::uint64_t>(product >> 64);
    lo = static_cast<std::uint64_t>(product);
}

inline PhiloxCounter block_for(const StreamKey& key) noexcept {
    return philox4x64({key.counter >> 2, key.individual, key.iteration, 0}, {key.seed, kKeySalt});
}

inline double to_unit(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * kTwoPowMinus53;
}

}  // namespace

PhiloxCounter philox4x64(PhiloxCounter ctr, PhiloxKey key) noexcept {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kPhiloxW0;
            key[1] += kPhiloxW1;
        }
        std::uint64_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
        mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

std::uint64_t draw_bits(const StreamKey& key) noexcept {
    return block_for(key)[key.counter & 3];
}

double draw_uniform(const StreamKey& key) noexcept {
    return to_unit(draw_bits(key));
}

std::vector<double> draw_uniform_vector(StreamKey key, std::size_t dim) {
    if (dim == 0) {
        throw std::invalid_argument("draw_uniform_vector: dim must be at least 1");
    }
    std::vector<double> out(dim);
    CounterStream stream(key);
    stream.fill(out);
    return out;
}

double CounterStream::next() {
    const std::uint64_t block = key_.counter >> 2;
    if (block != cached_block_) {
        cached_ = block_for(key_);
        cached_block_ = block;
    }
    const double u = to_unit(cached_[key_.counter & 3]);
    ++key_.counter;
    return u;
}

void CounterStream::fill(std::span<double> out) {
    for (auto& v : out) {
        v = next();
    }
}

std::size_t scaled_index(double u, std::size_t n) noexcept {
    const auto idx = static_cast<std::size_t>(u * static_cast<double>(n));
    return idx < n ? idx : n - 1;
}

std::vector<std::size_t> randperm(std::size_t n, std::size_t k, UniformStream& stream) {
    if (k > n) {
        throw std::invalid_argument("randperm: k=" + std::to_string(k) + " exceeds n=" +
                                    std::to_string(n));
    }
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{1});
    for (std::size_t t = 0; t < k; ++t) {
        const std::size_t j = t + scaled_index(stream.next(), n - t);
        std::swap(pool[t], pool[j]);
    }
    pool.resize(k);
    return pool;
}

std::vector<std::size_t> randperm(std::size_t n, std::size_t k, const StreamKey& key) {
    CounterStream stream(key);
    return randperm(n, k, stream);
}

}  // namespace protozoa
