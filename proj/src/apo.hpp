#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "objective.hpp"
#include "rng.hpp"

namespace protozoa {

/// One protozoa: a position and its cached objective value.
struct Individual {
    std::vector<double> position;
    double fitness = 0.0;

    friend bool operator==(const Individual&, const Individual&) = default;
};

struct Population {
    std::vector<Individual> individuals;
    std::uint64_t iteration = 0;
    std::uint64_t fe_count = 0;
    std::uint64_t warnings = 0;  // candidates rejected for non-finite fitness

    std::size_t size() const noexcept { return individuals.size(); }

    friend bool operator==(const Population&, const Population&) = default;
};

struct ApoConfig {
    std::size_t ps = 100;
    std::size_t dim = 10;
    std::size_t np = 1;
    double pf_max = 0.1;
    Bounds bounds{-100.0, 100.0, 10};
    std::uint64_t max_iterations = 1000;
    std::optional<std::uint64_t> max_fes;
    std::uint64_t seed = 0;
    double eps = 2.220446049250313e-16;

    /// Human-readable list of every violated invariant; empty when valid.
    std::vector<std::string> violations() const;

    /// Throws ConfigError listing all violations.
    void validate() const;

    /// Last iteration index; the loop runs iter = 0 .. iter_max.
    std::uint64_t iter_max() const noexcept { return max_iterations == 0 ? 0 : max_iterations - 1; }
};

class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    std::vector<std::string> violations_;
};

enum class Operation { dormancy, reproduction, autotroph, heterotroph };

std::string_view to_string(Operation op) noexcept;

struct UpdateDecision {
    Operation operation = Operation::autotroph;
    double threshold = 0.0;  // p_dr or p_ah
    double draw = 0.0;       // uniform compared against threshold
};

/// Rank indices (1-based) of one neighbour pair in the autotroph sum.
struct NeighborPair {
    std::size_t minus = 1;
    std::size_t plus = 1;

    friend bool operator==(const NeighborPair&, const NeighborPair&) = default;
};

using Mask = std::vector<std::uint8_t>;

// Draw layout per individual and iteration. Every update starts with one
// decision draw; the operation then consumes, in order:
//   dormancy      dim (Rand)
//   reproduction  1 (sign) + 1 (rand) + dim (Rand) + 1 (mask size) + ceil(dim*rand) (mask)
//   autotroph     1 (f) + 1 (j) + 2*np (pairs) + ceil(dim*i/ps) (mask)
//   heterotroph   1 (f) + 1 (sign) + dim (Rand) + ceil(dim*i/ps) (mask)
// The coordinator stream draws 1 (pf) + ceil(ps*pf) (Dr set).

/// Stable ascending sort by fitness.
void sort_by_fitness(Population& pop);

/// iter / iter_max, defined as 0 when iter_max is 0.
double progress_ratio(std::uint64_t iter, std::uint64_t iter_max) noexcept;

/// pf = pf_max * rand. One draw.
double proportion_fraction(UniformStream& stream, double pf_max);

/// ceil(ps * pf) distinct 1-based ranks.
std::vector<std::size_t> select_dr_indices(std::size_t ps, double pf, UniformStream& stream);

/// p_dr = (1 - cos((1 - i/ps) * pi)) / 2
double p_dormancy_reproduction(std::size_t rank, std::size_t ps) noexcept;

/// p_ah = (1 + cos(iter/iter_max * pi)) / 2
double p_autotroph_heterotroph(std::uint64_t iter, std::uint64_t iter_max) noexcept;

/// f = rand * (1 + cos(iter/iter_max * pi)). One draw.
double foraging_factor(UniformStream& stream, std::uint64_t iter, std::uint64_t iter_max);

/// Binary mask with exactly `ones` set entries chosen by randperm.
Mask random_mask(std::size_t dim, std::size_t ones, UniformStream& stream);

/// ceil(dim * rand) ones. Consumes 1 + ceil(dim * rand) draws.
Mask reproduction_mask(std::size_t dim, UniformStream& stream);

/// ceil(dim * i / ps) ones. Consumes that many draws.
Mask forage_mask(std::size_t dim, std::size_t rank, std::size_t ps, UniformStream& stream);

/// X_min + Rand (.) (X_max - X_min)
std::vector<double> dormancy_update(const ApoConfig& cfg, UniformStream& stream);

/// X +- rand * (X_min + Rand (.) (X_max - X_min)) (.) M_r, unclamped.
std::vector<double> reproduction_update(std::span<const double> x, const ApoConfig& cfg,
                                        UniformStream& stream);

/// np pairs: minus uniform in [1, i-1] (i when i = 1), plus uniform in
/// [i+1, ps] (i when i = ps). Two draws per pair, fallbacks included.
std::vector<NeighborPair> pair_neighbors_autotroph(std::size_t rank, std::size_t ps, std::size_t np,
                                                   UniformStream& stream);

/// exp(-|f_minus / (f_plus + eps)|), shared by autotroph and heterotroph weights.
double neighbor_weight(double f_minus, double f_plus, double eps) noexcept;

/// Uniform rank in [1, ps] excluding `rank` (rank itself when ps = 1). One draw.
std::size_t pick_partner(std::size_t rank, std::size_t ps, UniformStream& stream);

/// Autotrophic foraging move for the individual at `rank` of a sorted population. Unclamped.
std::vector<double> autotroph_update(std::size_t rank, const Population& sorted, const ApoConfig& cfg,
                                     std::uint64_t iter, UniformStream& stream);

/// Heterotrophic foraging move toward X_near. Unclamped.
std::vector<double> heterotroph_update(std::size_t rank, const Population& sorted,
                                       const ApoConfig& cfg, std::uint64_t iter,
                                       UniformStream& stream);

/// Dormancy when p_dr > rand, otherwise reproduction (for Dr members);
/// autotroph when p_ah > rand, otherwise heterotroph. One draw.
UpdateDecision decide_operation(std::size_t rank, bool in_dr, std::uint64_t iter,
                                const ApoConfig& cfg, UniformStream& stream);

struct Selection {
    Individual individual;
    double candidate_fitness = 0.0;
    bool accepted = false;
    bool non_finite = false;
};

/// Evaluates the (already clamped) candidate once and keeps the strictly better one.
Selection greedy_select(const Individual& old, std::vector<double> candidate,
                        const Objective& objective);

struct UpdateOutcome {
    UpdateDecision decision;
    std::vector<double> candidate;  // clamped
    Selection selection;
};

/// Full per-individual pipeline: decide, move, clamp, evaluate, select.
UpdateOutcome update_individual(std::size_t rank, bool in_dr, const Population& sorted,
                                const ApoConfig& cfg, std::uint64_t iter,
                                const Objective& objective, UniformStream& stream);

}  // namespace protozoa
