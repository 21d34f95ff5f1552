#include "apo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace protozoa {

namespace {

std::string join_violations(const std::vector<std::string>& violations) {
    std::string msg = "invalid configuration:";
    for (const auto& v : violations) {
        msg += "\n  - " + v;
    }
    return msg;
}

// ceil(n * u) for u in [0, 1), capped at n.
std::size_t ceil_fraction(std::size_t n, double u) noexcept {
    const double scaled = std::ceil(static_cast<double>(n) * u);
    return std::min(n, static_cast<std::size_t>(scaled));
}

double signed_unit(UniformStream& stream) {
    return stream.next() < 0.5 ? 1.0 : -1.0;
}

const std::vector<double>& at_rank(const Population& pop, std::size_t rank) {
    return pop.individuals[rank - 1].position;
}

double fitness_at_rank(const Population& pop, std::size_t rank) {
    return pop.individuals[rank - 1].fitness;
}

std::vector<double> apply_masked_step(std::span<const double> x, double f,
                                      std::span<const double> direction, const Mask& mask) {
    std::vector<double> out(x.begin(), x.end());
    for (std::size_t d = 0; d < out.size(); ++d) {
        if (mask[d] != 0) {
            out[d] = x[d] + f * direction[d];
        }
    }
    return out;
}

}  // namespace

std::vector<std::string> ApoConfig::violations() const {
    std::vector<std::string> out;
    if (ps == 0) {
        out.emplace_back("ps must be >= 1");
    }
    if (dim == 0) {
        out.emplace_back("dim must be >= 1");
    }
    if (np == 0) {
        out.emplace_back("np must be >= 1");
    } else if (ps >= 2 && np > ps - 1) {
        out.emplace_back("np must be <= ps - 1 (np=" + std::to_string(np) +
                         ", ps=" + std::to_string(ps) + ")");
    } else if (ps == 1 && np != 1) {
        out.emplace_back("np must be 1 when ps = 1");
    }
    if (!(pf_max > 0.0 && pf_max <= 1.0)) {
        out.emplace_back("pf_max must lie in (0, 1]");
    }
    if (!std::isfinite(bounds.lower) || !std::isfinite(bounds.upper)) {
        out.emplace_back("bounds must be finite");
    } else if (!(bounds.lower < bounds.upper)) {
        out.emplace_back("bounds require lower < upper");
    }
    if (bounds.dim != dim) {
        out.emplace_back("bounds.dim (" + std::to_string(bounds.dim) + ") must equal dim (" +
                         std::to_string(dim) + ")");
    }
    if (max_fes && *max_fes == 0) {
        out.emplace_back("max_fes must be >= 1 when set");
    }
    if (!(eps > 0.0) || !std::isfinite(eps)) {
        out.emplace_back("eps must be finite and > 0");
    }
    return out;
}

void ApoConfig::validate() const {
    auto v = violations();
    if (!v.empty()) {
        throw ConfigError(std::move(v));
    }
}

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::invalid_argument(join_violations(violations)), violations_(std::move(violations)) {}

std::string_view to_string(Operation op) noexcept {
    switch (op) {
        case Operation::dormancy: return "dormancy";
        case Operation::reproduction: return "reproduction";
        case Operation::autotroph: return "autotroph";
        case Operation::heterotroph: return "heterotroph";
    }
    return "unknown";
}

void sort_by_fitness(Population& pop) {
    std::stable_sort(pop.individuals.begin(), pop.individuals.end(),
                     [](const Individual& a, const Individual& b) { return a.fitness < b.fitness; });
}

double progress_ratio(std::uint64_t iter, std::uint64_t iter_max) noexcept {
    if (iter_max == 0) {
        return 0.0;
    }
    return static_cast<double>(iter) / static_cast<double>(iter_max);
}

double proportion_fraction(UniformStream& stream, double pf_max) {
    return pf_max * stream.next();
}

std::vector<std::size_t> select_dr_indices(std::size_t ps, double pf, UniformStream& stream) {
    return randperm(ps, ceil_fraction(ps, std::clamp(pf, 0.0, 1.0)), stream);
}

double p_dormancy_reproduction(std::size_t rank, std::size_t ps) noexcept {
    const double ratio = static_cast<double>(rank) / static_cast<double>(ps);
    return 0.5 * (1.0 - std::cos((1.0 - ratio) * std::numbers::pi));
}

double p_autotroph_heterotroph(std::uint64_t iter, std::uint64_t iter_max) noexcept {
    return 0.5 * (1.0 + std::cos(progress_ratio(iter, iter_max) * std::numbers::pi));
}

double foraging_factor(UniformStream& stream, std::uint64_t iter, std::uint64_t iter_max) {
    return stream.next() * (1.0 + std::cos(progress_ratio(iter, iter_max) * std::numbers::pi));
}

Mask random_mask(std::size_t dim, std::size_t ones, UniformStream& stream) {
    Mask mask(dim, 0);
    for (std::size_t idx : randperm(dim, ones, stream)) {
        mask[idx - 1] = 1;
    }
    return mask;
}

Mask reproduction_mask(std::size_t dim, UniformStream& stream) {
    return random_mask(dim, ceil_fraction(dim, stream.next()), stream);
}

Mask forage_mask(std::size_t dim, std::size_t rank, std::size_t ps, UniformStream& stream) {
    const std::size_t ones = std::min(dim, (dim * rank + ps - 1) / ps);
    return random_mask(dim, ones, stream);
}

std::vector<double> dormancy_update(const ApoConfig& cfg, UniformStream& stream) {
    std::vector<double> out(cfg.dim);
    stream.fill(out);
    const double span = cfg.bounds.upper - cfg.bounds.lower;
    for (auto& v : out) {
        v = cfg.bounds.lower + v * span;
    }
    return out;
}

std::vector<double> reproduction_update(std::span<const double> x, const ApoConfig& cfg,
                                        UniformStream& stream) {
    const double sign = signed_unit(stream);
    const double scale = stream.next();
    std::vector<double> offset(x.size());
    stream.fill(offset);
    const double span = cfg.bounds.upper - cfg.bounds.lower;
    for (auto& v : offset) {
        v = sign * scale * (cfg.bounds.lower + v * span);
    }
    const Mask mask = reproduction_mask(x.size(), stream);
    return apply_masked_step(x, 1.0, offset, mask);
}

std::vector<NeighborPair> pair_neighbors_autotroph(std::size_t rank, std::size_t ps, std::size_t np,
                                                   UniformStream& stream) {
    std::vector<NeighborPair> pairs;
    pairs.reserve(np);
    for (std::size_t k = 0; k < np; ++k) {
        const double u_minus = stream.next();
        const double u_plus = stream.next();
        NeighborPair pair{rank, rank};
        if (rank > 1) {
            pair.minus = 1 + scaled_index(u_minus, rank - 1);
        }
        if (rank < ps) {
            pair.plus = rank + 1 + scaled_index(u_plus, ps - rank);
        }
        pairs.push_back(pair);
    }
    return pairs;
}

double neighbor_weight(double f_minus, double f_plus, double eps) noexcept {
    return std::exp(-std::fabs(f_minus / (f_plus + eps)));
}

std::size_t pick_partner(std::size_t rank, std::size_t ps, UniformStream& stream) {
    const double u = stream.next();
    if (ps < 2) {
        return rank;
    }
    std::size_t j = 1 + scaled_index(u, ps - 1);
    if (j >= rank) {
        ++j;
    }
    return j;
}

std::vector<double> autotroph_update(std::size_t rank, const Population& sorted, const ApoConfig& cfg,
                                     std::uint64_t iter, UniformStream& stream) {
    const std::size_t ps = sorted.size();
    const auto& x = at_rank(sorted, rank);
    const double f = foraging_factor(stream, iter, cfg.iter_max());
    const auto& partner = at_rank(sorted, pick_partner(rank, ps, stream));
    const auto pairs = pair_neighbors_autotroph(rank, ps, cfg.np, stream);

    std::vector<double> acc(x.size(), 0.0);
    for (const auto& pair : pairs) {
        const double w = neighbor_weight(fitness_at_rank(sorted, pair.minus),
                                         fitness_at_rank(sorted, pair.plus), cfg.eps);
        const auto& xm = at_rank(sorted, pair.minus);
        const auto& xp = at_rank(sorted, pair.plus);
        for (std::size_t d = 0; d < acc.size(); ++d) {
            acc[d] += w * (xm[d] - xp[d]);
        }
    }
    const double inv_np = 1.0 / static_cast<double>(cfg.np);
    std::vector<double> direction(x.size());
    for (std::size_t d = 0; d < direction.size(); ++d) {
        direction[d] = partner[d] - x[d] + inv_np * acc[d];
    }
    const Mask mask = forage_mask(x.size(), rank, ps, stream);
    return apply_masked_step(x, f, direction, mask);
}

std::vector<double> heterotroph_update(std::size_t rank, const Population& sorted,
                                       const ApoConfig& cfg, std::uint64_t iter,
                                       UniformStream& stream) {
    const std::size_t ps = sorted.size();
    const auto& x = at_rank(sorted, rank);
    const double f = foraging_factor(stream, iter, cfg.iter_max());
    const double sign = signed_unit(stream);
    const double shrink = 1.0 - progress_ratio(iter, cfg.iter_max());

    std::vector<double> near(x.size());
    stream.fill(near);
    for (std::size_t d = 0; d < near.size(); ++d) {
        near[d] = (1.0 + sign * near[d] * shrink) * x[d];
    }

    std::vector<double> acc(x.size(), 0.0);
    for (std::size_t k = 1; k <= cfg.np; ++k) {
        const std::size_t lo = rank > k ? rank - k : 1;
        const std::size_t hi = std::min(rank + k, ps);
        const double w = neighbor_weight(fitness_at_rank(sorted, lo), fitness_at_rank(sorted, hi),
                                         cfg.eps);
        const auto& xl = at_rank(sorted, lo);
        const auto& xh = at_rank(sorted, hi);
        for (std::size_t d = 0; d < acc.size(); ++d) {
            acc[d] += w * (xl[d] - xh[d]);
        }
    }
    const double inv_np = 1.0 / static_cast<double>(cfg.np);
    std::vector<double> direction(x.size());
    for (std::size_t d = 0; d < direction.size(); ++d) {
        direction[d] = near[d] - x[d] + inv_np * acc[d];
    }
    const Mask mask = forage_mask(x.size(), rank, ps, stream);
    return apply_masked_step(x, f, direction, mask);
}

UpdateDecision decide_operation(std::size_t rank, bool in_dr, std::uint64_t iter,
                                const ApoConfig& cfg, UniformStream& stream) {
    UpdateDecision decision;
    decision.draw = stream.next();
    if (in_dr) {
        decision.threshold = p_dormancy_reproduction(rank, cfg.ps);
        decision.operation =
            decision.threshold > decision.draw ? Operation::dormancy : Operation::reproduction;
    } else {
        decision.threshold = p_autotroph_heterotroph(iter, cfg.iter_max());
        decision.operation =
            decision.threshold > decision.draw ? Operation::autotroph : Operation::heterotroph;
    }
    return decision;
}

Selection greedy_select(const Individual& old, std::vector<double> candidate,
                        const Objective& objective) {
    Selection sel;
    sel.candidate_fitness = objective(candidate);
    if (!std::isfinite(sel.candidate_fitness)) {
        sel.non_finite = true;
        sel.individual = old;
        return sel;
    }
    if (sel.candidate_fitness < old.fitness) {
        sel.accepted = true;
        sel.individual = Individual{std::move(candidate), sel.candidate_fitness};
    } else {
        sel.individual = old;
    }
    return sel;
}

UpdateOutcome update_individual(std::size_t rank, bool in_dr, const Population& sorted,
                                const ApoConfig& cfg, std::uint64_t iter,
                                const Objective& objective, UniformStream& stream) {
    UpdateOutcome out;
    out.decision = decide_operation(rank, in_dr, iter, cfg, stream);
    switch (out.decision.operation) {
        case Operation::dormancy:
            out.candidate = dormancy_update(cfg, stream);
            break;
        case Operation::reproduction:
            out.candidate = reproduction_update(at_rank(sorted, rank), cfg, stream);
            break;
        case Operation::autotroph:
            out.candidate = autotroph_update(rank, sorted, cfg, iter, stream);
            break;
        case Operation::heterotroph:
            out.candidate = heterotroph_update(rank, sorted, cfg, iter, stream);
            break;
    }
    clamp_in_place(out.candidate, cfg.bounds);
    out.selection = greedy_select(sorted.individuals[rank - 1], out.candidate, objective);
    return out;
}

}  // namespace protozoa
