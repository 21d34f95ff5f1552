#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "apo.hpp"
#include "objective.hpp"
#include "rng.hpp"

namespace protozoa {

struct EngineMode {
    enum class Kind { sequential, parallel };

    Kind kind = Kind::sequential;
    unsigned workers = 1;  // 0 means "auto" for parallel mode

    static EngineMode sequential() noexcept { return {Kind::sequential, 1}; }
    static EngineMode parallel(unsigned workers = 0) noexcept { return {Kind::parallel, workers}; }

    /// Concrete worker count: 1 for sequential, hardware concurrency for parallel(auto).
    unsigned resolved_workers() const noexcept;

    /// Copy with `auto` replaced by the resolved count.
    EngineMode resolved() const noexcept;

    friend bool operator==(const EngineMode&, const EngineMode&) = default;
};

std::string to_string(const EngineMode& mode);

/// An objective failure tagged with the rank of the individual being evaluated.
class ObjectiveError : public std::runtime_error {
public:
    ObjectiveError(std::size_t individual, const std::string& what);
    std::size_t individual() const noexcept { return individual_; }

private:
    std::size_t individual_;
};

struct RunResult {
    std::vector<double> best_position;
    double best_fitness = 0.0;
    std::vector<double> trace;  // trace[0] is the initial best, then one entry per iteration
    std::uint64_t fe_count = 0;
    std::uint64_t iterations = 0;
    std::uint64_t warnings = 0;
    double wall_clock_seconds = 0.0;
    EngineMode mode;
    ApoConfig config;
};

/// Called after every completed iteration with the new population.
using StepObserver = std::function<void(const Population&)>;

/// Stream iteration key used for the initial population; step `iter` uses iter + 1.
inline constexpr std::uint64_t kInitStreamIteration = 0;

Population initialize(const ApoConfig& cfg, const Objective& objective, const EngineMode& mode,
                      const StreamSource& streams);

/*
 * One APO iteration. Sorts a copy of `pop`, draws pf and the Dr set on the
 * coordinator stream, then updates every rank from the immutable sorted
 * snapshot. Workers own disjoint contiguous rank ranges, so the result does
 * not depend on the worker count.
 */
Population step(const Population& pop, const ApoConfig& cfg, const Objective& objective,
                std::uint64_t iter, const EngineMode& mode, const StreamSource& streams);

RunResult run(const ApoConfig& cfg, const Objective& objective, const EngineMode& mode);
RunResult run(const ApoConfig& cfg, const Objective& objective, const EngineMode& mode,
              const StreamSource& streams, const StepObserver& observer = {});

struct ModeSummary {
    EngineMode mode;
    std::vector<RunResult> runs;
    double avg_best_fitness = 0.0;
    double avg_seconds = 0.0;
};

struct BenchmarkSummary {
    ModeSummary sequential;
    ModeSummary parallel;
    double speedup = 0.0;  // sequential avg seconds / parallel avg seconds
};

/// `runs` seeds starting at cfg.seed, each run in sequential and parallel mode.
BenchmarkSummary benchmark(const ApoConfig& cfg, const Objective& objective, unsigned runs,
                           unsigned workers = 0);

/// Averages over one mode's runs; used by benchmark() and the CLI.
ModeSummary summarize(EngineMode mode, std::vector<RunResult> runs);

}  // namespace protozoa
