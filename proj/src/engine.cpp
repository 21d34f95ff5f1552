#include "engine.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <thread>

namespace protozoa {

namespace {

// Runs body(begin, end) over [0, n) split into `workers` contiguous blocks.
// Rethrows the exception raised for the smallest index, if any.
template <typename Body>
void for_each_block(std::size_t n, const EngineMode& mode, Body&& body) {
    if (mode.kind == EngineMode::Kind::sequential || n == 0) {
        body(std::size_t{0}, n);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(mode.resolved_workers(), n);
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> threads;
        threads.reserve(workers);
        const std::size_t base = n / workers;
        const std::size_t extra = n % workers;
        std::size_t begin = 0;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t end = begin + base + (w < extra ? 1 : 0);
            threads.emplace_back([&body, &errors, w, begin, end] {
                try {
                    body(begin, end);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
            begin = end;
        }
    }
    for (const auto& err : errors) {
        if (err) {
            std::rethrow_exception(err);
        }
    }
}

template <typename Fn>
decltype(auto) tagged(std::size_t rank, Fn&& fn) {
    try {
        return fn();
    } catch (const ObjectiveError&) {
        throw;
    } catch (const std::exception& e) {
        throw ObjectiveError(rank, e.what());
    }
}

void check_objective_fits(const ApoConfig& cfg, const Objective& objective) {
    if (cfg.dim < objective.min_dim()) {
        throw ConfigError({objective.name() + " requires dim >= " +
                           std::to_string(objective.min_dim()) + " (dim=" +
                           std::to_string(cfg.dim) + ")"});
    }
}

std::size_t best_index(const Population& pop) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < pop.size(); ++i) {
        if (pop.individuals[i].fitness < pop.individuals[best].fitness) {
            best = i;
        }
    }
    return best;
}

}  // namespace

unsigned EngineMode::resolved_workers() const noexcept {
    if (kind == Kind::sequential) {
        return 1;
    }
    if (workers != 0) {
        return workers;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

EngineMode EngineMode::resolved() const noexcept {
    return {kind, resolved_workers()};
}

std::string to_string(const EngineMode& mode) {
    if (mode.kind == EngineMode::Kind::sequential) {
        return "seq";
    }
    return "par";
}

ObjectiveError::ObjectiveError(std::size_t individual, const std::string& what)
    : std::runtime_error("individual " + std::to_string(individual) + ": " + what),
      individual_(individual) {}

Population initialize(const ApoConfig& cfg, const Objective& objective, const EngineMode& mode,
                      const StreamSource& streams) {
    cfg.validate();
    check_objective_fits(cfg, objective);

    Population pop;
    pop.individuals.resize(cfg.ps);
    for_each_block(cfg.ps, mode, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const std::size_t rank = i + 1;
            auto stream = streams.open(kInitStreamIteration, rank);
            auto& ind = pop.individuals[i];
            ind.position = dormancy_update(cfg, *stream);
            ind.fitness = tagged(rank, [&] { return objective(ind.position); });
        }
    });
    pop.fe_count = cfg.ps;
    return pop;
}

Population step(const Population& pop, const ApoConfig& cfg, const Objective& objective,
                std::uint64_t iter, const EngineMode& mode, const StreamSource& streams) {
    const std::size_t ps = pop.size();
    Population sorted = pop;
    sort_by_fitness(sorted);

    auto coordinator = streams.open(iter + 1, kCoordinatorIndex);
    const double pf = proportion_fraction(*coordinator, cfg.pf_max);
    std::vector<std::uint8_t> in_dr(ps + 1, 0);
    for (std::size_t rank : select_dr_indices(ps, pf, *coordinator)) {
        in_dr[rank] = 1;
    }

    Population next;
    next.individuals.resize(ps);
    next.iteration = pop.iteration + 1;
    next.fe_count = pop.fe_count + ps;
    std::vector<std::uint8_t> rejected(ps, 0);

    for_each_block(ps, mode, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const std::size_t rank = i + 1;
            auto stream = streams.open(iter + 1, rank);
            auto outcome = tagged(rank, [&] {
                return update_individual(rank, in_dr[rank] != 0, sorted, cfg, iter, objective,
                                         *stream);
            });
            next.individuals[i] = std::move(outcome.selection.individual);
            rejected[i] = outcome.selection.non_finite ? 1 : 0;
        }
    });

    next.warnings = pop.warnings + static_cast<std::uint64_t>(
                                       std::count(rejected.begin(), rejected.end(), 1));
    return next;
}

RunResult run(const ApoConfig& cfg, const Objective& objective, const EngineMode& mode) {
    return run(cfg, objective, mode, CounterStreamSource(cfg.seed));
}

RunResult run(const ApoConfig& cfg, const Objective& objective, const EngineMode& mode,
              const StreamSource& streams, const StepObserver& observer) {
    cfg.validate();
    check_objective_fits(cfg, objective);

    RunResult result;
    result.mode = mode.resolved();
    result.config = cfg;

    const auto start = std::chrono::steady_clock::now();
    Population pop = initialize(cfg, objective, result.mode, streams);
    result.trace.reserve(cfg.max_iterations + 1);
    result.trace.push_back(pop.individuals[best_index(pop)].fitness);

    for (std::uint64_t iter = 0; iter < cfg.max_iterations; ++iter) {
        if (cfg.max_fes && pop.fe_count >= *cfg.max_fes) {
            break;
        }
        pop = step(pop, cfg, objective, iter, result.mode, streams);
        result.trace.push_back(pop.individuals[best_index(pop)].fitness);
        if (observer) {
            observer(pop);
        }
    }
    const auto stop = std::chrono::steady_clock::now();

    const auto& best = pop.individuals[best_index(pop)];
    result.best_position = best.position;
    result.best_fitness = best.fitness;
    result.fe_count = pop.fe_count;
    result.iterations = pop.iteration;
    result.warnings = pop.warnings;
    result.wall_clock_seconds = std::chrono::duration<double>(stop - start).count();
    return result;
}

ModeSummary summarize(EngineMode mode, std::vector<RunResult> runs) {
    ModeSummary summary;
    summary.mode = mode.resolved();
    double fit = 0.0;
    double secs = 0.0;
    for (const auto& r : runs) {
        fit += r.best_fitness;
        secs += r.wall_clock_seconds;
    }
    if (!runs.empty()) {
        summary.avg_best_fitness = fit / static_cast<double>(runs.size());
        summary.avg_seconds = secs / static_cast<double>(runs.size());
    }
    summary.runs = std::move(runs);
    return summary;
}

BenchmarkSummary benchmark(const ApoConfig& cfg, const Objective& objective, unsigned runs,
                           unsigned workers) {
    if (runs == 0) {
        throw std::invalid_argument("benchmark: runs must be >= 1");
    }
    const EngineMode seq = EngineMode::sequential();
    const EngineMode par = EngineMode::parallel(workers);
    std::vector<RunResult> seq_runs;
    std::vector<RunResult> par_runs;
    for (unsigned r = 0; r < runs; ++r) {
        ApoConfig seeded = cfg;
        seeded.seed = cfg.seed + r;
        seq_runs.push_back(run(seeded, objective, seq));
        par_runs.push_back(run(seeded, objective, par));
    }
    BenchmarkSummary out;
    out.sequential = summarize(seq, std::move(seq_runs));
    out.parallel = summarize(par, std::move(par_runs));
    out.speedup = out.parallel.avg_seconds > 0.0
                      ? out.sequential.avg_seconds / out.parallel.avg_seconds
                      : 0.0;
    return out;
}

}  // namespace protozoa
