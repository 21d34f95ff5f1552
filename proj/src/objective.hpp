#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace protozoa {

/// Uniform box constraint applied to every dimension.
struct Bounds {
    double lower = -100.0;
    double upper = 100.0;
    std::size_t dim = 1;

    /// Throws std::invalid_argument unless lower < upper, both finite and dim >= 1.
    void validate() const;
};

enum class ObjectiveId {
    sphere,
    bent_cigar,
    high_conditioned_elliptic,
    hgbat,
    rosenbrock,
    griewank,
    external,
};

/// Stable lowercase identifier used on the command line.
std::string_view to_string(ObjectiveId id) noexcept;
std::optional<ObjectiveId> objective_from_string(std::string_view name) noexcept;

/// The six built-in functions, in declaration order.
std::span<const ObjectiveId> builtin_objectives() noexcept;

/// Comma-separated list of built-in ids, for diagnostics.
std::string builtin_objective_names();

std::size_t min_dimension(ObjectiveId id) noexcept;

/*
 * Unshifted, unrotated basic forms, all minimised, sums left to right:
 *
 *   sphere                     sum x_i^2
 *   bent_cigar                 x_1^2 + 1e6 * sum_{i>=2} x_i^2
 *   high_conditioned_elliptic  sum (1e6)^((i-1)/(D-1)) x_i^2
 *   hgbat                      |(sum x_i^2)^2 - (sum x_i)^2|^(1/2) + (0.5 sum x_i^2 + sum x_i)/D + 0.5
 *   rosenbrock                 sum_{i<D} 100 (x_{i+1} - x_i^2)^2 + (x_i - 1)^2
 *   griewank                   1 + sum x_i^2 / 4000 - prod cos(x_i / sqrt(i))
 *
 * Throws std::invalid_argument for a dimension below min_dimension(id), a
 * non-finite component, or ObjectiveId::external.
 */
double evaluate(ObjectiveId id, std::span<const double> x);

/// Known global minimiser of a built-in function (value 0 there).
std::vector<double> known_optimum(ObjectiveId id, std::size_t dim);

/// A built-in function or a user-supplied evaluator behind one call signature.
class Objective {
public:
    using Evaluator = std::function<double(std::span<const double>)>;

    explicit Objective(ObjectiveId id);
    Objective(std::string name, Evaluator evaluator, std::size_t min_dim = 1);

    /// Validates x like evaluate() before dispatching.
    double operator()(std::span<const double> x) const;

    ObjectiveId id() const noexcept { return id_; }
    const std::string& name() const noexcept { return name_; }
    std::size_t min_dim() const noexcept { return min_dim_; }

private:
    ObjectiveId id_;
    std::string name_;
    Evaluator evaluator_;
    std::size_t min_dim_;
};

std::vector<double> clamp(std::span<const double> x, const Bounds& bounds);
void clamp_in_place(std::span<double> x, const Bounds& bounds) noexcept;

}  // namespace protozoa
