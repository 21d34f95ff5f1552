#include "objective.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace protozoa {

namespace {

constexpr std::array<ObjectiveId, 6> kBuiltins = {
    ObjectiveId::sphere,     ObjectiveId::bent_cigar, ObjectiveId::high_conditioned_elliptic,
    ObjectiveId::hgbat,      ObjectiveId::rosenbrock, ObjectiveId::griewank,
};

void check_input(std::string_view name, std::size_t min_dim, std::span<const double> x) {
    if (x.size() < min_dim) {
        throw std::invalid_argument(std::string(name) + ": dimension " + std::to_string(x.size()) +
                                    " below minimum " + std::to_string(min_dim));
    }
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (!std::isfinite(x[j])) {
            throw std::invalid_argument(std::string(name) + ": component " + std::to_string(j) +
                                        " is not finite");
        }
    }
}

double sphere(std::span<const double> x) {
    double sum = 0.0;
    for (double v : x) {
        sum += v * v;
    }
    return sum;
}

double bent_cigar(std::span<const double> x) {
    double tail = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) {
        tail += x[i] * x[i];
    }
    return x[0] * x[0] + 1.0e6 * tail;
}

double high_conditioned_elliptic(std::span<const double> x) {
    const double denom = static_cast<double>(x.size() - 1);
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sum += std::pow(1.0e6, static_cast<double>(i) / denom) * x[i] * x[i];
    }
    return sum;
}

double hgbat(std::span<const double> x) {
    double sum_sq = 0.0;
    double sum = 0.0;
    for (double v : x) {
        sum_sq += v * v;
        sum += v;
    }
    const double d = static_cast<double>(x.size());
    return std::sqrt(std::fabs(sum_sq * sum_sq - sum * sum)) + (0.5 * sum_sq + sum) / d + 0.5;
}

double rosenbrock(std::span<const double> x) {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double a = x[i + 1] - x[i] * x[i];
        const double b = x[i] - 1.0;
        sum += 100.0 * a * a + b * b;
    }
    return sum;
}

double griewank(std::span<const double> x) {
    double sum = 0.0;
    double prod = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sum += x[i] * x[i];
        prod *= std::cos(x[i] / std::sqrt(static_cast<double>(i + 1)));
    }
    return 1.0 + sum / 4000.0 - prod;
}

}  // namespace

void Bounds::validate() const {
    if (!std::isfinite(lower) || !std::isfinite(upper)) {
        throw std::invalid_argument("bounds must be finite");
    }
    if (!(lower < upper)) {
        throw std::invalid_argument("bounds require lower < upper");
    }
    if (dim == 0) {
        throw std::invalid_argument("bounds require dim >= 1");
    }
}

std::string_view to_string(ObjectiveId id) noexcept {
    switch (id) {
        case ObjectiveId::sphere: return "sphere";
        case ObjectiveId::bent_cigar: return "bent_cigar";
        case ObjectiveId::high_conditioned_elliptic: return "high_conditioned_elliptic";
        case ObjectiveId::hgbat: return "hgbat";
        case ObjectiveId::rosenbrock: return "rosenbrock";
        case ObjectiveId::griewank: return "griewank";
        case ObjectiveId::external: return "external";
    }
    return "unknown";
}

std::optional<ObjectiveId> objective_from_string(std::string_view name) noexcept {
    for (ObjectiveId id : kBuiltins) {
        if (to_string(id) == name) {
            return id;
        }
    }
    return std::nullopt;
}

std::span<const ObjectiveId> builtin_objectives() noexcept {
    return kBuiltins;
}

std::string builtin_objective_names() {
    std::string out;
    for (ObjectiveId id : kBuiltins) {
        if (!out.empty()) {
            out += ", ";
        }
        out += to_string(id);
    }
    return out;
}

std::size_t min_dimension(ObjectiveId id) noexcept {
    switch (id) {
        case ObjectiveId::high_conditioned_elliptic:
        case ObjectiveId::hgbat:
        case ObjectiveId::rosenbrock:
            return 2;
        default:
            return 1;
    }
}

double evaluate(ObjectiveId id, std::span<const double> x) {
    if (id == ObjectiveId::external) {
        throw std::invalid_argument("external objective has no built-in evaluator");
    }
    check_input(to_string(id), min_dimension(id), x);
    switch (id) {
        case ObjectiveId::sphere: return sphere(x);
        case ObjectiveId::bent_cigar: return bent_cigar(x);
        case ObjectiveId::high_conditioned_elliptic: return high_conditioned_elliptic(x);
        case ObjectiveId::hgbat: return hgbat(x);
        case ObjectiveId::rosenbrock: return rosenbrock(x);
        case ObjectiveId::griewank: return griewank(x);
        case ObjectiveId::external: break;
    }
    throw std::invalid_argument("unknown objective id");
}

std::vector<double> known_optimum(ObjectiveId id, std::size_t dim) {
    switch (id) {
        case ObjectiveId::rosenbrock: return std::vector<double>(dim, 1.0);
        case ObjectiveId::hgbat: return std::vector<double>(dim, -1.0);
        case ObjectiveId::external: throw std::invalid_argument("external objective has no known optimum");
        default: return std::vector<double>(dim, 0.0);
    }
}

Objective::Objective(ObjectiveId id) : id_(id), name_(to_string(id)), min_dim_(min_dimension(id)) {
    if (id == ObjectiveId::external) {
        throw std::invalid_argument("external objective requires an evaluator");
    }
}

Objective::Objective(std::string name, Evaluator evaluator, std::size_t min_dim)
    : id_(ObjectiveId::external),
      name_(std::move(name)),
      evaluator_(std::move(evaluator)),
      min_dim_(std::max<std::size_t>(min_dim, 1)) {
    if (!evaluator_) {
        throw std::invalid_argument("external objective requires an evaluator");
    }
}

double Objective::operator()(std::span<const double> x) const {
    if (id_ != ObjectiveId::external) {
        return evaluate(id_, x);
    }
    check_input(name_, min_dim_, x);
    return evaluator_(x);
}

std::vector<double> clamp(std::span<const double> x, const Bounds& bounds) {
    std::vector<double> out(x.begin(), x.end());
    clamp_in_place(out, bounds);
    return out;
}

void clamp_in_place(std::span<double> x, const Bounds& bounds) noexcept {
    for (auto& v : x) {
        v = std::min(std::max(v, bounds.lower), bounds.upper);
    }
}

}  // namespace protozoa
