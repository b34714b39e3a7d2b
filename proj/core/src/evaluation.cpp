#include "s4is/evaluation.hpp"

#include "s4is/errors.hpp"

#include <cmath>
#include <cstring>

#include <algorithm>
#include <bit>
#include <numbers>

namespace s4is {

std::string to_string(Aggregation aggregation) {
    switch (aggregation) {
        case Aggregation::Single: return "single";
        case Aggregation::SeriesMin: return "series_min";
        case Aggregation::ParallelMax: return "parallel_max";
    }
    return "unknown";
}

void ProblemSpec::validate() const {
    if (components.empty()) throw ConfigError("problem '" + name + "' has no performance function");
    if (aggregation == Aggregation::Single && components.size() != 1) {
        throw ConfigError("problem '" + name + "': single aggregation takes exactly one component");
    }
    if (aggregation != Aggregation::Single && components.size() < 2) {
        throw ConfigError("problem '" + name + "': series/parallel aggregation needs >= 2 components");
    }
}

Evaluation evaluate(const ProblemSpec& problem, const Vector& theta) {
    if (static_cast<std::size_t>(theta.size()) != problem.dim()) {
        throw PreconditionError("input has dimension " + std::to_string(theta.size()) + ", problem '" +
                                problem.name + "' expects " + std::to_string(problem.dim()));
    }
    Evaluation out;
    out.components.reserve(problem.components.size());
    for (const auto& fn : problem.components) {
        const double v = fn(theta);
        if (!std::isfinite(v)) throw NumericError("performance function of '" + problem.name + "' returned a non-finite value");
        out.components.push_back(v);
    }
    switch (problem.aggregation) {
        case Aggregation::Single: out.g = out.components.front(); break;
        case Aggregation::SeriesMin: out.g = *std::min_element(out.components.begin(), out.components.end()); break;
        case Aggregation::ParallelMax: out.g = *std::max_element(out.components.begin(), out.components.end()); break;
    }
    return out;
}

EvaluationLedger::EvaluationLedger(const ProblemSpec& problem) : problem_(&problem) { problem.validate(); }

namespace {

std::vector<std::uint64_t> cache_key(const Vector& theta) {
    std::vector<std::uint64_t> key(static_cast<std::size_t>(theta.size()));
    for (Eigen::Index i = 0; i < theta.size(); ++i) key[static_cast<std::size_t>(i)] = std::bit_cast<std::uint64_t>(theta[i]);
    return key;
}

}  // namespace

Evaluation EvaluationLedger::evaluate(const Vector& theta) {
    auto key = cache_key(theta);
    if (auto it = cache_.find(key); it != cache_.end()) {
        if (it->second.preloaded) {
            ++count_;
            ++replayed_;
            it->second.preloaded = false;
        } else {
            ++hits_;
        }
        return it->second.value;
    }
    Evaluation out = s4is::evaluate(*problem_, theta);
    ++count_;
    cache_.emplace(std::move(key), Entry{out, false});
    return out;
}

void EvaluationLedger::preload(const Vector& theta, const Evaluation& value) {
    if (static_cast<std::size_t>(theta.size()) != problem_->dim()) throw PreconditionError("preloaded point dimension mismatch");
    if (value.components.size() != problem_->num_components()) throw PreconditionError("preloaded component count mismatch");
    cache_.insert_or_assign(cache_key(theta), Entry{value, true});
}

Evaluation EvaluationLedger::evaluate_u(const Vector& u) {
    return evaluate(problem_->marginals.from_standard_normal(u));
}

const std::vector<std::string>& builtin_problem_names() {
    static const std::vector<std::string> names{"example1", "example2", "example3", "example4", "example5"};
    return names;
}

namespace {

double param_or(const std::map<std::string, double>& params, const std::string& key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

void reject_unknown(const std::string& name, const std::map<std::string, double>& params,
                    std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : params) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            throw ConfigError("problem '" + name + "' does not take parameter '" + key + "'");
        }
        if (!std::isfinite(value)) throw ConfigError("problem '" + name + "' parameter '" + key + "' is not finite");
    }
}

ProblemSpec series_system() {
    ProblemSpec p{.name = "example1", .marginals = RandomVector::standard_normal(2), .components = {}};
    p.aggregation = Aggregation::SeriesMin;
    constexpr double r2 = std::numbers::sqrt2;
    p.components = {
        [](const Vector& t) { return 3.0 + 0.1 * (t[0] - t[1]) * (t[0] - t[1]) - r2 * (t[0] + t[1]) / 2.0; },
        [](const Vector& t) { return 3.0 + 0.1 * (t[0] - t[1]) * (t[0] - t[1]) + r2 * (t[0] + t[1]) / 2.0; },
        [](const Vector& t) { return (t[0] - t[1]) + 3.0 * r2; },
        [](const Vector& t) { return -(t[0] - t[1]) + 3.0 * r2; },
    };
    p.reference = ReferencePf{4.460e-3, "published reference (MCS, 1e6 samples)"};
    return p;
}

ProblemSpec oscillator() {
    // theta = [c1, c2, m, r, t1, F1]
    std::vector<Marginal> m{Marginal::normal(1.0, 0.1),  Marginal::normal(0.1, 0.01), Marginal::normal(1.0, 0.05),
                            Marginal::normal(0.5, 0.05), Marginal::normal(1.0, 0.2),  Marginal::normal(1.0, 0.2)};
    ProblemSpec p{.name = "example2", .marginals = RandomVector(std::move(m)), .components = {}};
    p.components = {[](const Vector& t) {
        const double c1 = t[0], c2 = t[1], mass = t[2], r = t[3], t1 = t[4], f1 = t[5];
        const double w0 = std::sqrt((c1 + c2) / mass);
        return 3.0 * r - std::abs(2.0 * f1 / (mass * w0 * w0) * std::sin(w0 * t1 / 2.0));
    }};
    p.reference = ReferencePf{0.02857, "published reference (MCS, 1e6 samples)"};
    return p;
}

ProblemSpec multimodal() {
    ProblemSpec p{.name = "example3",
                  .marginals = RandomVector({Marginal::normal(1.5, 1.0), Marginal::normal(2.5, 1.0)}),
                  .components = {}};
    p.components = {[](const Vector& t) {
        return -(t[0] * t[0] + 4.0) * (t[1] - 1.0) / 20.0 + std::sin(2.5 * t[0]) + 2.0;
    }};
    p.reference = ReferencePf{0.03130, "published reference (MCS, 1e6 samples)"};
    return p;
}

ProblemSpec reliability_levels(double c) {
    ProblemSpec p{.name = "example4", .marginals = RandomVector::standard_normal(2), .components = {}};
    p.aggregation = Aggregation::SeriesMin;
    p.params["c"] = c;
    p.components = {
        [c](const Vector& t) {
            const double q = t[0] / 5.0;
            return c - 1.0 - t[1] + std::exp(-t[0] * t[0] / 10.0) + q * q * q * q;
        },
        [c](const Vector& t) { return c * c / 2.0 - t[0] * t[1]; },
    };
    if (c == 3.0) p.reference = ReferencePf{3.470e-3, "published reference (MCS, 1e6 samples)"};
    if (c == 4.0) p.reference = ReferencePf{9.172e-5, "published reference (MCS, 4e6 samples)"};
    if (c == 5.0) p.reference = ReferencePf{9.485e-7, "published reference (MCS, 4e8 samples)"};
    return p;
}

ProblemSpec dimensionality(std::size_t d, double sd) {
    ProblemSpec p{.name = "example5",
                  .marginals = RandomVector(std::vector<Marginal>(d, Marginal::lognormal(1.0, sd))),
                  .components = {}};
    p.params["d"] = static_cast<double>(d);
    p.params["sd"] = sd;
    const double threshold = static_cast<double>(d) + 3.0 * sd * std::sqrt(static_cast<double>(d));
    p.components = {[threshold](const Vector& t) { return threshold - t.sum(); }};
    if (sd == 0.2) {
        if (d == 2) p.reference = ReferencePf{4.926e-3, "published reference (MCS, 1e6 samples)"};
        if (d == 10) p.reference = ReferencePf{2.744e-3, "published reference (MCS, 1e6 samples)"};
        if (d == 50) p.reference = ReferencePf{1.934e-3, "published reference (MCS, 1e6 samples)"};
    }
    return p;
}

}  // namespace

ProblemSpec builtin_problem(const std::string& name, const std::map<std::string, double>& params) {
    if (name == "example1") {
        reject_unknown(name, params, {});
        return series_system();
    }
    if (name == "example2") {
        reject_unknown(name, params, {});
        return oscillator();
    }
    if (name == "example3") {
        reject_unknown(name, params, {});
        return multimodal();
    }
    if (name == "example4") {
        reject_unknown(name, params, {"c"});
        const double c = param_or(params, "c", 3.0);
        if (c != 3.0 && c != 4.0 && c != 5.0) throw ConfigError("example4 takes c in {3, 4, 5}, got " + std::to_string(c));
        return reliability_levels(c);
    }
    if (name == "example5") {
        reject_unknown(name, params, {"d", "sd"});
        const double d = param_or(params, "d", 2.0);
        const double sd = param_or(params, "sd", 0.2);
        if (!(d >= 1.0) || d != std::floor(d) || d > 1e5) throw ConfigError("example5 takes an integer d >= 1");
        if (!(sd > 0.0)) throw ConfigError("example5 takes sd > 0");
        return dimensionality(static_cast<std::size_t>(d), sd);
    }
    throw ConfigError("unknown builtin problem '" + name + "'");
}

ProblemSpec external_problem(const std::string& command, RandomVector marginals) {
    const std::size_t dim = marginals.dim();
    ProblemSpec p{.name = "external", .marginals = std::move(marginals), .components = {}};
    p.components = {external_evaluator(command, dim)};
    return p;
}

ComponentFn external_evaluator(const std::string& command, std::size_t dim) {
    auto channel = std::make_shared<ExternalEvaluator>(command, dim);
    return [channel](const Vector& theta) { return channel->evaluate(theta); };
}

}  // namespace s4is
