#pragma once

#include "s4is/probability.hpp"
#include "s4is/types.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace s4is {

enum class Aggregation { Single, SeriesMin, ParallelMax };

std::string to_string(Aggregation aggregation);

/// Scalar performance function of original-space inputs; failure is g <= 0.
using ComponentFn = std::function<double(const Vector& theta)>;

struct ReferencePf {
    double pf = 0.0;
    std::string source;
};

struct ProblemSpec {
    std::string name;
    RandomVector marginals;
    std::vector<ComponentFn> components;
    Aggregation aggregation = Aggregation::Single;
    std::optional<ReferencePf> reference;
    /// Parameters the problem was built with, for reports.
    std::map<std::string, double> params;

    std::size_t dim() const { return marginals.dim(); }
    std::size_t num_components() const { return components.size(); }
    /// Throws ConfigError when the aggregation and component count disagree.
    void validate() const;
};

struct Evaluation {
    double g = 0.0;
    std::vector<double> components;
};

/// Evaluates every component and aggregates. Does not count.
Evaluation evaluate(const ProblemSpec& problem, const Vector& theta);

/// Counting front end of a problem: each distinct input costs one call.
class EvaluationLedger {
public:
    explicit EvaluationLedger(const ProblemSpec& problem);

    Evaluation evaluate(const Vector& theta);
    /// Maps u through the inverse transform first.
    Evaluation evaluate_u(const Vector& u);

    /// Seeds the cache with a result paid for in an earlier run. It is counted when first
    /// requested, as if evaluated then, but the performance function is not called.
    void preload(const Vector& theta, const Evaluation& value);

    std::size_t count() const { return count_; }
    std::size_t cache_hits() const { return hits_; }
    /// Evaluations served from preloaded results.
    std::size_t replayed() const { return replayed_; }
    const ProblemSpec& problem() const { return *problem_; }

private:
    const ProblemSpec* problem_;
    std::size_t count_ = 0;
    std::size_t hits_ = 0;
    std::size_t replayed_ = 0;
    struct Entry {
        Evaluation value;
        bool preloaded = false;
    };
    std::map<std::vector<std::uint64_t>, Entry> cache_;
};

/// Names accepted by builtin_problem.
const std::vector<std::string>& builtin_problem_names();

/// Benchmark problems. Parameters: example4 takes "c" in {3,4,5} (default 3);
/// example5 takes "d" >= 1 (default 2) and "sd" > 0 (default 0.2), with
/// g = d + 3 sd sqrt(d) - sum(theta) over lognormal(1, sd) inputs.
ProblemSpec builtin_problem(const std::string& name, const std::map<std::string, double>& params = {});

/// Child process speaking newline-delimited JSON over stdio:
///   request  {"id":N,"theta":[...]}
///   response {"id":N,"g":x} or {"id":N,"error":"msg"}
/// One request in flight at a time; any failure poisons the channel.
class ExternalEvaluator {
public:
    ExternalEvaluator(const std::string& command, std::size_t dim);
    ~ExternalEvaluator();
    ExternalEvaluator(const ExternalEvaluator&) = delete;
    ExternalEvaluator& operator=(const ExternalEvaluator&) = delete;

    double evaluate(const Vector& theta);
    std::uint64_t requests_sent() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

ComponentFn external_evaluator(const std::string& command, std::size_t dim);

ProblemSpec external_problem(const std::string& command, RandomVector marginals);

}  // namespace s4is
