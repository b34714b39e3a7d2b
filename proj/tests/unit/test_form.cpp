#include "oracle_values.hpp"

#include <s4is/errors.hpp>
#include <s4is/form.hpp>

#include <doctest.h>

#include <cmath>

using namespace s4is;

namespace {

ProblemSpec linear(const Vector& a, double beta) {
    ProblemSpec p{.name = "linear", .marginals = RandomVector::standard_normal(a.size()), .components = {}};
    const Vector n = a.normalized();
    p.components = {[n, beta](const Vector& u) { return beta - n.dot(u); }};
    return p;
}

}  // namespace

TEST_CASE("HL-RF solves a linear limit state in one step") {
    const ProblemSpec p = linear(Vector{{1.0, 0.0}}, 3.0);
    EvaluationLedger ledger(p);
    const MppResult r = hlrf_search(ledger, Vector::Zero(2));
    CHECK(r.converged);
    CHECK(r.beta == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(r.u_star(0) == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(std::abs(r.u_star(1)) < 1e-6);
    CHECK(r.iterations <= 2);
    CHECK(r.n_eval == ledger.count());
}

TEST_CASE("HL-RF from an offset start") {
    const ProblemSpec p = linear(Vector{{0.0, 1.0}}, 2.0);
    EvaluationLedger ledger(p);
    const MppResult r = hlrf_search(ledger, Vector{{1.0, 1.0}});
    CHECK(r.converged);
    CHECK(r.u_star(0) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(r.u_star(1) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("HL-RF on random linear limit states") {
    Rng rng(12);
    std::normal_distribution<double> z;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t d = 2 + trial % 5;
        Vector a(static_cast<Eigen::Index>(d)), start(static_cast<Eigen::Index>(d));
        for (std::size_t i = 0; i < d; ++i) {
            a(static_cast<Eigen::Index>(i)) = z(rng);
            start(static_cast<Eigen::Index>(i)) = 3.0 * z(rng);
        }
        const double beta = 1.0 + 3.0 * std::abs(z(rng));
        const ProblemSpec p = linear(a, beta);
        EvaluationLedger ledger(p);
        const MppResult r = hlrf_search(ledger, start);
        CHECK(r.converged);
        CHECK(r.iterations <= 2);
        CHECK(std::abs(r.beta - beta) <= 1e-6);
    }
}

TEST_CASE("vanishing gradient") {
    ProblemSpec p{.name = "flat", .marginals = RandomVector::standard_normal(2), .components = {}};
    p.components = {[](const Vector&) { return 1.0; }};
    EvaluationLedger ledger(p);
    CHECK_THROWS_AS(hlrf_search(ledger, Vector::Zero(2)), StationaryPointError);
    EvaluationLedger again(p);
    CHECK(hlrf_run(again, Vector::Zero(2)).status == HlrfStatus::Stationary);
}

TEST_CASE("FORM probability") {
    CHECK(form_pf(3.0) == doctest::Approx(oracle::kPhiMinus3).epsilon(1e-12));
    CHECK(form_pf(0.0) == doctest::Approx(0.5));
    CHECK(form_pf(4.0) == doctest::Approx(3.167e-5).epsilon(1e-3));
    double last = 1.0;
    for (double b = 0.0; b < 8.0; b += 0.25) {
        CHECK(form_pf(b) < last);
        last = form_pf(b);
    }
}

TEST_CASE("FORM on example4 with c = 3") {
    const ProblemSpec p = builtin_problem("example4", {{"c", 3}});
    EvaluationLedger ledger(p);
    Rng rng(0);
    const FormResult f = run_form(ledger, rng);
    CHECK(f.mpp.converged);
    CHECK(f.pf == doctest::Approx(1.350e-3).epsilon(0.10));
    CHECK(f.n_eval == ledger.count());
}

TEST_CASE("FORM on the symmetric series system restarts away from the origin") {
    const ProblemSpec p = builtin_problem("example1");
    EvaluationLedger ledger(p);
    Rng rng(1);
    const FormResult f = run_form(ledger, rng);
    CHECK(f.starts > 1);
    CHECK(f.mpp.converged);
    CHECK(f.mpp.beta == doctest::Approx(3.0).epsilon(1e-3));
}

TEST_CASE("multi-start search on example1 finds several design points") {
    const ProblemSpec p = builtin_problem("example1");
    EvaluationLedger ledger(p);
    Rng rng(5);
    const MultiStartResult r = multi_start_mpps(ledger, 20, rng);
    CHECK(r.mpps.size() >= 2);
    for (const MppResult& m : r.mpps) CHECK(m.beta == doctest::Approx(3.0).epsilon(0.02));
    for (std::size_t i = 0; i < r.mpps.size(); ++i)
        for (std::size_t j = i + 1; j < r.mpps.size(); ++j) CHECK((r.mpps[i].u_star - r.mpps[j].u_star).norm() >= 0.5);
    CHECK(r.n_eval == ledger.count());
}

TEST_CASE("multi-start on a linear limit state deduplicates to one point") {
    const ProblemSpec p = linear(Vector{{1.0, 1.0}}, 2.5);
    EvaluationLedger ledger(p);
    Rng rng(6);
    const MultiStartResult r = multi_start_mpps(ledger, 8, rng);
    CHECK(r.mpps.size() == 1);
}

TEST_CASE("single start on example5 d = 2") {
    const ProblemSpec p = builtin_problem("example5", {{"d", 2}});
    EvaluationLedger ledger(p);
    Rng rng(7);
    const MultiStartResult r = multi_start_mpps(ledger, 1, rng);
    REQUIRE(r.mpps.size() == 1);
    CHECK(r.mpps[0].beta == doctest::Approx(oracle::kBetaExample5D2).epsilon(0.25));
}
