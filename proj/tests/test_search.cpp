// Copyright 2026 The densecode Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "densecode/protocols.hpp"
#include "densecode/random.hpp"
#include "densecode/search.hpp"
#include "densecode/verify.hpp"

using namespace densecode;

namespace {

SearchConfig quick(std::uint64_t seed, std::size_t restarts = 8) {
    SearchConfig cfg;
    cfg.seed = seed;
    cfg.restarts = restarts;
    cfg.threads = 1;
    return cfg;
}

EntangledState qubit(double p) { return EntangledState::from_squared({p, 1.0 - p}); }

void expect_certified(const SearchResult &r, const EntangledState &s, std::size_t d) {
    ASSERT_TRUE(r.feasible);
    const auto rep = simulate(projective_completion_protocol(s, d, r.best_family));
    EXPECT_EQ(rep.classification, Classification::Deterministic);
    for (double t : rep.taus) {
        EXPECT_GE(t, 1.0 - 1e-6);
    }
}

} // namespace

TEST(SearchConfig, Validation) {
    SearchConfig cfg;
    EXPECT_EQ(cfg.restarts, 32u);
    EXPECT_EQ(cfg.max_iters, 5000u);
    EXPECT_EQ(cfg.success_defect, 1e-8);
    EXPECT_NO_THROW(cfg.validate());
    cfg.restarts = 0;
    EXPECT_THROW(cfg.validate(), DomainError);
    cfg.restarts = 1;
    cfg.success_defect = 0.0;
    EXPECT_THROW(cfg.validate(), DomainError);
}

TEST(Search, JacobianMatchesFiniteDifferences) {
    std::mt19937_64 rng(401);
    for (std::size_t blocks : {1u, 2u}) {
        const auto s = random_state(blocks == 1 ? 2 : 3, rng);
        const detail::OverlapProblem prob(s, 2, 3, blocks);
        std::vector<ComplexMatrix> u;
        for (std::size_t x = 0; x < 3; ++x) {
            u.push_back(haar_unitary(prob.m, rng));
        }
        const ComplexMatrix jac = prob.jacobian(u);
        const double h = 1e-6;
        for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(prob.param_count()); ++k) {
            Eigen::VectorXd delta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(prob.param_count()));
            auto shifted = [&](double step) {
                delta(k) = step;
                auto v = u;
                for (std::size_t x = 0; x < 3; ++x) {
                    v[x] = v[x] * expm_antihermitian(prob.generator(delta, x));
                }
                return prob.residuals(v);
            };
            const ComplexVector fd = (shifted(h) - shifted(-h)) / (2 * h);
            EXPECT_LT((fd - jac.col(k)).norm(), 1e-7) << "param " << k << " blocks " << blocks;
        }
    }
}

TEST(Search, UniformQubitFourMessages) {
    const auto r = search_deterministic(EntangledState::uniform(2), 2, 4, quick(1));
    EXPECT_TRUE(r.feasible);
    EXPECT_LT(r.defect, 1e-10);
    expect_certified(r, EntangledState::uniform(2), 2);
}

TEST(Search, ReportedDefectMatchesIndependentEvaluation) {
    const auto s = EntangledState::from_squared({0.5, 0.3, 0.2});
    const auto r = search_deterministic(s, 3, 5, quick(2, 4));
    EXPECT_NEAR(r.defect, overlap_defect(r.best_family, s), 1e-12);
    EXPECT_GE(r.defect, 0.0);
}

TEST(Search, QubitThreeMessagesNeedUniformState) {
    // A unitary W with <psi|(W x I)|psi> = 0 for lambda^2 = (p, 1-p), p != 1/2,
    // must be anti-diagonal; the product of two anti-diagonal unitaries is
    // diagonal, so a third message cannot be orthogonal to both.
    const auto s = qubit(0.6);
    const auto r = search_deterministic(s, 2, 3, quick(7));
    EXPECT_FALSE(r.feasible);
    EXPECT_GT(r.defect, 1e-3);
    EXPECT_TRUE(search_deterministic(qubit(0.5), 2, 3, quick(7)).feasible);
}

TEST(Search, QubitTwoMessagesAlwaysFeasible) {
    for (double p : {0.55, 0.7, 0.9}) {
        const auto r = search_deterministic(qubit(p), 2, 2, quick(3));
        expect_certified(r, qubit(p), 2);
    }
}

TEST(Search, RejectsBeyondCountingCap) {
    try {
        search_deterministic(qubit(0.75), 2, 3, quick(1));
        FAIL() << "expected BoundViolation";
    } catch (const BoundViolation &e) {
        EXPECT_EQ(e.cap(), 2u);
        EXPECT_NE(std::string(e.what()).find("lambda_1^2"), std::string::npos);
    }
}

TEST(Search, NeverFeasibleAboveCap) {
    std::mt19937_64 rng(409);
    for (int trial = 0; trial < 20; ++trial) {
        const auto s = random_state(2, rng);
        const auto cap = evaluate_bounds(s, 2).ld_cap;
        for (std::size_t l = cap + 1; l <= 4; ++l) {
            EXPECT_THROW(search_deterministic(s, 2, l, quick(1, 1)), BoundViolation);
        }
    }
}

TEST(Search, Preconditions) {
    EXPECT_THROW(search_deterministic(EntangledState::uniform(3), 2, 2), DomainError);
    EXPECT_THROW(search_deterministic(EntangledState::uniform(2), 2, 1), DomainError);
    EXPECT_THROW(search_deterministic(EntangledState::uniform(2), 2, 5), DomainError);
}

TEST(Search, SameSeedReproducesBitwise) {
    const auto s = qubit(0.6);
    const auto a = search_deterministic(s, 2, 3, quick(42, 4));
    const auto b = search_deterministic(s, 2, 3, quick(42, 4));
    EXPECT_EQ(a.defect, b.defect);
    EXPECT_EQ(a.best_restart, b.best_restart);
    EXPECT_EQ(a.iterations_used, b.iterations_used);
    auto threaded = quick(42, 4);
    threaded.threads = 4;
    EXPECT_EQ(search_deterministic(s, 2, 3, threaded).defect, a.defect);
}

TEST(Search, DefectIgnoresGlobalPhase) {
    const auto s = EntangledState::from_squared({0.5, 0.3, 0.2});
    const auto r = search_deterministic(s, 3, 4, quick(5, 2));
    auto family = r.best_family;
    auto ops = family[1].operators();
    for (auto &op : ops) {
        op *= std::polar(1.0, 1.234);
    }
    family[1] = KrausChannel(ops);
    EXPECT_NEAR(overlap_defect(family, s), overlap_defect(r.best_family, s), 1e-14);
}

TEST(SearchKraus, FactorizedStateFourMessages) {
    const auto s = EntangledState::from_squared({0.3, 0.3, 0.2, 0.2});
    const auto r = search_deterministic_kraus(s, 2, 4, 2, quick(11));
    expect_certified(r, s, 2);
}

TEST(SearchKraus, TwoMessagesThroughQubit) {
    const auto s = EntangledState::uniform(3);
    const auto r = search_deterministic_kraus(s, 2, 2, 2, quick(13));
    expect_certified(r, s, 2);
}

TEST(SearchKraus, BudgetAndCountLimits) {
    const auto s = EntangledState::uniform(3);
    EXPECT_THROW(search_deterministic_kraus(s, 2, 2, 1), BoundViolation);
    EXPECT_THROW(search_deterministic_kraus(s, 2, 4, 2), BoundViolation);
    EXPECT_THROW(search_deterministic_kraus(EntangledState::uniform(2), 2, 2, 2), DomainError);
}

TEST(PhaseBoundary, FourMessagesOnlyAtUniform) {
    const auto path = [](double t) { return qubit(0.5 + 0.4 * t); };
    const auto pb = phase_boundary(2, 4, path, quick(17));
    EXPECT_FALSE(pb.entire_path_feasible);
    EXPECT_NEAR(pb.threshold_lambda1_sq, 0.5, 0.01);
    EXPECT_LE(pb.width, 1e-2);
}

TEST(PhaseBoundary, ThreeMessagesOnlyAtUniform) {
    const auto path = [](double t) { return qubit(0.5 + 0.4 * t); };
    const auto pb = phase_boundary(2, 3, path, quick(19));
    EXPECT_NEAR(pb.threshold_lambda1_sq, 0.5, 0.01);
}

TEST(PhaseBoundary, EntirePathFeasible) {
    const auto path = [](double t) { return qubit(0.5 + 0.4 * t); };
    const auto pb = phase_boundary(2, 2, path, quick(23));
    EXPECT_TRUE(pb.entire_path_feasible);
    EXPECT_EQ(pb.threshold_t, 1.0);
}

TEST(PhaseBoundary, NoChangeAlongPath) {
    const auto path = [](double t) { return qubit(0.6 + 0.3 * t); };
    EXPECT_THROW(phase_boundary(2, 4, path, quick(29)), DomainError);
}
