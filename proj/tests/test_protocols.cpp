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
#include "densecode/verify.hpp"
#include "oracles.hpp"

using namespace densecode;

namespace {

void expect_povm_valid(const Povm &povm) {
    for (const auto &b : povm.elements()) {
        EXPECT_GE(oracle::jacobi_eigenvalues(b).front(), -1e-9);
    }
    EXPECT_GE(oracle::jacobi_eigenvalues(povm.failure()).front(), -1e-9);
    ComplexMatrix sum = povm.failure();
    for (const auto &b : povm.elements()) {
        sum += b;
    }
    EXPECT_LT((sum - ComplexMatrix::Identity(povm.dim(), povm.dim())).norm(), 1e-12);
}

/// Projector |A><A| / Dbar of an encoder's map-state ket.
ComplexMatrix ket_projector(const ComplexMatrix &a) {
    const ComplexVector k = transpose_to_ket(a);
    return k * k.adjoint() / k.squaredNorm();
}

} // namespace

TEST(Povm, RejectsOvercompleteAndNonPsd) {
    std::vector<ComplexMatrix> twice{ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(2, 2)};
    EXPECT_THROW(Povm::from_elements(twice, 2), DomainError);
    ComplexMatrix neg = ComplexMatrix::Zero(2, 2);
    neg(0, 0) = -0.5;
    EXPECT_THROW(Povm::from_elements({neg}, 2), DomainError);
    EXPECT_THROW(Povm::from_elements({ComplexMatrix::Identity(3, 3)}, 2), DomainError);
}

TEST(DeterministicUniform, StandardDenseCoding) {
    for (auto [n, d] : std::vector<std::pair<std::size_t, std::size_t>>{{2, 2}, {2, 3}, {1, 4}, {3, 3}}) {
        const auto p = deterministic_uniform_protocol(n, d);
        EXPECT_EQ(p.slots, n * d);
        expect_povm_valid(p.povm);
        const auto r = simulate(p);
        EXPECT_EQ(r.classification, Classification::Deterministic);
        for (double t : r.taus) {
            EXPECT_NEAR(t, 1.0, 1e-12);
        }
        // pairwise orthogonal Bob states
        for (std::size_t x = 0; x < p.encoders.size(); ++x) {
            for (std::size_t y = x + 1; y < p.encoders.size(); ++y) {
                EXPECT_LT(std::abs((bob_state(p.encoders[x], p.state) * bob_state(p.encoders[y], p.state)).trace()),
                          1e-12);
            }
        }
    }
    EXPECT_THROW(deterministic_uniform_protocol(3, 2), DomainError);
}

TEST(Saturated, QubitExample) {
    const auto sp = saturated_unambiguous_protocol(EntangledState::from_squared({0.7, 0.3}), 2);
    expect_povm_valid(sp.protocol.povm);
    const auto r = simulate(sp.protocol);
    ASSERT_EQ(r.taus.size(), 4u);
    for (double t : r.taus) {
        EXPECT_NEAR(t, 0.6, 1e-12);
    }
    EXPECT_EQ(r.classification, Classification::Unambiguous);
}

TEST(Saturated, UniformIsDeterministic) {
    const auto sp = saturated_unambiguous_protocol(EntangledState::uniform(3), 3);
    const auto r = simulate(sp.protocol);
    EXPECT_EQ(r.classification, Classification::Deterministic);
}

TEST(Saturated, ThreeLevelExample) {
    const auto sp = saturated_unambiguous_protocol(EntangledState::from_squared({0.5, 0.3, 0.2}), 3);
    const auto r = simulate(sp.protocol);
    ASSERT_EQ(r.taus.size(), 9u);
    for (double t : r.taus) {
        EXPECT_NEAR(t, 0.6, 1e-12);
    }
}

TEST(Saturated, DesignInvariants) {
    const auto s = EntangledState::from_squared({0.5, 0.3, 0.2});
    const auto sp = saturated_unambiguous_protocol(s, 4);
    ComplexMatrix sum = ComplexMatrix::Zero(12, 12);
    for (const auto &b : sp.design.kets_b) {
        sum += b * b.adjoint();
    }
    EXPECT_GE(oracle::jacobi_eigenvalues(ComplexMatrix::Identity(12, 12) - sum).front(), -1e-9);
    for (std::size_t y = 0; y < sp.design.kets_b.size(); ++y) {
        for (std::size_t x = 0; x < sp.protocol.encoders.size(); ++x) {
            const ComplexVector c = output_kets(sp.protocol.encoders[x], s).front();
            const Complex amp = sp.design.kets_b[y].dot(c);
            const double expect = x == y ? std::sqrt(sp.design.taus[x]) : 0.0;
            EXPECT_LT(std::abs(amp - expect), 1e-9);
        }
    }
}

TEST(Saturated, Preconditions) {
    EXPECT_THROW(saturated_unambiguous_protocol(EntangledState::uniform(3), 2), DomainError);
    std::vector<Isometry> same(4, Isometry(ComplexMatrix::Identity(2, 2)));
    EXPECT_THROW(saturated_unambiguous_protocol(EntangledState::uniform(2), 2, IsometryFamily(same)), DomainError);
}

TEST(Saturated, RandomStatesSaturate) {
    std::mt19937_64 rng(211);
    for (std::size_t n = 2; n <= 4; ++n) {
        for (int trial = 0; trial < 100; ++trial) {
            const auto s = random_state(n, rng);
            const auto sp = saturated_unambiguous_protocol(s, n);
            const auto r = simulate(sp.protocol);
            const double target = static_cast<double>(n) * s.smallest() * s.smallest();
            for (double t : r.taus) {
                ASSERT_NEAR(t, target, 1e-9);
            }
            ASSERT_LT(r.max_row_defect, 1e-10);
        }
    }
}

TEST(Saturated, CustomOrthogonalFamily) {
    std::mt19937_64 rng(223);
    const auto base = standard_family(2, 3);
    const ComplexMatrix u = haar_unitary(3, rng);
    const ComplexMatrix v = haar_unitary(2, rng);
    std::vector<Isometry> members;
    for (const auto &m : base.members()) {
        members.emplace_back(ComplexMatrix(u * m.matrix() * v));
    }
    const auto s = EntangledState::from_squared({0.65, 0.35});
    const auto r = simulate(saturated_unambiguous_protocol(s, 3, IsometryFamily(members)).protocol);
    for (double t : r.taus) {
        EXPECT_NEAR(t, 0.7, 1e-9);
    }
}

TEST(Reconstruct, RecoversFamilyUpToPhase) {
    std::mt19937_64 rng(227);
    for (std::size_t n = 2; n <= 3; ++n) {
        const auto s = random_state(n, rng);
        const auto sp = saturated_unambiguous_protocol(s, n + 1);
        const auto rebuilt = reconstruct_encodings(sp.design, s);
        ASSERT_EQ(rebuilt.size(), sp.protocol.encoders.size());
        for (std::size_t x = 0; x < rebuilt.size(); ++x) {
            EXPECT_LT((ket_projector(rebuilt[x].matrix()) - ket_projector(sp.protocol.encoders[x].operators().front()))
                          .norm(),
                      1e-8);
        }
    }
}

TEST(Reconstruct, UniformExact) {
    const auto sp = saturated_unambiguous_protocol(EntangledState::uniform(2), 2);
    const auto rebuilt = reconstruct_encodings(sp.design, EntangledState::uniform(2));
    for (std::size_t x = 0; x < rebuilt.size(); ++x) {
        EXPECT_LT((rebuilt[x].matrix() - sp.protocol.encoders[x].operators().front()).norm(), 1e-12);
    }
}

TEST(Reconstruct, Errors) {
    const auto s = EntangledState::uniform(2);
    auto sp = saturated_unambiguous_protocol(s, 2);
    UnambiguousDesign dependent = sp.design;
    dependent.kets_b[1] = dependent.kets_b[0];
    EXPECT_THROW(reconstruct_encodings(dependent, s), DomainError);
    UnambiguousDesign zero_tau = sp.design;
    zero_tau.taus[0] = 0.0;
    EXPECT_THROW(reconstruct_encodings(zero_tau, s), DomainError);
}

TEST(Tailored, EpsilonExample) {
    const double e2 = 0.01;
    const auto s = EntangledState::from_squared({(1 - e2) / 2, (1 - e2) / 2, e2});
    const auto p = tailored_protocol(s, 3);
    expect_povm_valid(p.povm);
    const auto r = simulate(p);
    ASSERT_EQ(r.taus.size(), 9u);
    EXPECT_EQ(r.live_count, 6u);
    EXPECT_NEAR(r.mean_tau(), 0.66, 1e-9);
    EXPECT_GT(r.mean_tau(), 3 * e2);
    for (std::size_t x = 0; x < 6; ++x) {
        EXPECT_NEAR(r.taus[x], 0.99, 1e-9);
    }
    for (std::size_t x = 6; x < 9; ++x) {
        EXPECT_EQ(r.taus[x], 0.0);
        EXPECT_EQ(r.cond_prob[x][0], 1.0);
    }
    EXPECT_EQ(r.classification, Classification::Unambiguous);
}

TEST(Tailored, UniformStateIsWorseThanSaturated) {
    const auto s = EntangledState::uniform(3);
    const auto tail = simulate(tailored_protocol(s, 3));
    const auto sat = simulate(saturated_unambiguous_protocol(s, 3).protocol);
    // filter keeps 2/3 of the weight, live slots are 6 of 9
    EXPECT_NEAR(tail.mean_tau(), (2.0 / 3.0) * (2.0 / 3.0), 1e-9);
    EXPECT_NEAR(sat.mean_tau(), 1.0, 1e-9);
}

TEST(Tailored, NonUniformSurvivors) {
    const auto r = simulate(tailored_protocol(EntangledState::from_squared({0.5, 0.3, 0.2}), 3));
    EXPECT_NEAR(r.mean_tau(), 0.4, 1e-9);
    for (std::size_t x = 0; x < r.live_count; ++x) {
        EXPECT_NEAR(r.taus[x], 0.8 * 2 * 0.375, 1e-9);
    }
    ASSERT_EQ(r.claims.size(), 1u);
    EXPECT_TRUE(r.claims[0].agrees);
}

TEST(Tailored, Preconditions) {
    EXPECT_THROW(tailored_protocol(EntangledState::from_squared({0.6, 0.4}), 2), DomainError);
    EXPECT_THROW(tailored_protocol(EntangledState::from_squared({0.5, 0.3, 0.2}), 2), DomainError);
}

TEST(Subspace, RankThreeExample) {
    const auto s = EntangledState::from_squared({0.5, 0.3, 0.2});
    EXPECT_NEAR(subspace_probability(s, 2), 0.8, 1e-12);
    const auto p = subspace_protocol(s, 2);
    expect_povm_valid(p.povm);
    const auto r = simulate(p);
    ASSERT_EQ(r.taus.size(), 4u);
    for (double t : r.taus) {
        EXPECT_NEAR(t, 0.6, 1e-9);
    }
    ASSERT_EQ(r.claims.size(), 2u);
    EXPECT_TRUE(r.claims[0].agrees);
    EXPECT_FALSE(r.claims[1].agrees);
    EXPECT_NEAR(r.claims[1].claimed, 0.48, 1e-12);
}

TEST(Subspace, UniformRankFour) {
    const auto s = EntangledState::uniform(4);
    EXPECT_NEAR(subspace_probability(s, 2), 0.5, 1e-12);
    const auto r = simulate(subspace_protocol(s, 2));
    for (double t : r.taus) {
        EXPECT_NEAR(t, 0.5, 1e-9);
    }
}

TEST(Subspace, UniformTopBlockGivesPm) {
    const auto s = EntangledState::from_squared({0.4, 0.4, 0.15, 0.05});
    const auto r = simulate(subspace_protocol(s, 2));
    for (double t : r.taus) {
        EXPECT_NEAR(t, subspace_probability(s, 2), 1e-9);
    }
    EXPECT_THROW(subspace_protocol(EntangledState::uniform(2), 2), DomainError);
}

TEST(Factorized, PairedCoefficients) {
    const auto s = EntangledState::from_squared({0.3, 0.3, 0.2, 0.2});
    const auto p = factorized_deterministic_protocol(s, 2);
    expect_povm_valid(p.povm);
    const auto r = simulate(p);
    ASSERT_EQ(r.taus.size(), 4u);
    EXPECT_EQ(r.classification, Classification::Deterministic);
    EXPECT_TRUE(r.promise_met);
    const auto ru = simulate(factorized_deterministic_protocol(EntangledState::uniform(4), 2));
    EXPECT_EQ(ru.classification, Classification::Deterministic);
}

TEST(Factorized, GroupingMustHold) {
    EXPECT_THROW(factorized_deterministic_protocol(EntangledState::from_squared({0.4, 0.3, 0.2, 0.1}), 2), DomainError);
    EXPECT_THROW(factorized_deterministic_protocol(EntangledState::uniform(3), 2), DomainError);
    EXPECT_THROW(factorized_deterministic_protocol(EntangledState::uniform(2), 2), DomainError);
}

TEST(NoExtension, RandomExtraMessageCannotSucceed) {
    std::mt19937_64 rng(229);
    for (auto [n, d] : std::vector<std::pair<std::size_t, std::size_t>>{{2, 2}, {2, 3}, {3, 3}}) {
        const auto p = deterministic_uniform_protocol(n, d);
        for (int trial = 0; trial < 10; ++trial) {
            const auto extra = random_kraus_channel(n, d, 1 + static_cast<std::size_t>(trial % 3), rng);
            EXPECT_LT(extra_message_success(p, extra), 1e-9);
        }
    }
}
