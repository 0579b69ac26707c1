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

#include "densecode/protocols.hpp"
#include "densecode/serialization.hpp"
#include "densecode/verify.hpp"

using namespace densecode;

namespace {

void expect_reports_equal(const ProtocolReport &a, const ProtocolReport &b, double tol) {
    ASSERT_EQ(a.cond_prob.size(), b.cond_prob.size());
    for (std::size_t x = 0; x < a.cond_prob.size(); ++x) {
        ASSERT_EQ(a.cond_prob[x].size(), b.cond_prob[x].size());
        for (std::size_t y = 0; y < a.cond_prob[x].size(); ++y) {
            EXPECT_NEAR(a.cond_prob[x][y], b.cond_prob[x][y], tol);
        }
    }
    EXPECT_EQ(a.classification, b.classification);
    EXPECT_EQ(a.live_count, b.live_count);
    EXPECT_EQ(a.promise_met, b.promise_met);
    ASSERT_EQ(a.claims.size(), b.claims.size());
    for (std::size_t k = 0; k < a.claims.size(); ++k) {
        EXPECT_EQ(a.claims[k].label, b.claims[k].label);
        EXPECT_EQ(a.claims[k].agrees, b.claims[k].agrees);
    }
}

} // namespace

TEST(Json, MatrixRoundTrip) {
    ComplexMatrix m(2, 3);
    m << Complex(1, 2), Complex(-0.5, 0), Complex(0, 1e-17), Complex(3, 4), Complex(0.1, 0.2), Complex(-7, 0.25);
    EXPECT_EQ(matrix_from_json(json::parse(matrix_to_json(m).dump())), m);
}

TEST(Json, MatrixAcceptsRealEntries) {
    const auto m = matrix_from_json(json::parse("[[1, 0], [0, [0, 1]]]"));
    EXPECT_EQ(m(1, 1), Complex(0, 1));
    EXPECT_THROW(matrix_from_json(json::parse("[[1, 0], [0]]")), ParseError);
    EXPECT_THROW(matrix_from_json(json::parse("[[\"a\"]]")), ParseError);
    EXPECT_THROW(matrix_from_json(json::parse("[]")), ParseError);
}

TEST(Json, State) {
    const auto s = state_from_json(json::parse(R"({"lambda_sq": [0.2, 0.5, 0.3]})"));
    EXPECT_NEAR(s.squared()[0], 0.5, 1e-15);
    EXPECT_THROW(state_from_json(json::parse(R"({"coeffs": [1]})")), ParseError);
    EXPECT_THROW(state_from_json(json::parse(R"({"lambda_sq": ["x"]})")), ParseError);
    EXPECT_THROW(state_from_json(json::parse(R"({"lambda_sq": [-1, 2]})")), DomainError);
}

TEST(Json, Channel) {
    const KrausChannel ch(Isometry(ComplexMatrix::Identity(3, 2)));
    const auto back = channel_from_json(json::parse(channel_to_json(ch).dump()));
    EXPECT_EQ(back.operators().front(), ch.operators().front());
    EXPECT_THROW(channel_from_json(json::parse(R"({"kraus": [[[2, 0], [0, 2]]]})")), DomainError);
}

TEST(Json, ProtocolRoundTripEveryConstructor) {
    const auto s3 = EntangledState::from_squared({0.5, 0.3, 0.2});
    std::vector<Protocol> all{deterministic_uniform_protocol(2, 3),
                              saturated_unambiguous_protocol(EntangledState::from_squared({0.7, 0.3}), 2).protocol,
                              tailored_protocol(s3, 3),
                              subspace_protocol(s3, 2),
                              factorized_deterministic_protocol(EntangledState::from_squared({0.3, 0.3, 0.2, 0.2}), 2)};
    for (const auto &p : all) {
        const auto text = protocol_to_json(p).dump();
        const auto back = protocol_from_json(json::parse(text));
        EXPECT_EQ(back.name, p.name);
        EXPECT_EQ(back.slots, p.slots);
        EXPECT_EQ(back.promise, p.promise);
        expect_reports_equal(simulate(p), simulate(back), 1e-12);
    }
}

TEST(Json, ProtocolValidation) {
    auto j = protocol_to_json(deterministic_uniform_protocol(2, 2));
    j["channel_dim"] = 3;
    EXPECT_ANY_THROW(protocol_from_json(j));
    auto k = protocol_to_json(deterministic_uniform_protocol(2, 2));
    k.erase("povm");
    EXPECT_THROW(protocol_from_json(k), ParseError);
    auto m = protocol_to_json(deterministic_uniform_protocol(2, 2));
    m["promise"] = "maybe";
    EXPECT_THROW(protocol_from_json(m), ParseError);
}

TEST(Json, ReportsCarryKeyFields) {
    const auto r = simulate(deterministic_uniform_protocol(2, 2));
    const auto j = report_to_json(r);
    EXPECT_EQ(j["classification"], "deterministic");
    EXPECT_EQ(j["cond_prob"].size(), 4u);
    const auto b = bounds_to_json(evaluate_bounds(EntangledState::from_squared({0.5, 0.3, 0.2}), 2));
    EXPECT_EQ(b["xi"], 2);
    EXPECT_EQ(b["mu"], 3);
    EXPECT_FALSE(b.contains("avg_tau_cap"));
}

TEST(Tables, MentionKeyQuantities) {
    const auto text = format_bounds_table(evaluate_bounds(EntangledState::uniform(2), 2));
    EXPECT_NE(text.find("L_d cap"), std::string::npos);
    const auto rep = format_report_table(simulate(subspace_protocol(EntangledState::from_squared({0.5, 0.3, 0.2}), 2)));
    EXPECT_NE(rep.find("DISAGREES"), std::string::npos);
    EXPECT_NE(rep.find("unambiguous"), std::string::npos);
}
