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

// Seeded random generators for states, unitaries and channels.

#pragma once

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "encodings.hpp"
#include "states.hpp"
#include "tensor_core.hpp"

namespace densecode {

template <class Rng> ComplexMatrix ginibre(Eigen::Index rows, Eigen::Index cols, Rng &rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    ComplexMatrix g(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            g(i, j) = Complex(normal(rng), normal(rng));
        }
    }
    return g;
}

/// Haar-distributed unitary (QR of a Ginibre matrix with the R-diagonal phases removed).
template <class Rng> ComplexMatrix haar_unitary(Eigen::Index n, Rng &rng) {
    Eigen::HouseholderQR<ComplexMatrix> qr(ginibre(n, n, rng));
    ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(n, n);
    const ComplexMatrix r = qr.matrixQR().template triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < n; ++j) {
        const Complex d = r(j, j);
        if (std::abs(d) > 0.0) {
            q.col(j) *= d / std::abs(d);
        }
    }
    return q;
}

/// Full-rank state with Schmidt coefficients drawn uniformly from the probability simplex.
template <class Rng> EntangledState random_state(std::size_t rank, Rng &rng) {
    std::exponential_distribution<double> expo(1.0);
    std::vector<double> p(rank);
    for (auto &v : p) {
        // keep every weight away from zero so the Schmidt rank is exactly `rank`
        v = expo(rng) + 1e-6;
    }
    return EntangledState::from_squared(std::move(p));
}

/// Channel with `count` generic Kraus operators: blocks of a random isometry
/// from the input space into count * out_dim dimensions.
template <class Rng> KrausChannel random_kraus_channel(std::size_t in_dim, std::size_t out_dim, std::size_t count, Rng &rng) {
    const auto big = static_cast<Eigen::Index>(count * out_dim);
    const auto n = static_cast<Eigen::Index>(in_dim);
    if (big < n) {
        throw DomainError("random_kraus_channel: count * out_dim must be at least in_dim");
    }
    const ComplexMatrix v = haar_unitary(big, rng).leftCols(n);
    std::vector<ComplexMatrix> ops;
    for (std::size_t l = 0; l < count; ++l) {
        ops.emplace_back(v.middleRows(static_cast<Eigen::Index>(l * out_dim), static_cast<Eigen::Index>(out_dim)));
    }
    return KrausChannel(std::move(ops));
}

/// Random orthogonal family of `count` isometries d -> D (count <= D, d < D)
/// that is known to admit an orthogonal extension to d + 1 inputs: members
/// U S^beta Q R^alpha V for distinct shifts beta, random clock indices alpha,
/// and Haar unitaries U (channel) and V (input).
template <class Rng>
IsometryFamily random_extendable_family(std::size_t d, std::size_t d_chan, std::size_t count, Rng &rng) {
    if (d >= d_chan || count > d_chan || count == 0) {
        throw DomainError("random_extendable_family: need d < D and 1 <= count <= D");
    }
    const auto big = standard_family(d + 1, d_chan);
    const ComplexMatrix u = haar_unitary(static_cast<Eigen::Index>(d_chan), rng);
    const ComplexMatrix v = haar_unitary(static_cast<Eigen::Index>(d), rng);
    std::vector<std::size_t> betas(d_chan);
    std::iota(betas.begin(), betas.end(), 0);
    std::shuffle(betas.begin(), betas.end(), rng);
    std::uniform_int_distribution<std::size_t> pick_alpha(0, d);
    std::vector<Isometry> members;
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t x = pick_alpha(rng) * d_chan + betas[k];
        const ComplexMatrix full = u * big.members()[x].matrix();
        members.emplace_back(ComplexMatrix(full.leftCols(static_cast<Eigen::Index>(d)) * v));
    }
    return IsometryFamily(std::move(members));
}

} // namespace densecode
