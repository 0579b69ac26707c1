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

/**
 * @file
 * Constructive dense-coding protocols: Alice's encoders together with Bob's
 * POVM on H_c (x) H_b, ready for simulation.
 *
 * A Protocol has `slots` message labels x = 1..slots. The first
 * encoders.size() of them are live; any remaining slots are never encoded
 * and always end in the failure outcome. POVM element y (1-based) belongs
 * to slot y; the failure element B_0 completes the identity.
 */

#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "encodings.hpp"
#include "states.hpp"
#include "tensor_core.hpp"

namespace densecode {

class Povm {
  public:
    /// Elements B_1..B_L; B_0 = I - sum B_y must come out PSD.
    static Povm from_elements(std::vector<ComplexMatrix> elements, Eigen::Index dim, const ToleranceConfig &tol = {}) {
        ComplexMatrix rest = ComplexMatrix::Identity(dim, dim);
        for (const auto &b : elements) {
            if (b.rows() != dim || b.cols() != dim) {
                throw DomainError("Povm: element dimension mismatch");
            }
            if (!is_positive_semidefinite(b, tol)) {
                throw DomainError("Povm: element is not positive semidefinite");
            }
            rest -= b;
        }
        rest = 0.5 * (rest + rest.adjoint());
        if (!is_positive_semidefinite(rest, tol)) {
            throw DomainError("Povm: failure element I - sum B_y is not positive semidefinite");
        }
        Povm p;
        p.elements_ = std::move(elements);
        p.failure_ = std::move(rest);
        return p;
    }

    /// Rank-one elements |B_y><B_y| from unnormalized kets.
    static Povm from_kets(const std::vector<ComplexVector> &kets, Eigen::Index dim, const ToleranceConfig &tol = {}) {
        std::vector<ComplexMatrix> elements;
        elements.reserve(kets.size());
        for (const auto &k : kets) {
            if (k.size() != dim) {
                throw DomainError("Povm: ket dimension mismatch");
            }
            elements.emplace_back(k * k.adjoint());
        }
        return from_elements(std::move(elements), dim, tol);
    }

    [[nodiscard]] const std::vector<ComplexMatrix> &elements() const { return elements_; }
    [[nodiscard]] const ComplexMatrix &failure() const { return failure_; }
    [[nodiscard]] Eigen::Index dim() const { return failure_.rows(); }
    [[nodiscard]] std::size_t size() const { return elements_.size(); }

  private:
    std::vector<ComplexMatrix> elements_;
    ComplexMatrix failure_;
};

enum class Promise { Deterministic, Unambiguous };

inline const char *to_string(Promise p) { return p == Promise::Deterministic ? "deterministic" : "unambiguous"; }

/// A closed-form success probability a constructor attaches for comparison
/// against simulation (compared with the mean tau over live messages).
struct SuccessClaim {
    std::string label;
    double value = 0.0;
};

struct Protocol {
    std::string name;
    EntangledState state;
    std::size_t channel_dim = 0;
    std::vector<KrausChannel> encoders;
    std::size_t slots = 0;
    Povm povm;
    Promise promise = Promise::Unambiguous;
    std::vector<SuccessClaim> claims;

    [[nodiscard]] std::size_t live_count() const { return encoders.size(); }
    [[nodiscard]] Eigen::Index joint_dim() const {
        return static_cast<Eigen::Index>(channel_dim * state.rank());
    }

    void validate() const {
        if (encoders.empty() || slots < encoders.size()) {
            throw DomainError("Protocol: need at least one encoder and slots >= encoders");
        }
        for (const auto &e : encoders) {
            if (e.input_dim() != state.rank() || e.output_dim() != channel_dim) {
                throw DomainError("Protocol: encoder shape does not match (channel_dim x Schmidt rank)");
            }
        }
        if (povm.dim() != joint_dim()) {
            throw DomainError("Protocol: POVM does not act on the channel (x) Bob space");
        }
        if (povm.size() != slots) {
            throw DomainError("Protocol: POVM must have one element per message slot");
        }
    }
};

/// Bob's POVM kets and the success probabilities they realize.
struct UnambiguousDesign {
    std::vector<ComplexVector> kets_b;
    std::vector<double> taus;
};

namespace detail {

/// (I_c (x) k) applied to a ket on H_c (x) H_b.
inline ComplexVector apply_bob(const ComplexMatrix &k, const ComplexVector &ket, std::size_t channel_dim) {
    const auto nb = k.cols();
    ComplexVector out(ket.size());
    for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(channel_dim); ++c) {
        out.segment(c * nb, nb) = k * ket.segment(c * nb, nb);
    }
    return out;
}

/// (1/sqrt k) sum_{i<k} J|i> (x) |offset + i>, on H_c (x) C^bob_dim, for J of shape D x k.
inline ComplexVector embedded_uniform_ket(const ComplexMatrix &j, std::size_t bob_dim, std::size_t offset = 0) {
    const auto d = j.rows();
    const auto k = j.cols();
    const auto nb = static_cast<Eigen::Index>(bob_dim);
    const auto off = static_cast<Eigen::Index>(offset);
    ComplexVector ket = ComplexVector::Zero(d * nb);
    const double w = 1.0 / std::sqrt(static_cast<double>(k));
    for (Eigen::Index c = 0; c < d; ++c) {
        for (Eigen::Index i = 0; i < k; ++i) {
            ket(c * nb + off + i) = w * j(c, i);
        }
    }
    return ket;
}

inline std::vector<KrausChannel> as_channels(const IsometryFamily &family) {
    std::vector<KrausChannel> out;
    out.reserve(family.size());
    for (const auto &m : family.members()) {
        out.emplace_back(m);
    }
    return out;
}

/// Diagonal Bob filter diag(lambda_ref / lambda_j) on the first `keep` Schmidt components, zero elsewhere.
inline ComplexMatrix ratio_filter(const EntangledState &s, std::size_t keep) {
    const auto n = static_cast<Eigen::Index>(s.rank());
    const double ref = s.coefficients()[keep - 1];
    ComplexMatrix f = ComplexMatrix::Zero(n, n);
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(keep); ++j) {
        f(j, j) = ref / s.coefficients()[static_cast<std::size_t>(j)];
    }
    return f;
}

/// Rotates each POVM ket so <B_x|C_x> is real nonnegative and returns the taus.
inline std::vector<double> align_phases(std::vector<ComplexVector> &kets, const std::vector<KrausChannel> &encoders,
                                        const EntangledState &s) {
    std::vector<double> taus;
    for (std::size_t x = 0; x < encoders.size(); ++x) {
        const ComplexVector c = output_kets(encoders[x], s).front();
        const Complex amp = kets[x].dot(c); // <B_x|C_x>
        if (std::abs(amp) > 0.0) {
            kets[x] *= amp / std::abs(amp); // <B e^{i t}|C> = e^{-i t} <B|C>
        }
        taus.push_back(std::norm(amp));
    }
    return taus;
}

} // namespace detail

/// Uniformly entangled rank-Dbar state, standard-family isometries, and
/// projective measurement onto the orthonormal outputs. Dbar * D messages.
inline Protocol deterministic_uniform_protocol(std::size_t d_bar, std::size_t d_chan, const ToleranceConfig &tol = {}) {
    if (d_bar > d_chan) {
        throw DomainError("deterministic_uniform_protocol: requires Dbar <= D");
    }
    const auto family = standard_family(d_bar, d_chan);
    std::vector<ComplexVector> kets;
    for (const auto &m : family.members()) {
        kets.push_back(detail::embedded_uniform_ket(m.matrix(), d_bar));
    }
    const auto dim = static_cast<Eigen::Index>(d_bar * d_chan);
    return Protocol{"deterministic_uniform",
                    EntangledState::uniform(d_bar),
                    d_chan,
                    detail::as_channels(family),
                    family.size(),
                    Povm::from_kets(kets, dim, tol),
                    Promise::Deterministic,
                    {{"perfect transmission", 1.0}}};
}

struct SaturatedProtocol {
    Protocol protocol;
    UnambiguousDesign design;
};

/// Concentration-then-measure protocol: |B_x> = (I (x) K1)|Phi_x> with K1 the
/// Procrustean filter and |Phi_x> the uniform-state output of encoder x.
/// Every message succeeds with probability Dbar * lambda_min^2.
inline SaturatedProtocol saturated_unambiguous_protocol(const EntangledState &s, std::size_t d_chan,
                                                        const std::optional<IsometryFamily> &family = std::nullopt,
                                                        const ToleranceConfig &tol = {}) {
    const std::size_t n = s.rank();
    if (n > d_chan) {
        throw DomainError("saturated_unambiguous_protocol: Schmidt rank exceeds the channel dimension");
    }
    const IsometryFamily fam = family ? *family : standard_family(n, d_chan);
    if (fam.input_dim() != n || fam.output_dim() != d_chan) {
        throw DomainError("saturated_unambiguous_protocol: family shape must be D x Dbar");
    }
    if (!fam.orthogonal()) {
        throw DomainError("saturated_unambiguous_protocol: family is not orthogonal");
    }
    if (fam.size() != n * d_chan) {
        throw DomainError("saturated_unambiguous_protocol: family must have Dbar * D members");
    }
    const ComplexMatrix k1 = detail::ratio_filter(s, n);
    auto encoders = detail::as_channels(fam);
    std::vector<ComplexVector> kets;
    for (const auto &m : fam.members()) {
        kets.push_back(detail::apply_bob(k1, detail::embedded_uniform_ket(m.matrix(), n), d_chan));
    }
    auto taus = detail::align_phases(kets, encoders, s);
    const auto dim = static_cast<Eigen::Index>(n * d_chan);
    const double bound = static_cast<double>(n) * s.smallest() * s.smallest();
    Protocol p{"saturated",
               s,
               d_chan,
               std::move(encoders),
               fam.size(),
               Povm::from_kets(kets, dim, tol),
               Promise::Unambiguous,
               {{"Dbar * lambda_min^2", bound}}};
    return SaturatedProtocol{std::move(p), UnambiguousDesign{std::move(kets), std::move(taus)}};
}

/// Recovers Alice's isometries from Bob's kets through the dual basis:
/// |A_x> = sqrt(tau_x) (I (x) Phi^-1)|dual B_x>.
inline std::vector<Isometry> reconstruct_encodings(const UnambiguousDesign &design, const EntangledState &s,
                                                   const ToleranceConfig &tol = {}) {
    if (design.kets_b.size() != design.taus.size() || design.kets_b.empty()) {
        throw DomainError("reconstruct_encodings: kets and taus must be nonempty and of equal length");
    }
    for (double t : design.taus) {
        if (!(t > 0.0)) {
            throw DomainError("reconstruct_encodings: every tau must be positive");
        }
    }
    const std::size_t n = s.rank();
    const auto len = static_cast<std::size_t>(design.kets_b.front().size());
    if (len % n != 0) {
        throw DomainError("reconstruct_encodings: ket length is not a multiple of the Schmidt rank");
    }
    const std::size_t d_chan = len / n;
    const auto duals = dual_basis(design.kets_b, tol);
    RealVector inv(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) {
        inv(static_cast<Eigen::Index>(j)) = 1.0 / s.coefficients()[j];
    }
    const ComplexMatrix phi_inv = inv.cast<Complex>().asDiagonal();
    std::vector<Isometry> out;
    out.reserve(duals.size());
    for (std::size_t x = 0; x < duals.size(); ++x) {
        const ComplexVector a = std::sqrt(design.taus[x]) * detail::apply_bob(phi_inv, duals[x], d_chan);
        out.emplace_back(ket_to_operator(a, d_chan, n), tol);
    }
    return out;
}

/// Truncate the smallest Schmidt component, then run the saturated protocol
/// on the surviving rank-(Dbar-1) state. Encoders are the rank-(Dbar-1)
/// standard isometries extended to the full input space; the last D slots
/// are dead.
inline Protocol tailored_protocol(const EntangledState &s, std::size_t d_chan, const ToleranceConfig &tol = {}) {
    const std::size_t n = s.rank();
    if (n < 3) {
        throw DomainError("tailored_protocol: requires Schmidt rank >= 3");
    }
    if (n > d_chan) {
        throw DomainError("tailored_protocol: Schmidt rank exceeds the channel dimension");
    }
    const auto family = standard_family(n - 1, d_chan);
    const ComplexMatrix filter = detail::ratio_filter(s, n - 1);
    std::vector<KrausChannel> encoders;
    std::vector<ComplexVector> kets;
    for (const auto &m : family.members()) {
        const ComplexMatrix &j = m.matrix();
        ComplexMatrix k(j.rows(), j.cols() + 1);
        k.leftCols(j.cols()) = j;
        k.col(j.cols()) = detail::complement_basis(j).col(0);
        encoders.emplace_back(Isometry(std::move(k), tol));
        kets.push_back(detail::apply_bob(filter, detail::embedded_uniform_ket(j, n), d_chan));
    }
    detail::align_phases(kets, encoders, s);
    const auto dim = static_cast<Eigen::Index>(n * d_chan);
    const std::size_t slots = n * d_chan;
    while (kets.size() < slots) {
        kets.emplace_back(ComplexVector::Zero(dim));
    }
    const double eps2 = s.smallest() * s.smallest();
    const double lam = s.coefficients()[n - 2];
    const double tau_hat = static_cast<double>(n - 1) * lam * lam / (1.0 - eps2);
    return Protocol{"tailored",
                    s,
                    d_chan,
                    std::move(encoders),
                    slots,
                    Povm::from_kets(kets, dim, tol),
                    Promise::Unambiguous,
                    {{"(1 - lambda_min^2) * tau_hat", (1.0 - eps2) * tau_hat}}};
}

/// Weight of the top-D Schmidt block.
inline double subspace_probability(const EntangledState &s, std::size_t d_chan) {
    double pm = 0.0;
    for (std::size_t j = 0; j < std::min(d_chan, s.rank()); ++j) {
        pm += s.coefficients()[j] * s.coefficients()[j];
    }
    return pm;
}

/// Schmidt rank above D: Bob filters onto the top-D block and concentrates it
/// in one step; Alice applies the D x D standard unitaries to the block and
/// sends the tail through unchanged-rank Kraus operators that Bob discards.
inline Protocol subspace_protocol(const EntangledState &s, std::size_t d_chan, const ToleranceConfig &tol = {}) {
    const std::size_t n = s.rank();
    if (n <= d_chan) {
        throw DomainError("subspace_protocol: requires Schmidt rank > D (use the saturated protocol)");
    }
    const auto d = static_cast<Eigen::Index>(d_chan);
    const auto nn = static_cast<Eigen::Index>(n);
    const auto family = standard_family(d_chan, d_chan);

    // Tail operators: block k maps inputs D + k*D + i to channel state i.
    std::vector<ComplexMatrix> tail;
    for (Eigen::Index start = d; start < nn; start += d) {
        ComplexMatrix t = ComplexMatrix::Zero(d, nn);
        for (Eigen::Index i = 0; i < d && start + i < nn; ++i) {
            t(i, start + i) = 1.0;
        }
        tail.push_back(std::move(t));
    }
    const ComplexMatrix filter = detail::ratio_filter(s, d_chan);
    std::vector<KrausChannel> encoders;
    std::vector<ComplexVector> kets;
    for (const auto &m : family.members()) {
        ComplexMatrix head = ComplexMatrix::Zero(d, nn);
        head.leftCols(d) = m.matrix();
        std::vector<ComplexMatrix> ops{head};
        ops.insert(ops.end(), tail.begin(), tail.end());
        encoders.emplace_back(std::move(ops), tol);
        kets.push_back(detail::apply_bob(filter, detail::embedded_uniform_ket(m.matrix(), n), d_chan));
    }
    // phases from the head branch only; the tail branches are orthogonal to every ket
    for (std::size_t x = 0; x < kets.size(); ++x) {
        const ComplexVector c = transpose_to_ket(encoders[x].operators().front() * phi_map(s));
        const Complex amp = kets[x].dot(c);
        if (std::abs(amp) > 0.0) {
            kets[x] *= amp / std::abs(amp);
        }
    }
    const double pm = subspace_probability(s, d_chan);
    const double lam_d = s.coefficients()[d_chan - 1];
    const double lam_hat_sq = lam_d * lam_d / pm;
    const double dd = static_cast<double>(d_chan);
    const auto dim = static_cast<Eigen::Index>(n * d_chan);
    return Protocol{"subspace",
                    s,
                    d_chan,
                    std::move(encoders),
                    d_chan * d_chan,
                    Povm::from_kets(kets, dim, tol),
                    Promise::Unambiguous,
                    {{"P_m * D * lambdahat_D^2", pm * dd * lam_hat_sq}, {"D * lambda_D^2 * P_m (literal)", dd * lam_d * lam_d * pm}}};
}

/// Rank m*D states whose sorted coefficients come in m equal groups of D
/// factor as (fully entangled D x D pair) (x) (anything). Alice runs standard
/// dense coding on the pair and discards the rest, giving D^2 deterministic
/// messages with Kraus rank m.
inline Protocol factorized_deterministic_protocol(const EntangledState &s, std::size_t d_chan,
                                                  const ToleranceConfig &tol = {}) {
    const std::size_t n = s.rank();
    if (d_chan == 0 || n % d_chan != 0 || n / d_chan < 2) {
        throw DomainError("factorized_deterministic_protocol: Schmidt rank must be m * D with m >= 2");
    }
    const std::size_t groups = n / d_chan;
    constexpr double rel_tol = 1e-9;
    for (std::size_t g = 0; g < groups; ++g) {
        const double hi = s.coefficients()[g * d_chan];
        const double lo = s.coefficients()[g * d_chan + d_chan - 1];
        if (hi - lo > rel_tol * hi) {
            throw DomainError("factorized_deterministic_protocol: coefficients are not equal within groups of D");
        }
    }
    const auto d = static_cast<Eigen::Index>(d_chan);
    const auto nn = static_cast<Eigen::Index>(n);
    const auto family = standard_family(d_chan, d_chan);
    std::vector<KrausChannel> encoders;
    std::vector<ComplexMatrix> elements;
    const auto dim = static_cast<Eigen::Index>(n * d_chan);
    for (const auto &m : family.members()) {
        std::vector<ComplexMatrix> ops;
        ComplexMatrix proj = ComplexMatrix::Zero(dim, dim);
        for (std::size_t g = 0; g < groups; ++g) {
            ComplexMatrix a = ComplexMatrix::Zero(d, nn);
            a.middleCols(static_cast<Eigen::Index>(g) * d, d) = m.matrix();
            ops.push_back(std::move(a));
            const ComplexVector ket = detail::embedded_uniform_ket(m.matrix(), n, g * d_chan);
            proj += ket * ket.adjoint();
        }
        encoders.emplace_back(std::move(ops), tol);
        elements.push_back(std::move(proj));
    }
    return Protocol{"factorized",
                    s,
                    d_chan,
                    std::move(encoders),
                    d_chan * d_chan,
                    Povm::from_elements(std::move(elements), dim, tol),
                    Promise::Deterministic,
                    {{"perfect transmission", 1.0}}};
}

/// Projective POVM for encoders whose outputs have (near-)orthogonal supports:
/// each output support is orthonormalized, the union is symmetrically
/// orthonormalized, and B_x projects onto message x's share of it.
inline Protocol projective_completion_protocol(const EntangledState &s, std::size_t d_chan,
                                               std::vector<KrausChannel> encoders, const ToleranceConfig &tol = {}) {
    const auto dim = static_cast<Eigen::Index>(s.rank() * d_chan);
    std::vector<Eigen::Index> owner_count;
    ComplexMatrix all(dim, 0);
    for (const auto &e : encoders) {
        const auto kets = output_kets(e, s);
        ComplexMatrix m(dim, static_cast<Eigen::Index>(kets.size()));
        for (std::size_t l = 0; l < kets.size(); ++l) {
            m.col(static_cast<Eigen::Index>(l)) = kets[l];
        }
        const ComplexMatrix basis = range_basis(m, tol);
        owner_count.push_back(basis.cols());
        all.conservativeResize(Eigen::NoChange, all.cols() + basis.cols());
        all.rightCols(basis.cols()) = basis;
    }
    if (all.cols() > dim || numeric_rank(all, tol) < static_cast<std::size_t>(all.cols())) {
        throw DomainError("projective_completion_protocol: output supports are not linearly independent");
    }
    const ComplexMatrix ortho = symmetric_orthonormalize(all);
    std::vector<ComplexMatrix> elements;
    Eigen::Index col = 0;
    for (auto count : owner_count) {
        const ComplexMatrix block = ortho.middleCols(col, count);
        elements.emplace_back(block * block.adjoint());
        col += count;
    }
    const std::size_t slots = encoders.size();
    return Protocol{"completion", s, d_chan, std::move(encoders), slots,
                    Povm::from_elements(std::move(elements), dim, tol), Promise::Deterministic, {}};
}

} // namespace densecode
