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
 * Born-rule simulation of protocols, classification of the resulting
 * conditional probabilities, and evaluation of the capacity and
 * success-probability bounds for a given state and channel dimension.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "encodings.hpp"
#include "protocols.hpp"
#include "states.hpp"
#include "tensor_core.hpp"

namespace densecode {

enum class Classification { Deterministic, Unambiguous, Invalid };

inline const char *to_string(Classification c) {
    switch (c) {
    case Classification::Deterministic:
        return "deterministic";
    case Classification::Unambiguous:
        return "unambiguous";
    case Classification::Invalid:
        return "invalid";
    }
    return "invalid";
}

struct ClaimCheck {
    std::string label;
    double claimed = 0.0;
    double simulated = 0.0; // mean tau over live messages
    bool agrees = false;
};

struct ProtocolReport {
    std::string protocol_name;
    std::size_t schmidt_rank = 0;
    std::size_t channel_dim = 0;
    std::size_t slots = 0;
    std::size_t live_count = 0;
    /// Pr(y|x): row x = 1..slots, column y = 0..slots (column 0 is failure).
    std::vector<std::vector<double>> cond_prob;
    std::vector<double> taus;
    Classification classification = Classification::Invalid;
    double max_leakage = 0.0;
    double max_row_defect = 0.0;
    /// Live encoders are Dbar*D mutually orthogonal isometries filling every slot.
    bool orthogonal_isometric = false;
    Promise promise = Promise::Unambiguous;
    bool promise_met = false;
    std::vector<ClaimCheck> claims;

    [[nodiscard]] double mean_tau() const {
        double sum = 0.0;
        for (double t : taus) {
            sum += t;
        }
        return taus.empty() ? 0.0 : sum / static_cast<double>(taus.size());
    }

    /// <1/tau> over all slots, absent when some tau vanishes.
    [[nodiscard]] std::optional<double> mean_inverse_tau(double zero_tol = 1e-12) const {
        double sum = 0.0;
        for (double t : taus) {
            if (t <= zero_tol) {
                return std::nullopt;
            }
            sum += 1.0 / t;
        }
        return taus.empty() ? std::nullopt : std::optional<double>(sum / static_cast<double>(taus.size()));
    }
};

/// Pr(y|x) = Tr(B_y rho_x) for every live message; dead slots always fail.
inline ProtocolReport simulate(const Protocol &p, const ToleranceConfig &tol = {}) {
    p.validate();
    ProtocolReport r;
    r.protocol_name = p.name;
    r.schmidt_rank = p.state.rank();
    r.channel_dim = p.channel_dim;
    r.slots = p.slots;
    r.live_count = p.live_count();
    r.promise = p.promise;
    const auto &elements = p.povm.elements();
    for (std::size_t x = 0; x < p.slots; ++x) {
        std::vector<double> row(p.slots + 1, 0.0);
        if (x < p.live_count()) {
            const ComplexMatrix rho = bob_state(p.encoders[x], p.state);
            row[0] = (p.povm.failure() * rho).trace().real();
            for (std::size_t y = 0; y < p.slots; ++y) {
                row[y + 1] = (elements[y] * rho).trace().real();
            }
        } else {
            row[0] = 1.0;
        }
        double sum = 0.0;
        for (std::size_t y = 0; y <= p.slots; ++y) {
            sum += row[y];
            if (y != 0 && y != x + 1) {
                r.max_leakage = std::max(r.max_leakage, row[y]);
            }
        }
        r.max_row_defect = std::max(r.max_row_defect, std::abs(sum - 1.0));
        r.taus.push_back(row[x + 1]);
        r.cond_prob.push_back(std::move(row));
    }

    if (r.max_leakage > tol.abs_tol) {
        r.classification = Classification::Invalid;
    } else {
        const bool all_one = std::all_of(r.taus.begin(), r.taus.begin() + static_cast<std::ptrdiff_t>(r.live_count),
                                         [&](double t) { return t >= 1.0 - tol.abs_tol; });
        r.classification = all_one ? Classification::Deterministic : Classification::Unambiguous;
    }
    r.promise_met = (p.promise == Promise::Deterministic) ? r.classification == Classification::Deterministic
                                                          : r.classification != Classification::Invalid;

    const std::size_t full = p.state.rank() * p.channel_dim;
    if (p.state.rank() <= p.channel_dim && p.live_count() == full && p.slots == full &&
        std::all_of(p.encoders.begin(), p.encoders.end(), [](const KrausChannel &e) { return e.is_isometric(); })) {
        std::vector<ComplexMatrix> mats;
        for (const auto &e : p.encoders) {
            mats.push_back(e.operators().front());
        }
        r.orthogonal_isometric = check_orthogonality(std::span<const ComplexMatrix>(mats), tol).orthogonal;
    }

    double live_mean = 0.0;
    for (std::size_t x = 0; x < r.live_count; ++x) {
        live_mean += r.taus[x];
    }
    live_mean /= static_cast<double>(r.live_count);
    for (const auto &c : p.claims) {
        r.claims.push_back({c.label, c.value, live_mean, std::abs(c.value - live_mean) <= tol.abs_tol});
    }
    return r;
}

struct BoundsReport {
    std::size_t schmidt_rank = 0;
    std::size_t channel_dim = 0;
    double entanglement = 0.0; // H_E, bits
    /// log2 D + H_E, capped at 2 log2 D when Dbar > D.
    double capacity = 0.0;
    /// D / lambda_1^2 as a real number.
    double ld_real = 0.0;
    /// floor(D / lambda_1^2) intersected with Dbar*D (Dbar <= D) or mu (Dbar > D).
    std::size_t ld_cap = 0;
    /// Minimum Kraus rank ceil(Dbar / D) and message cap floor(Dbar D / xi); Dbar > D only.
    std::optional<std::size_t> xi;
    std::optional<std::size_t> mu;
    /// Unambiguous bounds, defined for Dbar <= D only.
    std::optional<double> inv_tau_floor;
    std::optional<double> avg_tau_cap;
    std::optional<double> info_ps_cap;
};

/// floor that treats values within `slack` below an integer as that integer.
inline std::size_t tolerant_floor(double v, double slack) {
    return static_cast<std::size_t>(std::floor(v + slack));
}

inline BoundsReport evaluate_bounds(const EntangledState &s, std::size_t d_chan, const ToleranceConfig &tol = {}) {
    if (d_chan == 0) {
        throw DomainError("evaluate_bounds: channel dimension must be positive");
    }
    BoundsReport b;
    const std::size_t n = s.rank();
    const double d = static_cast<double>(d_chan);
    b.schmidt_rank = n;
    b.channel_dim = d_chan;
    b.entanglement = entanglement_entropy(s);
    const double log_d = std::log2(d);
    b.capacity = log_d + b.entanglement;
    b.ld_real = d / (s.largest() * s.largest());
    const std::size_t ld_floor = tolerant_floor(b.ld_real, tol.abs_tol);
    if (n <= d_chan) {
        b.ld_cap = std::min(ld_floor, n * d_chan);
        const double lam2 = s.smallest() * s.smallest();
        b.inv_tau_floor = 1.0 / (static_cast<double>(n) * lam2);
        b.avg_tau_cap = static_cast<double>(n) * lam2;
        const double denom = log_d + std::log2(static_cast<double>(n));
        if (denom > 0.0) {
            b.info_ps_cap = b.capacity / denom;
        }
    } else {
        b.capacity = std::min(b.capacity, 2.0 * log_d);
        b.xi = (n + d_chan - 1) / d_chan;
        b.mu = n * d_chan / *b.xi;
        b.ld_cap = std::min(ld_floor, *b.mu);
    }
    return b;
}

struct InfoBoundCheck {
    bool holds = false;
    double lhs = 0.0; // P_s log2 L
    double rhs = 0.0; // log2 D + H_E
    double slack = 0.0;
};

/// P_s log2 L <= log2 D + H_E with P_s the unweighted mean tau over all slots.
inline InfoBoundCheck check_info_bound(const ProtocolReport &r, const EntangledState &s, std::size_t d_chan,
                                       const ToleranceConfig &tol = {}) {
    if (r.slots == 0) {
        throw DomainError("check_info_bound: report has no message slots");
    }
    InfoBoundCheck c;
    c.lhs = r.mean_tau() * std::log2(static_cast<double>(r.slots));
    c.rhs = std::log2(static_cast<double>(d_chan)) + entanglement_entropy(s);
    c.slack = c.rhs - c.lhs;
    c.holds = c.slack >= -tol.abs_tol;
    return c;
}

enum class CheckStatus { Passed, Failed, Skipped };

inline const char *to_string(CheckStatus s) {
    switch (s) {
    case CheckStatus::Passed:
        return "passed";
    case CheckStatus::Failed:
        return "failed";
    case CheckStatus::Skipped:
        return "skipped";
    }
    return "skipped";
}

struct BoundCheck {
    CheckStatus status = CheckStatus::Skipped;
    double value = 0.0;
    double bound = 0.0;
    /// Signed distance on the allowed side (positive = strictly inside the bound).
    double margin = 0.0;
    bool saturated = false;
    std::string note;
};

struct UnambiguousBoundsCheck {
    BoundCheck inverse_tau; // <1/tau> >= 1/(Dbar lambda_min^2)
    BoundCheck average_tau; // <tau> <= Dbar lambda_min^2, orthogonal isometric encoders only
};

inline UnambiguousBoundsCheck check_unambiguous_bounds(const ProtocolReport &r, const EntangledState &s,
                                                       const ToleranceConfig &tol = {}) {
    if (r.classification == Classification::Invalid) {
        throw DomainError("check_unambiguous_bounds: protocol is not unambiguous");
    }
    UnambiguousBoundsCheck out;
    const std::size_t n = s.rank();
    const double cap = static_cast<double>(n) * s.smallest() * s.smallest();
    out.inverse_tau.bound = 1.0 / cap;
    out.average_tau.bound = cap;
    out.average_tau.value = r.mean_tau();

    if (n > r.channel_dim || r.slots != n * r.channel_dim) {
        out.inverse_tau.note = "bounds apply to Dbar*D slots with Dbar <= D";
        out.average_tau.note = out.inverse_tau.note;
        return out;
    }

    if (const auto inv = r.mean_inverse_tau(tol.abs_tol)) {
        auto &c = out.inverse_tau;
        c.value = *inv;
        c.margin = c.value - c.bound;
        const double scale = std::max(1.0, c.bound);
        c.status = c.margin >= -tol.abs_tol * scale ? CheckStatus::Passed : CheckStatus::Failed;
        c.saturated = std::abs(c.margin) <= tol.abs_tol * scale;
    } else {
        out.inverse_tau.note = "some tau are zero";
    }

    auto &a = out.average_tau;
    a.margin = a.bound - a.value;
    if (r.orthogonal_isometric) {
        a.status = a.margin >= -tol.abs_tol ? CheckStatus::Passed : CheckStatus::Failed;
        a.saturated = std::abs(a.margin) <= tol.abs_tol;
    } else {
        a.note = "encoders are not Dbar*D orthogonal isometries";
    }
    return out;
}

/// log2 D + S(rho_B) - S(rho) for a density operator on H_A (x) H_B.
inline double noisy_capacity(const ComplexMatrix &rho, std::size_t dim_a, std::size_t dim_b, std::size_t d_chan,
                             const ToleranceConfig &tol = {}) {
    if (d_chan == 0) {
        throw DomainError("noisy_capacity: channel dimension must be positive");
    }
    const double s_total = von_neumann_entropy(rho, tol);
    const ComplexMatrix rho_b = partial_trace(rho, dim_a, dim_b, Factor::Second, tol);
    return std::log2(static_cast<double>(d_chan)) + von_neumann_entropy(rho_b, tol) - s_total;
}

/// Largest success probability an extra message could have without
/// disturbing the existing ones: the weight of its output outside the span of
/// every live output support.
inline double extra_message_success(const Protocol &p, const KrausChannel &extra, const ToleranceConfig &tol = {}) {
    p.validate();
    const Eigen::Index dim = p.joint_dim();
    ComplexMatrix span(dim, 0);
    for (const auto &e : p.encoders) {
        for (const auto &k : output_kets(e, p.state)) {
            span.conservativeResize(Eigen::NoChange, span.cols() + 1);
            span.col(span.cols() - 1) = k;
        }
    }
    const ComplexMatrix basis = range_basis(span, tol);
    const ComplexMatrix perp = ComplexMatrix::Identity(dim, dim) - basis * basis.adjoint();
    return (perp * bob_state(extra, p.state)).trace().real();
}

} // namespace densecode
