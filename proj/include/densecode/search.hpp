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
 * Numerical search for deterministic encodings.
 *
 * Each message is encoded by V_x = U_x Q where U_x is a unitary on an
 * m-dimensional space and Q embeds Alice's Dbar-dimensional input. For
 * isometric encoding m = D; for a Kraus budget k the m = k*D rows of V_x are
 * split into k Kraus operators of shape D x Dbar. The objective is
 *
 *     defect = sum_{x<y} Tr(rho_x rho_y) = sum_{x<y} sum_{l,l'} |Tr(U_x^dag E_{ll'} U_y M)|^2
 *
 * with M = Q diag(lambda^2) Q^dag and E_{ll'} the block matrix unit linking
 * Kraus blocks l and l'. It vanishes exactly when the outputs have mutually
 * orthogonal supports. Minimization is Levenberg-Marquardt on the residuals,
 * stepping each U_x by exp(Z_x) with Z_x anti-Hermitian. A feasible result
 * is a constructive certificate; an infeasible one proves nothing.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "encodings.hpp"
#include "random.hpp"
#include "states.hpp"
#include "tensor_core.hpp"
#include "verify.hpp"

namespace densecode {

/// A request that the counting bounds already rule out.
class BoundViolation : public DomainError {
  public:
    BoundViolation(const std::string &what, std::size_t cap) : DomainError(what), cap_(cap) {}
    [[nodiscard]] std::size_t cap() const { return cap_; }

  private:
    std::size_t cap_;
};

struct SearchConfig {
    std::size_t restarts = 32;
    std::size_t max_iters = 5000;
    double success_defect = 1e-8;
    std::uint64_t seed = 0;
    double initial_damping = 1e-3;
    double damping_increase = 8.0;
    double damping_decrease = 0.25;
    /// Restarts run in fixed-size batches; the search stops after the first
    /// batch containing a feasible restart. Results do not depend on threads.
    std::size_t batch_size = 8;
    /// Worker threads per batch; 0 picks the hardware concurrency.
    unsigned threads = 0;

    void validate() const {
        if (restarts < 1 || max_iters < 1 || batch_size < 1) {
            throw DomainError("SearchConfig: restarts, max_iters and batch_size must be >= 1");
        }
        if (!(success_defect > 0.0)) {
            throw DomainError("SearchConfig: success_defect must be positive");
        }
        if (!(initial_damping > 0.0) || !(damping_increase > 1.0) || !(damping_decrease > 0.0 && damping_decrease < 1.0)) {
            throw DomainError("SearchConfig: invalid damping schedule");
        }
    }
};

struct SearchResult {
    std::vector<KrausChannel> best_family;
    double defect = std::numeric_limits<double>::infinity();
    bool feasible = false;
    std::size_t iterations_used = 0;
    std::size_t best_restart = 0;
    std::size_t restarts_run = 0;
    std::uint64_t seed = 0;
};

/// sum_{x<y} Tr(rho_x rho_y), computed from the output density operators.
inline double overlap_defect(const std::vector<KrausChannel> &family, const EntangledState &s) {
    std::vector<ComplexMatrix> rhos;
    rhos.reserve(family.size());
    for (const auto &e : family) {
        rhos.push_back(bob_state(e, s));
    }
    double defect = 0.0;
    for (std::size_t x = 0; x < rhos.size(); ++x) {
        for (std::size_t y = x + 1; y < rhos.size(); ++y) {
            defect += (rhos[x] * rhos[y]).trace().real();
        }
    }
    return defect;
}

namespace detail {

struct OverlapProblem {
    Eigen::Index m = 0;    // unitary dimension (blocks * D)
    Eigen::Index d = 0;    // channel dimension
    Eigen::Index n = 0;    // Schmidt rank
    std::size_t messages = 0;
    std::size_t blocks = 1;
    ComplexMatrix embed;   // m x n
    ComplexMatrix weight;  // m x m, embed diag(lambda^2) embed^dag
    std::vector<ComplexMatrix> links; // E_{ll'}

    OverlapProblem(const EntangledState &s, std::size_t d_chan, std::size_t l, std::size_t kraus_blocks)
        : m(static_cast<Eigen::Index>(kraus_blocks * d_chan)), d(static_cast<Eigen::Index>(d_chan)),
          n(static_cast<Eigen::Index>(s.rank())), messages(l), blocks(kraus_blocks) {
        embed = ComplexMatrix::Zero(m, n);
        for (Eigen::Index j = 0; j < n; ++j) {
            embed(j, j) = 1.0;
        }
        weight = embed * s.reduced_density() * embed.adjoint();
        for (std::size_t a = 0; a < blocks; ++a) {
            for (std::size_t b = 0; b < blocks; ++b) {
                ComplexMatrix e = ComplexMatrix::Zero(m, m);
                e.block(static_cast<Eigen::Index>(a) * d, static_cast<Eigen::Index>(b) * d, d, d).setIdentity();
                links.push_back(std::move(e));
            }
        }
    }

    [[nodiscard]] std::size_t param_count() const { return messages * static_cast<std::size_t>(m * m); }
    [[nodiscard]] std::size_t residual_count() const { return messages * (messages - 1) / 2 * links.size(); }

    [[nodiscard]] ComplexVector residuals(const std::vector<ComplexMatrix> &u) const {
        ComplexVector r(static_cast<Eigen::Index>(residual_count()));
        Eigen::Index k = 0;
        for (std::size_t x = 0; x < messages; ++x) {
            for (std::size_t y = x + 1; y < messages; ++y) {
                const ComplexMatrix right = u[y] * weight;
                for (const auto &e : links) {
                    r(k++) = (u[x].adjoint() * e * right).trace();
                }
            }
        }
        return r;
    }

    /// sign * Tr(B N) for the m^2 anti-Hermitian basis elements B.
    [[nodiscard]] ComplexVector basis_traces(const ComplexMatrix &nmat, Complex sign) const {
        const Complex i_unit{0.0, 1.0};
        ComplexVector out(m * m);
        Eigen::Index k = 0;
        for (Eigen::Index a = 0; a < m; ++a) {
            out(k++) = sign * i_unit * nmat(a, a);
        }
        for (Eigen::Index a = 0; a < m; ++a) {
            for (Eigen::Index b = a + 1; b < m; ++b) {
                out(k++) = sign * (nmat(b, a) - nmat(a, b));
                out(k++) = sign * i_unit * (nmat(b, a) + nmat(a, b));
            }
        }
        return out;
    }

    /// Complex Jacobian of the residuals with respect to the real generator coordinates.
    [[nodiscard]] ComplexMatrix jacobian(const std::vector<ComplexMatrix> &u) const {
        const Eigen::Index per = m * m;
        ComplexMatrix jac = ComplexMatrix::Zero(static_cast<Eigen::Index>(residual_count()),
                                                static_cast<Eigen::Index>(param_count()));
        Eigen::Index row = 0;
        for (std::size_t x = 0; x < messages; ++x) {
            for (std::size_t y = x + 1; y < messages; ++y) {
                for (const auto &e : links) {
                    const ComplexMatrix core = u[x].adjoint() * e * u[y];
                    // U_x -> U_x exp(Z):  dg = -Tr(Z U_x^dag E U_y M)
                    jac.row(row).segment(static_cast<Eigen::Index>(x) * per, per) =
                        basis_traces(core * weight, Complex(-1.0, 0.0)).transpose();
                    // U_y -> U_y exp(Z):  dg = Tr(Z M U_x^dag E U_y)
                    jac.row(row).segment(static_cast<Eigen::Index>(y) * per, per) =
                        basis_traces(weight * core, Complex(1.0, 0.0)).transpose();
                    ++row;
                }
            }
        }
        return jac;
    }

    [[nodiscard]] ComplexMatrix generator(const Eigen::VectorXd &delta, std::size_t x) const {
        const Complex i_unit{0.0, 1.0};
        ComplexMatrix z = ComplexMatrix::Zero(m, m);
        Eigen::Index k = static_cast<Eigen::Index>(x) * m * m;
        for (Eigen::Index a = 0; a < m; ++a) {
            z(a, a) = i_unit * delta(k++);
        }
        for (Eigen::Index a = 0; a < m; ++a) {
            for (Eigen::Index b = a + 1; b < m; ++b) {
                const double re = delta(k++);
                const double im = delta(k++);
                z(a, b) += re + i_unit * im;
                z(b, a) += -re + i_unit * im;
            }
        }
        return z;
    }

    [[nodiscard]] std::vector<KrausChannel> channels(const std::vector<ComplexMatrix> &u) const {
        std::vector<KrausChannel> out;
        out.reserve(u.size());
        for (const auto &ux : u) {
            const ComplexMatrix v = ux * embed;
            if (blocks == 1) {
                out.emplace_back(Isometry(v));
            } else {
                std::vector<ComplexMatrix> ops;
                for (std::size_t b = 0; b < blocks; ++b) {
                    ops.emplace_back(v.middleRows(static_cast<Eigen::Index>(b) * d, d));
                }
                out.emplace_back(std::move(ops));
            }
        }
        return out;
    }
};

struct RestartOutcome {
    std::vector<ComplexMatrix> unitaries;
    double defect = std::numeric_limits<double>::infinity();
    std::size_t iterations = 0;
};

/// Past the success threshold the iteration keeps polishing until the
/// defect reaches this level, so certificates simulate cleanly.
constexpr double kPolishDefect = 1e-26;

inline RestartOutcome run_restart(const OverlapProblem &prob, const SearchConfig &cfg, std::size_t restart) {
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed & 0xffffffffu), static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(restart), 0x6d657373u};
    std::mt19937_64 rng(seq);
    RestartOutcome out;
    out.unitaries.reserve(prob.messages);
    for (std::size_t x = 0; x < prob.messages; ++x) {
        out.unitaries.push_back(haar_unitary(prob.m, rng));
    }
    ComplexVector r = prob.residuals(out.unitaries);
    double f = r.squaredNorm();
    double mu = cfg.initial_damping;
    const auto rows = static_cast<Eigen::Index>(prob.residual_count());
    const auto cols = static_cast<Eigen::Index>(prob.param_count());
    std::size_t polish_left = 50;
    for (std::size_t it = 0; it < cfg.max_iters; ++it) {
        out.iterations = it + 1;
        if (f <= kPolishDefect) {
            break;
        }
        if (f <= cfg.success_defect && polish_left-- == 0) {
            break;
        }
        const ComplexMatrix jc = prob.jacobian(out.unitaries);
        Eigen::MatrixXd jr(2 * rows, cols);
        jr.topRows(rows) = jc.real();
        jr.bottomRows(rows) = jc.imag();
        Eigen::VectorXd rr(2 * rows);
        rr.head(rows) = r.real();
        rr.tail(rows) = r.imag();
        const Eigen::MatrixXd jtj = jr.transpose() * jr;
        const Eigen::VectorXd grad = jr.transpose() * rr;
        bool accepted = false;
        while (mu < 1e16) {
            Eigen::MatrixXd lhs = jtj;
            lhs.diagonal().array() += mu * (1.0 + jtj.diagonal().array());
            const Eigen::VectorXd delta = lhs.ldlt().solve(-grad);
            std::vector<ComplexMatrix> trial = out.unitaries;
            for (std::size_t x = 0; x < prob.messages; ++x) {
                trial[x] = trial[x] * expm_antihermitian(prob.generator(delta, x));
            }
            const ComplexVector rt = prob.residuals(trial);
            const double ft = rt.squaredNorm();
            if (ft < f) {
                out.unitaries = std::move(trial);
                r = rt;
                f = ft;
                mu = std::max(mu * cfg.damping_decrease, 1e-15);
                accepted = true;
                break;
            }
            mu *= cfg.damping_increase;
        }
        if (!accepted) {
            break; // stationary to working precision
        }
    }
    out.defect = f;
    return out;
}

inline SearchResult run_search(const OverlapProblem &prob, const SearchConfig &cfg) {
    cfg.validate();
    SearchResult result;
    result.seed = cfg.seed;
    std::optional<RestartOutcome> best;
    const unsigned workers = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    for (std::size_t start = 0; start < cfg.restarts; start += cfg.batch_size) {
        const std::size_t count = std::min(cfg.batch_size, cfg.restarts - start);
        std::vector<RestartOutcome> outcomes(count);
        if (workers <= 1 || count == 1) {
            for (std::size_t k = 0; k < count; ++k) {
                outcomes[k] = run_restart(prob, cfg, start + k);
            }
        } else {
            for (std::size_t k0 = 0; k0 < count; k0 += workers) {
                std::vector<std::jthread> pool;
                for (std::size_t k = k0; k < std::min(count, k0 + workers); ++k) {
                    pool.emplace_back([&, k] { outcomes[k] = run_restart(prob, cfg, start + k); });
                }
            }
        }
        for (std::size_t k = 0; k < count; ++k) {
            result.iterations_used += outcomes[k].iterations;
            // strict < keeps the lowest restart index on ties
            if (!best || outcomes[k].defect < best->defect) {
                best = std::move(outcomes[k]);
                result.best_restart = start + k;
            }
        }
        result.restarts_run = start + count;
        if (best->defect <= cfg.success_defect) {
            break;
        }
    }
    result.defect = best->defect;
    result.feasible = result.defect <= cfg.success_defect;
    result.best_family = prob.channels(best->unitaries);
    return result;
}

} // namespace detail

/// Isometric search for l deterministic messages (Dbar <= D).
inline SearchResult search_deterministic(const EntangledState &s, std::size_t d_chan, std::size_t l,
                                         const SearchConfig &cfg = {}, const ToleranceConfig &tol = {}) {
    const std::size_t n = s.rank();
    if (n > d_chan) {
        throw DomainError("search_deterministic: isometric search needs Dbar <= D (use search_deterministic_kraus)");
    }
    if (l < 2 || l > n * d_chan) {
        throw DomainError("search_deterministic: need 2 <= l <= Dbar * D");
    }
    const auto bounds = evaluate_bounds(s, d_chan, tol);
    if (l > bounds.ld_cap) {
        throw BoundViolation("search_deterministic: L_d <= D / lambda_1^2 gives at most " +
                                 std::to_string(bounds.ld_cap) + " deterministic messages",
                             bounds.ld_cap);
    }
    return detail::run_search(detail::OverlapProblem(s, d_chan, l, 1), cfg);
}

/// Search over Kraus encodings with `kraus_rank_budget` operators each (Dbar > D).
inline SearchResult search_deterministic_kraus(const EntangledState &s, std::size_t d_chan, std::size_t l,
                                               std::size_t kraus_rank_budget, const SearchConfig &cfg = {},
                                               const ToleranceConfig &tol = {}) {
    const std::size_t n = s.rank();
    if (n <= d_chan) {
        throw DomainError("search_deterministic_kraus: requires Dbar > D (use search_deterministic)");
    }
    if (l < 2) {
        throw DomainError("search_deterministic_kraus: need l >= 2");
    }
    const auto bounds = evaluate_bounds(s, d_chan, tol);
    if (kraus_rank_budget < *bounds.xi) {
        throw BoundViolation("search_deterministic_kraus: Kraus rank must be at least ceil(Dbar / D) = " +
                                 std::to_string(*bounds.xi),
                             *bounds.xi);
    }
    if (l > *bounds.mu) {
        throw BoundViolation("search_deterministic_kraus: L_d <= floor(Dbar D / xi) = " + std::to_string(*bounds.mu),
                             *bounds.mu);
    }
    if (l > bounds.ld_cap) {
        throw BoundViolation("search_deterministic_kraus: L_d <= D / lambda_1^2 gives at most " +
                                 std::to_string(bounds.ld_cap),
                             bounds.ld_cap);
    }
    return detail::run_search(detail::OverlapProblem(s, d_chan, l, kraus_rank_budget), cfg);
}

struct BoundaryProbe {
    double t = 0.0;
    double lambda1_sq = 0.0;
    double defect = 0.0; // +inf when the counting bound rejected the probe
    bool feasible = false;
};

struct PhaseBoundaryResult {
    double threshold_t = 1.0;
    double threshold_lambda1_sq = 0.0;
    double width = 0.0;
    bool entire_path_feasible = false;
    std::vector<BoundaryProbe> probes;
};

using StatePath = std::function<EntangledState(double)>;

/// Feasibility of l deterministic messages at one point of a path.
inline BoundaryProbe probe_feasibility(const EntangledState &s, std::size_t d_chan, std::size_t l,
                                       const SearchConfig &cfg, double t) {
    BoundaryProbe p;
    p.t = t;
    p.lambda1_sq = s.largest() * s.largest();
    try {
        SearchResult r;
        if (s.rank() <= d_chan) {
            r = search_deterministic(s, d_chan, l, cfg);
        } else {
            const auto b = evaluate_bounds(s, d_chan);
            r = search_deterministic_kraus(s, d_chan, l, *b.xi, cfg);
        }
        p.defect = r.defect;
        p.feasible = r.feasible;
    } catch (const BoundViolation &) {
        p.defect = std::numeric_limits<double>::infinity();
        p.feasible = false;
    }
    return p;
}

/// Bisection over t in [0, 1] for the feasibility threshold of l messages.
/// Stops when the bracket is narrower than t_tol.
inline PhaseBoundaryResult phase_boundary(std::size_t d_chan, std::size_t l, const StatePath &path,
                                          const SearchConfig &cfg = {}, double t_tol = 1e-2) {
    if (!(t_tol > 0.0)) {
        throw DomainError("phase_boundary: t_tol must be positive");
    }
    PhaseBoundaryResult out;
    auto probe = [&](double t) {
        out.probes.push_back(probe_feasibility(path(t), d_chan, l, cfg, t));
        return out.probes.back().feasible;
    };
    const bool f0 = probe(0.0);
    const bool f1 = probe(1.0);
    if (f0 && f1) {
        out.entire_path_feasible = true;
        out.threshold_t = 1.0;
        out.threshold_lambda1_sq = out.probes.back().lambda1_sq;
        return out;
    }
    if (!f0 && !f1) {
        throw DomainError("phase_boundary: no feasibility change along the path");
    }
    double feasible_t = f0 ? 0.0 : 1.0;
    double infeasible_t = f0 ? 1.0 : 0.0;
    while (std::abs(infeasible_t - feasible_t) > t_tol) {
        const double mid = 0.5 * (feasible_t + infeasible_t);
        (probe(mid) ? feasible_t : infeasible_t) = mid;
    }
    out.threshold_t = 0.5 * (feasible_t + infeasible_t);
    out.width = std::abs(infeasible_t - feasible_t);
    const auto s = path(out.threshold_t);
    out.threshold_lambda1_sq = s.largest() * s.largest();
    return out;
}

} // namespace densecode
