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


// Command-line front end. Exit codes: 0 success / feasible, 1 honest
// negative (promise not met, nothing found), 2 usage, parse or bound error.

#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "densecode/densecode.hpp"

namespace densecode::cli {

enum ExitCode : int { kOk = 0, kNegative = 1, kError = 2 };

struct Range {
    double start = 0.0;
    double stop = 0.0;
    double step = 0.0;
};

/// Parses "a:b" or "a:b:step".
inline Range parse_range(const std::string &text, bool need_step) {
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) {
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(item, &used));
            if (used != item.size()) {
                throw std::invalid_argument(item);
            }
        } catch (const std::exception &) {
            throw DomainError("bad range \"" + text + "\"");
        }
    }
    if (parts.size() != (need_step ? 3u : 2u)) {
        throw DomainError(need_step ? "range must be start:stop:step" : "range must be start:stop");
    }
    Range r{parts[0], parts[1], need_step ? parts[2] : 0.0};
    if (!(r.start <= r.stop) || (need_step && !(r.step > 0.0))) {
        throw DomainError("range needs start <= stop and a positive step");
    }
    return r;
}

/// lambda^2 = (p, (1-p)/(n-1), ...): the largest weight is p, the rest is flat.
inline EntangledState lead_weight_state(double p, std::size_t n) {
    if (n < 2 || !(p >= 1.0 / static_cast<double>(n) - 1e-12) || !(p < 1.0)) {
        throw DomainError("lambda_1^2 must lie in [1/Dbar, 1) for Dbar >= 2");
    }
    std::vector<double> w(n, (1.0 - p) / static_cast<double>(n - 1));
    w[0] = p;
    return EntangledState::from_squared(std::move(w));
}

/// Points of the simplex with weights k_j / res, k_j >= 1, sorted descending; each state once.
inline std::vector<std::vector<double>> simplex_grid(std::size_t n, std::size_t res) {
    if (res < 2 || res < n) {
        throw DomainError("grid resolution must be >= 2 and >= Dbar");
    }
    std::vector<std::vector<double>> out;
    std::vector<std::size_t> k(n, 0);
    // non-increasing compositions of res into n positive parts
    auto rec = [&](auto &&self, std::size_t pos, std::size_t left, std::size_t cap) -> void {
        if (pos + 1 == n) {
            if (left >= 1 && left <= cap) {
                k[pos] = left;
                std::vector<double> w;
                for (auto v : k) {
                    w.push_back(static_cast<double>(v) / static_cast<double>(res));
                }
                out.push_back(std::move(w));
            }
            return;
        }
        for (std::size_t v = std::min(cap, left - (n - pos - 1)); v >= 1; --v) {
            k[pos] = v;
            self(self, pos + 1, left - v, v);
        }
    };
    if (n == 1) {
        out.push_back({1.0});
    } else {
        rec(rec, 0, res, res);
    }
    return out;
}

struct Context {
    std::ostream &out;
    std::ostream &err;
    ToleranceConfig tol;
};

inline std::string join(const std::vector<double> &v, char sep) {
    std::ostringstream os;
    os << std::setprecision(17);
    for (std::size_t i = 0; i < v.size(); ++i) {
        os << (i ? std::string(1, sep) : "") << v[i];
    }
    return os.str();
}

inline void print_bound_checks(Context &ctx, const ProtocolReport &r, const EntangledState &s) {
    if (r.classification == Classification::Invalid) {
        return;
    }
    const auto info = check_info_bound(r, s, r.channel_dim, ctx.tol);
    ctx.out << "info bound P_s log2 L <= log2 D + H_E: " << info.lhs << " <= " << info.rhs
            << (info.holds ? " [holds]" : " [VIOLATED]") << '\n';
    const auto ub = check_unambiguous_bounds(r, s, ctx.tol);
    auto show = [&](const char *label, const BoundCheck &c) {
        ctx.out << label << ": " << to_string(c.status);
        if (c.status != CheckStatus::Skipped) {
            ctx.out << " (value " << c.value << ", bound " << c.bound << (c.saturated ? ", saturated" : "") << ')';
        }
        if (!c.note.empty()) {
            ctx.out << " - " << c.note;
        }
        ctx.out << '\n';
    };
    show("<1/tau> >= 1/(Dbar lambda_min^2)", ub.inverse_tau);
    show("<tau> <= Dbar lambda_min^2", ub.average_tau);
}

inline int cmd_bounds(Context &ctx, const std::string &state_file, std::size_t d_chan, bool as_json) {
    const auto s = state_from_json(read_json_file(state_file));
    const auto b = evaluate_bounds(s, d_chan, ctx.tol);
    if (as_json) {
        ctx.out << bounds_to_json(b).dump(2) << '\n';
    } else {
        ctx.out << format_bounds_table(b);
    }
    return kOk;
}

struct RunOptions {
    std::string constructor;
    std::string protocol_file;
    std::string state_file;
    std::size_t d_bar = 0;
    std::size_t d_chan = 0;
    bool as_json = false;
    std::string protocol_out;
};

inline Protocol build_protocol(const RunOptions &o, const ToleranceConfig &tol) {
    if (!o.protocol_file.empty()) {
        if (!o.constructor.empty()) {
            throw DomainError("give either a constructor name or --protocol, not both");
        }
        return protocol_from_json(read_json_file(o.protocol_file), tol);
    }
    if (o.d_chan == 0) {
        throw DomainError("--D is required");
    }
    if (o.constructor == "deterministic_uniform") {
        if (o.d_bar == 0) {
            throw DomainError("deterministic_uniform needs --Dbar");
        }
        return deterministic_uniform_protocol(o.d_bar, o.d_chan, tol);
    }
    if (o.state_file.empty()) {
        throw DomainError(o.constructor + " needs --state");
    }
    const auto s = state_from_json(read_json_file(o.state_file));
    if (o.constructor == "saturated") {
        return saturated_unambiguous_protocol(s, o.d_chan, std::nullopt, tol).protocol;
    }
    if (o.constructor == "tailored") {
        return tailored_protocol(s, o.d_chan, tol);
    }
    if (o.constructor == "subspace") {
        return subspace_protocol(s, o.d_chan, tol);
    }
    if (o.constructor == "factorized") {
        return factorized_deterministic_protocol(s, o.d_chan, tol);
    }
    throw DomainError("unknown constructor \"" + o.constructor +
                      "\" (expected deterministic_uniform, saturated, tailored, subspace, factorized)");
}

inline int report_protocol(Context &ctx, const Protocol &p, bool as_json) {
    const auto r = simulate(p, ctx.tol);
    if (as_json) {
        ctx.out << report_to_json(r).dump(2) << '\n';
    } else {
        ctx.out << format_report_table(r);
        print_bound_checks(ctx, r, p.state);
    }
    return r.promise_met ? kOk : kNegative;
}

inline int cmd_run(Context &ctx, const RunOptions &o) {
    const auto p = build_protocol(o, ctx.tol);
    if (!o.protocol_out.empty()) {
        write_json_file(o.protocol_out, protocol_to_json(p));
    }
    return report_protocol(ctx, p, o.as_json);
}

/// Accepts a protocol document or a search dump (replayed through a projective completion).
inline int cmd_verify(Context &ctx, const std::string &file, bool as_json) {
    const auto j = read_json_file(file);
    if (j.contains("family")) {
        const auto s = state_from_json(detail::require_key(j, "state"));
        const std::size_t d_chan = detail::require_count(j, "channel_dim");
        auto p = projective_completion_protocol(s, d_chan, family_from_json(j, ctx.tol), ctx.tol);
        return report_protocol(ctx, p, as_json);
    }
    return report_protocol(ctx, protocol_from_json(j, ctx.tol), as_json);
}

struct SweepOptions {
    std::size_t d_chan = 0;
    std::size_t d_bar = 2;
    std::string lambda1_range;
    std::size_t resolution = 0;
    std::string out_file;
};

inline void write_sweep(Context &ctx, std::ostream &csv, const std::vector<EntangledState> &states,
                        std::size_t d_chan) {
    csv << "lambda_sq,lambda1_sq,entanglement,capacity,ld_cap,inv_tau_floor,avg_tau_cap,info_ps_cap,protocol,"
           "simulated_mean_tau\n";
    csv << std::setprecision(12);
    for (const auto &s : states) {
        const auto b = evaluate_bounds(s, d_chan, ctx.tol);
        const bool square = s.rank() <= d_chan;
        const Protocol p = square ? saturated_unambiguous_protocol(s, d_chan, std::nullopt, ctx.tol).protocol
                                  : subspace_protocol(s, d_chan, ctx.tol);
        const auto r = simulate(p, ctx.tol);
        auto opt = [](const std::optional<double> &v) { return v ? std::to_string(*v) : std::string(); };
        csv << '"' << join(s.squared(), ';') << "\"," << s.largest() * s.largest() << ',' << b.entanglement << ','
            << b.capacity << ',' << b.ld_cap << ',' << opt(b.inv_tau_floor) << ',' << opt(b.avg_tau_cap) << ','
            << opt(b.info_ps_cap) << ',' << p.name << ',' << r.mean_tau() << '\n';
    }
}

inline int cmd_sweep(Context &ctx, const SweepOptions &o) {
    if (o.d_chan == 0) {
        throw DomainError("--D is required");
    }
    if (o.lambda1_range.empty() == (o.resolution == 0)) {
        throw DomainError("give exactly one of --lambda1-sq start:stop:step or --resolution n");
    }
    std::vector<EntangledState> states;
    if (!o.lambda1_range.empty()) {
        const auto r = parse_range(o.lambda1_range, true);
        const auto count = static_cast<std::size_t>(std::floor((r.stop - r.start) / r.step + 1e-9)) + 1;
        for (std::size_t i = 0; i < count; ++i) {
            states.push_back(lead_weight_state(r.start + static_cast<double>(i) * r.step, o.d_bar));
        }
    } else {
        for (auto &w : simplex_grid(o.d_bar, o.resolution)) {
            states.push_back(EntangledState::from_squared(std::move(w)));
        }
    }
    if (o.out_file.empty()) {
        write_sweep(ctx, ctx.out, states, o.d_chan);
    } else {
        std::ofstream f(o.out_file);
        if (!f) {
            throw ParseError("cannot write " + o.out_file);
        }
        write_sweep(ctx, f, states, o.d_chan);
        ctx.out << "wrote " << states.size() << " rows to " << o.out_file << '\n';
    }
    return kOk;
}

struct SearchOptions {
    std::string state_file;
    std::size_t d_chan = 0;
    std::size_t d_bar = 2;
    std::size_t l = 0;
    std::size_t kraus_rank = 0;
    SearchConfig cfg;
    std::string out_file;
    std::string csv_file;
    std::string path_range;
    double t_tol = 1e-2;
};

inline int cmd_phase_boundary(Context &ctx, const SearchOptions &o) {
    const auto r = parse_range(o.path_range, false);
    const std::size_t n = o.d_bar;
    const auto path = [&](double t) { return lead_weight_state(r.start + (r.stop - r.start) * t, n); };
    const auto pb = phase_boundary(o.d_chan, o.l, path, o.cfg, o.t_tol);
    ctx.out << "seed " << o.cfg.seed << '\n';
    if (pb.entire_path_feasible) {
        ctx.out << "entire path feasible; threshold t = 1\n";
    }
    ctx.out << std::setprecision(6) << "threshold lambda_1^2 = " << pb.threshold_lambda1_sq
            << " (t = " << pb.threshold_t << ", bracket width " << pb.width << ")\n";
    if (!o.csv_file.empty()) {
        std::ofstream f(o.csv_file);
        if (!f) {
            throw ParseError("cannot write " + o.csv_file);
        }
        f << "t,lambda1_sq,defect,feasible\n" << std::setprecision(17);
        for (const auto &p : pb.probes) {
            f << p.t << ',' << p.lambda1_sq << ',' << p.defect << ',' << (p.feasible ? 1 : 0) << '\n';
        }
    }
    return kOk;
}

inline int cmd_search(Context &ctx, const SearchOptions &o) {
    if (o.d_chan == 0 || o.l == 0) {
        throw DomainError("--D and --l are required");
    }
    if (!o.path_range.empty()) {
        return cmd_phase_boundary(ctx, o);
    }
    if (o.state_file.empty()) {
        throw DomainError("--state is required");
    }
    const auto s = state_from_json(read_json_file(o.state_file));
    SearchResult r;
    if (s.rank() <= o.d_chan) {
        r = search_deterministic(s, o.d_chan, o.l, o.cfg, ctx.tol);
    } else {
        const std::size_t budget = o.kraus_rank ? o.kraus_rank : *evaluate_bounds(s, o.d_chan, ctx.tol).xi;
        r = search_deterministic_kraus(s, o.d_chan, o.l, budget, o.cfg, ctx.tol);
    }
    ctx.out << std::setprecision(17) << "seed " << r.seed << "\ndefect " << r.defect << '\n'
            << "feasible " << (r.feasible ? "yes" : "no (not found within budget)") << '\n'
            << "restarts " << r.restarts_run << ", best restart " << r.best_restart << ", iterations "
            << r.iterations_used << '\n';
    auto j = search_result_to_json(r, s, o.d_chan, o.l);
    if (r.feasible) {
        const auto rep = simulate(projective_completion_protocol(s, o.d_chan, r.best_family, ctx.tol), ctx.tol);
        ctx.out << "certificate: " << to_string(rep.classification) << ", min tau "
                << *std::min_element(rep.taus.begin(), rep.taus.end()) << '\n';
        j["certificate"] = to_string(rep.classification);
    }
    if (!o.out_file.empty()) {
        write_json_file(o.out_file, j);
        ctx.out << "wrote " << o.out_file << '\n';
    }
    return r.feasible ? kOk : kNegative;
}

inline int cmd_concentrate(Context &ctx, const std::string &state_file, bool truncate) {
    const auto s = state_from_json(read_json_file(state_file));
    const auto f = truncate ? truncation_filter(s) : concentration_filter(s);
    const auto after = filtered_state(s, f.k1);
    ctx.out << std::setprecision(10) << (truncate ? "truncation" : "concentration") << " filter\n"
            << "success probability " << f.success_prob << '\n'
            << "before lambda^2 = [" << join(s.squared(), ' ') << "], H_E = " << entanglement_entropy(s) << '\n'
            << "after  lambda^2 = [" << join(after.squared(), ' ') << "], H_E = " << entanglement_entropy(after)
            << '\n';
    return kOk;
}

inline int run(int argc, const char *const *argv, std::ostream &out = std::cout, std::ostream &err = std::cerr) {
    CLI::App app{"densecode: dense coding with partially entangled states"};
    app.require_subcommand(1);
    std::optional<double> abs_tol;
    std::optional<double> rank_tol;
    app.add_option("--abs-tol", abs_tol, "absolute tolerance (env DENSECODE_ABS_TOL)");
    app.add_option("--rank-tol", rank_tol, "relative rank tolerance (env DENSECODE_RANK_TOL)");

    std::string state_file;
    std::size_t d_chan = 0;
    bool as_json = false;

    auto *bounds = app.add_subcommand("bounds", "evaluate capacity and message-count bounds");
    bounds->add_option("--state", state_file, "state JSON {\"lambda_sq\": [...]}")->required();
    bounds->add_option("--D", d_chan, "channel dimension")->required();
    bounds->add_flag("--json", as_json, "emit JSON");

    RunOptions run_opts;
    auto *run = app.add_subcommand("run", "build a protocol and simulate it");
    run->add_option("constructor", run_opts.constructor,
                    "deterministic_uniform | saturated | tailored | subspace | factorized");
    run->add_option("--protocol", run_opts.protocol_file, "protocol JSON instead of a constructor");
    run->add_option("--state", run_opts.state_file, "state JSON");
    run->add_option("--Dbar", run_opts.d_bar, "Schmidt rank (deterministic_uniform)");
    run->add_option("--D", run_opts.d_chan, "channel dimension");
    run->add_flag("--json", run_opts.as_json, "emit the report as JSON");
    run->add_option("--protocol-out", run_opts.protocol_out, "write the protocol JSON here");

    std::string verify_file;
    auto *verify = app.add_subcommand("verify", "simulate a protocol JSON or a search result");
    verify->add_option("--protocol", verify_file, "protocol or search-result JSON")->required();
    verify->add_flag("--json", as_json, "emit JSON");

    SweepOptions sweep_opts;
    auto *sweep = app.add_subcommand("sweep", "CSV of bounds and saturated success over a state grid");
    sweep->add_option("--D", sweep_opts.d_chan, "channel dimension")->required();
    sweep->add_option("--Dbar", sweep_opts.d_bar, "Schmidt rank (default 2)");
    sweep->add_option("--lambda1-sq", sweep_opts.lambda1_range, "start:stop:step for the largest weight");
    sweep->add_option("--resolution", sweep_opts.resolution, "simplex grid with weights k/n");
    sweep->add_option("--out", sweep_opts.out_file, "CSV file (default stdout)");

    SearchOptions search_opts;
    auto *search = app.add_subcommand("search", "numerical search for deterministic encodings");
    search->add_option("--state", search_opts.state_file, "state JSON");
    search->add_option("--D", search_opts.d_chan, "channel dimension")->required();
    search->add_option("--l", search_opts.l, "number of messages")->required();
    search->add_option("--seed", search_opts.cfg.seed, "RNG seed")->required();
    search->add_option("--restarts", search_opts.cfg.restarts, "random restarts (default 32)");
    search->add_option("--max-iters", search_opts.cfg.max_iters, "iterations per restart (default 5000)");
    search->add_option("--success-defect", search_opts.cfg.success_defect, "feasibility threshold (default 1e-8)");
    search->add_option("--threads", search_opts.cfg.threads, "worker threads (0 = hardware)");
    search->add_option("--kraus-rank", search_opts.kraus_rank, "Kraus operators per encoder when Dbar > D");
    search->add_option("--out", search_opts.out_file, "write the result JSON (replayable with verify)");
    search->add_option("--path-lambda1-sq", search_opts.path_range,
                       "a:b - bisect the feasibility threshold along lambda_1^2 from a to b");
    search->add_option("--Dbar", search_opts.d_bar, "Schmidt rank of the path states (default 2)");
    search->add_option("--t-tol", search_opts.t_tol, "bisection width in t (default 0.01)");
    search->add_option("--csv", search_opts.csv_file, "path probes as CSV (t, lambda1_sq, defect, feasible)");

    bool truncate = false;
    auto *concentrate = app.add_subcommand("concentrate", "apply a local filter to a state");
    concentrate->add_option("--state", state_file, "state JSON")->required();
    concentrate->add_flag("--truncate", truncate, "drop the smallest component instead of flattening");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e, out, err) == 0 ? kOk : kError;
    } catch (const CLI::ParseError &e) {
        app.exit(e, out, err);
        return kError;
    }

    try {
        Context ctx{out, err, ToleranceConfig::from_environment()};
        if (abs_tol) {
            ctx.tol.abs_tol = *abs_tol;
        }
        if (rank_tol) {
            ctx.tol.rank_tol = *rank_tol;
        }
        ctx.tol.validate();
        if (*bounds) {
            return cmd_bounds(ctx, state_file, d_chan, as_json);
        }
        if (*run) {
            return cmd_run(ctx, run_opts);
        }
        if (*verify) {
            return cmd_verify(ctx, verify_file, as_json);
        }
        if (*sweep) {
            return cmd_sweep(ctx, sweep_opts);
        }
        if (*search) {
            return cmd_search(ctx, search_opts);
        }
        return cmd_concentrate(ctx, state_file, truncate);
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
    }
    return kError;
}

} // namespace densecode::cli
