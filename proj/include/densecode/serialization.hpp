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
 * JSON interchange and human-readable tables.
 *
 * Schemas:
 *   state     {"lambda_sq": [p_1, ..., p_n]}
 *   matrix    [[[re, im], ...], ...]            (row-major)
 *   channel   {"kraus": [matrix, ...]}
 *   protocol  {"name", "state", "channel_dim", "slots", "encoders": [channel...],
 *              "povm": [matrix...], "promise", "claims": [{"label", "value"}]}
 *   search    {"seed", "defect", "feasible", ..., "state", "channel_dim", "family": [channel...]}
 */

#pragma once

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "encodings.hpp"
#include "protocols.hpp"
#include "search.hpp"
#include "states.hpp"
#include "tensor_core.hpp"
#include "verify.hpp"

namespace densecode {

using json = nlohmann::json;

/// Malformed or inconsistent input document.
class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline const json &require_key(const json &j, const char *key) {
    if (!j.is_object() || !j.contains(key)) {
        throw ParseError(std::string("missing field \"") + key + "\"");
    }
    return j.at(key);
}

inline std::size_t require_count(const json &j, const char *key) {
    const json &v = require_key(j, key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
        throw ParseError(std::string("field \"") + key + "\" must be a nonnegative integer");
    }
    return v.get<std::size_t>();
}

} // namespace detail

inline json matrix_to_json(const ComplexMatrix &m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) {
            row.push_back({m(i, k).real(), m(i, k).imag()});
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline ComplexMatrix matrix_from_json(const json &j) {
    if (!j.is_array() || j.empty() || !j.front().is_array()) {
        throw ParseError("matrix must be a non-empty array of rows");
    }
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j.front().size());
    ComplexMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const json &row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw ParseError("matrix rows must have equal length");
        }
        for (Eigen::Index k = 0; k < cols; ++k) {
            const json &z = row[static_cast<std::size_t>(k)];
            if (z.is_number()) {
                m(i, k) = Complex(z.get<double>(), 0.0);
            } else if (z.is_array() && z.size() == 2 && z[0].is_number() && z[1].is_number()) {
                m(i, k) = Complex(z[0].get<double>(), z[1].get<double>());
            } else {
                throw ParseError("matrix entries must be numbers or [re, im] pairs");
            }
        }
    }
    return m;
}

inline json state_to_json(const EntangledState &s) { return json{{"lambda_sq", s.squared()}}; }

inline EntangledState state_from_json(const json &j) {
    const json &v = detail::require_key(j, "lambda_sq");
    if (!v.is_array()) {
        throw ParseError("\"lambda_sq\" must be an array of numbers");
    }
    std::vector<double> p;
    for (const auto &x : v) {
        if (!x.is_number()) {
            throw ParseError("\"lambda_sq\" must be an array of numbers");
        }
        p.push_back(x.get<double>());
    }
    return EntangledState::from_squared(std::move(p));
}

inline json channel_to_json(const KrausChannel &ch) {
    json ops = json::array();
    for (const auto &k : ch.operators()) {
        ops.push_back(matrix_to_json(k));
    }
    return json{{"kraus", std::move(ops)}};
}

inline KrausChannel channel_from_json(const json &j, const ToleranceConfig &tol = {}) {
    const json &v = detail::require_key(j, "kraus");
    if (!v.is_array()) {
        throw ParseError("\"kraus\" must be an array of matrices");
    }
    std::vector<ComplexMatrix> ops;
    for (const auto &m : v) {
        ops.push_back(matrix_from_json(m));
    }
    return KrausChannel(std::move(ops), tol);
}

inline Promise promise_from_string(const std::string &s) {
    if (s == "deterministic") {
        return Promise::Deterministic;
    }
    if (s == "unambiguous") {
        return Promise::Unambiguous;
    }
    throw ParseError("unknown promise \"" + s + "\"");
}

inline json protocol_to_json(const Protocol &p) {
    json encoders = json::array();
    for (const auto &e : p.encoders) {
        encoders.push_back(channel_to_json(e));
    }
    json povm = json::array();
    for (const auto &b : p.povm.elements()) {
        povm.push_back(matrix_to_json(b));
    }
    json claims = json::array();
    for (const auto &c : p.claims) {
        claims.push_back({{"label", c.label}, {"value", c.value}});
    }
    return json{{"name", p.name},
                {"state", state_to_json(p.state)},
                {"channel_dim", p.channel_dim},
                {"slots", p.slots},
                {"encoders", std::move(encoders)},
                {"povm", std::move(povm)},
                {"promise", to_string(p.promise)},
                {"claims", std::move(claims)}};
}

inline Protocol protocol_from_json(const json &j, const ToleranceConfig &tol = {}) {
    auto state = state_from_json(detail::require_key(j, "state"));
    const std::size_t d_chan = detail::require_count(j, "channel_dim");
    std::vector<KrausChannel> encoders;
    for (const auto &e : detail::require_key(j, "encoders")) {
        encoders.push_back(channel_from_json(e, tol));
    }
    const std::size_t slots = j.contains("slots") ? detail::require_count(j, "slots") : encoders.size();
    std::vector<ComplexMatrix> elements;
    for (const auto &b : detail::require_key(j, "povm")) {
        elements.push_back(matrix_from_json(b));
    }
    const auto dim = static_cast<Eigen::Index>(d_chan * state.rank());
    std::vector<SuccessClaim> claims;
    if (j.contains("claims")) {
        for (const auto &c : j.at("claims")) {
            claims.push_back({detail::require_key(c, "label").get<std::string>(),
                              detail::require_key(c, "value").get<double>()});
        }
    }
    Protocol p{j.value("name", std::string("custom")),
               std::move(state),
               d_chan,
               std::move(encoders),
               slots,
               Povm::from_elements(std::move(elements), dim, tol),
               promise_from_string(j.value("promise", std::string("unambiguous"))),
               std::move(claims)};
    p.validate();
    return p;
}

inline json report_to_json(const ProtocolReport &r) {
    json claims = json::array();
    for (const auto &c : r.claims) {
        claims.push_back({{"label", c.label}, {"claimed", c.claimed}, {"simulated", c.simulated}, {"agrees", c.agrees}});
    }
    json out{{"protocol", r.protocol_name},
             {"schmidt_rank", r.schmidt_rank},
             {"channel_dim", r.channel_dim},
             {"slots", r.slots},
             {"live_count", r.live_count},
             {"cond_prob", r.cond_prob},
             {"taus", r.taus},
             {"mean_tau", r.mean_tau()},
             {"classification", to_string(r.classification)},
             {"max_leakage", r.max_leakage},
             {"max_row_defect", r.max_row_defect},
             {"orthogonal_isometric", r.orthogonal_isometric},
             {"promise", to_string(r.promise)},
             {"promise_met", r.promise_met},
             {"claims", std::move(claims)}};
    if (auto inv = r.mean_inverse_tau()) {
        out["mean_inverse_tau"] = *inv;
    }
    return out;
}

inline json bounds_to_json(const BoundsReport &b) {
    json out{{"schmidt_rank", b.schmidt_rank}, {"channel_dim", b.channel_dim}, {"entanglement", b.entanglement},
             {"capacity", b.capacity},         {"ld_real", b.ld_real},         {"ld_cap", b.ld_cap}};
    auto put = [&out](const char *key, const auto &opt) {
        if (opt) {
            out[key] = *opt;
        }
    };
    put("xi", b.xi);
    put("mu", b.mu);
    put("inv_tau_floor", b.inv_tau_floor);
    put("avg_tau_cap", b.avg_tau_cap);
    put("info_ps_cap", b.info_ps_cap);
    return out;
}

inline json search_result_to_json(const SearchResult &r, const EntangledState &s, std::size_t d_chan, std::size_t l) {
    json family = json::array();
    for (const auto &e : r.best_family) {
        family.push_back(channel_to_json(e));
    }
    return json{{"seed", r.seed},
                {"messages", l},
                {"defect", r.defect},
                {"feasible", r.feasible},
                {"iterations_used", r.iterations_used},
                {"best_restart", r.best_restart},
                {"restarts_run", r.restarts_run},
                {"state", state_to_json(s)},
                {"channel_dim", d_chan},
                {"family", std::move(family)}};
}

/// Rebuilds the encoders of a search dump for replay through simulate.
inline std::vector<KrausChannel> family_from_json(const json &j, const ToleranceConfig &tol = {}) {
    std::vector<KrausChannel> out;
    for (const auto &e : detail::require_key(j, "family")) {
        out.push_back(channel_from_json(e, tol));
    }
    return out;
}

inline json read_json_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open " + path);
    }
    try {
        return json::parse(in);
    } catch (const json::exception &e) {
        throw ParseError(path + ": " + e.what());
    }
}

inline void write_json_file(const std::string &path, const json &j) {
    std::ofstream out(path);
    if (!out) {
        throw ParseError("cannot write " + path);
    }
    out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Tables

inline std::string format_bounds_table(const BoundsReport &b) {
    std::ostringstream os;
    os << std::setprecision(6);
    auto line = [&os](const std::string &label, const auto &value) {
        os << "  " << std::left << std::setw(44) << label << value << '\n';
    };
    os << "Bounds for Schmidt rank " << b.schmidt_rank << ", channel dimension " << b.channel_dim << '\n';
    line("entanglement H_E (bits)", b.entanglement);
    line(b.schmidt_rank > b.channel_dim ? "capacity min(log2 D + H_E, 2 log2 D)" : "capacity log2 D + H_E", b.capacity);
    line("D / lambda_1^2", b.ld_real);
    line("L_d cap", b.ld_cap);
    if (b.xi) {
        line("min Kraus rank xi = ceil(Dbar/D)", *b.xi);
        line("message cap mu = floor(Dbar D / xi)", *b.mu);
    }
    if (b.inv_tau_floor) {
        line("<1/tau> floor 1/(Dbar lambda_min^2)", *b.inv_tau_floor);
        line("<tau> cap Dbar lambda_min^2", *b.avg_tau_cap);
        line("P_s cap (log2 D + H_E)/log2(Dbar D)", *b.info_ps_cap);
    }
    return os.str();
}

inline std::string format_report_table(const ProtocolReport &r) {
    std::ostringstream os;
    os << "Protocol " << r.protocol_name << ": Schmidt rank " << r.schmidt_rank << ", channel dimension "
       << r.channel_dim << ", " << r.live_count << " live / " << r.slots << " slots\n";
    os << "Pr(y|x), column 0 = failure\n";
    os << std::fixed << std::setprecision(4);
    os << "  x\\y ";
    for (std::size_t y = 0; y <= r.slots; ++y) {
        os << std::setw(8) << y;
    }
    os << '\n';
    for (std::size_t x = 0; x < r.cond_prob.size(); ++x) {
        os << std::setw(5) << x + 1 << ' ';
        for (double v : r.cond_prob[x]) {
            os << std::setw(8) << (std::abs(v) < 5e-13 ? 0.0 : v);
        }
        os << '\n';
    }
    os << "tau:";
    for (double t : r.taus) {
        os << ' ' << t;
    }
    os << "\n<tau> = " << r.mean_tau() << '\n';
    os << std::defaultfloat << std::setprecision(6);
    os << "classification: " << to_string(r.classification) << " (max leakage " << r.max_leakage << ")\n";
    os << "promise: " << to_string(r.promise) << (r.promise_met ? " (met)" : " (NOT met)") << '\n';
    for (const auto &c : r.claims) {
        os << "claim " << c.label << " = " << c.claimed << " vs simulated " << c.simulated
           << (c.agrees ? " [agrees]" : " [DISAGREES]") << '\n';
    }
    return os.str();
}

} // namespace densecode
