#include "equivar/cli_core.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "equivar/analysis.hpp"
#include "equivar/expr.hpp"
#include "equivar/integrate.hpp"
#include "equivar/parallel.hpp"
#include "equivar/report.hpp"

namespace equivar {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Json report_envelope(const std::string& command, const std::string& spec_bytes) {
    Json rep = Json::object();
    rep.set("command", command);
    rep.set("version", kVersion);
    rep.set("spec_hash", fnv1a_hex(spec_bytes));
    return rep;
}

Json condition_report_json(const ConditionReport& r) {
    Json j = Json::object();
    j.set("ok", r.ok);
    j.set("xi", std::isfinite(r.xi) ? Json(r.xi) : Json());
    Json zeros = Json::array();
    for (double z : r.zeros_found) zeros.push(z);
    j.set("zeros_found", std::move(zeros));
    Json viol = Json::array();
    for (const auto& [x, g] : r.sign_violations) {
        Json pair = Json::array();
        pair.push(x);
        pair.push(g);
        viol.push(std::move(pair));
    }
    j.set("sign_violations", std::move(viol));
    j.set("integral_g", r.integral_g);
    j.set("gprime_pi", r.gprime_pi);
    j.set("gprime_0", r.gprime_0);
    j.set("G0", r.G0);
    Json msgs = Json::array();
    for (const auto& s : r.messages) msgs.push(s);
    j.set("messages", std::move(msgs));
    return j;
}

Json criterion_json(const CriterionValue& cv, std::optional<bool> closed_form) {
    Json j = Json::object();
    if (cv.kind == CriterionValue::Kind::PlusInfinity) {
        j.set("kind", "plus_infinity");
    } else {
        j.set("kind", "finite");
        j.set("value", cv.value);
        j.set("quadrature_error", cv.quadrature_error);
    }
    j.set("tail_exponent", cv.tail_exponent);
    if (closed_form) j.set("closed_form", *closed_form);
    return j;
}

Json shoot_options_json(const ShootOptions& o, const Potential& p) {
    Json j = Json::object();
    j.set("r_max", o.r_max > 0.0 ? o.r_max : default_r_max(p));
    j.set("rel_tol", o.rel_tol);
    j.set("abs_tol", o.abs_tol);
    j.set("event_tol", o.event_tol);
    j.set("asym_tol", o.asym_tol);
    j.set("series_tol", o.series_tol);
    j.set("bisection_tol", o.bisection_tol);
    j.set("a_seed", o.a_seed);
    j.set("record_max_dr", o.record_max_dr);
    return j;
}

Json outcome_json(const Outcome& o) {
    Json j = Json::object();
    j.set("kind", to_string(o.kind));
    switch (o.kind) {
        case OutcomeKind::TypeI:
            j.set("r_pi", o.r_a);
            break;
        case OutcomeKind::Undershoot:
            j.set("r_stall", o.r_stall);
            j.set("h_stall", o.h_stall);
            break;
        case OutcomeKind::Asymptotic:
            j.set("pi_minus_h_end", o.pi_minus_h_end);
            j.set("tail_rate", o.tail.rate);
            j.set("tail_r_squared", o.tail.r_squared);
            break;
        case OutcomeKind::Indeterminate:
            j.set("message", o.message);
            break;
    }
    j.set("r_end", o.trajectory.r.back());
    j.set("h_end", o.trajectory.h.back());
    j.set("hprime_end", o.trajectory.hprime.back());
    return j;
}

Json diagnostics_json(const BvpDiagnostics& d) {
    Json j = Json::object();
    j.set("pohozaev_max_rel", d.pohozaev_max_rel);
    if (d.tail_fit_ok) {
        j.set("tail_rate", d.tail_rate);
        j.set("tail_r_squared", d.tail_r_squared);
    } else {
        j.set("tail_rate", Json());
    }
    j.set("tail_rate_expected", d.tail_rate_expected);
    j.set("monotone", d.monotone);
    j.set("sweep_monotone", d.sweep_monotone);
    j.set("band_crossings", d.band_crossings);
    j.set("r_end", d.r_end);
    j.set("samples", (long long)d.samples);
    return j;
}

int exit_for_exception(const std::exception& e) {
    (void)e;
    return kExitSolverFailure;
}

}  // namespace

PotentialSpec load_spec(const std::string& path) {
    const std::string bytes = read_file(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(bytes);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("spec JSON parse error: ") +
                                 e.what());
    }
    if (!j.is_object() || !j.contains("g") || !j["g"].is_string())
        throw std::runtime_error("spec must be an object with a string field 'g'");
    PotentialSpec spec;
    spec.g_text = j["g"].get<std::string>();
    if (j.contains("params")) {
        if (!j["params"].is_object())
            throw std::runtime_error("spec field 'params' must be an object");
        for (auto it = j["params"].begin(); it != j["params"].end(); ++it) {
            if (!it.value().is_number())
                throw std::runtime_error("parameter '" + it.key() +
                                         "' must be a number");
            spec.params[it.key()] = it.value().get<double>();
        }
    }
    if (j.contains("G")) {
        if (!j["G"].is_string())
            throw std::runtime_error("spec field 'G' must be a string");
        spec.G_text = j["G"].get<std::string>();
    }
    return spec;
}

std::optional<std::pair<double, double>> detect_ll(const PotentialSpec& spec) {
    static const std::string canonical =
        Expr::parse("(omega + lambda*cos(x))*sin(x)").print();
    try {
        if (Expr::parse(spec.g_text).print() != canonical) return std::nullopt;
    } catch (const ExprError&) {
        return std::nullopt;
    }
    auto l = spec.params.find("lambda");
    auto w = spec.params.find("omega");
    if (l == spec.params.end() || w == spec.params.end()) return std::nullopt;
    if (!(l->second > 0.0)) return std::nullopt;
    return std::make_pair(l->second, w->second);
}

Potential build_from_spec(const PotentialSpec& spec) {
    if (auto ll = detect_ll(spec)) return landau_lifshitz(ll->first, ll->second);
    return build_potential(spec);
}

CliResult run_validate(const std::string& spec_path) {
    CliResult out;
    std::string bytes;
    try {
        bytes = read_file(spec_path);
        const PotentialSpec spec = load_spec(spec_path);
        const Potential p = build_from_spec(spec);
        Json rep = report_envelope("validate", bytes);
        Json inputs = Json::object();
        inputs.set("spec_path", spec_path);
        rep.set("inputs", std::move(inputs));
        rep.set("result", condition_report_json(p.report()));
        out.report = rep.dump();
        out.exit_code = p.report().ok ? kExitOk : kExitConditionsFail;
    } catch (const std::exception& e) {
        Json rep = report_envelope("validate", bytes);
        rep.set("error", std::string(e.what()));
        out.report = rep.dump();
        out.exit_code = kExitBadInput;
    }
    return out;
}

CliResult run_criterion(const std::string& spec_path, int m) {
    CliResult out;
    std::string bytes;
    try {
        bytes = read_file(spec_path);
        if (m < 1) throw std::invalid_argument("m must be a positive integer");
        const PotentialSpec spec = load_spec(spec_path);
        const auto ll = detect_ll(spec);
        const Potential p =
            ll ? landau_lifshitz(ll->first, ll->second) : build_potential(spec);

        Json rep = report_envelope("criterion", bytes);
        Json inputs = Json::object();
        inputs.set("spec_path", spec_path);
        inputs.set("m", m);
        rep.set("inputs", std::move(inputs));

        if (!p.report().ok) {
            rep.set("result", condition_report_json(p.report()));
            out.report = rep.dump();
            out.exit_code = kExitConditionsFail;
            return out;
        }
        const CriterionValue cv =
            ll ? ll_criterion_closed_form(ll->first, ll->second, m)
               : existence_criterion(p, m);
        rep.set("result", criterion_json(cv, ll.has_value()));
        out.report = rep.dump();
        out.exit_code = kExitOk;
    } catch (const std::invalid_argument& e) {
        Json rep = report_envelope("criterion", bytes);
        rep.set("error", std::string(e.what()));
        out.report = rep.dump();
        out.exit_code = kExitBadInput;
    } catch (const std::exception& e) {
        Json rep = report_envelope("criterion", bytes);
        rep.set("error", std::string(e.what()));
        out.report = rep.dump();
        out.exit_code = exit_for_exception(e);
    }
    return out;
}

CliResult run_solve(const std::string& spec_path, int m,
                    const ShootOptions& opts) {
    CliResult out;
    std::string bytes;
    try {
        bytes = read_file(spec_path);
        if (m < 1) throw std::invalid_argument("m must be a positive integer");
        const PotentialSpec spec = load_spec(spec_path);
        const Potential p = build_from_spec(spec);

        Json rep = report_envelope("solve", bytes);
        Json inputs = Json::object();
        inputs.set("spec_path", spec_path);
        inputs.set("m", m);
        inputs.set("options", shoot_options_json(opts, p));
        rep.set("inputs", std::move(inputs));

        if (!p.report().ok) {
            rep.set("result", condition_report_json(p.report()));
            out.report = rep.dump();
            out.exit_code = kExitConditionsFail;
            return out;
        }

        FindResult fr;
        try {
            fr = find_bvp_solution(p, m, opts);
        } catch (const std::exception& e) {
            rep.set("error", std::string(e.what()));
            out.report = rep.dump();
            out.exit_code = kExitSolverFailure;
            return out;
        }

        Json result = Json::object();
        result.set("criterion", criterion_json(fr.criterion, std::nullopt));
        if (fr.has_solution()) {
            const BvpSolution& sol = *fr.solution;
            result.set("status", "solved");
            result.set("a_star", sol.a_star);
            Json bracket = Json::array();
            bracket.push(sol.bracket_lo);
            bracket.push(sol.bracket_hi);
            result.set("bracket", std::move(bracket));
            result.set("diagnostics", diagnostics_json(sol.diagnostics));
            std::ostringstream csv;
            write_csv(sol.trajectory, csv);
            out.csv = csv.str();
            out.exit_code = kExitOk;
        } else {
            result.set("status", "no_solution");
            result.set("reason", fr.no_solution_reason);
            out.exit_code = kExitNoSolution;
        }
        rep.set("result", std::move(result));
        out.report = rep.dump();
    } catch (const std::exception& e) {
        Json rep = report_envelope("solve", bytes);
        rep.set("error", std::string(e.what()));
        out.report = rep.dump();
        out.exit_code = kExitBadInput;
    }
    return out;
}

CliResult run_classify(const std::string& spec_path, int m, double a,
                       const ShootOptions& opts) {
    CliResult out;
    std::string bytes;
    try {
        bytes = read_file(spec_path);
        if (m < 1) throw std::invalid_argument("m must be a positive integer");
        if (!(a > 0.0)) throw std::invalid_argument("a must be positive");
        const PotentialSpec spec = load_spec(spec_path);
        const Potential p = build_from_spec(spec);

        Json rep = report_envelope("classify", bytes);
        Json inputs = Json::object();
        inputs.set("spec_path", spec_path);
        inputs.set("m", m);
        inputs.set("a", a);
        inputs.set("options", shoot_options_json(opts, p));
        rep.set("inputs", std::move(inputs));

        if (!p.report().ok) {
            rep.set("result", condition_report_json(p.report()));
            out.report = rep.dump();
            out.exit_code = kExitConditionsFail;
            return out;
        }
        try {
            const Outcome o = classify(p, m, a, opts);
            rep.set("result", outcome_json(o));
            out.report = rep.dump();
            out.exit_code = kExitOk;
        } catch (const std::exception& e) {
            rep.set("error", std::string(e.what()));
            out.report = rep.dump();
            out.exit_code = kExitSolverFailure;
        }
    } catch (const std::exception& e) {
        Json rep = report_envelope("classify", bytes);
        rep.set("error", std::string(e.what()));
        out.report = rep.dump();
        out.exit_code = kExitBadInput;
    }
    return out;
}

CliResult run_sweep(const std::string& template_path, const std::string& param,
                    double from, double to, int steps, int m, int threads) {
    CliResult out;
    std::string bytes;
    try {
        bytes = read_file(template_path);
        if (m < 1) throw std::invalid_argument("m must be a positive integer");
        if (steps < 1) throw std::invalid_argument("steps must be >= 1");
        const PotentialSpec base = load_spec(template_path);
        if (!base.params.count(param))
            throw std::invalid_argument("sweep parameter '" + param +
                                        "' is not in the template params");

        struct Row {
            double value = 0.0;
            bool computed = false;
            bool exists = false;
            bool criterion_ok = false;
            CriterionValue criterion;
            double a_star = 0.0;
            std::string error;
        };
        std::vector<Row> rows(steps);
        for (int i = 0; i < steps; ++i)
            rows[i].value =
                steps == 1 ? from : from + (to - from) * double(i) / (steps - 1);

        parallel_for(steps, threads, [&](int i) {
            Row& row = rows[i];
            try {
                PotentialSpec spec = base;
                spec.params[param] = row.value;
                const Potential p = build_from_spec(spec);
                if (!p.report().ok) {
                    row.exists = false;
                    try {
                        row.criterion = existence_criterion(p, m);
                        row.criterion_ok = true;
                    } catch (const std::exception&) {
                        row.criterion_ok = false;
                    }
                    row.computed = true;
                    return;
                }
                const FindResult fr = find_bvp_solution(p, m);
                row.criterion = fr.criterion;
                row.criterion_ok = true;
                row.exists = fr.has_solution();
                if (fr.has_solution()) row.a_star = fr.solution->a_star;
                row.computed = true;
            } catch (const std::exception& e) {
                row.error = e.what();
            }
        });

        std::ostringstream csv;
        csv << "param,exists,criterion,a_star\n";
        bool all_computed = true;
        for (const Row& row : rows) {
            csv << format_double(row.value) << ',';
            if (!row.error.empty()) {
                csv << "error,,";
                all_computed = false;
            } else {
                csv << (row.exists ? "true" : "false") << ',';
                if (row.criterion_ok) {
                    if (row.criterion.kind == CriterionValue::Kind::PlusInfinity)
                        csv << "inf";
                    else
                        csv << format_double(row.criterion.value);
                }
                csv << ',';
                if (row.exists) csv << format_double(row.a_star);
            }
            csv << '\n';
        }
        out.csv = csv.str();

        Json rep = report_envelope("sweep", bytes);
        Json inputs = Json::object();
        inputs.set("template_path", template_path);
        inputs.set("param", param);
        inputs.set("from", from);
        inputs.set("to", to);
        inputs.set("steps", steps);
        inputs.set("m", m);
        rep.set("inputs", std::move(inputs));
        Json result = Json::object();
        result.set("rows", steps);
        int exist_count = 0;
        for (const Row& r : rows) exist_count += r.exists ? 1 : 0;
        result.set("exists_count", exist_count);
        Json errors = Json::array();
        for (const Row& r : rows)
            if (!r.error.empty()) {
                Json e = Json::object();
                e.set("param", r.value);
                e.set("error", r.error);
                errors.push(std::move(e));
            }
        result.set("row_errors", std::move(errors));
        rep.set("result", std::move(result));
        out.report = rep.dump();
        out.exit_code = all_computed ? kExitOk : kExitSolverFailure;
    } catch (const std::exception& e) {
        Json rep = report_envelope("sweep", bytes);
        rep.set("error", std::string(e.what()));
        out.report = rep.dump();
        out.exit_code = kExitBadInput;
    }
    return out;
}

}  // namespace equivar
