#include "usm/cli.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "usm/branchlib.hpp"
#include "usm/errors.hpp"
#include "usm/eval.hpp"
#include "usm/parser.hpp"
#include "usm/pipeline.hpp"

namespace usm::cli {

namespace {

using nlohmann::json;

int exit_code_for(const Error& e) {
    switch (e.code()) {
        case ErrorCode::Parse:
        case ErrorCode::UnknownFunction:
            return 2;
        case ErrorCode::NoTemplate:
        case ErrorCode::Conflicting:
        case ErrorCode::NotRational:
        case ErrorCode::Unmapped:
            return 3;
        case ErrorCode::Unintegrable:
        case ErrorCode::Divergent:
            return 4;
        case ErrorCode::Domain:
        case ErrorCode::ExcludedPoint:
        case ErrorCode::Precondition:
            return 6;
        default:
            return 1;
    }
}

double parse_endpoint(const std::string& text) {
    std::string s = text;
    s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return std::isspace(c); }), s.end());
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    Expr e = parse(s);
    if (!e.is_number()) fail(ErrorCode::Domain, "interval endpoint must be numeric: " + text);
    Bindings none;
    Complex v = eval_complex(e, none);
    if (std::abs(v.imag()) > 1e-12) fail(ErrorCode::Domain, "interval endpoint must be real");
    return v.real();
}

Interval parse_interval(const std::string& text) {
    auto open = text.find('(');
    auto comma = text.find(',');
    auto close = text.rfind(')');
    if (open == std::string::npos || comma == std::string::npos || close == std::string::npos ||
        !(open < comma && comma < close)) {
        fail(ErrorCode::Domain, "interval must look like \"(lo,hi)\": " + text);
    }
    double lo = parse_endpoint(text.substr(open + 1, comma - open - 1));
    double hi = parse_endpoint(text.substr(comma + 1, close - comma - 1));
    if (!(lo < hi)) fail(ErrorCode::Domain, "interval needs lo < hi: " + text);
    return Interval(lo, hi, false, false);
}

void apply_transform_flag(pipeline::IntegrationRequest& req, const std::string& transform) {
    if (transform == "auto") return;
    if (transform == "weierstrass") {
        req.transform = pipeline::TransformChoice::Weierstrass;
        return;
    }
    if (transform.size() == 1 && transform[0] >= '1' && transform[0] <= '5') {
        req.transform = pipeline::TransformChoice::Forced;
        req.forced_kind = transform[0] - '0';
        return;
    }
    fail(ErrorCode::Precondition, "bad --transform value: " + transform);
}

void apply_branch_flag(pipeline::IntegrationRequest& req, const std::string& branch) {
    if (branch == "auto") return;
    if (branch == "upper") req.branch = pipeline::BranchChoice::Upper;
    else if (branch == "lower") req.branch = pipeline::BranchChoice::Lower;
    else fail(ErrorCode::Precondition, "bad --branch value: " + branch);
}

json plan_to_json(const transforms::TransformPlan& plan) {
    return json{{"kind", plan.kind},
                {"a", plan.a.to_string()},
                {"b", plan.b.to_string()},
                {"branch", transforms::branch_name(plan.branch)}};
}

json result_to_json(const pipeline::IntegrationResult& r) {
    json pieces = json::array();
    for (const auto& [interval, expr] : r.antiderivative.pieces) {
        pieces.push_back(json{{"interval", interval.to_string()}, {"expr", expr.str()}});
    }
    json chain = json::array();
    for (const auto& c : r.chain) chain.push_back(result_to_json(c));
    return json{
        {"plan", plan_to_json(r.plan)},
        {"transformed_integrand", r.transformed_integrand.str()},
        {"param_antiderivative", r.param_antiderivative.to_expr().str()},
        {"antiderivative", pieces},
        {"verification",
         {{"max_rel_err", r.verification.max_rel_err},
          {"pass", r.verification.pass},
          {"n_points", r.verification.n_points}}},
        {"chain", chain},
    };
}

void print_result_text(std::ostream& out, const pipeline::IntegrationResult& r) {
    out << "transform " << (r.plan.kind == 0 ? std::string("none") : std::to_string(r.plan.kind))
        << "  a = " << r.plan.a.to_string() << "  b = " << r.plan.b.to_string() << "  branch "
        << transforms::branch_name(r.plan.branch) << "\n";
    out << "parameter integrand: " << r.transformed_integrand.str() << "\n";
    out << "parameter antiderivative: " << r.param_antiderivative.to_expr().str() << "\n";
    for (const auto& [interval, expr] : r.antiderivative.pieces) {
        out << "F(x) = " << expr.str() << "   on " << interval.to_string() << "\n";
    }
    if (r.verification.n_points > 0) {
        out << "verification: " << (r.verification.pass ? "pass" : "FAIL")
            << "  max_rel_err = " << r.verification.max_rel_err << "  points "
            << r.verification.n_points << "\n";
    } else {
        out << "verification: skipped\n";
    }
}

int run_identities(std::ostream& out, const std::string& theorem, int grid) {
    using namespace branchlib;
    auto emit = [&](double y, const std::string& part, double err) {
        out << y << "," << part << "," << err << "\n";
    };
    out << "y,part,abs_error\n";
    if (theorem == "1a") {
        for (int k = 0; k < grid; ++k) {
            double y = -1.0 + 2.0 * k / (grid - 1);
            emit(y, "1a", thm1_sides(y, Part::A).abs_error);
        }
    } else if (theorem == "1b") {
        for (int k = 0; k < grid; ++k) {
            double u = 1.0 + 1e-6 + (100.0 - 1.0 - 1e-6) * k / (grid - 1);
            for (double y : {u, -u}) {
                emit(y, "1b-csc", thm1_sides(y, Part::B, HalfAngleForm::Csc).abs_error);
                emit(y, "1b-sec", thm1_sides(y, Part::B, HalfAngleForm::Sec).abs_error);
            }
        }
    } else if (theorem == "2a" || theorem == "2c") {
        Part part = theorem == "2a" ? Part::A : Part::C;
        for (int k = 0; k < grid; ++k) {
            double u = 1e-6 + (1.0 - 1e-6) * k / (grid - 1);
            for (double y : {u, -u}) {
                emit(y, theorem, thm2_sides(y, part).abs_error);
            }
        }
    } else if (theorem == "2b") {
        for (int k = 0; k < grid; ++k) {
            double u = 1.0 + 1e-6 + (100.0 - 1.0 - 1e-6) * k / (grid - 1);
            for (double y : {u, -u}) {
                emit(y, "2b", thm2_sides(y, Part::B).abs_error);
            }
        }
    } else if (theorem == "bridge") {
        for (int k = 0; k < grid; ++k) {
            double y = -10.0 + 20.0 * k / (grid - 1);
            emit(y, "bridge", bridge_sides(y).abs_error);
        }
    } else {
        fail(ErrorCode::Precondition, "bad --theorem value: " + theorem);
    }
    return 0;
}

int run_euler(std::ostream& out, int grid) {
    out << "check,x,abs_error\n";
    auto diff = transforms::classify_quadratic(Rational(1), Rational(0), Rational(-1));
    auto circ = transforms::classify_quadratic(Rational(-1), Rational(0), Rational(1));
    for (int k = 0; k < grid; ++k) {
        double X = 1.0 + 9.0 * k / (grid - 1);
        for (double x : {X, -X}) {
            auto e = transforms::euler_parameters(diff, x);
            double t = e.t_usm;
            double err = std::min(std::abs(e.U_plus - t) + std::abs(e.U_minus - 1.0 / t),
                                  std::abs(e.U_plus - 1.0 / t) + std::abs(e.U_minus - t));
            out << "euler1," << x << "," << err << "\n";
        }
    }
    for (int k = 0; k < grid; ++k) {
        double X = -1.0 + 2.0 * (k + 0.5) / grid;
        if (std::abs(X) < 1e-3) continue;
        auto e = transforms::euler_parameters(circ, X);
        out << "euler2," << X << "," << std::abs(e.t_euler + e.r_usm) << "\n";
    }
    return 0;
}

json corpus_to_json(const pipeline::CorpusReport& report) {
    json entries = json::array();
    for (const auto& e : report.entries) {
        entries.push_back(json{{"index", e.index},
                               {"integrand", e.integrand},
                               {"a", e.a.to_string()},
                               {"b", e.b.to_string()},
                               {"upper", e.upper_status},
                               {"lower", e.lower_status},
                               {"max_rel_err", e.max_rel_err}});
    }
    return json{{"seed", report.seed},     {"count", report.count},
                {"pass", report.pass},     {"remainder", report.remainder},
                {"fail", report.fail},     {"wall_ms", report.wall_ms},
                {"entries", entries}};
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"symbolic integration by branch-consistent substitution"};
    app.require_subcommand(1);

    std::string expression, variable = "x", domain_text, transform = "auto", branch = "auto";
    bool json_mode = false;
    int depth = 2;

    auto add_common = [&](CLI::App* sub, bool need_domain) {
        sub->add_option("expression", expression, "integrand in the engine grammar")->required();
        sub->add_option("--variable,-v", variable, "integration variable");
        auto* d = sub->add_option("--domain,-d", domain_text, "interval \"(lo,hi)\"");
        if (need_domain) d->required();
        sub->add_option("--transform", transform, "auto|1|2|3|4|5|weierstrass");
        sub->add_option("--branch", branch, "auto|upper|lower");
        sub->add_flag("--json", json_mode, "emit JSON");
        sub->add_option("--depth", depth, "maximum chain depth (1..3)");
    };

    CLI::App* cmd_integrate = app.add_subcommand("integrate", "antiderivative with verification");
    add_common(cmd_integrate, true);
    CLI::App* cmd_definite = app.add_subcommand("definite", "definite integral over the domain");
    add_common(cmd_definite, true);

    std::string theorem;
    int grid = 2001;
    CLI::App* cmd_identities =
        app.add_subcommand("identities", "CSV of identity-oracle errors over a grid");
    cmd_identities->add_option("--theorem", theorem, "1a|1b|2a|2b|2c|bridge")->required();
    cmd_identities->add_option("--grid", grid, "grid size");

    int euler_grid = 999;
    CLI::App* cmd_euler =
        app.add_subcommand("euler", "CSV of classical-substitution equivalence errors");
    cmd_euler->add_option("--grid", euler_grid, "grid size");

    std::uint64_t seed = 1;
    int count = 10;
    bool corpus_full = false;
    CLI::App* cmd_corpus = app.add_subcommand("corpus", "random self-verification corpus (JSON)");
    cmd_corpus->add_option("--seed", seed, "generator seed");
    cmd_corpus->add_option("--count", count, "number of integrands");
    cmd_corpus->add_flag("--entries", corpus_full, "include per-entry results");

    try {
        app.parse(argc, const_cast<char**>(argv));
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            // --help
            out << app.help();
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return 6;
    }

    try {
        if (cmd_integrate->parsed() || cmd_definite->parsed()) {
            pipeline::IntegrationRequest req;
            req.integrand = parse(expression);
            req.variable = variable;
            req.domain = parse_interval(domain_text);
            apply_transform_flag(req, transform);
            apply_branch_flag(req, branch);
            req.max_chain_depth = depth;

            if (cmd_definite->parsed()) {
                double value = pipeline::definite(req, req.domain.lo, req.domain.hi);
                if (json_mode) {
                    out << json{{"input", expression},
                                {"variable", variable},
                                {"domain", req.domain.to_string()},
                                {"value", value}}
                               .dump(2)
                        << "\n";
                } else {
                    char buf[64];
                    std::snprintf(buf, sizeof buf, "%.15g", value);
                    out << buf << "\n";
                }
                return 0;
            }

            pipeline::IntegrationResult r = pipeline::integrate(req);
            if (json_mode) {
                json j = result_to_json(r);
                j["input"] = expression;
                j["variable"] = variable;
                j["domain"] = req.domain.to_string();
                out << j.dump(2) << "\n";
            } else {
                print_result_text(out, r);
            }
            return r.verification.n_points > 0 && !r.verification.pass ? 5 : 0;
        }
        if (cmd_identities->parsed()) return run_identities(out, theorem, grid);
        if (cmd_euler->parsed()) return run_euler(out, euler_grid);
        if (cmd_corpus->parsed()) {
            pipeline::CorpusReport report = pipeline::run_corpus(seed, count);
            json j = corpus_to_json(report);
            if (!corpus_full) j.erase("entries");
            out << j.dump(2) << "\n";
            return report.fail == 0 ? 0 : 5;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<std::string> argv_storage;
    argv_storage.push_back("usm");
    for (const auto& a : args) argv_storage.push_back(a);
    std::vector<const char*> argv;
    for (const auto& a : argv_storage) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

} // namespace usm::cli
