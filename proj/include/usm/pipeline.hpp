#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "usm/backsub.hpp"
#include "usm/expr.hpp"
#include "usm/interval.hpp"
#include "usm/ratint.hpp"
#include "usm/transforms.hpp"

namespace usm::pipeline {

enum class TransformChoice { Auto, Forced, Weierstrass };
enum class BranchChoice { Auto, Upper, Lower };

struct IntegrationRequest {
    Expr integrand;
    std::string variable = "x";
    Interval domain;
    TransformChoice transform = TransformChoice::Auto;
    int forced_kind = 0; // with TransformChoice::Forced
    BranchChoice branch = BranchChoice::Auto;
    int max_chain_depth = 2; // in [1, 3]
    bool verify = true;
    int verify_points = 0; // 0: USM_VERIFY_POINTS env or 64
};

struct VerificationReport {
    struct Point {
        double x, expected, got, rel_err;
    };
    std::vector<Point> points;
    double max_rel_err = 0.0;
    bool pass = false;
    double skipped_margin = 0.0;
    int n_points = 0;
};

struct IntegrationResult {
    transforms::TransformPlan plan;
    transforms::SubstitutionMap map;
    Expr transformed_integrand;
    ratint::ParamAntiderivative param_antiderivative;
    backsub::Antiderivative antiderivative;
    VerificationReport verification;
    std::vector<IntegrationResult> chain; // nested runs from recursive chaining
};

// detect -> build -> apply -> integrate -> collapse -> back-substitute ->
// verify. One level of recursive chaining handles sqrt(param^2+1) leftovers.
// Throws NoTemplate/Conflicting/Domain/Unintegrable; a verification failure
// is returned flagged, not thrown.
IntegrationResult integrate(const IntegrationRequest& req);

// Evaluates the parameter-space antiderivative at the mapped limits; handles
// infinite parameter limits for rational/log/arctan terms.
double definite(const IntegrationRequest& req, double lower, double upper);

// Central-difference check of F' == f at Chebyshev-spaced interior points,
// h = cbrt(machine epsilon) * max(1, |x|), endpoint margin
// max(1e-4, 1e-3 * piece width). A point passes when
// |got - expected| <= max(1e-7 |expected|, 1e-9).
VerificationReport verify_antiderivative(const Expr& f, const backsub::Antiderivative& F,
                                         int n_points, const std::string& var);

struct CorpusEntry {
    int index = 0;
    std::string integrand;
    Rational a, b;
    std::string upper_status; // pass | remainder | fail
    std::string lower_status;
    double max_rel_err = 0.0;
};

struct CorpusReport {
    std::uint64_t seed = 0;
    int count = 0;
    std::vector<CorpusEntry> entries;
    int pass = 0;
    int remainder = 0;
    int fail = 0;
    double wall_ms = 0.0;
};

// Self-verification corpus over random mixed half-angle integrands
// P(x,T1,T2)/Q(x,T1,T2), run on both |y| >= 1 components.
CorpusReport run_corpus(std::uint64_t seed, int count);

int default_verify_points();

} // namespace usm::pipeline
