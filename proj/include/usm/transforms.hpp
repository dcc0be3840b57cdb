#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "usm/expr.hpp"
#include "usm/interval.hpp"

namespace usm::transforms {

enum class Shape { Difference, Circular, Sum, Degenerate };
enum class Branch { Upper, Lower, NotApplicable };
enum class Route { Standard, ExpAcos, Weierstrass, Identity };

const char* shape_name(Shape s);
const char* branch_name(Branch b);

// Completed-square classification of a'x^2 + b'x + c'.
struct QuadraticForm {
    Rational aprime, bprime, cprime;
    Rational delta;                        // b'^2 - 4 a' c'
    Rational shift;                        // b'/(2a'); X = x + shift
    Shape shape = Shape::Degenerate;
    std::optional<Rational> radius_exact;  // A = sqrt(|delta|)/(2|a'|) when rational
    Expr radius_expr;                      // exact expression for A
    double radius = 0.0;
    std::optional<Rational> outer_exact;   // sqrt(|a'|) when rational
    Expr outer_expr;                       // exact expression for sqrt(|a'|)
    double outer = 0.0;
};

QuadraticForm classify_quadratic(const Rational& p, const Rational& q, const Rational& r);

struct TransformPlan {
    int kind = 0; // 1..5; 0 is the no-op plan used when no substitution is needed
    Rational a;   // > 0 for kinds 1..5
    Rational b;
    Branch branch = Branch::NotApplicable;
    Interval domain;
    std::string param_name;
    Route route = Route::Standard;
    std::string variable; // integration variable
};

struct SubstitutionMap {
    TransformPlan plan;
    Expr x_of_param;
    Expr jacobian; // dx/dparam
    // Representative (pattern in x, replacement in the parameter) pairs;
    // matching in apply_substitution also accepts constant multiples of the
    // quadratic under the radical.
    std::vector<std::pair<Expr, Expr>> block_map;
    // Piecewise back-substitution param(x).
    std::vector<std::pair<Interval, Expr>> backsub;
};

// Scans for the supported blocks (radicals over quadratics, root ratios,
// half-angle tangents of inverse trig of (x+b)/a, exp(acos)) and produces a
// consistent plan, or throws NoTemplate/Conflicting/Domain.
TransformPlan detect_template(const Expr& e, const std::string& var, const Interval& domain);

SubstitutionMap build_substitution(const TransformPlan& plan);

// Replaces every mapped block, maps the variable itself, multiplies by the
// Jacobian and simplifies in the parameter domain. Throws Unmapped when a
// variable-dependent block survives.
Expr apply_substitution(const Expr& e, const SubstitutionMap& m);

// Sign of the parameter on the plan's domain: +1, -1 or 0 when unknown. The
// exp(acos) route reports 0 since its parameter is complex.
int param_sign(const TransformPlan& plan);

struct WeierstrassInput {
    Expr integrand; // rational in sin w and cos w
    std::string variable;
};

// sin w -> 2r/(1+r^2), cos w -> (1-r^2)/(1+r^2), dw -> 2/(1+r^2) dr with
// r = tan(w/2) on (-pi, pi).
std::pair<Expr, SubstitutionMap> weierstrass_reduce(const WeierstrassInput& w);

struct EulerParameters {
    // difference shape
    double U_plus = 0, U_minus = 0, t_usm = 0;
    std::optional<Rational> U_plus_exact, U_minus_exact, t_usm_exact;
    // circular shape
    double t_euler = 0, r_usm = 0;
    std::optional<Rational> t_euler_exact, r_usm_exact;
};

// Classical substitution parameters at a point, exact whenever the radius
// and the radical value are rational.
EulerParameters euler_parameters(const QuadraticForm& q, double x);
EulerParameters euler_parameters(const QuadraticForm& q, const Rational& x);

} // namespace usm::transforms
