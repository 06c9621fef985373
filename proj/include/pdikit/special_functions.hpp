#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pdikit/errors.hpp"

namespace pdikit {

// Bernstein functions (one and two variables), completely monotone
// functions of order 2, and the discrete-atom forms of their integral
// representations. Atom sums use the exact r = 0 limit values instead of
// small-r evaluation.

struct DiscreteMeasure {
    struct Atom {
        double r = 0.0;  // location, >= 0
        double w = 0.0;  // weight, > 0
    };
    std::vector<Atom> atoms;
    bool allow_zero_atom = true;

    // atoms sorted by r, no duplicates, weights positive.
    void validate() const;
    static DiscreteMeasure from_pairs(std::span<const std::array<double, 2>> pairs,
                                      bool allow_zero_atom = true);
};

struct Bernstein1 {
    enum class Kind {
        Linear,       // a * t, a >= 0
        Power,        // t^a, a in (0, 1]
        Log1p,        // log(1 + t)
        ExpSaturate,  // (1 - e^{-rt}) / r, r > 0
        Mixture,      // value_at_zero + sum_j w_j (1-e^{-r_j t})(1+r_j)/r_j, r=0 atom gives t
    };
    Kind kind = Kind::Linear;
    double param = 1.0;  // a or r
    DiscreteMeasure measure;
    double value_at_zero = 0.0;  // Mixture only

    static Bernstein1 linear(double a);
    static Bernstein1 power(double a);
    static Bernstein1 log1p();
    static Bernstein1 exp_saturate(double r);
    static Bernstein1 mixture(DiscreteMeasure m, double value_at_zero = 0.0);

    void validate() const;
    double value_at_origin() const;
};

struct Bernstein2 {
    enum class Kind {
        ProductOfBernstein1,  // g1(t1) * g2(t2)
        Mixture2,             // sum_j w_j f(r1_j, t1) f(r2_j, t2), f(r,t) = (1-e^{-rt})(1+r)/r
        BoundaryAugmented,    // core(t1, t2) + left(t1) + right(t2), core zero at the boundary
    };
    struct Atom2 {
        double r1 = 0.0;
        double r2 = 0.0;
        double w = 0.0;
    };
    Kind kind = Kind::Mixture2;
    Bernstein1 g1, g2;         // ProductOfBernstein1
    std::vector<Atom2> atoms;  // Mixture2
    std::shared_ptr<const Bernstein2> core;  // BoundaryAugmented
    Bernstein1 left, right;

    static Bernstein2 product(Bernstein1 g1, Bernstein1 g2);
    static Bernstein2 mixture2(std::vector<Atom2> atoms);
    static Bernstein2 boundary_augmented(Bernstein2 core, Bernstein1 left, Bernstein1 right);

    void validate() const;
    bool zero_at_boundary() const;
};

struct Cm2Function {
    enum class Kind {
        PowerA,     // t^a, a in (1, 2)
        TLogT,      // t log t, 0 at t = 0
        Quadratic,  // a0 + a1 t + a2 t^2, a2 >= 0
        Mixture,    // polynomial part + sum_j w_j (e^{-r_j t} - e2(r_j) omega2(r_j t)) (1+r_j^2)/r_j^2
    };
    Kind kind = Kind::PowerA;
    double exponent = 1.5;
    double a0 = 0.0, a1 = 0.0, a2 = 0.0;
    DiscreteMeasure measure;  // Mixture only, atoms on (0, inf)

    static Cm2Function power(double a);
    static Cm2Function t_log_t();
    static Cm2Function quadratic(double a0, double a1, double a2);
    static Cm2Function mixture(DiscreteMeasure m, double a0 = 0.0, double a1 = 0.0,
                               double a2 = 0.0);

    void validate() const;
};

// omega_l(s) = sum_{l'=0}^{l-1} (-1)^{l'} s^{l'}/l'!,
// e_l(s) = e^{-s} sum_{l'=0}^{l-1} s^{l'}/l'!,
// E_l(s) = (-1)^l (e^{-s} - omega_l(s)) >= 0. Supported orders: 1 and 2.
struct OmegaTerms {
    double omega;
    double e;
    double big_e;
};
OmegaTerms omega_e_terms(int ell, double s);

double bernstein1_eval(const Bernstein1& spec, double t);
double bernstein2_eval(const Bernstein2& spec, double t1, double t2);
double cm2_eval(const Cm2Function& spec, double t);

// (1 - e^{-rt})(1 + r)/r with the exact limit value t at r = 0.
double saturating_factor(double r, double t);

// t^a for a in (1, 2) recovered from its Levy-type integral
//   t^a = C_a \int_0^inf (e^{-rt} - 1 + rt) r^{-1-a} dr,  C_a = a(a-1)/Gamma(2-a),
// by log-axis trapezoidal quadrature plus analytic corrections for the
// truncated head and tail. C_{3/2} = 3/(4 sqrt(pi)).
struct QuadratureGrid {
    double r_min = 1e-6;
    double r_max = 1e3;
    int nodes = 4001;  // >= 2000 keeps the self-check below 1e-6
};
double cm2_power_from_quadrature(double t, double a, const QuadratureGrid& grid = {});

// Scaling and subadditivity inequalities for boundary-zero two-variable
// Bernstein functions:
//   g(t1,t2) <= max(1, t1/s1) max(1, t2/s2) g(s1,s2)            (coords > 0)
//   g(t1+s1, t2+s2) <= g(t1,t2) + g(t1,s2) + g(s1,s2) + g(s1,t2) (coords >= 0)
// Violations are LHS - RHS when positive.
struct InequalityReport {
    double max_scaling_violation = 0.0;
    double max_subadditivity_violation = 0.0;
    std::array<double, 4> worst_scaling{};        // (t1, t2, s1, s2)
    std::array<double, 4> worst_subadditivity{};  // (t1, t2, s1, s2)
    int n_checked = 0;

    bool ok(double slack = 1e-10) const {
        return max_scaling_violation <= slack && max_subadditivity_violation <= slack;
    }
};
InequalityReport check_two_variable_inequalities(const Bernstein2& spec,
                                                 std::span<const std::array<double, 4>> samples);

}  // namespace pdikit
