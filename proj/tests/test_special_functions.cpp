#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pdikit/special_functions.hpp"

using namespace pdikit;

TEST_CASE("omega, e and E terms") {
    auto [w0, e0, E0] = omega_e_terms(2, 0.0);
    CHECK(w0 == doctest::Approx(1.0));
    CHECK(e0 == doctest::Approx(1.0));
    CHECK(E0 == doctest::Approx(0.0));

    CHECK(omega_e_terms(2, 3.0).omega == doctest::Approx(-2.0));
    CHECK(omega_e_terms(1, 1.0).big_e == doctest::Approx(1.0 - std::exp(-1.0)));
    CHECK_THROWS_AS(omega_e_terms(3, 1.0), Error);

    // E_2 nonnegative, nondecreasing, convex on [0, 50]
    double prev = 0.0, prev_diff = -1.0;
    for (int i = 0; i <= 500; ++i) {
        double s = 50.0 * i / 500.0;
        double e = omega_e_terms(2, s).big_e;
        CHECK(e >= -1e-12);
        if (i > 0) {
            double diff = e - prev;
            CHECK(diff >= -1e-12);
            if (prev_diff >= 0.0) CHECK(diff - prev_diff >= -1e-10);
            prev_diff = diff;
        }
        prev = e;
    }
}

TEST_CASE("one-variable evaluation") {
    CHECK(bernstein1_eval(Bernstein1::power(0.5), 4.0) == doctest::Approx(2.0));
    CHECK(bernstein1_eval(Bernstein1::log1p(), 0.0) == doctest::Approx(0.0));
    CHECK(bernstein1_eval(Bernstein1::exp_saturate(2.0), 0.0) == doctest::Approx(0.0));

    DiscreteMeasure m;
    m.atoms = {{1.0, 1.0}};
    CHECK(bernstein1_eval(Bernstein1::mixture(m), 1.0) ==
          doctest::Approx((1.0 - std::exp(-1.0)) * 2.0));

    // the zero atom contributes the limit slope t
    DiscreteMeasure zero_atom;
    zero_atom.atoms = {{0.0, 2.5}};
    CHECK(bernstein1_eval(Bernstein1::mixture(zero_atom), 3.0) == doctest::Approx(7.5));

    CHECK_THROWS_AS(bernstein1_eval(Bernstein1::power(0.5), -1.0), Error);
    CHECK_THROWS_AS(Bernstein1::power(1.5), Error);
}

TEST_CASE("first derivative is completely monotone at grid scale") {
    std::vector<Bernstein1> specs = {Bernstein1::linear(2.0), Bernstein1::power(0.5),
                                     Bernstein1::power(1.0), Bernstein1::log1p(),
                                     Bernstein1::exp_saturate(1.3)};
    DiscreteMeasure m;
    m.atoms = {{0.0, 0.5}, {0.7, 1.2}, {2.0, 0.3}};
    specs.push_back(Bernstein1::mixture(m, 0.2));

    const double h = 0.05;
    for (const Bernstein1& spec : specs) {
        for (double t = 0.1; t <= 10.0; t += 0.37) {
            // k-th forward difference of the function has sign (-1)^{k-1}
            std::array<double, 6> v{};
            for (int s = 0; s < 6; ++s) v[s] = bernstein1_eval(spec, t + s * h);
            for (int order = 1; order <= 5; ++order) {
                for (int s = 0; s + 1 < 6; ++s) v[s] = v[s + 1] - v[s];
                double expected_sign = (order % 2 == 1) ? 1.0 : -1.0;
                CHECK(expected_sign * v[0] >= -1e-9);
            }
        }
    }
}

TEST_CASE("two-variable evaluation") {
    Bernstein2 prod = Bernstein2::product(Bernstein1::linear(1.0), Bernstein1::linear(1.0));
    CHECK(bernstein2_eval(prod, 3.0, 5.0) == doctest::Approx(15.0));
    CHECK(prod.zero_at_boundary());

    Bernstein2 mix = Bernstein2::mixture2({{1.0, 1.0, 1.0}});
    double f = (1.0 - std::exp(-1.0)) * 2.0;
    CHECK(bernstein2_eval(mix, 1.0, 1.0) == doctest::Approx(f * f));
    CHECK(bernstein2_eval(mix, 4.2, 0.0) == doctest::Approx(0.0));
    CHECK(bernstein2_eval(mix, 0.0, 4.2) == doctest::Approx(0.0));

    Bernstein2 aug = Bernstein2::boundary_augmented(mix, Bernstein1::log1p(),
                                                    Bernstein1::power(0.5));
    double f4 = (1.0 - std::exp(-4.0)) * 2.0;
    CHECK(bernstein2_eval(aug, 1.0, 4.0) ==
          doctest::Approx(f * f4 + std::log(2.0) + 2.0));
    CHECK(!aug.zero_at_boundary());

    // mixed second difference of a mixture is nonnegative on a positive grid
    Rng rng(5);
    Bernstein2 g = oracle::random_mixture2(rng);
    const double h = 0.05;
    for (double t1 = 0.1; t1 < 6.0; t1 += 0.41) {
        for (double t2 = 0.1; t2 < 6.0; t2 += 0.41) {
            double mixed = bernstein2_eval(g, t1 + h, t2 + h) - bernstein2_eval(g, t1 + h, t2) -
                           bernstein2_eval(g, t1, t2 + h) + bernstein2_eval(g, t1, t2);
            CHECK(mixed >= -1e-10);
        }
    }
}

TEST_CASE("order-2 evaluation") {
    CHECK(cm2_eval(Cm2Function::power(1.5), 4.0) == doctest::Approx(8.0));
    CHECK(cm2_eval(Cm2Function::t_log_t(), 1.0) == doctest::Approx(0.0));
    CHECK(cm2_eval(Cm2Function::t_log_t(), 0.0) == doctest::Approx(0.0));
    CHECK(cm2_eval(Cm2Function::quadratic(1.0, 2.0, 3.0), 2.0) == doctest::Approx(17.0));

    DiscreteMeasure m;
    m.allow_zero_atom = false;
    m.atoms = {{1.0, 1.0}};
    CHECK(cm2_eval(Cm2Function::mixture(m), 0.0) ==
          doctest::Approx((1.0 - 2.0 * std::exp(-1.0)) * 2.0));

    CHECK_THROWS_AS(Cm2Function::power(2.5), Error);
    CHECK_THROWS_AS(Cm2Function::quadratic(0, 0, -1.0), Error);
    DiscreteMeasure zero;
    zero.allow_zero_atom = false;
    zero.atoms = {{0.0, 1.0}};
    CHECK_THROWS_AS(Cm2Function::mixture(zero), Error);
}

TEST_CASE("power quadrature identity") {
    CHECK(cm2_power_from_quadrature(0.0, 1.5) == 0.0);
    CHECK(std::abs(cm2_power_from_quadrature(1.0, 1.5) - 1.0) <= 1e-6);
    CHECK(std::abs(cm2_power_from_quadrature(4.0, 1.5) - 8.0) / 8.0 <= 1e-5);
    CHECK(std::abs(cm2_power_from_quadrature(9.0, 1.5) - 27.0) / 27.0 <= 1e-5);
    CHECK(std::abs(cm2_power_from_quadrature(2.0, 1.25) - std::pow(2.0, 1.25)) /
              std::pow(2.0, 1.25) <=
          1e-5);

    QuadratureGrid coarse;
    coarse.nodes = 100;
    CHECK_THROWS_AS(cm2_power_from_quadrature(1.0, 1.5, coarse), Error);
    CHECK_THROWS_AS(cm2_power_from_quadrature(1.0, 2.5), Error);
}

TEST_CASE("two-variable inequalities") {
    Bernstein2 prod = Bernstein2::product(Bernstein1::linear(1.0), Bernstein1::linear(1.0));
    std::vector<std::array<double, 4>> tuples = {{1, 1, 2, 2}};
    InequalityReport r = check_two_variable_inequalities(prod, tuples);
    CHECK(r.ok());

    // boundary tuple: subadditivity reduces to the two-term bound
    Bernstein2 mix = Bernstein2::mixture2({{1.0, 1.0, 1.0}});
    std::vector<std::array<double, 4>> boundary = {{3.0, 0.0, 2.0, 2.0}};
    CHECK(check_two_variable_inequalities(mix, boundary).ok());

    Rng rng(42);
    std::vector<std::array<double, 4>> random_tuples(1000);
    for (auto& tup : random_tuples) {
        for (double& v : tup) v = rng.uniform(1e-3, 10.0);
    }
    InequalityReport rep = check_two_variable_inequalities(mix, random_tuples);
    CHECK(rep.n_checked == 1000);
    CHECK(rep.max_scaling_violation <= 1e-10);
    CHECK(rep.max_subadditivity_violation <= 1e-10);
}

TEST_CASE("two-sided saturation bound and lower envelope") {
    for (int i = 1; i <= 10000; ++i) {
        double s = 100.0 * i / 10000.0;
        double mid = -std::expm1(-s) / s;
        CHECK(mid >= 1.0 / (1.0 + s) - 1e-14);
        CHECK(mid <= 2.0 / (1.0 + s) + 1e-14);
    }
    // frozen envelope constant for E_2(rt)(1+r)/r^2 >= M1 min(t^2, t)
    const double m1 = 0.45;
    for (double r : {1e-3, 1e-2, 0.1, 1.0, 10.0, 100.0}) {
        for (double t : {1e-3, 0.1, 0.5, 1.0, 5.0, 50.0}) {
            double lhs = omega_e_terms(2, r * t).big_e * (1.0 + r) / (r * r);
            CHECK(lhs >= m1 * std::min(t * t, t));
        }
    }
}
