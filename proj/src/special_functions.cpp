#include "pdikit/special_functions.hpp"

#include <algorithm>
#include <cmath>

namespace pdikit {

void DiscreteMeasure::validate() const {
    double prev = -1.0;
    for (const Atom& a : atoms) {
        require(std::isfinite(a.r) && a.r >= 0.0, ErrorCode::InvalidSpec,
                "measure atom location must be finite and nonnegative");
        require(std::isfinite(a.w) && a.w > 0.0, ErrorCode::InvalidSpec,
                "measure atom weight must be positive");
        require(a.r > prev, ErrorCode::InvalidSpec,
                "measure atoms must be sorted by location with no duplicates");
        if (a.r == 0.0) {
            require(allow_zero_atom, ErrorCode::InvalidSpec,
                    "zero atom not permitted for this representation");
        }
        prev = a.r;
    }
}

DiscreteMeasure DiscreteMeasure::from_pairs(std::span<const std::array<double, 2>> pairs,
                                            bool allow_zero_atom) {
    DiscreteMeasure m;
    m.allow_zero_atom = allow_zero_atom;
    m.atoms.reserve(pairs.size());
    for (const auto& p : pairs) m.atoms.push_back({p[0], p[1]});
    std::sort(m.atoms.begin(), m.atoms.end(),
              [](const Atom& a, const Atom& b) { return a.r < b.r; });
    m.validate();
    return m;
}

double saturating_factor(double r, double t) {
    if (r == 0.0) return t;
    return -std::expm1(-r * t) * (1.0 + r) / r;
}

Bernstein1 Bernstein1::linear(double a) {
    Bernstein1 g;
    g.kind = Kind::Linear;
    g.param = a;
    g.validate();
    return g;
}

Bernstein1 Bernstein1::power(double a) {
    Bernstein1 g;
    g.kind = Kind::Power;
    g.param = a;
    g.validate();
    return g;
}

Bernstein1 Bernstein1::log1p() {
    Bernstein1 g;
    g.kind = Kind::Log1p;
    return g;
}

Bernstein1 Bernstein1::exp_saturate(double r) {
    Bernstein1 g;
    g.kind = Kind::ExpSaturate;
    g.param = r;
    g.validate();
    return g;
}

Bernstein1 Bernstein1::mixture(DiscreteMeasure m, double value_at_zero) {
    Bernstein1 g;
    g.kind = Kind::Mixture;
    g.measure = std::move(m);
    g.value_at_zero = value_at_zero;
    g.validate();
    return g;
}

void Bernstein1::validate() const {
    switch (kind) {
        case Kind::Linear:
            require(param >= 0.0, ErrorCode::InvalidSpec, "linear slope must be nonnegative");
            break;
        case Kind::Power:
            require(param > 0.0 && param <= 1.0, ErrorCode::InvalidSpec,
                    "power exponent must lie in (0, 1]");
            break;
        case Kind::ExpSaturate:
            require(param > 0.0, ErrorCode::InvalidSpec, "saturation rate must be positive");
            break;
        case Kind::Mixture:
            measure.validate();
            break;
        case Kind::Log1p:
            break;
    }
}

double Bernstein1::value_at_origin() const {
    return kind == Kind::Mixture ? value_at_zero : 0.0;
}

double bernstein1_eval(const Bernstein1& spec, double t) {
    require(t >= 0.0, ErrorCode::InvalidSpec, "bernstein functions take t >= 0");
    switch (spec.kind) {
        case Bernstein1::Kind::Linear: return spec.param * t;
        case Bernstein1::Kind::Power: return std::pow(t, spec.param);
        case Bernstein1::Kind::Log1p: return std::log1p(t);
        case Bernstein1::Kind::ExpSaturate: return -std::expm1(-spec.param * t) / spec.param;
        case Bernstein1::Kind::Mixture: {
            double acc = spec.value_at_zero;
            for (const auto& a : spec.measure.atoms) acc += a.w * saturating_factor(a.r, t);
            return acc;
        }
    }
    return 0.0;
}

Bernstein2 Bernstein2::product(Bernstein1 g1, Bernstein1 g2) {
    Bernstein2 g;
    g.kind = Kind::ProductOfBernstein1;
    g.g1 = std::move(g1);
    g.g2 = std::move(g2);
    g.validate();
    return g;
}

Bernstein2 Bernstein2::mixture2(std::vector<Atom2> atoms) {
    Bernstein2 g;
    g.kind = Kind::Mixture2;
    g.atoms = std::move(atoms);
    g.validate();
    return g;
}

Bernstein2 Bernstein2::boundary_augmented(Bernstein2 core, Bernstein1 left, Bernstein1 right) {
    Bernstein2 g;
    g.kind = Kind::BoundaryAugmented;
    g.core = std::make_shared<const Bernstein2>(std::move(core));
    g.left = std::move(left);
    g.right = std::move(right);
    g.validate();
    return g;
}

void Bernstein2::validate() const {
    switch (kind) {
        case Kind::ProductOfBernstein1:
            g1.validate();
            g2.validate();
            break;
        case Kind::Mixture2:
            for (const auto& a : atoms) {
                require(std::isfinite(a.r1) && a.r1 >= 0.0 && std::isfinite(a.r2) && a.r2 >= 0.0,
                        ErrorCode::InvalidSpec, "mixture2 atom locations must be nonnegative");
                require(std::isfinite(a.w) && a.w > 0.0, ErrorCode::InvalidSpec,
                        "mixture2 atom weights must be positive");
            }
            break;
        case Kind::BoundaryAugmented:
            require(core != nullptr, ErrorCode::InvalidSpec, "boundary-augmented needs a core");
            core->validate();
            require(core->zero_at_boundary(), ErrorCode::InvalidSpec,
                    "boundary-augmented core must be zero at the boundary");
            left.validate();
            right.validate();
            break;
    }
}

bool Bernstein2::zero_at_boundary() const {
    switch (kind) {
        case Kind::Mixture2: return true;
        case Kind::ProductOfBernstein1:
            return g1.value_at_origin() == 0.0 && g2.value_at_origin() == 0.0;
        case Kind::BoundaryAugmented: return false;
    }
    return false;
}

double bernstein2_eval(const Bernstein2& spec, double t1, double t2) {
    require(t1 >= 0.0 && t2 >= 0.0, ErrorCode::InvalidSpec,
            "two-variable bernstein functions take t1, t2 >= 0");
    switch (spec.kind) {
        case Bernstein2::Kind::ProductOfBernstein1:
            return bernstein1_eval(spec.g1, t1) * bernstein1_eval(spec.g2, t2);
        case Bernstein2::Kind::Mixture2: {
            double acc = 0.0;
            for (const auto& a : spec.atoms) {
                acc += a.w * saturating_factor(a.r1, t1) * saturating_factor(a.r2, t2);
            }
            return acc;
        }
        case Bernstein2::Kind::BoundaryAugmented:
            return bernstein2_eval(*spec.core, t1, t2) + bernstein1_eval(spec.left, t1) +
                   bernstein1_eval(spec.right, t2);
    }
    return 0.0;
}

Cm2Function Cm2Function::power(double a) {
    Cm2Function f;
    f.kind = Kind::PowerA;
    f.exponent = a;
    f.validate();
    return f;
}

Cm2Function Cm2Function::t_log_t() {
    Cm2Function f;
    f.kind = Kind::TLogT;
    return f;
}

Cm2Function Cm2Function::quadratic(double a0, double a1, double a2) {
    Cm2Function f;
    f.kind = Kind::Quadratic;
    f.a0 = a0;
    f.a1 = a1;
    f.a2 = a2;
    f.validate();
    return f;
}

Cm2Function Cm2Function::mixture(DiscreteMeasure m, double a0, double a1, double a2) {
    Cm2Function f;
    f.kind = Kind::Mixture;
    f.measure = std::move(m);
    f.measure.allow_zero_atom = false;
    f.a0 = a0;
    f.a1 = a1;
    f.a2 = a2;
    f.validate();
    return f;
}

void Cm2Function::validate() const {
    switch (kind) {
        case Kind::PowerA:
            require(exponent > 1.0 && exponent < 2.0, ErrorCode::InvalidSpec,
                    "power exponent must lie in (1, 2)");
            break;
        case Kind::Quadratic:
            require(a2 >= 0.0, ErrorCode::InvalidSpec, "quadratic coefficient must be >= 0");
            break;
        case Kind::Mixture:
            require(a2 >= 0.0, ErrorCode::InvalidSpec, "quadratic coefficient must be >= 0");
            measure.validate();
            for (const auto& a : measure.atoms) {
                require(a.r > 0.0, ErrorCode::InvalidSpec, "mixture atoms must have r > 0");
            }
            break;
        case Kind::TLogT:
            break;
    }
}

OmegaTerms omega_e_terms(int ell, double s) {
    require(ell == 1 || ell == 2, ErrorCode::Unsupported, "only orders 1 and 2 are supported");
    require(s >= 0.0, ErrorCode::InvalidSpec, "argument must be nonnegative");
    OmegaTerms out{};
    if (ell == 1) {
        out.omega = 1.0;
        out.e = std::exp(-s);
        out.big_e = -std::expm1(-s);  // 1 - e^{-s}
    } else {
        out.omega = 1.0 - s;
        out.e = std::exp(-s) * (1.0 + s);
        out.big_e = std::expm1(-s) + s;  // e^{-s} - 1 + s
    }
    return out;
}

double cm2_eval(const Cm2Function& spec, double t) {
    require(t >= 0.0, ErrorCode::InvalidSpec, "cm2 functions take t >= 0");
    switch (spec.kind) {
        case Cm2Function::Kind::PowerA: return std::pow(t, spec.exponent);
        case Cm2Function::Kind::TLogT: return t == 0.0 ? 0.0 : t * std::log(t);
        case Cm2Function::Kind::Quadratic: return spec.a0 + spec.a1 * t + spec.a2 * t * t;
        case Cm2Function::Kind::Mixture: {
            double acc = spec.a0 + spec.a1 * t + spec.a2 * t * t;
            for (const auto& a : spec.measure.atoms) {
                double e2 = std::exp(-a.r) * (1.0 + a.r);
                double omega2 = 1.0 - a.r * t;
                double density = (1.0 + a.r * a.r) / (a.r * a.r);
                acc += a.w * (std::exp(-a.r * t) - e2 * omega2) * density;
            }
            return acc;
        }
    }
    return 0.0;
}

namespace {

double power_quadrature_raw(double t, double a, const QuadratureGrid& grid) {
    if (t == 0.0) return 0.0;
    const double constant = a * (a - 1.0) / std::tgamma(2.0 - a);

    // trapezoid in u = log r; integrand dr = (e^{-rt}-1+rt) r^{-a} du
    const double u0 = std::log(grid.r_min);
    const double u1 = std::log(grid.r_max);
    const double h = (u1 - u0) / (grid.nodes - 1);
    double core = 0.0;
    for (int i = 0; i < grid.nodes; ++i) {
        double r = std::exp(u0 + i * h);
        double f = (std::expm1(-r * t) + r * t) * std::pow(r, -a);
        core += (i == 0 || i == grid.nodes - 1) ? 0.5 * f : f;
    }
    core *= h;

    // head [0, r_min): e^{-s}-1+s = s^2/2 - s^3/6 + s^4/24 - ...
    const double e = grid.r_min;
    double head = t * t / 2.0 * std::pow(e, 2.0 - a) / (2.0 - a) -
                  t * t * t / 6.0 * std::pow(e, 3.0 - a) / (3.0 - a) +
                  t * t * t * t / 24.0 * std::pow(e, 4.0 - a) / (4.0 - a);

    // tail (r_max, inf): e^{-rt} is negligible once r_max * t >> 1
    const double R = grid.r_max;
    double tail = t * std::pow(R, 1.0 - a) / (a - 1.0) - std::pow(R, -a) / a;

    return constant * (core + head + tail);
}

}  // namespace

double cm2_power_from_quadrature(double t, double a, const QuadratureGrid& grid) {
    require(a > 1.0 && a < 2.0, ErrorCode::InvalidSpec, "exponent must lie in (1, 2)");
    require(t >= 0.0, ErrorCode::InvalidSpec, "argument must be nonnegative");
    require(grid.nodes >= 2000 && grid.r_min > 0.0 && grid.r_max > grid.r_min,
            ErrorCode::GridTooCoarse, "quadrature grid too coarse");
    require(grid.r_max * t > 30.0 || t < 1e-8, ErrorCode::GridTooCoarse,
            "quadrature upper limit too small for this argument");
    // self-consistency: the grid must reproduce the unit value
    require(std::abs(power_quadrature_raw(1.0, a, grid) - 1.0) <= 1e-6,
            ErrorCode::GridTooCoarse, "quadrature grid fails the unit self-check");
    return power_quadrature_raw(t, a, grid);
}

InequalityReport check_two_variable_inequalities(
    const Bernstein2& spec, std::span<const std::array<double, 4>> samples) {
    spec.validate();
    require(spec.zero_at_boundary(), ErrorCode::InvalidSpec,
            "inequality checks need a boundary-zero function");
    InequalityReport report;
    for (const auto& s : samples) {
        double t1 = s[0], t2 = s[1], s1 = s[2], s2 = s[3];
        require(t1 >= 0.0 && t2 >= 0.0 && s1 >= 0.0 && s2 >= 0.0, ErrorCode::InvalidSpec,
                "sample coordinates must be nonnegative");
        if (t1 > 0.0 && t2 > 0.0 && s1 > 0.0 && s2 > 0.0) {
            double lhs = bernstein2_eval(spec, t1, t2);
            double rhs = std::max(1.0, t1 / s1) * std::max(1.0, t2 / s2) *
                         bernstein2_eval(spec, s1, s2);
            double violation = lhs - rhs;
            if (violation > report.max_scaling_violation) {
                report.max_scaling_violation = violation;
                report.worst_scaling = s;
            }
        }
        double lhs = bernstein2_eval(spec, t1 + s1, t2 + s2);
        double rhs = bernstein2_eval(spec, t1, t2) + bernstein2_eval(spec, t1, s2) +
                     bernstein2_eval(spec, s1, s2) + bernstein2_eval(spec, s1, t2);
        double violation = lhs - rhs;
        if (violation > report.max_subadditivity_violation) {
            report.max_subadditivity_violation = violation;
            report.worst_subadditivity = s;
        }
        ++report.n_checked;
    }
    return report;
}

}  // namespace pdikit
