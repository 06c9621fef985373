#include "pdikit/cli.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <CLI11.hpp>

#include "pdikit/certify.hpp"
#include "pdikit/independence.hpp"
#include "pdikit/io.hpp"
#include "pdikit/kernel_config.hpp"
#include "pdikit/report.hpp"
#include "pdikit/rng.hpp"

namespace pdikit {

const char* kToolVersion = "0.1.0";

namespace {

std::string join_argv(const std::vector<std::string>& argv) {
    std::string out;
    for (size_t i = 0; i < argv.size(); ++i) {
        if (i) out += ' ';
        out += argv[i];
    }
    return out;
}

ReportFormat parse_format(const std::string& format) {
    if (format == "json") return ReportFormat::Json;
    if (format == "text") return ReportFormat::Text;
    fail(ErrorCode::UsageError, "unknown format '" + format + "'");
}

struct TestArgs {
    std::string data, config;
    int xd = 0, yd = 0;
    int perms = 199;
    std::uint64_t seed = 0;
    double alpha = 0.05;
    bool fail_on_dependence = false;
};

int cmd_test(const TestArgs& args, ReportRecord& record) {
    PdiKernel kernel = load_kernel_config(args.config);
    PairedSample sample = load_sample(args.data, args.xd, args.yd);
    record.config_hash = file_digest(args.config);
    record.input_digest = file_digest(args.data);

    IndependenceTestResult result = permutation_test(kernel, sample, args.perms, args.seed);
    record.set("statistic", ReportValue::num(result.statistic));
    record.set("p_value", ReportValue::num(result.p_value));
    record.set("n_permutations", ReportValue::integer_v(result.n_permutations));
    record.set("n", ReportValue::integer_v(sample.n()));
    record.set("kernel", ReportValue::str(result.kernel));
    record.set("path", ReportValue::str(to_string(result.path)));
    record.set("rng", ReportValue::str("fisher_yates/mt19937_64"));
    record.set("alpha", ReportValue::num(args.alpha));
    record.set("dependent", ReportValue::boolean_v(result.p_value <= args.alpha));
    record.elapsed_ms = result.elapsed_ms;

    if (args.fail_on_dependence && result.p_value <= args.alpha) return 1;
    return 0;
}

struct CertifyArgs {
    std::string matrix, config, mode = "pdi";
    Eigen::Index n = 0, m = 0;
    std::uint64_t seed = 0;
    bool strict = false;
};

int cmd_certify(const CertifyArgs& args, ReportRecord& record) {
    CertifyMode mode;
    if (args.mode == "pd") mode = CertifyMode::PD;
    else if (args.mode == "cnd") mode = CertifyMode::CND;
    else if (args.mode == "pdi") mode = CertifyMode::PDI;
    else fail(ErrorCode::UsageError, "unknown mode '" + args.mode + "'");

    Eigen::MatrixXd G;
    Eigen::Index n = args.n, m = args.m;
    if (!args.matrix.empty()) {
        G = load_matrix(args.matrix);
        record.input_digest = file_digest(args.matrix);
        if (mode == CertifyMode::PDI) {
            require(n >= 1 && m >= 1, ErrorCode::UsageError, "pdi mode needs --n and --m");
        } else {
            n = G.rows();
            m = 1;
        }
    } else if (!args.config.empty()) {
        require(mode == CertifyMode::PDI, ErrorCode::UsageError,
                "generated grams certify in pdi mode");
        if (n < 1) n = 4;
        if (m < 1) m = 4;
        PdiKernel kernel = load_kernel_config(args.config);
        record.config_hash = file_digest(args.config);
        Rng rng(args.seed);
        ProductGrid grid;
        grid.xs.points = kernel.x_kernel.kind == CndKind::SphereGeodesic
                             ? rng.sphere_matrix(n, 3)
                             : rng.normal_matrix(n, 2);
        if (kernel.x_kernel.kind == CndKind::SphereGeodesic) {
            grid.xs.geometry = Geometry::UnitSphere;
        }
        grid.ys.points = kernel.y_kernel.kind == CndKind::SphereGeodesic
                             ? rng.sphere_matrix(m, 3)
                             : rng.normal_matrix(m, 2);
        if (kernel.y_kernel.kind == CndKind::SphereGeodesic) {
            grid.ys.geometry = Geometry::UnitSphere;
        }
        G = gram_pdi(kernel, grid);
        record.set("kernel", ReportValue::str(kernel.describe()));
    } else {
        fail(ErrorCode::UsageError, "certify needs --matrix or --config");
    }

    CertifyOptions options;
    options.strict = args.strict;
    CertificationReport report = certify(G, mode, n, m, options);
    record.set("mode", ReportValue::str(to_string(report.mode)));
    record.set("verdict", ReportValue::str(to_string(report.verdict)));
    record.set("min_constrained_eigenvalue",
               ReportValue::num(report.min_constrained_eigenvalue));
    record.set("tolerance", ReportValue::num(report.tolerance));
    record.set("constraint_dimension", ReportValue::integer_v(report.constraint_dimension));
    record.set("size", ReportValue::integer_v(G.rows()));
    return report.verdict == Verdict::Rejected ? 1 : 0;
}

struct SuiteOutcome {
    bool passed = true;
    void merge(bool ok) { passed = passed && ok; }
};

void suite_power_identity(ReportRecord& record, SuiteOutcome& outcome) {
    const std::array<double, 4> ts = {0.25, 1.0, 4.0, 9.0};
    double worst = 0.0;
    for (double t : ts) {
        double got = cm2_power_from_quadrature(t, 1.5);
        double want = std::pow(t, 1.5);
        double rel = std::abs(got - want) / want;
        worst = std::max(worst, rel);
        std::ostringstream key;
        key << "rel_error_t_" << t;
        record.set(key.str(), ReportValue::num(rel));
    }
    record.set("power32_max_rel_error", ReportValue::num(worst));
    bool ok = worst <= 1e-5;
    record.set("power32_passed", ReportValue::boolean_v(ok));
    outcome.merge(ok);
}

void suite_inequalities(ReportRecord& record, SuiteOutcome& outcome, std::uint64_t seed) {
    Rng rng(seed);
    double worst_scaling = 0.0, worst_subadd = 0.0;
    for (int s = 0; s < 10; ++s) {
        int n_atoms = 1 + static_cast<int>(rng.uniform() * 3);
        std::vector<Bernstein2::Atom2> atoms;
        for (int a = 0; a < n_atoms; ++a) {
            atoms.push_back({rng.uniform(0.0, 4.0), rng.uniform(0.0, 4.0),
                             rng.uniform(0.1, 2.0)});
        }
        Bernstein2 g = Bernstein2::mixture2(std::move(atoms));
        std::vector<std::array<double, 4>> tuples(1000);
        for (auto& tup : tuples) {
            for (double& v : tup) v = rng.uniform(1e-3, 10.0);
        }
        InequalityReport rep = check_two_variable_inequalities(g, tuples);
        worst_scaling = std::max(worst_scaling, rep.max_scaling_violation);
        worst_subadd = std::max(worst_subadd, rep.max_subadditivity_violation);
    }
    record.set("max_scaling_violation", ReportValue::num(worst_scaling));
    record.set("max_subadditivity_violation", ReportValue::num(worst_subadd));
    bool ok = worst_scaling <= 1e-10 && worst_subadd <= 1e-10;
    record.set("inequalities_passed", ReportValue::boolean_v(ok));
    outcome.merge(ok);
}

void suite_bounds(ReportRecord& record, SuiteOutcome& outcome) {
    // 1/(1+s) <= (1-e^{-s})/s <= 2/(1+s) on (0, 100].
    double worst = 0.0;
    for (int i = 1; i <= 10000; ++i) {
        double s = 100.0 * i / 10000.0;
        double mid = -std::expm1(-s) / s;
        double lo = 1.0 / (1.0 + s);
        worst = std::max(worst, lo - mid);
        worst = std::max(worst, mid - 2.0 * lo);
    }
    record.set("two_sided_bound_violation", ReportValue::num(worst));
    bool bound_ok = worst <= 1e-12;

    // E_2 nonnegative, nondecreasing, convex on [0, 50].
    double e2_violation = 0.0;
    const int grid_n = 2000;
    double h = 50.0 / grid_n;
    double prev = omega_e_terms(2, 0.0).big_e;
    double prev_diff = 0.0;
    for (int i = 1; i <= grid_n; ++i) {
        double cur = omega_e_terms(2, i * h).big_e;
        e2_violation = std::max(e2_violation, -cur);
        double diff = cur - prev;
        e2_violation = std::max(e2_violation, -diff);
        if (i >= 2) e2_violation = std::max(e2_violation, prev_diff - diff);
        prev = cur;
        prev_diff = diff;
    }
    record.set("e2_shape_violation", ReportValue::num(e2_violation));
    bool e2_ok = e2_violation <= 1e-12;

    // E_2(rt)(1+r)/r^2 >= M1 min(t^2, t); M1 frozen from a grid search.
    const double m1 = 0.45;
    double lower_violation = 0.0;
    for (int i = 1; i <= 100; ++i) {
        double r = std::pow(10.0, -3.0 + 6.0 * i / 100.0);
        for (int j = 1; j <= 100; ++j) {
            double t = std::pow(10.0, -3.0 + 6.0 * j / 100.0);
            double lhs = omega_e_terms(2, r * t).big_e * (1.0 + r) / (r * r);
            double rhs = m1 * std::min(t * t, t);
            lower_violation = std::max(lower_violation, rhs - lhs);
        }
    }
    record.set("cm2_lower_bound_violation", ReportValue::num(lower_violation));
    bool lower_ok = lower_violation <= 0.0;

    bool ok = bound_ok && e2_ok && lower_ok;
    record.set("bounds_passed", ReportValue::boolean_v(ok));
    outcome.merge(ok);
}

struct BernsteinCheckArgs {
    std::string suite = "all";
    std::uint64_t seed = 0;
};

int cmd_bernstein_check(const BernsteinCheckArgs& args, ReportRecord& record) {
    SuiteOutcome outcome;
    record.set("suite", ReportValue::str(args.suite));
    if (args.suite == "power32") {
        suite_power_identity(record, outcome);
    } else if (args.suite == "inequalities") {
        suite_inequalities(record, outcome, args.seed);
    } else if (args.suite == "bounds") {
        suite_bounds(record, outcome);
    } else if (args.suite == "all") {
        suite_power_identity(record, outcome);
        suite_inequalities(record, outcome, args.seed);
        suite_bounds(record, outcome);
    } else {
        fail(ErrorCode::UsageError, "unknown suite '" + args.suite + "'");
    }
    record.set("passed", ReportValue::boolean_v(outcome.passed));
    return outcome.passed ? 0 : 1;
}

struct DemoArgs {
    Eigen::Index n = 40;
    std::uint64_t seed = 7;
};

// Synthetic-data walkthrough for the kernel
// (||x-x'||^2 + ||y-y'||^2)^{3/2}: the direct statistic must match its
// Gaussian-mixture resolution, and the permutation test should separate a
// dependent pair from an independent one.
int cmd_demo(const DemoArgs& args, ReportRecord& record) {
    require(args.n >= 8 && args.n <= 48, ErrorCode::UsageError, "demo supports n in [8, 48]");
    Rng rng(args.seed);
    Eigen::Index n = args.n;

    PairedSample dependent;
    dependent.xs = rng.normal_matrix(n, 1);
    dependent.ys = dependent.xs + 0.01 * rng.normal_matrix(n, 1);
    PairedSample independent;
    independent.xs = dependent.xs;
    independent.ys = rng.normal_matrix(n, 1);

    PdiKernel kernel = PdiKernel::cm2_compose(
        Cm2Function::power(1.5), CndKernel::squared_euclidean(), CndKernel::squared_euclidean());

    double statistic = statistic_direct(kernel, dependent);

    // Mixture resolution: C * int_0^inf T_gauss(r) r^{-5/2} dr with
    // C = 3/(4 sqrt(pi)), T_gauss(r) the centered product statistic of the
    // entrywise exponentials. Log-axis trapezoid plus analytic head/tail.
    Eigen::MatrixXd Gx(n, n), Gy(n, n);
    {
        PointSet px, py;
        px.points = dependent.xs;
        py.points = dependent.ys;
        Gx = gram_cnd(CndKernel::squared_euclidean(), px);
        Gy = gram_cnd(CndKernel::squared_euclidean(), py);
    }
    auto double_center = [](const Eigen::MatrixXd& M) {
        Eigen::VectorXd rm = M.rowwise().mean();
        Eigen::RowVectorXd cm = M.colwise().mean();
        Eigen::MatrixXd C = M;
        C.colwise() -= rm;
        C.rowwise() -= cm;
        C.array() += M.mean();
        return C;
    };
    auto t_gauss = [&](double r) {
        Eigen::MatrixXd A = (-r * Gx.array()).exp().matrix();
        Eigen::MatrixXd B = (-r * Gy.array()).exp().matrix();
        return double_center(A).cwiseProduct(double_center(B)).sum() /
               static_cast<double>(n * n);
    };
    const double constant = 3.0 / (4.0 * std::sqrt(M_PI));
    const double r_min = 1e-6, r_max = 1e7;
    const int nodes = 6001;
    const double u0 = std::log(r_min), u1 = std::log(r_max);
    const double h = (u1 - u0) / (nodes - 1);
    double core = 0.0;
    for (int i = 0; i < nodes; ++i) {
        double r = std::exp(u0 + i * h);
        double f = t_gauss(r) * std::pow(r, -1.5);
        core += (i == 0 || i == nodes - 1) ? 0.5 * f : f;
    }
    core *= h;
    double t_cross = double_center(Gx).cwiseProduct(double_center(Gy)).sum() /
                     static_cast<double>(n * n);
    double head = t_cross * 2.0 * std::sqrt(r_min);
    double t_inf = delta_weights(n).squaredNorm();
    double tail = t_inf * (2.0 / 3.0) * std::pow(r_max, -1.5);
    double resolved = constant * (core + head + tail);
    double residual = std::abs(statistic - resolved) / std::max(statistic, 1e-300);

    IndependenceTestResult dep = permutation_test(kernel, dependent, 199, args.seed);
    IndependenceTestResult ind = permutation_test(kernel, independent, 199, args.seed);

    record.set("n", ReportValue::integer_v(n));
    record.set("kernel", ReportValue::str(kernel.describe()));
    record.set("statistic_dependent", ReportValue::num(statistic));
    record.set("mixture_resolution", ReportValue::num(resolved));
    record.set("resolution_rel_residual", ReportValue::num(residual));
    record.set("resolution_ok", ReportValue::boolean_v(residual <= 1e-4));
    record.set("p_value_dependent", ReportValue::num(dep.p_value));
    record.set("p_value_independent", ReportValue::num(ind.p_value));
    record.set("rng", ReportValue::str("fisher_yates/mt19937_64"));
    return residual <= 1e-4 ? 0 : 1;
}

}  // namespace

CommandResult run_command(const std::vector<std::string>& argv) {
    CommandResult result;
    CLI::App app{"kernel independence testing and certification"};
    app.require_subcommand(1);

    TestArgs test_args;
    CLI::App* test = app.add_subcommand("test", "permutation independence test");
    test->add_option("--data", test_args.data, "CSV sample path")->required();
    test->add_option("--xd", test_args.xd, "x dimensions")->required();
    test->add_option("--yd", test_args.yd, "y dimensions")->required();
    test->add_option("--config", test_args.config, "kernel config path")->required();
    test->add_option("--perms", test_args.perms, "permutation count");
    test->add_option("--seed", test_args.seed, "rng seed");
    test->add_option("--alpha", test_args.alpha, "dependence level");
    test->add_flag("--fail-on-dependence", test_args.fail_on_dependence,
                   "exit 1 when p <= alpha");

    CertifyArgs certify_args;
    CLI::App* cert = app.add_subcommand("certify", "PD/CND/PDI certification");
    cert->add_option("--matrix", certify_args.matrix, "gram matrix path");
    cert->add_option("--config", certify_args.config, "kernel config path");
    cert->add_option("--mode", certify_args.mode, "pd|cnd|pdi");
    cert->add_option("--n", certify_args.n, "grid rows");
    cert->add_option("--m", certify_args.m, "grid columns");
    cert->add_option("--seed", certify_args.seed, "rng seed for generated grids");
    cert->add_flag("--strict", certify_args.strict, "report strict verdicts");

    BernsteinCheckArgs check_args;
    CLI::App* check = app.add_subcommand("bernstein-check", "special-function self-checks");
    check->add_option("--suite", check_args.suite, "power32|inequalities|bounds|all");
    check->add_option("--seed", check_args.seed, "rng seed");

    DemoArgs demo_args;
    CLI::App* demo = app.add_subcommand("demo", "seeded synthetic walkthrough");
    demo->add_option("--n", demo_args.n, "sample size");
    demo->add_option("--seed", demo_args.seed, "rng seed");

    std::string format = "json";
    app.add_option("--format", format, "json|text");
    test->add_option("--format", format, "json|text");
    cert->add_option("--format", format, "json|text");
    check->add_option("--format", format, "json|text");
    demo->add_option("--format", format, "json|text");

    try {
        std::vector<std::string> reversed(argv.rbegin(), argv.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            std::ostringstream out;
            result.exit_code = app.exit(e, out, out);
            result.output = out.str();
            return result;
        }
        result.exit_code = 2;
        result.diagnostics = std::string("error: usage: ") + e.what();
        return result;
    }

    ReportRecord record;
    record.command = join_argv(argv);
    record.tool_version = kToolVersion;

    try {
        ReportFormat report_format = parse_format(format);
        int code = 0;
        if (test->parsed()) {
            record.seed = test_args.seed;
            code = cmd_test(test_args, record);
        } else if (cert->parsed()) {
            record.seed = certify_args.seed;
            code = cmd_certify(certify_args, record);
        } else if (check->parsed()) {
            record.seed = check_args.seed;
            code = cmd_bernstein_check(check_args, record);
        } else if (demo->parsed()) {
            record.seed = demo_args.seed;
            code = cmd_demo(demo_args, record);
        }
        result.exit_code = code;
        result.output = emit_report(record, report_format);
        if (report_format == ReportFormat::Json) result.output += "\n";
    } catch (const Error& e) {
        result.exit_code = 2;
        result.diagnostics = std::string("error: ") + e.what();
    }
    return result;
}

}  // namespace pdikit
