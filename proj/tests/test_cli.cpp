#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "pdikit/cli.hpp"
#include "pdikit/io.hpp"
#include "pdikit/kernel_config.hpp"
#include "pdikit/report.hpp"

using namespace pdikit;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& content) {
        path = std::string("/tmp/pdikit_test_") + name;
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("csv sample loading") {
    TempFile ok("ok.csv", "x0,y0\n1.0,2.0\n3.0,4.5\n");
    PairedSample s = load_sample(ok.path, 1, 1);
    CHECK(s.n() == 2);
    CHECK(s.xs(1, 0) == doctest::Approx(3.0));
    CHECK(s.ys(1, 0) == doctest::Approx(4.5));

    // column order in the file does not matter
    TempFile reordered("re.csv", "y0,x0,extra\n2.0,1.0,9\n4.5,3.0,9\n");
    PairedSample r = load_sample(reordered.path, 1, 1);
    CHECK(r.xs(0, 0) == doctest::Approx(1.0));
    CHECK(r.ys(0, 0) == doctest::Approx(2.0));

    TempFile blank("blank.csv", "x0,y0\n1.0,\n");
    CHECK_THROWS_WITH_AS(load_sample(blank.path, 1, 1), doctest::Contains("y0"), Error);

    TempFile header_only("h.csv", "x0,y0\n");
    CHECK_THROWS_AS(load_sample(header_only.path, 1, 1), Error);

    TempFile missing("m.csv", "x0,z0\n1,2\n");
    CHECK_THROWS_WITH_AS(load_sample(missing.path, 1, 1), doctest::Contains("y0"), Error);

    TempFile inf_cell("inf.csv", "x0,y0\n1,inf\n");
    CHECK_THROWS_AS(load_sample(inf_cell.path, 1, 1), Error);

    // CRLF line endings and trailing blank lines
    TempFile crlf("crlf.csv", "x0,y0\r\n1.0,2.0\r\n3.0,4.0\r\n\r\n");
    PairedSample windows = load_sample(crlf.path, 1, 1);
    CHECK(windows.n() == 2);
    CHECK(windows.ys(1, 0) == doctest::Approx(4.0));
}

TEST_CASE("kernel config parsing") {
    PdiKernel kron = parse_kernel_config(
        "family=kronecker\nx_kernel=sqeuclidean\ny_kernel=power\ny_exponent=1.5\n");
    CHECK(kron.kind == PdiKernel::Kind::Kronecker);
    CHECK(kron.y_kernel.kind == CndKind::PowerDistance);
    CHECK(kron.y_kernel.exponent == doctest::Approx(1.5));

    PdiKernel mix = parse_kernel_config(
        "# comment\nfamily=bernstein2\nx_kernel=euclidean\ny_kernel=euclidean\n"
        "atom=0.5 1.0 2.0\natom=0 0 1\ncentered=true\n");
    CHECK(mix.kind == PdiKernel::Kind::BernsteinCompose);
    CHECK(mix.g.atoms.size() == 2);
    CHECK(mix.centered);

    PdiKernel cm2 = parse_kernel_config(
        "family=cm2sum\npsi=mixture\natom=1.0 0.5\na2=0.25\n"
        "x_kernel=sqeuclidean\ny_kernel=sqeuclidean\n");
    CHECK(cm2.kind == PdiKernel::Kind::Cm2Compose);
    CHECK(cm2.psi.measure.atoms.size() == 1);
    CHECK(cm2.psi.a2 == doctest::Approx(0.25));

    TempFile precomp("pre.txt", "0 2 3\n2 0 1\n3 1 0\n");
    PdiKernel with_matrix = parse_kernel_config(
        "family=kronecker\nx_kernel=precomputed\nx_matrix=" + precomp.path +
        "\ny_kernel=euclidean\n");
    CHECK(with_matrix.x_kernel.kind == CndKind::Precomputed);
    CHECK(with_matrix.x_kernel.matrix(0, 2) == doctest::Approx(3.0));

    CHECK_THROWS_WITH_AS(
        parse_kernel_config("family=kronecker\nx_kernel=sqeuclidean\ny_kernel=euclidean\nbogus=1\n"),
        doctest::Contains("unknown key 'bogus'"), Error);
    CHECK_THROWS_WITH_AS(parse_kernel_config("family=warp\n"), doctest::Contains("family"),
                         Error);
    CHECK_THROWS_AS(
        parse_kernel_config("family=bernstein2\nx_kernel=euclidean\ny_kernel=euclidean\n"
                            "atom=1 2\n"),
        Error);
    CHECK_THROWS_AS(parse_kernel_config("family=kronecker\nfamily=kronecker\n"), Error);
}

TEST_CASE("report round-trip and text format") {
    ReportRecord record;
    record.command = "test --data d.csv";
    record.config_hash = "abc";
    record.input_digest = "def";
    record.seed = 99;
    record.tool_version = kToolVersion;
    record.set("statistic", ReportValue::num(0.12345678901234567));
    record.set("p_value", ReportValue::num(0.005));
    record.set("n_permutations", ReportValue::integer_v(199));
    record.set("verdict", ReportValue::str("certified"));
    record.set("passed", ReportValue::boolean_v(true));
    record.elapsed_ms = 12.5;

    std::string json = emit_report(record, ReportFormat::Json);
    ReportRecord parsed = parse_report_json(json);
    CHECK(parsed == record);

    std::string text = emit_report(record, ReportFormat::Text);
    size_t first = text.find("verdict:");
    CHECK(first != std::string::npos);
    CHECK(text.find("verdict:", first + 1) == std::string::npos);
}

TEST_CASE("command dispatch") {
    TempFile data("cli.csv", [] {
        std::string body = "x0,y0\n";
        unsigned state = 12345;
        for (int i = 0; i < 32; ++i) {
            state = state * 1103515245 + 12345;
            double x = ((state >> 16) % 1000) / 500.0 - 1.0;
            body += std::to_string(x) + "," + std::to_string(x * 0.9) + "\n";
        }
        return body;
    }());
    TempFile config("cli.cfg",
                    "family=cm2sum\npsi=mixture\natom=1.0 0.5\n"
                    "x_kernel=sqeuclidean\ny_kernel=sqeuclidean\n");

    std::vector<std::string> argv = {"test",     "--data", data.path, "--xd",   "1",
                                     "--yd",     "1",      "--config", config.path,
                                     "--perms",  "49",     "--seed",  "7"};
    CommandResult r1 = run_command(argv);
    CHECK(r1.exit_code == 0);
    CHECK(r1.output.find("\"p_value\":") != std::string::npos);
    CHECK(r1.output.find("\"config_hash\":") != std::string::npos);
    CHECK(r1.output.find("\"seed\":7") != std::string::npos);

    // byte-identical reports modulo the wall-time field
    CommandResult r2 = run_command(argv);
    CHECK(strip_elapsed(r1.output) == strip_elapsed(r2.output));

    // strongly dependent data fails under --fail-on-dependence
    std::vector<std::string> strict = argv;
    strict.push_back("--fail-on-dependence");
    CHECK(run_command(strict).exit_code == 1);

    // usage errors exit 2 with a single-line diagnostic
    CommandResult usage = run_command({"test", "--data", data.path});
    CHECK(usage.exit_code == 2);
    CHECK(usage.diagnostics.rfind("error:", 0) == 0);
    CHECK(usage.diagnostics.find('\n') == std::string::npos);

    CommandResult missing = run_command({"test", "--data", "/nonexistent.csv", "--xd", "1",
                                         "--yd", "1", "--config", config.path});
    CHECK(missing.exit_code == 2);
    CHECK(missing.diagnostics.rfind("error:", 0) == 0);

    // certify a small matrix from disk
    TempFile gram("gram.txt", "0 1 4\n1 0 1\n4 1 0\n");
    CommandResult cert =
        run_command({"certify", "--matrix", gram.path, "--mode", "cnd", "--format", "text"});
    CHECK(cert.exit_code == 0);
    CHECK(cert.output.find("verdict: certified") != std::string::npos);

    TempFile bad_gram("bad.txt", "0 -9\n-9 0\n");
    CommandResult bad =
        run_command({"certify", "--matrix", bad_gram.path, "--mode", "cnd"});
    CHECK(bad.exit_code == 1);
    CHECK(bad.output.find("rejected") != std::string::npos);

    CommandResult check = run_command({"bernstein-check", "--suite", "power32"});
    CHECK(check.exit_code == 0);
    CHECK(check.output.find("\"power32_passed\":true") != std::string::npos);

    CommandResult bogus_suite = run_command({"bernstein-check", "--suite", "bogus"});
    CHECK(bogus_suite.exit_code == 2);
    CHECK(bogus_suite.diagnostics.rfind("error:", 0) == 0);
}

TEST_CASE("sphere factor kernels through the command line") {
    // x rows live on the unit 2-sphere; y follows the first coordinate
    std::string body = "x0,x1,x2,y0\n";
    unsigned state = 777;
    auto next = [&state] {
        state = state * 1103515245 + 12345;
        return ((state >> 16) % 2000) / 1000.0 - 1.0;
    };
    auto full = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    for (int i = 0; i < 16; ++i) {
        double a = next(), b = next(), c = next();
        double norm = std::sqrt(a * a + b * b + c * c);
        if (norm < 1e-6) {
            a = 1.0;
            b = c = 0.0;
            norm = 1.0;
        }
        a /= norm;
        b /= norm;
        c /= norm;
        body += full(a) + "," + full(b) + "," + full(c) + "," + full(a + 0.05 * next()) + "\n";
    }
    TempFile data("sphere.csv", body);
    TempFile config("sphere.cfg",
                    "family=cm2sum\npsi=power\na=1.5\nx_kernel=sphere\ny_kernel=euclidean\n");
    CommandResult r = run_command({"test", "--data", data.path, "--xd", "3", "--yd", "1",
                                   "--config", config.path, "--perms", "49", "--seed", "2"});
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("\"path\":\"direct\"") != std::string::npos);
}
