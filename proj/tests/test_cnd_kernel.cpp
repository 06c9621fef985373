#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pdikit/certify.hpp"
#include "pdikit/cnd_kernel.hpp"

using namespace pdikit;

namespace {

Eigen::VectorXd vec1(double a) {
    Eigen::VectorXd v(1);
    v << a;
    return v;
}

Eigen::VectorXd vec2(double a, double b) {
    Eigen::VectorXd v(2);
    v << a, b;
    return v;
}

Eigen::VectorXd vec3(double a, double b, double c) {
    Eigen::VectorXd v(3);
    v << a, b, c;
    return v;
}

}  // namespace

TEST_CASE("eval closed forms") {
    CHECK(eval_cnd(CndKernel::squared_euclidean(), vec2(0, 0), vec2(3, 4)) == doctest::Approx(25.0));
    CHECK(eval_cnd(CndKernel::euclidean(), vec2(1, 2), vec2(1, 2)) == doctest::Approx(0.0));
    CHECK(eval_cnd(CndKernel::sphere_geodesic(), vec3(1, 0, 0), vec3(0, 1, 0)) ==
          doctest::Approx(M_PI / 2));
    CHECK(eval_cnd(CndKernel::power_distance(1.5), vec1(0), vec1(4)) == doctest::Approx(8.0));
    // symmetry
    Rng rng(11);
    for (int i = 0; i < 20; ++i) {
        Eigen::VectorXd x = rng.normal_matrix(3, 1).col(0);
        Eigen::VectorXd y = rng.normal_matrix(3, 1).col(0);
        CndKernel k = CndKernel::power_distance(rng.uniform(0.2, 2.0), rng.uniform(0, 0.5));
        CHECK(eval_cnd(k, x, y) == doctest::Approx(eval_cnd(k, y, x)));
        CHECK(eval_cnd(k, x, y) >= 0.0);
    }
}

TEST_CASE("eval errors") {
    CHECK_THROWS_WITH_AS(eval_cnd(CndKernel::euclidean(), vec2(0, 0), vec3(1, 1, 1)),
                         doctest::Contains("dimensions"), Error);
    CHECK_THROWS_AS(eval_cnd(CndKernel::sphere_geodesic(), vec3(1, 1, 0), vec3(0, 1, 0)), Error);
    Eigen::MatrixXd M(2, 2);
    M << 0, 1, 1, 0;
    CHECK_THROWS_AS(eval_cnd(CndKernel::precomputed(M), vec1(2), vec1(0)), Error);
    CHECK_THROWS_AS(CndKernel::power_distance(2.5), Error);
    CHECK_THROWS_AS(CndKernel::power_distance(0.0), Error);
}

TEST_CASE("gram closed forms") {
    PointSet single;
    single.points = Eigen::MatrixXd::Constant(1, 2, 1.5);
    Eigen::MatrixXd G1 = gram_cnd(CndKernel::squared_euclidean(0.25), single);
    CHECK(G1.rows() == 1);
    CHECK(G1(0, 0) == doctest::Approx(0.5));  // diagonal carries twice the offset

    PointSet line;
    line.points.resize(3, 1);
    line.points << 0, 1, 2;
    Eigen::MatrixXd G = gram_cnd(CndKernel::squared_euclidean(), line);
    Eigen::MatrixXd want(3, 3);
    want << 0, 1, 4, 1, 0, 1, 4, 1, 0;
    CHECK((G - want).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

    Eigen::MatrixXd M(3, 3);
    M << 0, 2, 3, 2, 0, 1, 3, 1, 0;
    PointSet idx;
    idx.points.resize(3, 1);
    idx.points << 0, 1, 2;
    CHECK((gram_cnd(CndKernel::precomputed(M), idx) - M).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("metrized distance") {
    CHECK(metrized_distance(CndKernel::squared_euclidean(), vec1(0), vec1(2)) ==
          doctest::Approx(std::sqrt(8.0)));
    CHECK(metrized_distance(CndKernel::euclidean(), vec1(3), vec1(3)) == doctest::Approx(0.0));
    CHECK(metrized_distance(CndKernel::euclidean(), vec1(0), vec1(1)) ==
          doctest::Approx(std::sqrt(2.0)));
    // offset cancels in the radicand
    CHECK(metrized_distance(CndKernel::euclidean(0.7), vec1(0), vec1(1)) ==
          doctest::Approx(std::sqrt(2.0)));

    Eigen::MatrixXd bad(2, 2);
    bad << 0, -1, -1, 0;
    CHECK_THROWS_AS(metrized_distance(CndKernel::precomputed(bad), vec1(0), vec1(1)), Error);
}

TEST_CASE("induced pd gram") {
    Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(3, 3);
    CHECK(induced_pd_gram(Z, 1).cwiseAbs().maxCoeff() == 0.0);

    Eigen::MatrixXd G(2, 2);
    G << 0, 1, 1, 0;
    Eigen::MatrixXd K = induced_pd_gram(G, 0);
    CHECK(K(0, 0) == 0.0);
    CHECK(K(0, 1) == 0.0);
    CHECK(K(1, 1) == doctest::Approx(2.0));

    PointSet line;
    line.points.resize(3, 1);
    line.points << 0, 1, 2;
    Eigen::MatrixXd K2 = induced_pd_gram(gram_cnd(CndKernel::squared_euclidean(), line), 0);
    for (Eigen::Index i = 0; i < 3; ++i) {
        for (Eigen::Index j = 0; j < 3; ++j) {
            CHECK(K2(i, j) == doctest::Approx(2.0 * line.points(i, 0) * line.points(j, 0)));
        }
    }
    CHECK_THROWS_AS(induced_pd_gram(G, 5), Error);
}

TEST_CASE("schoenberg gram") {
    Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(2, 2);
    CHECK((schoenberg_gram(Z, 3.0) - Eigen::MatrixXd::Ones(2, 2)).cwiseAbs().maxCoeff() == 0.0);
    Eigen::MatrixXd C = Eigen::MatrixXd::Constant(1, 1, 0.4);
    CHECK(schoenberg_gram(C, 2.0)(0, 0) == doctest::Approx(std::exp(-0.8)));
    CHECK_THROWS_AS(schoenberg_gram(Z, 0.0), Error);
}

TEST_CASE("built-in kinds certify as CND; lifts certify as PD") {
    Rng rng(1234);
    for (int trial = 0; trial < 100; ++trial) {
        bool sphere = trial % 4 == 3;
        Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.uniform() * 11);
        PointSet pts = oracle::random_points(rng, n, 3, sphere);
        CndKernel k = sphere ? CndKernel::sphere_geodesic()
                             : oracle::random_cnd_kernel(rng);
        if (trial % 5 == 0) k.diagonal_offset = rng.uniform(0, 0.5);
        Eigen::MatrixXd G = gram_cnd(k, pts);

        auto report = certify(G, CertifyMode::CND, n, 1, {1e-9, 1e-10, false});
        CHECK(report.verdict != Verdict::Rejected);

        auto pd = certify(induced_pd_gram(G, n / 2), CertifyMode::PD, n, 1);
        CHECK(pd.verdict != Verdict::Rejected);

        for (double r : {0.1, 1.0, 10.0}) {
            auto sg = certify(schoenberg_gram(G, r), CertifyMode::PD, n, 1);
            CHECK(sg.verdict != Verdict::Rejected);
        }
    }
}

TEST_CASE("metric squares match the lifted gram diagonal form") {
    // D(x,y)^2 = K(x,x) + K(y,y) - 2 K(x,y) for the base-point lift, any base
    Rng rng(202);
    for (int trial = 0; trial < 20; ++trial) {
        CndKernel k = oracle::random_cnd_kernel(rng);
        if (trial % 3 == 0) k.diagonal_offset = rng.uniform(0, 0.4);
        PointSet pts = oracle::random_points(rng, 5, 2);
        Eigen::MatrixXd G = gram_cnd(k, pts);
        Eigen::Index w = trial % 5;
        Eigen::MatrixXd K = induced_pd_gram(G, w);
        for (Eigen::Index a = 0; a < 5; ++a) {
            for (Eigen::Index b = 0; b < 5; ++b) {
                double d = metrized_distance(k, pts.points.row(a).transpose(),
                                             pts.points.row(b).transpose());
                CHECK(d * d == doctest::Approx(K(a, a) + K(b, b) - 2 * K(a, b)).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("metrized distance satisfies the triangle inequality") {
    Rng rng(77);
    for (int trial = 0; trial < 40; ++trial) {
        bool sphere = trial % 4 == 0;
        CndKernel k = sphere ? CndKernel::sphere_geodesic() : oracle::random_cnd_kernel(rng);
        PointSet pts = oracle::random_points(rng, 6, 3, sphere);
        for (Eigen::Index a = 0; a < 6; ++a) {
            for (Eigen::Index b = 0; b < 6; ++b) {
                for (Eigen::Index c = 0; c < 6; ++c) {
                    double ab = metrized_distance(k, pts.points.row(a).transpose(),
                                                  pts.points.row(b).transpose());
                    double ac = metrized_distance(k, pts.points.row(a).transpose(),
                                                  pts.points.row(c).transpose());
                    double cb = metrized_distance(k, pts.points.row(c).transpose(),
                                                  pts.points.row(b).transpose());
                    CHECK(ab <= ac + cb + 1e-9);
                }
            }
        }
    }
}
