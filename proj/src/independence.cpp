#include "pdikit/independence.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>

namespace pdikit {

namespace {

// Neumaier compensated accumulator; summation order stays row-major.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double v) {
        double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    double value() const { return sum + comp; }
};

Eigen::MatrixXd double_center(const Eigen::MatrixXd& G) {
    Eigen::VectorXd row_mean = G.rowwise().mean();
    Eigen::RowVectorXd col_mean = G.colwise().mean();
    double total_mean = G.mean();
    Eigen::MatrixXd C = G;
    C.colwise() -= row_mean;
    C.rowwise() -= col_mean;
    C.array() += total_mean;
    return C;
}

PointSet sample_points(const Eigen::MatrixXd& rows) {
    PointSet p;
    p.points = rows;
    return p;
}

Eigen::MatrixXd factor_gram(const CndKernel& spec, const Eigen::MatrixXd& rows) {
    PointSet pts = sample_points(rows);
    if (spec.kind == CndKind::SphereGeodesic) pts.geometry = Geometry::UnitSphere;
    return gram_cnd(spec, pts);
}

ProductGrid sample_grid(const PdiKernel& spec, const PairedSample& sample) {
    ProductGrid grid;
    if (spec.kind == PdiKernel::Kind::RawGrid) {
        grid.xs = sample_points(sample.xs);
        grid.ys = sample_points(sample.ys);
    } else {
        grid.xs = sample_points(sample.xs);
        grid.ys = sample_points(sample.ys);
        if (spec.x_kernel.kind == CndKind::SphereGeodesic) grid.xs.geometry = Geometry::UnitSphere;
        if (spec.y_kernel.kind == CndKind::SphereGeodesic) grid.ys.geometry = Geometry::UnitSphere;
    }
    return grid;
}

// (1/n^2) <H A H, H B H>_F for same-size square factor matrices.
double centered_product_statistic(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    Eigen::Index n = A.rows();
    Eigen::MatrixXd Ca = double_center(A);
    Eigen::MatrixXd Cb = double_center(B);
    return Ca.cwiseProduct(Cb).sum() / static_cast<double>(n * n);
}

}  // namespace

void PairedSample::validate() const {
    require(xs.rows() == ys.rows(), ErrorCode::ShapeMismatch,
            "paired sample row counts differ");
    require(xs.rows() >= 2, ErrorCode::SampleTooSmall, "paired sample needs n >= 2");
    require(xs.cols() >= 1 && ys.cols() >= 1, ErrorCode::ShapeMismatch,
            "paired sample needs at least one column per side");
    require(xs.allFinite() && ys.allFinite(), ErrorCode::InvalidSpec,
            "paired sample has non-finite entries");
}

Eigen::MatrixXd delta_weights(Eigen::Index n) {
    require(n >= 1, ErrorCode::SampleTooSmall, "weights need n >= 1");
    double nn = static_cast<double>(n);
    Eigen::MatrixXd w = Eigen::MatrixXd::Constant(n, n, -1.0 / (nn * nn));
    w.diagonal().array() += 1.0 / nn;
    return w;
}

namespace {

// Entry evaluator over the sample grid that never materializes the
// (n*n) x (n*n) Gram: factor Grams are precomputed and combined per entry.
class GridEntry {
public:
    GridEntry(const PdiKernel& spec, const PairedSample& sample) : spec_(spec) {
        if (spec.kind == PdiKernel::Kind::RawGrid) {
            require(sample.xs.cols() == 1 && sample.ys.cols() == 1, ErrorCode::DimensionMismatch,
                    "raw-grid kernels take single index coordinates");
            Eigen::Index n = sample.n();
            x_index_.resize(n);
            y_index_.resize(n);
            for (Eigen::Index r = 0; r < n; ++r) {
                x_index_[r] = checked_index(sample.xs(r, 0), spec.grid_n, "x");
                y_index_[r] = checked_index(sample.ys(r, 0), spec.grid_m, "y");
            }
        } else {
            Gx_ = factor_gram(spec.x_kernel, sample.xs);
            Gy_ = factor_gram(spec.y_kernel, sample.ys);
        }
    }

    double operator()(Eigen::Index i, Eigen::Index k, Eigen::Index j, Eigen::Index l) const {
        if (!spec_.centered) return base(i, k, j, l);
        return base(i, k, j, l) - 0.5 * base(i, k, i, l) - 0.5 * base(j, k, j, l) -
               0.5 * base(i, k, j, k) - 0.5 * base(i, l, j, l) + 0.25 * base(i, k, i, k) +
               0.25 * base(i, l, i, l) + 0.25 * base(j, k, j, k) + 0.25 * base(j, l, j, l);
    }

private:
    static Eigen::Index checked_index(double v, Eigen::Index bound, const char* side) {
        double rounded = std::round(v);
        require(std::abs(v - rounded) <= 1e-9 && rounded >= 0.0 &&
                    rounded < static_cast<double>(bound),
                ErrorCode::IndexOutOfRange,
                std::string("raw-grid ") + side + " index out of range");
        return static_cast<Eigen::Index>(rounded);
    }

    double base(Eigen::Index i, Eigen::Index k, Eigen::Index j, Eigen::Index l) const {
        switch (spec_.kind) {
            case PdiKernel::Kind::Kronecker: return Gx_(i, j) * Gy_(k, l);
            case PdiKernel::Kind::BernsteinCompose:
                return bernstein2_eval(spec_.g, Gx_(i, j), Gy_(k, l));
            case PdiKernel::Kind::Cm2Compose:
                return cm2_eval(spec_.psi, Gx_(i, j) + Gy_(k, l));
            case PdiKernel::Kind::RawGrid:
                return spec_.grid_matrix(x_index_[i] * spec_.grid_m + y_index_[k],
                                         x_index_[j] * spec_.grid_m + y_index_[l]);
        }
        return 0.0;
    }

    const PdiKernel& spec_;
    Eigen::MatrixXd Gx_, Gy_;
    std::vector<Eigen::Index> x_index_, y_index_;
};

}  // namespace

double statistic_direct(const PdiKernel& spec, const PairedSample& sample) {
    spec.validate();
    sample.validate();
    Eigen::Index n = sample.n();
    GridEntry entry(spec, sample);
    Eigen::MatrixXd w = delta_weights(n);

    CompensatedSum acc;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < n; ++k) {
            double wik = w(i, k);
            for (Eigen::Index j = 0; j < n; ++j) {
                for (Eigen::Index l = 0; l < n; ++l) {
                    acc.add(wik * w(j, l) * entry(i, k, j, l));
                }
            }
        }
    }
    return acc.value();
}

double statistic_kronecker_fast(const CndKernel& gamma, const CndKernel& varsigma,
                                const PairedSample& sample) {
    sample.validate();
    Eigen::MatrixXd Gx = factor_gram(gamma, sample.xs);
    Eigen::MatrixXd Gy = factor_gram(varsigma, sample.ys);
    return centered_product_statistic(Gx, Gy);
}

double statistic_decomposed(const PdiKernel& spec, const PairedSample& sample) {
    spec.validate();
    sample.validate();
    Eigen::Index n = sample.n();
    double nn = static_cast<double>(n * n);

    if (spec.kind == PdiKernel::Kind::BernsteinCompose) {
        require(spec.g.kind == Bernstein2::Kind::Mixture2, ErrorCode::Unsupported,
                "decomposed path needs a finite-mixture composing function");
        Eigen::MatrixXd Gx = factor_gram(spec.x_kernel, sample.xs);
        Eigen::MatrixXd Gy = factor_gram(spec.y_kernel, sample.ys);
        double acc = 0.0;
        for (const auto& atom : spec.g.atoms) {
            Eigen::MatrixXd A(n, n), B(n, n);
            for (Eigen::Index i = 0; i < n; ++i) {
                for (Eigen::Index j = 0; j < n; ++j) {
                    A(i, j) = saturating_factor(atom.r1, Gx(i, j));
                    B(i, j) = saturating_factor(atom.r2, Gy(i, j));
                }
            }
            acc += atom.w * double_center(A).cwiseProduct(double_center(B)).sum() / nn;
        }
        return acc;
    }

    if (spec.kind == PdiKernel::Kind::Cm2Compose) {
        const Cm2Function& psi = spec.psi;
        require(psi.kind == Cm2Function::Kind::Quadratic ||
                    psi.kind == Cm2Function::Kind::Mixture,
                ErrorCode::Unsupported, "decomposed path needs a finite-mixture function");
        Eigen::MatrixXd Gx = factor_gram(spec.x_kernel, sample.xs);
        Eigen::MatrixXd Gy = factor_gram(spec.y_kernel, sample.ys);
        // Constant and linear parts vanish under the weights; t^2 leaves
        // twice the Kronecker cross term.
        double acc = 2.0 * psi.a2 * centered_product_statistic(Gx, Gy);
        if (psi.kind == Cm2Function::Kind::Mixture) {
            for (const auto& atom : psi.measure.atoms) {
                Eigen::MatrixXd A = (-atom.r * Gx.array()).exp().matrix();
                Eigen::MatrixXd B = (-atom.r * Gy.array()).exp().matrix();
                double density = (1.0 + atom.r * atom.r) / (atom.r * atom.r);
                acc += atom.w * density *
                       double_center(A).cwiseProduct(double_center(B)).sum() / nn;
            }
        }
        return acc;
    }

    if (spec.kind == PdiKernel::Kind::Kronecker) {
        return statistic_kronecker_fast(spec.x_kernel, spec.y_kernel, sample);
    }

    fail(ErrorCode::Unsupported, "decomposed path does not apply to this kernel");
}

Eigen::MatrixXd centered_grid_gram(const PdiKernel& spec, const PairedSample& sample) {
    spec.validate();
    sample.validate();
    Eigen::Index n = sample.n();
    require(n <= 64, ErrorCode::Unsupported,
            "the doubly-centered grid matrix is quartic in n; use the factorized paths");
    ProductGrid grid = sample_grid(spec, sample);
    Eigen::MatrixXd G = gram_pdi(spec, grid);
    Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n) -
                        Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
    Eigen::MatrixXd HH(n * n, n * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < n; ++k) {
            for (Eigen::Index j = 0; j < n; ++j) {
                for (Eigen::Index l = 0; l < n; ++l) {
                    HH(i * n + k, j * n + l) = H(i, j) * H(k, l);
                }
            }
        }
    }
    Eigen::MatrixXd C = HH * G * HH;
    C = ((C + C.transpose()) / 2.0).eval();
    return C;
}

double centered_kernel_pq(const PdiKernel& spec, const PairedSample& sample, Eigen::Index i,
                          Eigen::Index k, Eigen::Index j, Eigen::Index l) {
    spec.validate();
    sample.validate();
    Eigen::Index n = sample.n();
    require(i >= 0 && i < n && k >= 0 && k < n && j >= 0 && j < n && l >= 0 && l < n,
            ErrorCode::IndexOutOfRange, "grid index out of range");
    require(n <= 64, ErrorCode::Unsupported,
            "the doubly-centered grid path is quartic in n; use the factorized paths");
    ProductGrid grid = sample_grid(spec, sample);
    Eigen::MatrixXd G = gram_pdi(spec, grid);
    double nn = static_cast<double>(n);
    auto idx = [n](Eigen::Index a, Eigen::Index b) { return a * n + b; };

    // Sixteen signed terms: each of the four argument slots is either kept
    // or averaged over its empirical marginal.
    double acc = 0.0;
    for (int sx = 0; sx < 2; ++sx) {
        for (int sy = 0; sy < 2; ++sy) {
            for (int tx = 0; tx < 2; ++tx) {
                for (int ty = 0; ty < 2; ++ty) {
                    double sign = ((sx + sy + tx + ty) % 2 == 0) ? 1.0 : -1.0;
                    double partial = 0.0;
                    Eigen::Index a_lo = sx ? 0 : i, a_hi = sx ? n : i + 1;
                    Eigen::Index b_lo = sy ? 0 : k, b_hi = sy ? n : k + 1;
                    Eigen::Index c_lo = tx ? 0 : j, c_hi = tx ? n : j + 1;
                    Eigen::Index d_lo = ty ? 0 : l, d_hi = ty ? n : l + 1;
                    for (Eigen::Index a = a_lo; a < a_hi; ++a) {
                        for (Eigen::Index b = b_lo; b < b_hi; ++b) {
                            for (Eigen::Index c = c_lo; c < c_hi; ++c) {
                                for (Eigen::Index d = d_lo; d < d_hi; ++d) {
                                    partial += G(idx(a, b), idx(c, d));
                                }
                            }
                        }
                    }
                    double denom = std::pow(nn, sx + sy + tx + ty);
                    acc += sign * partial / denom;
                }
            }
        }
    }
    return acc;
}

double dcov_statistic(const PdiKernel& spec, const PairedSample& sample) {
    Eigen::Index n = sample.n();
    Eigen::MatrixXd C = centered_grid_gram(spec, sample);
    CompensatedSum acc;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            acc.add(C(i * n + i, j * n + j));
        }
    }
    return acc.value() / static_cast<double>(n * n);
}

const char* to_string(StatisticPath path) {
    switch (path) {
        case StatisticPath::Direct: return "direct";
        case StatisticPath::Kronecker: return "kronecker";
        case StatisticPath::Decomposed: return "decomposed";
    }
    return "?";
}

StatisticPath select_statistic_path(const PdiKernel& spec) {
    switch (spec.kind) {
        case PdiKernel::Kind::Kronecker: return StatisticPath::Kronecker;
        case PdiKernel::Kind::BernsteinCompose:
            return spec.g.kind == Bernstein2::Kind::Mixture2 ? StatisticPath::Decomposed
                                                             : StatisticPath::Direct;
        case PdiKernel::Kind::Cm2Compose:
            return (spec.psi.kind == Cm2Function::Kind::Quadratic ||
                    spec.psi.kind == Cm2Function::Kind::Mixture)
                       ? StatisticPath::Decomposed
                       : StatisticPath::Direct;
        case PdiKernel::Kind::RawGrid: return StatisticPath::Direct;
    }
    return StatisticPath::Direct;
}

double statistic_auto(const PdiKernel& spec, const PairedSample& sample) {
    switch (select_statistic_path(spec)) {
        case StatisticPath::Decomposed: return statistic_decomposed(spec, sample);
        case StatisticPath::Kronecker:
            return statistic_kronecker_fast(spec.x_kernel, spec.y_kernel, sample);
        case StatisticPath::Direct: return statistic_direct(spec, sample);
    }
    return statistic_direct(spec, sample);
}

std::vector<Eigen::Index> seeded_permutation(Eigen::Index n, std::uint64_t seed) {
    std::vector<Eigen::Index> perm(n);
    for (Eigen::Index i = 0; i < n; ++i) perm[i] = i;
    std::mt19937_64 rng(seed);
    // Fisher-Yates with an explicit rejection-free bounded draw so the
    // sequence does not depend on the standard library.
    for (Eigen::Index i = n - 1; i > 0; --i) {
        auto bound = static_cast<std::uint64_t>(i) + 1;
        std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t draw;
        do {
            draw = rng();
        } while (draw >= limit);
        std::swap(perm[i], perm[static_cast<Eigen::Index>(draw % bound)]);
    }
    return perm;
}

IndependenceTestResult permutation_test(const PdiKernel& spec, const PairedSample& sample,
                                        int n_perm, std::uint64_t seed) {
    spec.validate();
    sample.validate();
    require(sample.n() >= 4, ErrorCode::SampleTooSmall, "permutation test needs n >= 4");
    require(n_perm >= 19, ErrorCode::InvalidSpec, "permutation test needs n_perm >= 19");

    auto start = std::chrono::steady_clock::now();
    IndependenceTestResult result;
    result.n_permutations = n_perm;
    result.seed = seed;
    result.kernel = spec.describe();
    result.path = select_statistic_path(spec);
    result.statistic = statistic_auto(spec, sample);

    Eigen::Index n = sample.n();

    // Without a factorized path, precompute the full grid Gram once and
    // expand the weights, so each replica costs O(n^2) instead of O(n^4).
    // Gated by memory: the grid matrix holds n^4 doubles.
    bool precompute = result.path == StatisticPath::Direct && n <= 48;
    Eigen::MatrixXd G;       // (n*n) x (n*n)
    Eigen::MatrixXd row_sum; // R[i][k] = sum_{j,l} G[(i,k)][(j,l)]
    double total_sum = 0.0;
    if (precompute) {
        G = gram_pdi(spec, sample_grid(spec, sample));
        row_sum.setZero(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index k = 0; k < n; ++k) {
                row_sum(i, k) = G.row(i * n + k).sum();
            }
        }
        total_sum = row_sum.sum();
    }
    double nn = static_cast<double>(n);

    int at_least = 0;
    for (int rep = 1; rep <= n_perm; ++rep) {
        std::vector<Eigen::Index> perm =
            seeded_permutation(n, seed + static_cast<std::uint64_t>(rep));
        double replica;
        if (precompute) {
            // T = (1/n^2) sum_{i,j} G[(i,s(i))][(j,s(j))]
            //   - (2/n^3) sum_i R[i][s(i)] + (1/n^4) sum_all G
            double paired = 0.0, marginal = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                Eigen::Index p = i * n + perm[i];
                for (Eigen::Index j = 0; j < n; ++j) paired += G(p, j * n + perm[j]);
                marginal += row_sum(i, perm[i]);
            }
            replica = paired / (nn * nn) - 2.0 * marginal / (nn * nn * nn) +
                      total_sum / (nn * nn * nn * nn);
        } else {
            PairedSample shuffled;
            shuffled.xs = sample.xs;
            shuffled.ys.resize(n, sample.ys.cols());
            for (Eigen::Index r = 0; r < n; ++r) shuffled.ys.row(r) = sample.ys.row(perm[r]);
            replica = statistic_auto(spec, shuffled);
        }
        if (replica >= result.statistic) ++at_least;
    }
    result.p_value = (1.0 + at_least) / (1.0 + n_perm);
    result.elapsed_ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    return result;
}

double mmd_squared(const Eigen::MatrixXd& K, const Eigen::VectorXd& w) {
    require(K.rows() == K.cols() && K.rows() == w.size(), ErrorCode::ShapeMismatch,
            "gram and weight sizes differ");
    require(std::abs(w.sum()) <= 1e-12 * std::max(1.0, w.cwiseAbs().maxCoeff()),
            ErrorCode::ConstraintViolation, "weights must sum to zero");
    return w.dot(K * w);
}

double energy_distance_squared(const Eigen::MatrixXd& G, const Eigen::VectorXd& w) {
    return mmd_squared(-G, w);  // -w^T G w with the same validation
}

}  // namespace pdikit
