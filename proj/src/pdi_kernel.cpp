#include "pdikit/pdi_kernel.hpp"

#include <cmath>
#include <sstream>

namespace pdikit {

namespace {

Eigen::Index raw_grid_index(const PdiKernel& spec, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& y) {
    require(x.size() == 1 && y.size() == 1, ErrorCode::DimensionMismatch,
            "raw-grid kernels take single index coordinates");
    auto to_index = [](double v, Eigen::Index bound, const char* side) {
        double rounded = std::round(v);
        require(std::abs(v - rounded) <= 1e-9, ErrorCode::IndexOutOfRange,
                std::string("raw-grid ") + side + " index is not integral");
        auto idx = static_cast<Eigen::Index>(rounded);
        require(idx >= 0 && idx < bound, ErrorCode::IndexOutOfRange,
                std::string("raw-grid ") + side + " index out of range");
        return idx;
    };
    Eigen::Index i = to_index(x[0], spec.grid_n, "x");
    Eigen::Index k = to_index(y[0], spec.grid_m, "y");
    return i * spec.grid_m + k;
}

double eval_uncentered(const PdiKernel& spec, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& xp, const Eigen::VectorXd& yp) {
    switch (spec.kind) {
        case PdiKernel::Kind::Kronecker:
            return eval_cnd(spec.x_kernel, x, xp) * eval_cnd(spec.y_kernel, y, yp);
        case PdiKernel::Kind::BernsteinCompose:
            return bernstein2_eval(spec.g, eval_cnd(spec.x_kernel, x, xp),
                                   eval_cnd(spec.y_kernel, y, yp));
        case PdiKernel::Kind::Cm2Compose:
            return cm2_eval(spec.psi,
                            eval_cnd(spec.x_kernel, x, xp) + eval_cnd(spec.y_kernel, y, yp));
        case PdiKernel::Kind::RawGrid: {
            Eigen::Index p = raw_grid_index(spec, x, y);
            Eigen::Index q = raw_grid_index(spec, xp, yp);
            return spec.grid_matrix(p, q);
        }
    }
    return 0.0;
}

}  // namespace

PdiKernel PdiKernel::kronecker(CndKernel gamma, CndKernel varsigma, bool centered) {
    PdiKernel k;
    k.kind = Kind::Kronecker;
    k.x_kernel = std::move(gamma);
    k.y_kernel = std::move(varsigma);
    k.centered = centered;
    k.validate();
    return k;
}

PdiKernel PdiKernel::bernstein_compose(Bernstein2 g, CndKernel gamma, CndKernel varsigma,
                                       bool centered) {
    PdiKernel k;
    k.kind = Kind::BernsteinCompose;
    k.g = std::move(g);
    k.x_kernel = std::move(gamma);
    k.y_kernel = std::move(varsigma);
    k.centered = centered;
    k.validate();
    return k;
}

PdiKernel PdiKernel::cm2_compose(Cm2Function psi, CndKernel gamma, CndKernel varsigma,
                                 bool centered) {
    PdiKernel k;
    k.kind = Kind::Cm2Compose;
    k.psi = std::move(psi);
    k.x_kernel = std::move(gamma);
    k.y_kernel = std::move(varsigma);
    k.centered = centered;
    k.validate();
    return k;
}

PdiKernel PdiKernel::raw_grid(Eigen::MatrixXd matrix, Eigen::Index n, Eigen::Index m,
                              bool centered) {
    PdiKernel k;
    k.kind = Kind::RawGrid;
    k.grid_matrix = std::move(matrix);
    k.grid_n = n;
    k.grid_m = m;
    k.centered = centered;
    k.validate();
    return k;
}

void PdiKernel::validate() const {
    switch (kind) {
        case Kind::Kronecker:
            x_kernel.validate();
            y_kernel.validate();
            break;
        case Kind::BernsteinCompose:
            g.validate();
            require(g.zero_at_boundary(), ErrorCode::InvalidSpec,
                    "composing function must be zero at the boundary");
            x_kernel.validate();
            y_kernel.validate();
            break;
        case Kind::Cm2Compose:
            psi.validate();
            x_kernel.validate();
            y_kernel.validate();
            break;
        case Kind::RawGrid:
            require(grid_n >= 1 && grid_m >= 1, ErrorCode::ShapeMismatch,
                    "raw grid dimensions must be >= 1");
            require(grid_matrix.rows() == grid_n * grid_m &&
                        grid_matrix.cols() == grid_n * grid_m,
                    ErrorCode::ShapeMismatch, "raw grid matrix size must equal n*m");
            require((grid_matrix - grid_matrix.transpose()).cwiseAbs().maxCoeff() <=
                        1e-12 * std::max(1.0, grid_matrix.cwiseAbs().maxCoeff()),
                    ErrorCode::InvalidSpec, "raw grid matrix must be symmetric");
            break;
    }
}

std::string PdiKernel::describe() const {
    std::ostringstream out;
    switch (kind) {
        case Kind::Kronecker:
            out << "kronecker(" << x_kernel.describe() << ", " << y_kernel.describe() << ")";
            break;
        case Kind::BernsteinCompose:
            out << "bernstein2(atoms=" << g.atoms.size() << ", " << x_kernel.describe() << ", "
                << y_kernel.describe() << ")";
            break;
        case Kind::Cm2Compose: {
            out << "cm2sum(";
            switch (psi.kind) {
                case Cm2Function::Kind::PowerA: out << "power " << psi.exponent; break;
                case Cm2Function::Kind::TLogT: out << "tlogt"; break;
                case Cm2Function::Kind::Quadratic: out << "quadratic"; break;
                case Cm2Function::Kind::Mixture:
                    out << "mixture atoms=" << psi.measure.atoms.size();
                    break;
            }
            out << ", " << x_kernel.describe() << ", " << y_kernel.describe() << ")";
            break;
        }
        case Kind::RawGrid: out << "rawgrid(" << grid_n << "x" << grid_m << ")"; break;
    }
    if (centered) out << "[centered]";
    return out.str();
}

void ProductGrid::validate() const {
    xs.validate();
    ys.validate();
}

double eval_pdi(const PdiKernel& spec, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                const Eigen::VectorXd& xp, const Eigen::VectorXd& yp) {
    if (!spec.centered) return eval_uncentered(spec, x, y, xp, yp);
    // Nine-term projection centering applied pointwise.
    double v = eval_uncentered(spec, x, y, xp, yp);
    v -= 0.5 * eval_uncentered(spec, x, y, x, yp);
    v -= 0.5 * eval_uncentered(spec, xp, y, xp, yp);
    v -= 0.5 * eval_uncentered(spec, x, y, xp, y);
    v -= 0.5 * eval_uncentered(spec, x, yp, xp, yp);
    v += 0.25 * eval_uncentered(spec, x, y, x, y);
    v += 0.25 * eval_uncentered(spec, x, yp, x, yp);
    v += 0.25 * eval_uncentered(spec, xp, y, xp, y);
    v += 0.25 * eval_uncentered(spec, xp, yp, xp, yp);
    return v;
}

Eigen::MatrixXd gram_pdi(const PdiKernel& spec, const ProductGrid& grid) {
    spec.validate();
    grid.validate();
    Eigen::Index n = grid.n(), m = grid.m();
    Eigen::MatrixXd M(n * m, n * m);

    if (spec.kind == PdiKernel::Kind::RawGrid) {
        require(n == spec.grid_n && m == spec.grid_m, ErrorCode::ShapeMismatch,
                "grid dimensions do not match the raw matrix");
        // Index lookup; the identity when the grid holds the canonical indices.
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index k = 0; k < m; ++k) {
                Eigen::Index p = i * m + k;
                for (Eigen::Index j = 0; j < n; ++j) {
                    for (Eigen::Index l = 0; l < m; ++l) {
                        M(p, j * m + l) = eval_uncentered(spec, grid.xs.points.row(i).transpose(),
                                                          grid.ys.points.row(k).transpose(),
                                                          grid.xs.points.row(j).transpose(),
                                                          grid.ys.points.row(l).transpose());
                    }
                }
            }
        }
    } else {
        // One Gram per factor, then combine entrywise.
        Eigen::MatrixXd Gx = gram_cnd(spec.x_kernel, grid.xs);
        Eigen::MatrixXd Gy = gram_cnd(spec.y_kernel, grid.ys);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index k = 0; k < m; ++k) {
                Eigen::Index p = i * m + k;
                for (Eigen::Index j = i; j < n; ++j) {
                    for (Eigen::Index l = (j == i ? k : 0); l < m; ++l) {
                        Eigen::Index q = j * m + l;
                        double v = 0.0;
                        switch (spec.kind) {
                            case PdiKernel::Kind::Kronecker: v = Gx(i, j) * Gy(k, l); break;
                            case PdiKernel::Kind::BernsteinCompose:
                                v = bernstein2_eval(spec.g, Gx(i, j), Gy(k, l));
                                break;
                            case PdiKernel::Kind::Cm2Compose:
                                v = cm2_eval(spec.psi, Gx(i, j) + Gy(k, l));
                                break;
                            case PdiKernel::Kind::RawGrid: break;
                        }
                        M(p, q) = v;
                        M(q, p) = v;
                    }
                }
            }
        }
    }
    if (spec.centered) M = center_projections(M, n, m);
    return M;
}

Eigen::MatrixXd center_projections(const Eigen::MatrixXd& G, Eigen::Index n, Eigen::Index m) {
    require(n >= 1 && m >= 1 && G.rows() == n * m && G.cols() == n * m, ErrorCode::ShapeMismatch,
            "gram size does not match the grid dimensions");
    auto idx = [m](Eigen::Index i, Eigen::Index k) { return i * m + k; };
    Eigen::MatrixXd out(n * m, n * m);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < m; ++k) {
            for (Eigen::Index j = 0; j < n; ++j) {
                for (Eigen::Index l = 0; l < m; ++l) {
                    double v = G(idx(i, k), idx(j, l));
                    v -= 0.5 * G(idx(i, k), idx(i, l));
                    v -= 0.5 * G(idx(j, k), idx(j, l));
                    v -= 0.5 * G(idx(i, k), idx(j, k));
                    v -= 0.5 * G(idx(i, l), idx(j, l));
                    v += 0.25 * G(idx(i, k), idx(i, k));
                    v += 0.25 * G(idx(i, l), idx(i, l));
                    v += 0.25 * G(idx(j, k), idx(j, k));
                    v += 0.25 * G(idx(j, l), idx(j, l));
                    out(idx(i, k), idx(j, l)) = v;
                }
            }
        }
    }
    // Exact symmetry: the nine terms are already pair-symmetric, rounding aside.
    out = ((out + out.transpose()) / 2.0).eval();
    return out;
}

Eigen::MatrixXd lift_base_point(const Eigen::MatrixXd& G, Eigen::Index n, Eigen::Index m,
                                Eigen::Index i0, Eigen::Index k0) {
    require(n >= 1 && m >= 1 && G.rows() == n * m && G.cols() == n * m, ErrorCode::ShapeMismatch,
            "gram size does not match the grid dimensions");
    require(i0 >= 0 && i0 < n && k0 >= 0 && k0 < m, ErrorCode::IndexOutOfRange,
            "base point out of range");
    auto idx = [m](Eigen::Index i, Eigen::Index k) { return i * m + k; };
    Eigen::MatrixXd K(n * m, n * m);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < m; ++k) {
            for (Eigen::Index j = 0; j < n; ++j) {
                for (Eigen::Index l = 0; l < m; ++l) {
                    // Sixteen signed terms: each argument slot is either kept
                    // or replaced by the base coordinate.
                    double v = 0.0;
                    for (int sx = 0; sx < 2; ++sx) {
                        Eigen::Index a = sx ? i0 : i;
                        for (int sy = 0; sy < 2; ++sy) {
                            Eigen::Index b = sy ? k0 : k;
                            for (int tx = 0; tx < 2; ++tx) {
                                Eigen::Index c = tx ? i0 : j;
                                for (int ty = 0; ty < 2; ++ty) {
                                    Eigen::Index d = ty ? k0 : l;
                                    double sign = ((sx + sy + tx + ty) % 2 == 0) ? 1.0 : -1.0;
                                    v += sign * G(idx(a, b), idx(c, d));
                                }
                            }
                        }
                    }
                    K(idx(i, k), idx(j, l)) = v;
                }
            }
        }
    }
    K = ((K + K.transpose()) / 2.0).eval();
    return K;
}

double lift_square_entry(const Eigen::MatrixXd& G, Eigen::Index n, Eigen::Index m,
                         const QuadIndex& a, const QuadIndex& b) {
    require(G.rows() == n * m && G.cols() == n * m, ErrorCode::ShapeMismatch,
            "gram size does not match the grid dimensions");
    auto check = [&](const QuadIndex& q) {
        require(q.i >= 0 && q.i < n && q.j >= 0 && q.j < n && q.k >= 0 && q.k < m && q.l >= 0 &&
                    q.l < m,
                ErrorCode::IndexOutOfRange, "quadruple index out of range");
    };
    check(a);
    check(b);
    auto idx = [m](Eigen::Index i, Eigen::Index k) { return i * m + k; };
    double v = 0.0;
    for (int sx = 0; sx < 2; ++sx) {
        Eigen::Index p = sx ? a.j : a.i;  // first slot: x_i or its partner x_j
        for (int sy = 0; sy < 2; ++sy) {
            Eigen::Index q = sy ? a.l : a.k;
            for (int tx = 0; tx < 2; ++tx) {
                Eigen::Index r = tx ? b.j : b.i;
                for (int ty = 0; ty < 2; ++ty) {
                    Eigen::Index s = ty ? b.l : b.k;
                    double sign = ((sx + sy + tx + ty) % 2 == 0) ? 1.0 : -1.0;
                    v += sign * G(idx(p, q), idx(r, s));
                }
            }
        }
    }
    return v;
}

double rkhs_identity_residual(const PdiKernel& spec, const ProductGrid& grid,
                              std::span<const GridPair> pairs) {
    spec.validate();
    Eigen::Index n = grid.n(), m = grid.m();
    Eigen::MatrixXd G = gram_pdi(spec, grid);
    auto idx = [m](Eigen::Index i, Eigen::Index k) { return i * m + k; };

    if (!spec.centered) {
        // Accept kernels whose projection slices already vanish on this grid.
        double worst = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index k = 0; k < m; ++k) {
                for (Eigen::Index l = 0; l < m; ++l) {
                    worst = std::max(worst, std::abs(G(idx(i, k), idx(i, l))));
                }
            }
        }
        for (Eigen::Index k = 0; k < m; ++k) {
            for (Eigen::Index i = 0; i < n; ++i) {
                for (Eigen::Index j = 0; j < n; ++j) {
                    worst = std::max(worst, std::abs(G(idx(i, k), idx(j, k))));
                }
            }
        }
        require(worst <= 1e-10, ErrorCode::InvalidSpec,
                "kernel is not centered: projection slices do not vanish");
    }

    Eigen::MatrixXd K = lift_base_point(G, n, m, 0, 0);
    double max_residual = 0.0;
    for (const GridPair& p : pairs) {
        require(p.i >= 0 && p.i < n && p.j >= 0 && p.j < n && p.k >= 0 && p.k < m && p.l >= 0 &&
                    p.l < m,
                ErrorCode::IndexOutOfRange, "grid pair out of range");
        Eigen::Index a = idx(p.i, p.k);  // (x, y)
        Eigen::Index b = idx(p.j, p.l);  // (x', y')
        Eigen::Index c = idx(p.i, p.l);  // (x, y')
        Eigen::Index d = idx(p.j, p.k);  // (x', y)
        // ||K_a + K_b - K_c - K_d||^2 via the expanded inner products.
        std::array<Eigen::Index, 4> pts = {a, b, c, d};
        std::array<double, 4> sgn = {1.0, 1.0, -1.0, -1.0};
        double rhs = 0.0;
        for (int u = 0; u < 4; ++u) {
            for (int v = 0; v < 4; ++v) rhs += sgn[u] * sgn[v] * K(pts[u], pts[v]);
        }
        double lhs = 2.0 * G(a, b) + 2.0 * G(c, d);
        max_residual = std::max(max_residual, std::abs(lhs - rhs));
        max_residual = std::max(max_residual, std::abs(4.0 * G(a, b) - rhs));
    }
    return max_residual;
}

QuadrangleReport sqrt_quadrangle_check(const PdiKernel& spec,
                                       std::span<const QuadrangleSample> samples) {
    spec.validate();
    auto root = [](double v) {
        if (v < -1e-12) fail(ErrorCode::NotPdi, "kernel value is negative beyond tolerance");
        return std::sqrt(std::max(v, 0.0));
    };
    QuadrangleReport report;
    for (const QuadrangleSample& s : samples) {
        double lhs = root(eval_pdi(spec, s.x, s.y, s.xp, s.yp));
        double rhs = root(eval_pdi(spec, s.x, s.y, s.z, s.w)) +
                     root(eval_pdi(spec, s.x, s.yp, s.z, s.w)) +
                     root(eval_pdi(spec, s.xp, s.y, s.z, s.w)) +
                     root(eval_pdi(spec, s.xp, s.yp, s.z, s.w));
        report.max_violation = std::max(report.max_violation, lhs - rhs);
        ++report.n_checked;
    }
    return report;
}

TransformWitnessReport nonconstant_transform_not_pd(const std::function<double(double)>& f,
                                                    const PdiKernel& spec,
                                                    const Eigen::VectorXd& x,
                                                    const Eigen::VectorXd& xp,
                                                    const Eigen::VectorXd& y,
                                                    const Eigen::VectorXd& yp) {
    spec.validate();
    TransformWitnessReport report;
    report.kernel_value = eval_pdi(spec, x, y, xp, yp);
    require(std::abs(report.kernel_value) > 1e-12, ErrorCode::DegenerateWitness,
            "witness kernel value is zero");

    // Interpolation matrix of the transformed kernel at the four corners.
    std::array<std::pair<const Eigen::VectorXd*, const Eigen::VectorXd*>, 4> pts = {
        std::make_pair(&x, &y), std::make_pair(&x, &yp), std::make_pair(&xp, &y),
        std::make_pair(&xp, &yp)};
    Eigen::Matrix4d A;
    for (int u = 0; u < 4; ++u) {
        for (int v = 0; v < 4; ++v) {
            A(u, v) =
                f(eval_pdi(spec, *pts[u].first, *pts[u].second, *pts[v].first, *pts[v].second));
        }
    }
    Eigen::Vector4d v1(-1.0, 1.0, -1.0, 1.0);
    Eigen::Vector4d v2(-1.0, 1.0, 1.0, -1.0);
    report.form_alternating = v1.dot(A * v1);
    report.form_paired = v2.dot(A * v2);

    double tol = 1e-12 * std::max(1.0, A.cwiseAbs().maxCoeff());
    bool opposite = (report.form_alternating > tol && report.form_paired < -tol) ||
                    (report.form_alternating < -tol && report.form_paired > tol);
    report.verdict = opposite ? TransformVerdict::NotPd : TransformVerdict::Inconclusive;
    return report;
}

}  // namespace pdikit
