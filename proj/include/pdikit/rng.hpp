#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace pdikit {

// Seeded generator with self-contained uniform and normal draws, so
// sequences do not depend on the standard library's distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() {  // [0, 1)
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {  // Box-Muller with a cached spare
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1, u2;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        u2 = uniform();
        double radius = std::sqrt(-2.0 * std::log(u1));
        double angle = 6.283185307179586476925286766559 * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols) {
        Eigen::MatrixXd m(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i) {
            for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal();
        }
        return m;
    }

    // Row-normalized points on the unit sphere.
    Eigen::MatrixXd sphere_matrix(Eigen::Index rows, Eigen::Index cols) {
        Eigen::MatrixXd m = normal_matrix(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i) {
            double norm = m.row(i).norm();
            if (norm < 1e-12) {
                m.row(i).setZero();
                m(i, 0) = 1.0;
            } else {
                m.row(i) /= norm;
            }
        }
        return m;
    }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace pdikit
