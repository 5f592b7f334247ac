#pragma once

#include <cmath>

#include <Eigen/Dense>

namespace gridfreq {

/// Exact discretization of dx/dt = A x + B u over one step of length dt,
/// for an input that varies linearly from u0 to u1 across the step:
///
///     x(t + dt) = phi x(t) + gamma0 u0 + gamma1 u1
///
/// With u0 == u1 this reduces to the zero-order-hold solution.
struct LinearStep {
    Eigen::MatrixXd phi;
    Eigen::VectorXd gamma0;
    Eigen::VectorXd gamma1;

    Eigen::VectorXd advance(const Eigen::VectorXd& x, double u0, double u1) const {
        return phi * x + gamma0 * u0 + gamma1 * u1;
    }
};

LinearStep discretize(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double dt);

/// Scalar first-order lag T dy/dt = u - y with u held over the step.
inline double lag_step(double y, double u, double time_constant, double dt) {
    if (time_constant <= 0.0) {
        return u;
    }
    return u + (y - u) * std::exp(-dt / time_constant);
}

}  // namespace gridfreq
