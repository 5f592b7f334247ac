#include "gridfreq/network.hpp"

#include <algorithm>
#include <cmath>

#include "gridfreq/error.hpp"

namespace gridfreq {

CoupledNetwork::CoupledNetwork(const GridModel& model, std::vector<MachineCoupling> machines)
    : laplacian_(build_susceptance_matrix(model).full),
      machines_(std::move(machines)),
      online_(machines_.size(), true) {
    const auto n = laplacian_.rows();
    injections_ = Eigen::VectorXd::Zero(n);
    theta_p_ = Eigen::VectorXd::Zero(n);
    pe_offset_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(machines_.size()));
    set_online(online_);
}

void CoupledNetwork::set_online(const std::vector<bool>& online) {
    online_ = online;
    const auto n = laplacian_.rows();
    const auto m = static_cast<Eigen::Index>(machines_.size());

    coupled_ = laplacian_;
    for (Eigen::Index i = 0; i < m; ++i) {
        if (online_[static_cast<std::size_t>(i)]) {
            const auto& mc = machines_[static_cast<std::size_t>(i)];
            const auto b = static_cast<Eigen::Index>(mc.bus);
            coupled_.coeffRef(b, b) += mc.admittance;
        }
    }
    coupled_.makeCompressed();

    ldlt_.compute(coupled_);
    bool singular = ldlt_.info() != Eigen::Success;
    if (!singular) {
        const Eigen::VectorXd d = ldlt_.vectorD();
        singular = d.minCoeff() <= 1e-12 * std::max(1.0, d.maxCoeff());
    }
    if (singular) {
        throw IslandingError("network has an island without any online machine");
    }

    // G = B^-1 E Y, one column per machine.
    Eigen::MatrixXd ey = Eigen::MatrixXd::Zero(n, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        if (online_[static_cast<std::size_t>(i)]) {
            const auto& mc = machines_[static_cast<std::size_t>(i)];
            ey(static_cast<Eigen::Index>(mc.bus), i) = mc.admittance;
        }
    }
    g_ = ldlt_.solve(ey);

    // K = Y - Y E^T G
    k_ = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        if (!online_[static_cast<std::size_t>(i)]) {
            continue;
        }
        const auto& mc = machines_[static_cast<std::size_t>(i)];
        k_.row(i) = -mc.admittance * g_.row(static_cast<Eigen::Index>(mc.bus));
        k_(i, i) += mc.admittance;
    }
    set_injections(injections_);
}

void CoupledNetwork::set_injections(const Eigen::VectorXd& injections_pu) {
    injections_ = injections_pu;
    theta_p_ = ldlt_.solve(injections_);
    for (std::size_t i = 0; i < machines_.size(); ++i) {
        const auto& mc = machines_[i];
        pe_offset_(static_cast<Eigen::Index>(i)) =
            online_[i] ? mc.admittance * theta_p_(static_cast<Eigen::Index>(mc.bus)) : 0.0;
    }
}

double CoupledNetwork::reference(const Eigen::VectorXd& delta) const {
    for (std::size_t i = 0; i < machines_.size(); ++i) {
        if (online_[i]) {
            return delta(static_cast<Eigen::Index>(i));
        }
    }
    return 0.0;
}

Eigen::VectorXd CoupledNetwork::electrical_power(const Eigen::VectorXd& delta) const {
    // K annihilates a common shift, so angles are taken relative to a
    // reference machine to keep magnitudes small.
    const double ref = reference(delta);
    Eigen::VectorXd rel = delta.array() - ref;
    for (std::size_t i = 0; i < machines_.size(); ++i) {
        if (!online_[i]) {
            rel(static_cast<Eigen::Index>(i)) = 0.0;
        }
    }
    return k_ * rel - pe_offset_;
}

Eigen::VectorXd CoupledNetwork::bus_angles(const Eigen::VectorXd& delta) const {
    const double ref = reference(delta);
    Eigen::VectorXd rel = delta.array() - ref;
    for (std::size_t i = 0; i < machines_.size(); ++i) {
        if (!online_[i]) {
            rel(static_cast<Eigen::Index>(i)) = 0.0;
        }
    }
    Eigen::VectorXd theta = theta_p_ + g_ * rel;
    theta.array() += ref;
    return theta;
}

double CoupledNetwork::solve_residual(const Eigen::VectorXd& theta, const Eigen::VectorXd& delta) const {
    const double ref = reference(delta);
    Eigen::VectorXd theta_rel = theta.array() - ref;
    Eigen::VectorXd rhs = injections_;
    for (std::size_t i = 0; i < machines_.size(); ++i) {
        if (online_[i]) {
            const auto& mc = machines_[i];
            rhs(static_cast<Eigen::Index>(mc.bus)) += mc.admittance * (delta(static_cast<Eigen::Index>(i)) - ref);
        }
    }
    const Eigen::VectorXd r = coupled_ * theta_rel - rhs;
    return r.cwiseAbs().maxCoeff();
}

}  // namespace gridfreq
