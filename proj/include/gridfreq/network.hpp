#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "gridfreq/grid_model.hpp"

namespace gridfreq {

/// A machine's internal EMF node tied to its terminal bus through a
/// coupling reactance.
struct MachineCoupling {
    std::size_t bus = 0;             // model bus index
    double admittance = 0.0;         // 1 / x', p.u. on system base
};

/// Structure-preserving DC network: bus angles follow from the machine
/// internal angles and the constant-power bus injections,
///
///     (B_lines + E Y E^T) theta = P + E Y delta,
///
/// and each machine delivers P_e = y (delta - theta_bus). The network is
/// linear in delta, so theta = theta_p + G delta and P_e = K delta - c with
/// K, G formed once per topology. Only one sparse solve per injection change.
class CoupledNetwork {
public:
    CoupledNetwork(const GridModel& model, std::vector<MachineCoupling> machines);

    /// Refactors for a new online set. Throws IslandingError if any part of
    /// the network loses its last machine.
    void set_online(const std::vector<bool>& online);

    /// Solves for the injection-driven part of the bus angles.
    void set_injections(const Eigen::VectorXd& injections_pu);

    Eigen::VectorXd electrical_power(const Eigen::VectorXd& delta) const;
    Eigen::VectorXd bus_angles(const Eigen::VectorXd& delta) const;

    /// max |(B_lines + E Y E^T) theta - P - E Y delta| in p.u.
    double solve_residual(const Eigen::VectorXd& theta, const Eigen::VectorXd& delta) const;

    std::size_t bus_count() const { return static_cast<std::size_t>(laplacian_.rows()); }
    std::size_t machine_count() const { return machines_.size(); }
    const Eigen::VectorXd& injections() const { return injections_; }

private:
    double reference(const Eigen::VectorXd& delta) const;

    Eigen::SparseMatrix<double> laplacian_;
    Eigen::SparseMatrix<double> coupled_;
    std::vector<MachineCoupling> machines_;
    std::vector<bool> online_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
    Eigen::MatrixXd g_;              // bus x machine
    Eigen::MatrixXd k_;              // machine x machine
    Eigen::VectorXd injections_;
    Eigen::VectorXd theta_p_;
    Eigen::VectorXd pe_offset_;
};

}  // namespace gridfreq
