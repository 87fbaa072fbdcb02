#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "vft/geometry.hpp"
#include "vft/ray.hpp"

namespace vft {

/// Block-diagonal smoothing operator: per component, (D e)_i is e_i minus
/// the mean over the node's mesh-edge neighbors. Annihilates constants.
struct VectorLaplacian {
    Eigen::SparseMatrix<double> D;  // 2N x 2N
};

VectorLaplacian build_laplacian(const TriMesh& mesh);

/// Sensitivity-equalizing weights w_k = 1 / (|column k of R_long|_2 + 1e-6),
/// normalized to unit mean, applied as W = diag(w) D.
struct PenaltyWeights {
    Eigen::VectorXd w;
    Eigen::SparseMatrix<double> W;  // 2N x 2N
};

PenaltyWeights build_weights(const RayMatrix& R_long,
                             const VectorLaplacian& laplacian);

struct SolveOptions {
    double rho = 0.0;          // ADMM penalty; 0 picks a curvature-based value
    bool adaptive_rho = true;  // residual balancing (refactors on change)
    int max_iters = 20000;
    double rel_tol = 1e-6;
    double abs_tol = 1e-10;
    double over_relax = 1.7;
};

struct SolveReport {
    double objective = 0.0;
    double fidelity = 0.0;
    double l1_transverse = 0.0;
    double l1_laplace = 0.0;
    int iterations = 0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double seconds = 0.0;
    bool converged = false;
    double rho_final = 0.0;
    /// Objectives at which the returned iterate was updated; non-increasing.
    std::vector<double> accepted_objectives;
};

/// Minimize |R_long e - I|_2^2 + alpha |R_trans e|_1 + beta |W e|_1 by
/// operator splitting (ADMM) with two split variables and soft thresholding.
/// The quadratic subproblem is factored once per penalty value and reused, so
/// one solver instance can serve many right-hand sides cheaply. Each solve()
/// starts from the same state; results do not depend on earlier calls.
/// alpha = beta = 0 falls through to a direct least-squares solve.
class FieldSolver {
  public:
    FieldSolver(const RayMatrix& R_long, const RayMatrix& R_trans,
                const PenaltyWeights& weights, double alpha, double beta,
                SolveOptions opts = {});

    std::pair<NodalField, SolveReport> solve(const Eigen::VectorXd& data);

    /// Run one adaptive probe solve and keep its final penalty value as the
    /// base for subsequent solves (one refactorization). Improves batch
    /// throughput when adaptation is disabled per solve.
    void calibrate(const Eigen::VectorXd& data);

    double rho() const { return rho_base_; }

  private:
    void factor(double rho);
    std::pair<NodalField, SolveReport> solve_least_squares(
        const Eigen::VectorXd& data) const;
    std::pair<NodalField, SolveReport> admm(const Eigen::VectorXd& data,
                                            int max_iters, bool adaptive);

    Eigen::MatrixXd Rl_dense_;
    Eigen::SparseMatrix<double, Eigen::RowMajor> Rl_, F_;  // F = [R_trans; W]
    Eigen::MatrixXd A0_;  // 2 Rl^T Rl
    Eigen::MatrixXd G_;   // F^T F
    Eigen::LDLT<Eigen::MatrixXd> ldlt_;
    double alpha_, beta_;
    SolveOptions opts_;
    double rho_base_ = 0.0;
    double rho_current_ = 0.0;
    int m_ = 0, n2_ = 0;
};

/// One-shot convenience wrapper around FieldSolver.
std::pair<NodalField, SolveReport> solve(
    const RayMatrix& R_long, const RayMatrix& R_trans,
    const PenaltyWeights& weights, const Eigen::VectorXd& data, double alpha,
    double beta, const SolveOptions& opts = {});

/// R_trans * e_hat: per-chord transverse line integrals of a reconstruction.
Eigen::VectorXd transverse_profile(const RayMatrix& R_trans,
                                   const NodalField& e_hat);

}  // namespace vft
