#include "vft/inverse.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace vft {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

}  // namespace

VectorLaplacian build_laplacian(const TriMesh& mesh) {
    const int n = mesh.num_nodes();
    std::vector<std::set<int>> adj(n);
    for (const auto& t : mesh.elements) {
        for (int k = 0; k < 3; ++k) {
            const int a = t[k], b = t[(k + 1) % 3];
            adj[a].insert(b);
            adj[b].insert(a);
        }
    }
    std::vector<Eigen::Triplet<double>> triplets;
    for (int i = 0; i < n; ++i) {
        if (adj[i].empty()) {
            fail("build_laplacian: node " + std::to_string(i) +
                 " has no neighbors");
        }
        const double inv = -1.0 / static_cast<double>(adj[i].size());
        for (int block = 0; block < 2; ++block) {
            const int off = block * n;
            triplets.emplace_back(off + i, off + i, 1.0);
            for (int j : adj[i]) triplets.emplace_back(off + i, off + j, inv);
        }
    }
    VectorLaplacian lap;
    lap.D.resize(2 * n, 2 * n);
    lap.D.setFromTriplets(triplets.begin(), triplets.end());
    lap.D.makeCompressed();
    return lap;
}

PenaltyWeights build_weights(const RayMatrix& R_long,
                             const VectorLaplacian& laplacian) {
    const int cols = R_long.cols();
    if (laplacian.D.rows() != cols) {
        throw std::invalid_argument("build_weights: dimension mismatch");
    }
    Eigen::VectorXd sq = Eigen::VectorXd::Zero(cols);
    for (int r = 0; r < R_long.mat.outerSize(); ++r) {
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(
                 R_long.mat, r);
             it; ++it) {
            sq[it.col()] += it.value() * it.value();
        }
    }
    PenaltyWeights pw;
    pw.w.resize(cols);
    for (int k = 0; k < cols; ++k) pw.w[k] = 1.0 / (std::sqrt(sq[k]) + 1e-6);
    pw.w /= pw.w.mean();
    pw.W = pw.w.asDiagonal() * laplacian.D;
    pw.W.makeCompressed();
    return pw;
}

FieldSolver::FieldSolver(const RayMatrix& R_long, const RayMatrix& R_trans,
                         const PenaltyWeights& weights, double alpha,
                         double beta, SolveOptions opts)
    : alpha_(alpha), beta_(beta), opts_(opts) {
    if (alpha < 0.0 || beta < 0.0) {
        throw std::invalid_argument("solve: negative penalty weight");
    }
    if (opts.max_iters < 1 || opts.rel_tol <= 0.0 || opts.abs_tol < 0.0 ||
        opts.over_relax <= 0.0 || opts.over_relax >= 2.0) {
        throw std::invalid_argument("solve: bad options");
    }
    n2_ = R_long.cols();
    m_ = R_long.rows();
    if (R_trans.cols() != n2_ || weights.W.cols() != n2_ ||
        weights.W.rows() != n2_ || R_trans.rows() != m_) {
        throw std::invalid_argument("solve: operator dimension mismatch");
    }

    Rl_ = R_long.mat;
    Rl_dense_ = Eigen::MatrixXd(R_long.mat);
    A0_.noalias() = 2.0 * Rl_dense_.transpose() * Rl_dense_;

    // Stack the two split operators once: F = [R_trans; W].
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(R_trans.mat.nonZeros() + weights.W.nonZeros());
    for (int r = 0; r < R_trans.mat.outerSize(); ++r) {
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(
                 R_trans.mat, r);
             it; ++it) {
            trip.emplace_back(static_cast<int>(it.row()),
                              static_cast<int>(it.col()), it.value());
        }
    }
    for (int c = 0; c < weights.W.outerSize(); ++c) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(weights.W, c); it;
             ++it) {
            trip.emplace_back(m_ + static_cast<int>(it.row()),
                              static_cast<int>(it.col()), it.value());
        }
    }
    F_.resize(m_ + n2_, n2_);
    F_.setFromTriplets(trip.begin(), trip.end());
    F_.makeCompressed();

    const Eigen::MatrixXd Rt_dense(R_trans.mat);
    G_.noalias() = Rt_dense.transpose() * Rt_dense;
    const Eigen::SparseMatrix<double> WtW =
        Eigen::SparseMatrix<double>(weights.W.transpose()) * weights.W;
    G_ += Eigen::MatrixXd(WtW);

    if (alpha_ == 0.0 && beta_ == 0.0) return;  // direct path, no factorization

    if (opts_.rho > 0.0) {
        rho_base_ = opts_.rho;
    } else {
        // Match the curvature scales of the fidelity and splitting terms.
        const double ta = A0_.trace();
        const double tg = G_.trace();
        rho_base_ = (ta > 0.0 && tg > 0.0) ? ta / tg : 1.0;
    }
    factor(rho_base_);
}

void FieldSolver::factor(double rho) {
    ldlt_.compute(A0_ + rho * G_);
    if (ldlt_.info() != Eigen::Success) {
        fail("solve: factorization of the quadratic subproblem failed");
    }
    rho_current_ = rho;
}

std::pair<NodalField, SolveReport> FieldSolver::solve_least_squares(
    const Eigen::VectorXd& data) const {
    const auto t0 = std::chrono::steady_clock::now();
    NodalField e;
    e.values = Rl_dense_.completeOrthogonalDecomposition().solve(data);
    const Eigen::VectorXd v = F_ * e.values;
    SolveReport rep;
    rep.fidelity = (Rl_ * e.values - data).squaredNorm();
    rep.l1_transverse = v.head(m_).lpNorm<1>();
    rep.l1_laplace = v.tail(n2_).lpNorm<1>();
    rep.objective = rep.fidelity;
    rep.iterations = 0;
    rep.converged = true;
    rep.accepted_objectives = {rep.objective};
    rep.seconds = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    return {std::move(e), rep};
}

std::pair<NodalField, SolveReport> FieldSolver::admm(
    const Eigen::VectorXd& data, int max_iters, bool adaptive) {
    const auto t0 = std::chrono::steady_clock::now();
    if (rho_current_ != rho_base_) factor(rho_base_);
    double rho = rho_base_;

    const Eigen::VectorXd q0 = 2.0 * (Rl_dense_.transpose() * data);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(m_ + n2_);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m_ + n2_);
    Eigen::VectorXd e(n2_), v(m_ + n2_), z_old(m_ + n2_), vr(m_ + n2_);

    SolveReport rep;
    double best_obj = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_e = Eigen::VectorXd::Zero(n2_);
    double best_fid = 0.0, best_p1 = 0.0, best_p2 = 0.0;

    constexpr int kAdaptEvery = 25;
    constexpr double kAdaptRatio = 10.0;
    int adaptations = 0;

    int it = 0;
    bool converged = false;
    double rnorm = 0.0, snorm = 0.0;
    while (it < max_iters) {
        ++it;
        e = ldlt_.solve(q0 + rho * (F_.transpose() * (z - y)));
        v.noalias() = F_ * e;

        const double fid = (Rl_ * e - data).squaredNorm();
        const double p1 = v.head(m_).lpNorm<1>();
        const double p2 = v.tail(n2_).lpNorm<1>();
        const double obj = fid + alpha_ * p1 + beta_ * p2;
        if (obj < best_obj) {
            best_obj = obj;
            best_e = e;
            best_fid = fid;
            best_p1 = p1;
            best_p2 = p2;
            rep.accepted_objectives.push_back(obj);
        }

        z_old.swap(z);
        vr = opts_.over_relax * v + (1.0 - opts_.over_relax) * z_old;
        const double ka = alpha_ / rho, kb = beta_ / rho;
        for (Eigen::Index i = 0; i < vr.size(); ++i) {
            const double x = vr[i] + y[i];
            const double k = i < m_ ? ka : kb;
            z[i] = x > k ? x - k : (x < -k ? x + k : 0.0);
        }
        y += vr - z;

        rnorm = (v - z).norm();
        snorm = rho * (F_.transpose() * (z - z_old)).norm();
        const double eps_pri =
            std::sqrt(static_cast<double>(m_ + n2_)) * opts_.abs_tol +
            opts_.rel_tol * std::max(v.norm(), z.norm());
        const double eps_dual =
            std::sqrt(static_cast<double>(n2_)) * opts_.abs_tol +
            opts_.rel_tol * rho * (F_.transpose() * y).norm();
        if (rnorm <= eps_pri && snorm <= eps_dual) {
            converged = true;
            break;
        }

        if (adaptive && it % kAdaptEvery == 0 && adaptations < 40) {
            if (rnorm > kAdaptRatio * snorm) {
                rho *= 2.0;
                y *= 0.5;
                factor(rho);
                ++adaptations;
            } else if (snorm > kAdaptRatio * rnorm) {
                rho *= 0.5;
                y *= 2.0;
                factor(rho);
                ++adaptations;
            }
        }
    }

    rep.iterations = it;
    rep.converged = converged;
    rep.primal_residual = rnorm;
    rep.dual_residual = snorm;
    rep.rho_final = rho;
    rep.objective = best_obj;
    rep.fidelity = best_fid;
    rep.l1_transverse = best_p1;
    rep.l1_laplace = best_p2;
    rep.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    NodalField out;
    out.values = std::move(best_e);
    return {std::move(out), rep};
}

std::pair<NodalField, SolveReport> FieldSolver::solve(
    const Eigen::VectorXd& data) {
    if (data.size() != m_) {
        throw std::invalid_argument("solve: data length " +
                                    std::to_string(data.size()) +
                                    " does not match " + std::to_string(m_));
    }
    if (alpha_ == 0.0 && beta_ == 0.0) return solve_least_squares(data);

    auto result = admm(data, opts_.max_iters, opts_.adaptive_rho);

    // Restore the base factorization so later solves see identical state.
    if (rho_current_ != rho_base_) factor(rho_base_);

    if (!result.second.converged) {
        fail("solve: no convergence after " + std::to_string(opts_.max_iters) +
             " iterations (primal residual " +
             std::to_string(result.second.primal_residual) +
             ", dual residual " + std::to_string(result.second.dual_residual) +
             ")");
    }
    return result;
}

void FieldSolver::calibrate(const Eigen::VectorXd& data) {
    if (alpha_ == 0.0 && beta_ == 0.0) return;
    if (data.size() != m_) {
        throw std::invalid_argument("calibrate: data length mismatch");
    }
    const int probe_iters = std::min(opts_.max_iters, 1500);
    const auto result = admm(data, probe_iters, true);
    rho_base_ = result.second.rho_final;
    if (rho_current_ != rho_base_) factor(rho_base_);
}

std::pair<NodalField, SolveReport> solve(const RayMatrix& R_long,
                                         const RayMatrix& R_trans,
                                         const PenaltyWeights& weights,
                                         const Eigen::VectorXd& data,
                                         double alpha, double beta,
                                         const SolveOptions& opts) {
    FieldSolver solver(R_long, R_trans, weights, alpha, beta, opts);
    return solver.solve(data);
}

Eigen::VectorXd transverse_profile(const RayMatrix& R_trans,
                                   const NodalField& e_hat) {
    return apply(R_trans, e_hat);
}

}  // namespace vft
