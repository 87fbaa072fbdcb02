// Exports the deterministic solver test instances as JSON so an independent
// convex solver can compute reference objectives for them.

#include <fstream>
#include <iostream>

#include "json.hpp"
#include "solver_instances.hpp"

namespace {

nlohmann::json dense_rows(const Eigen::SparseMatrix<double, Eigen::RowMajor>& m) {
    Eigen::MatrixXd d(m);
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < d.cols(); ++j) row.push_back(d(i, j));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: dump_solver_instances <output.json>\n";
        return 1;
    }
    nlohmann::json out = nlohmann::json::array();
    for (int idx = 0; idx < vft_test::kNumSolverInstances; ++idx) {
        vft_test::SolverInstance inst = vft_test::make_solver_instance(idx);
        nlohmann::json j;
        j["index"] = idx;
        j["num_nodes"] = inst.num_nodes;
        j["num_chords"] = inst.num_chords;
        j["alpha"] = inst.alpha;
        j["beta"] = inst.beta;
        j["r_long"] = dense_rows(inst.r_long.mat);
        j["r_trans"] = dense_rows(inst.r_trans.mat);
        j["weighted_laplace"] = dense_rows(inst.weights.W);
        j["data"] = std::vector<double>(inst.data.data(),
                                        inst.data.data() + inst.data.size());
        out.push_back(j);
    }
    std::ofstream f(argv[1]);
    if (!f) {
        std::cerr << "cannot open " << argv[1] << " for writing\n";
        return 1;
    }
    f << out.dump(2) << '\n';
    return f.good() ? 0 : 1;
}
