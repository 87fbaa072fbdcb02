#include "vft/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "vft/io.hpp"
#include "vft/metrics.hpp"
#include "vft/ray.hpp"

namespace vft {

namespace {

void fail(const std::string& msg) { throw std::runtime_error(msg); }

std::string realization_tag(int k) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "r%02d", k);
    return buf;
}

std::filesystem::path out_dir(const ExperimentConfig& cfg) {
    return std::filesystem::path(cfg.output_dir);
}

void ensure_out_dir(const ExperimentConfig& cfg) {
    std::filesystem::create_directories(out_dir(cfg));
}

std::pair<std::vector<double>, std::vector<double>> mesh_coords(
    const TriMesh& mesh) {
    const int n = mesh.num_nodes();
    std::vector<double> xs(n), ys(n);
    for (int i = 0; i < n; ++i) {
        xs[i] = mesh.nodes[i].x;
        ys[i] = mesh.nodes[i].y;
    }
    return {xs, ys};
}

void write_field(const std::string& path, const TriMesh& mesh,
                 const NodalField& field) {
    if (field.num_nodes() != mesh.num_nodes())
        fail("field size does not match mesh");
    auto [xs, ys] = mesh_coords(mesh);
    write_field_csv(path, xs, ys, field.values);
}

NodalField read_field_for_mesh(const std::string& path, const TriMesh& mesh) {
    FieldCsv csv = read_field_csv(path);
    const int n = mesh.num_nodes();
    if (static_cast<int>(csv.xs.size()) != n)
        fail(path + ": field has " + std::to_string(csv.xs.size()) +
             " nodes, mesh has " + std::to_string(n));
    for (int i = 0; i < n; ++i) {
        const double dx = csv.xs[i] - mesh.nodes[i].x;
        const double dy = csv.ys[i] - mesh.nodes[i].y;
        if (std::hypot(dx, dy) > 1e-9)
            fail(path + ": node " + std::to_string(i) +
                 " position does not match the mesh for this config");
    }
    NodalField field;
    field.values = csv.values;
    return field;
}

std::vector<MeasurementRow> to_rows(const std::vector<Chord>& chords,
                                    const Eigen::VectorXd& values) {
    if (values.size() != static_cast<Eigen::Index>(chords.size()))
        fail("measurement vector length does not match chord count");
    std::vector<MeasurementRow> rows(chords.size());
    for (std::size_t i = 0; i < chords.size(); ++i) {
        rows[i].chord_index = static_cast<int>(i);
        rows[i].electrode_a = chords[i].endpoints.first;
        rows[i].electrode_b = chords[i].endpoints.second;
        rows[i].value = values[static_cast<Eigen::Index>(i)];
    }
    return rows;
}

Eigen::VectorXd from_rows(const std::vector<MeasurementRow>& rows,
                          const std::vector<Chord>& chords,
                          const std::string& path) {
    if (rows.size() != chords.size())
        fail(path + ": expected " + std::to_string(chords.size()) +
             " measurements, found " + std::to_string(rows.size()));
    Eigen::VectorXd values(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const MeasurementRow& r = rows[i];
        if (r.chord_index != static_cast<int>(i) ||
            r.electrode_a != chords[i].endpoints.first ||
            r.electrode_b != chords[i].endpoints.second)
            fail(path + ": row " + std::to_string(i) +
                 " does not match the chord layout for this config");
        values[static_cast<Eigen::Index>(i)] = r.value;
    }
    return values;
}

}  // namespace

ProblemGeometry build_problem_geometry(const ExperimentConfig& cfg) {
    ProblemGeometry g;
    g.fine = build_disk_mesh(cfg.radius, cfg.fine_h);
    g.fine.conductivity = cfg.sigma;
    g.coarse = build_disk_mesh(cfg.radius, cfg.coarse_h);
    g.coarse.conductivity = cfg.sigma;
    g.electrodes_coarse = place_electrodes(g.coarse, cfg.n_electrodes);
    g.electrodes_fine =
        place_electrodes_at_angles(g.fine, g.electrodes_coarse.angles);
    g.chords = enumerate_chords(g.electrodes_coarse, g.coarse);
    return g;
}

std::string path_mesh_fine(const ExperimentConfig& cfg) {
    return (out_dir(cfg) / "mesh_fine.txt").string();
}
std::string path_mesh_coarse(const ExperimentConfig& cfg) {
    return (out_dir(cfg) / "mesh_coarse.txt").string();
}
std::string path_potentials(const ExperimentConfig& cfg) {
    return (out_dir(cfg) / "potentials.csv").string();
}
std::string path_field_true(const ExperimentConfig& cfg) {
    return (out_dir(cfg) / "field_true.csv").string();
}
std::string path_measurements_clean(const ExperimentConfig& cfg) {
    return (out_dir(cfg) / "measurements_clean.csv").string();
}
std::string path_measurements(const ExperimentConfig& cfg, int realization) {
    return (out_dir(cfg) / ("measurements_" + realization_tag(realization) + ".csv"))
        .string();
}
std::string path_field_rec(const ExperimentConfig& cfg, int realization) {
    return (out_dir(cfg) / ("field_rec_" + realization_tag(realization) + ".csv"))
        .string();
}
std::string path_field_rec_avg(const ExperimentConfig& cfg) {
    return (out_dir(cfg) / "field_rec_avg.csv").string();
}
std::string path_report(const ExperimentConfig& cfg, int realization) {
    return (out_dir(cfg) / ("report_" + realization_tag(realization) + ".txt"))
        .string();
}
std::string path_eval(const ExperimentConfig& cfg) {
    return (out_dir(cfg) / "eval.csv").string();
}
std::string path_ray_matrix(const ExperimentConfig& cfg, RayFlavor flavor) {
    const char* name =
        flavor == RayFlavor::Longitudinal ? "ray_long.txt" : "ray_trans.txt";
    return (out_dir(cfg) / name).string();
}

void cmd_simulate(const ExperimentConfig& cfg, bool quiet) {
    ensure_out_dir(cfg);
    ProblemGeometry g = build_problem_geometry(cfg);
    if (!quiet)
        std::cout << "meshes: fine " << g.fine.num_nodes() << " nodes, coarse "
                  << g.coarse.num_nodes() << " nodes, " << g.chords.size()
                  << " chords\n";
    write_mesh_file(path_mesh_fine(cfg), g.fine);
    write_mesh_file(path_mesh_coarse(cfg), g.coarse);

    DipoleSource source{{cfg.dipole_x, cfg.dipole_y}, {cfg.qx, cfg.qy}};
    PotentialField u = solve_potential(g.fine, source);
    auto [fx, fy] = mesh_coords(g.fine);
    write_potentials_csv(path_potentials(cfg), fx, fy, u.u);

    NodalField e_fine = gradient_field(g.fine, u);
    ProjectionMap proj = build_projection(g.fine, g.coarse);
    NodalField e_true = project(proj, g.fine, e_fine);
    write_field(path_field_true(cfg), g.coarse, e_true);

    Eigen::VectorXd clean = longitudinal_data(u, g.electrodes_fine, g.chords);
    write_measurements_csv(path_measurements_clean(cfg), to_rows(g.chords, clean));
    for (int k = 0; k < cfg.realizations; ++k) {
        Eigen::VectorXd noisy = clean;
        if (std::isfinite(cfg.snr_db))
            noisy = add_noise(clean, cfg.snr_db,
                              static_cast<unsigned long long>(cfg.seed + k))
                        .first;
        write_measurements_csv(path_measurements(cfg, k), to_rows(g.chords, noisy));
    }
    if (!quiet)
        std::cout << "wrote " << cfg.realizations
                  << " noisy measurement sets at " << cfg.snr_db << " dB\n";
}

void cmd_assemble(const ExperimentConfig& cfg, bool quiet) {
    ensure_out_dir(cfg);
    ProblemGeometry g = build_problem_geometry(cfg);
    RayMatrix r_long = assemble(g.coarse, g.chords, RayFlavor::Longitudinal);
    RayMatrix r_trans = assemble(g.coarse, g.chords, RayFlavor::Transverse);
    write_ray_matrix_file(path_ray_matrix(cfg, RayFlavor::Longitudinal), r_long);
    write_ray_matrix_file(path_ray_matrix(cfg, RayFlavor::Transverse), r_trans);
    if (!quiet)
        std::cout << "ray matrices: " << r_long.rows() << " x " << r_long.cols()
                  << ", " << r_long.mat.nonZeros() << " / "
                  << r_trans.mat.nonZeros() << " nonzeros\n";
}

void cmd_reconstruct(const ExperimentConfig& cfg, bool quiet) {
    ensure_out_dir(cfg);
    ProblemGeometry g = build_problem_geometry(cfg);
    RayMatrix r_long = assemble(g.coarse, g.chords, RayFlavor::Longitudinal);
    RayMatrix r_trans = assemble(g.coarse, g.chords, RayFlavor::Transverse);
    VectorLaplacian lap = build_laplacian(g.coarse);
    PenaltyWeights weights = build_weights(r_long, lap);

    SolveOptions opts;
    FieldSolver solver(r_long, r_trans, weights, cfg.alpha, cfg.beta, opts);

    const bool regularized = cfg.alpha > 0.0 || cfg.beta > 0.0;
    Eigen::VectorXd avg = Eigen::VectorXd::Zero(2 * g.coarse.num_nodes());
    for (int k = 0; k < cfg.realizations; ++k) {
        const std::string mpath = path_measurements(cfg, k);
        Eigen::VectorXd data =
            from_rows(read_measurements_csv(mpath), g.chords, mpath);
        if (k == 0 && regularized) solver.calibrate(data);
        auto [e_hat, rep] = solver.solve(data);
        avg += e_hat.values;
        write_field(path_field_rec(cfg, k), g.coarse, e_hat);
        std::vector<std::pair<std::string, std::string>> kv = {
            {"objective", format_shortest(rep.objective)},
            {"fidelity", format_shortest(rep.fidelity)},
            {"l1_transverse", format_shortest(rep.l1_transverse)},
            {"l1_laplace", format_shortest(rep.l1_laplace)},
            {"iterations", std::to_string(rep.iterations)},
            {"primal_residual", format_shortest(rep.primal_residual)},
            {"dual_residual", format_shortest(rep.dual_residual)},
            {"rho", format_shortest(rep.rho_final)},
            {"seconds", format_shortest(rep.seconds)},
        };
        write_report(path_report(cfg, k), kv);
        if (!quiet)
            std::cout << realization_tag(k) << ": objective "
                      << format_shortest(rep.objective) << " in "
                      << rep.iterations << " iterations ("
                      << format_shortest(rep.seconds) << " s)\n";
    }
    avg /= static_cast<double>(cfg.realizations);
    NodalField e_avg;
    e_avg.values = avg;
    write_field(path_field_rec_avg(cfg), g.coarse, e_avg);
}

void cmd_evaluate(const ExperimentConfig& cfg, bool quiet) {
    ProblemGeometry g = build_problem_geometry(cfg);
    NodalField e_true = read_field_for_mesh(path_field_true(cfg), g.coarse);
    const Point2 true_location{cfg.dipole_x, cfg.dipole_y};

    std::ofstream out(path_eval(cfg));
    if (!out) fail("cannot open " + path_eval(cfg) + " for writing");
    out << "realization,mr,cs,loc_node,loc_error,max_mag_ratio\n";
    auto emit = [&](const std::string& label, const EvalResult& r) {
        out << label << ',' << format_shortest(r.mr) << ','
            << format_shortest(r.cs) << ',' << r.loc_node << ','
            << format_shortest(r.loc_error) << ','
            << format_shortest(r.max_mag_ratio) << '\n';
        if (!quiet)
            std::cout << label << ": mr " << format_shortest(r.mr) << ", cs "
                      << format_shortest(r.cs) << ", loc_error "
                      << format_shortest(r.loc_error) << " (" << r.excluded_mr
                      << "/" << r.excluded_cs << " nodes excluded)\n";
    };
    for (int k = 0; k < cfg.realizations; ++k) {
        NodalField e_rec = read_field_for_mesh(path_field_rec(cfg, k), g.coarse);
        emit(std::to_string(k),
             evaluate_fields(g.coarse, e_rec, e_true, true_location));
    }
    NodalField e_avg = read_field_for_mesh(path_field_rec_avg(cfg), g.coarse);
    emit("avg", evaluate_fields(g.coarse, e_avg, e_true, true_location));
    if (!out.good()) fail("write failed for " + path_eval(cfg));
}

void cmd_plot(const std::string& mesh_path, const std::string& field_path,
              const std::string& svg_path, PlotStyle style) {
    TriMesh mesh = read_mesh_file(mesh_path);
    NodalField field = read_field_for_mesh(field_path, mesh);
    std::ofstream out(svg_path);
    if (!out) fail("cannot open " + svg_path + " for writing");
    out << render_field_svg(mesh, field, style);
    if (!out.good()) fail("write failed for " + svg_path);
}

}  // namespace vft
