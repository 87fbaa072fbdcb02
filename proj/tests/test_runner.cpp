#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "vft/forward.hpp"
#include "vft/io.hpp"
#include "vft/ray.hpp"
#include "vft/runner.hpp"
#include "vft/svg.hpp"

using namespace vft;

namespace {

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& name)
        : path(std::filesystem::temp_directory_path() / name) {
        std::filesystem::remove_all(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

ExperimentConfig small_config(const std::string& out_dir) {
    ExperimentConfig cfg;
    cfg.fine_h = 0.125;
    cfg.coarse_h = 0.25;
    cfg.n_electrodes = 8;
    cfg.dipole_x = 0.5;
    cfg.qx = 1.0;
    cfg.snr_db = 40.0;
    cfg.seed = 3;
    cfg.realizations = 2;
    cfg.output_dir = out_dir;
    return cfg;
}

std::string file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(bool(in));
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void run_pipeline(const ExperimentConfig& cfg) {
    cmd_simulate(cfg, true);
    cmd_assemble(cfg, true);
    cmd_reconstruct(cfg, true);
    cmd_evaluate(cfg, true);
}

std::vector<std::vector<std::string>> csv_rows(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(bool(in));
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> fields;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                fields.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        fields.push_back(cur);
        rows.push_back(std::move(fields));
    }
    return rows;
}

}  // namespace

TEST_CASE("the pipeline emits every stage's files at a small scale") {
    TempDir tmp("vft_runner_pipe");
    ExperimentConfig cfg = small_config(tmp.path.string());
    run_pipeline(cfg);

    // n = 8 electrodes: 8*7/2 = 28 chords.
    auto rows0 = read_measurements_csv(path_measurements(cfg, 0));
    auto rows1 = read_measurements_csv(path_measurements(cfg, 1));
    REQUIRE(rows0.size() == 28);
    REQUIRE(rows1.size() == 28);
    for (size_t i = 0; i < rows0.size(); ++i) {
        CHECK(rows0[i].chord_index == (int)i);
        CHECK(rows0[i].electrode_a < rows0[i].electrode_b);
        CHECK(std::isfinite(rows0[i].value));
    }
    // Different noise draws per realization.
    bool differ = false;
    for (size_t i = 0; i < rows0.size(); ++i)
        differ = differ || rows0[i].value != rows1[i].value;
    CHECK(differ);

    TriMesh coarse = read_mesh_file(path_mesh_coarse(cfg));
    TriMesh fine = read_mesh_file(path_mesh_fine(cfg));
    CHECK(coarse.num_nodes() == 61);
    CHECK(fine.num_nodes() == 217);

    RayMatrix rl =
        read_ray_matrix_file(path_ray_matrix(cfg, RayFlavor::Longitudinal),
                             RayFlavor::Longitudinal);
    CHECK(rl.rows() == 28);
    CHECK(rl.cols() == 2 * coarse.num_nodes());
    CHECK(rl.flavor == RayFlavor::Longitudinal);

    FieldCsv rec = read_field_csv(path_field_rec(cfg, 0));
    CHECK((int)rec.xs.size() == coarse.num_nodes());
    FieldCsv avg = read_field_csv(path_field_rec_avg(cfg));
    CHECK((int)avg.xs.size() == coarse.num_nodes());

    FieldCsv truth = read_field_csv(path_field_true(cfg));
    CHECK((int)truth.xs.size() == coarse.num_nodes());

    // The averaged field is the mean of the two realizations.
    FieldCsv rec1 = read_field_csv(path_field_rec(cfg, 1));
    Eigen::VectorXd mean = 0.5 * (rec.values + rec1.values);
    CHECK((avg.values - mean).lpNorm<Eigen::Infinity>() <= 1e-15);
}

TEST_CASE("the evaluation table has one row per realization plus the average") {
    TempDir tmp("vft_runner_eval");
    ExperimentConfig cfg = small_config(tmp.path.string());
    run_pipeline(cfg);

    auto rows = csv_rows(path_eval(cfg));
    REQUIRE(rows.size() == 4);
    REQUIRE(rows[0].size() == 6);
    CHECK(rows[0][0] == "realization");
    CHECK(rows[0][1] == "mr");
    CHECK(rows[0][2] == "cs");
    CHECK(rows[0][3] == "loc_node");
    CHECK(rows[0][4] == "loc_error");
    CHECK(rows[0][5] == "max_mag_ratio");
    CHECK(rows[1][0] == "0");
    CHECK(rows[2][0] == "1");
    CHECK(rows[3][0] == "avg");
    for (size_t r = 1; r < rows.size(); ++r) {
        REQUIRE(rows[r].size() == 6);
        const double mr = parse_double(rows[r][1]);
        const double cs = parse_double(rows[r][2]);
        const double loc_error = parse_double(rows[r][4]);
        const double ratio = parse_double(rows[r][5]);
        CHECK(mr > 0.0);
        CHECK(std::abs(cs) <= 1.0 + 1e-12);
        CHECK(loc_error >= 0.0);
        CHECK(loc_error <= 2.0);
        CHECK(ratio > 0.0);
    }
}

TEST_CASE("identical experiment descriptions give byte-identical outputs") {
    TempDir ta("vft_runner_det_a"), tb("vft_runner_det_b");
    ExperimentConfig ca = small_config(ta.path.string());
    ExperimentConfig cb = small_config(tb.path.string());
    run_pipeline(ca);
    run_pipeline(cb);

    CHECK(file_bytes(path_measurements(ca, 0)) ==
          file_bytes(path_measurements(cb, 0)));
    CHECK(file_bytes(path_measurements(ca, 1)) ==
          file_bytes(path_measurements(cb, 1)));
    CHECK(file_bytes(path_field_true(ca)) == file_bytes(path_field_true(cb)));
    CHECK(file_bytes(path_field_rec(ca, 0)) ==
          file_bytes(path_field_rec(cb, 0)));
    CHECK(file_bytes(path_field_rec_avg(ca)) ==
          file_bytes(path_field_rec_avg(cb)));
    CHECK(file_bytes(path_eval(ca)) == file_bytes(path_eval(cb)));
}

TEST_CASE("disabling noise reproduces the clean measurements") {
    TempDir tmp("vft_runner_clean");
    ExperimentConfig cfg = small_config(tmp.path.string());
    cfg.snr_db = std::numeric_limits<double>::infinity();
    cfg.realizations = 1;
    cmd_simulate(cfg, true);
    CHECK(file_bytes(path_measurements(cfg, 0)) ==
          file_bytes(path_measurements_clean(cfg)));
}

TEST_CASE("an unregularized solve of consistent data reaches zero fidelity") {
    TempDir tmp("vft_runner_ls");
    ExperimentConfig cfg = small_config(tmp.path.string());
    cfg.realizations = 1;
    cmd_simulate(cfg, true);
    cmd_assemble(cfg, true);

    // Replace the measurements with exact integrals of a coarse-mesh field.
    TriMesh coarse = read_mesh_file(path_mesh_coarse(cfg));
    RayMatrix rl =
        read_ray_matrix_file(path_ray_matrix(cfg, RayFlavor::Longitudinal),
                             RayFlavor::Longitudinal);
    NodalField e(coarse.num_nodes());
    for (int i = 0; i < coarse.num_nodes(); ++i) {
        e.values[i] = std::sin(0.7 * i);
        e.values[coarse.num_nodes() + i] = std::cos(1.3 * i);
    }
    Eigen::VectorXd exact = apply(rl, e);
    auto rows = read_measurements_csv(path_measurements(cfg, 0));
    REQUIRE((int)rows.size() == exact.size());
    for (size_t i = 0; i < rows.size(); ++i) rows[i].value = exact[i];
    write_measurements_csv(path_measurements(cfg, 0), rows);

    cfg.alpha = 0.0;
    cfg.beta = 0.0;
    cmd_reconstruct(cfg, true);

    double fidelity = -1.0;
    std::ifstream rep(path_report(cfg, 0));
    REQUIRE(bool(rep));
    std::string line;
    while (std::getline(rep, line)) {
        if (line.rfind("fidelity = ", 0) == 0)
            fidelity = parse_double(line.substr(11));
    }
    CHECK(fidelity >= 0.0);
    CHECK(fidelity < 1e-10);
}

TEST_CASE("plot styles parse by name") {
    CHECK(parse_plot_style("magnitude") == PlotStyle::Magnitude);
    CHECK(parse_plot_style("quiver") == PlotStyle::Quiver);
    CHECK(parse_plot_style("both") == PlotStyle::Both);
    CHECK_THROWS_AS(parse_plot_style("sparkles"), std::invalid_argument);
}

TEST_CASE("a constant field renders as one color and one arrow direction") {
    TriMesh mesh = build_disk_mesh(1.0, 0.5);
    NodalField f(mesh.num_nodes());
    f.values.head(mesh.num_nodes()).setConstant(1.0);

    std::string svg = render_field_svg(mesh, f, PlotStyle::Magnitude);
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find("min=1 max=1") != std::string::npos);
    size_t polys = 0, pos = 0;
    while ((pos = svg.find("<polygon", pos)) != std::string::npos) {
        ++polys;
        pos += 8;
    }
    CHECK(polys == (size_t)mesh.num_elements());
    // All triangles share the low end of the color scale.
    size_t fills = 0;
    pos = 0;
    while ((pos = svg.find("fill=\"#440154\"", pos)) != std::string::npos) {
        ++fills;
        pos += 6;
    }
    CHECK(fills == (size_t)mesh.num_elements());

    std::string quiver = render_field_svg(mesh, f, PlotStyle::Quiver);
    size_t paths = 0;
    pos = 0;
    while ((pos = quiver.find("<path", pos)) != std::string::npos) {
        ++paths;
        pos += 5;
    }
    CHECK(paths == (size_t)mesh.num_nodes());

    // Byte determinism of the renderer.
    CHECK(render_field_svg(mesh, f, PlotStyle::Both) ==
          render_field_svg(mesh, f, PlotStyle::Both));
}

TEST_CASE("the plot command renders pipeline fields to a file") {
    TempDir tmp("vft_runner_plot");
    ExperimentConfig cfg = small_config(tmp.path.string());
    cfg.realizations = 1;
    cmd_simulate(cfg, true);

    const std::string svg_path = (tmp.path / "true_field.svg").string();
    cmd_plot(path_mesh_coarse(cfg), path_field_true(cfg), svg_path,
             PlotStyle::Both);
    std::string svg = file_bytes(svg_path);
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("<polygon") != std::string::npos);
    CHECK(svg.find("<path") != std::string::npos);

    const std::string svg_path2 = (tmp.path / "true_field2.svg").string();
    cmd_plot(path_mesh_coarse(cfg), path_field_true(cfg), svg_path2,
             PlotStyle::Both);
    CHECK(file_bytes(svg_path2) == svg);
}
