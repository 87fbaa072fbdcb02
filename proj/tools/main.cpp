#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "vft/config.hpp"
#include "vft/geometry.hpp"
#include "vft/io.hpp"
#include "vft/runner.hpp"
#include "vft/svg.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_override;
    long long seed_override = -1;
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("-c,--config", opts.config_path, "experiment config file")
        ->required();
    cmd->add_option("-o,--out", opts.out_override, "override output directory");
    cmd->add_option("--seed", opts.seed_override, "override RNG seed")
        ->check(CLI::NonNegativeNumber);
    cmd->add_flag("-q,--quiet", opts.quiet, "suppress progress output");
}

vft::ExperimentConfig load_config(const CommonOpts& opts) {
    vft::ExperimentConfig cfg = vft::parse_config_file(opts.config_path);
    if (!opts.out_override.empty()) cfg.output_dir = opts.out_override;
    if (opts.seed_override >= 0)
        cfg.seed = static_cast<unsigned long long>(opts.seed_override);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulation, assembly and reconstruction pipeline for "
                 "vector field tomography on a conductive disk"};
    app.require_subcommand(1);

    CommonOpts sim_opts, asm_opts, rec_opts, eval_opts;
    CLI::App* sim = app.add_subcommand(
        "simulate", "forward solve and measurement generation");
    add_common(sim, sim_opts);
    CLI::App* asmb = app.add_subcommand(
        "assemble", "write the chord integration matrices");
    add_common(asmb, asm_opts);
    CLI::App* rec = app.add_subcommand(
        "reconstruct", "solve the regularized inverse problem");
    add_common(rec, rec_opts);
    CLI::App* eval = app.add_subcommand(
        "evaluate", "score reconstructions against the true field");
    add_common(eval, eval_opts);

    double mg_radius = 1.0, mg_h = 0.1, mg_sigma = 1.0;
    std::string mg_out;
    CLI::App* mesh_gen =
        app.add_subcommand("mesh-gen", "write a structured disk mesh");
    mesh_gen->add_option("-r,--radius", mg_radius, "disk radius")
        ->check(CLI::PositiveNumber);
    mesh_gen->add_option("-e,--edge", mg_h, "target edge length")
        ->check(CLI::PositiveNumber);
    mesh_gen->add_option("--sigma", mg_sigma, "conductivity")
        ->check(CLI::PositiveNumber);
    mesh_gen->add_option("-o,--out", mg_out, "output mesh file")->required();

    std::string mi_path;
    CLI::App* mesh_info =
        app.add_subcommand("mesh-info", "print mesh statistics");
    mesh_info->add_option("mesh", mi_path, "mesh file")->required();

    std::string pl_mesh, pl_field, pl_out, pl_style = "both";
    CLI::App* plot = app.add_subcommand("plot", "render a field CSV as SVG");
    plot->add_option("-m,--mesh", pl_mesh, "mesh file")->required();
    plot->add_option("-f,--field", pl_field, "field CSV")->required();
    plot->add_option("-o,--out", pl_out, "output SVG file")->required();
    plot->add_option("-s,--style", pl_style, "magnitude, quiver or both");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (sim->parsed()) {
            vft::cmd_simulate(load_config(sim_opts), sim_opts.quiet);
        } else if (asmb->parsed()) {
            vft::cmd_assemble(load_config(asm_opts), asm_opts.quiet);
        } else if (rec->parsed()) {
            vft::cmd_reconstruct(load_config(rec_opts), rec_opts.quiet);
        } else if (eval->parsed()) {
            vft::cmd_evaluate(load_config(eval_opts), eval_opts.quiet);
        } else if (mesh_gen->parsed()) {
            vft::TriMesh mesh = vft::build_disk_mesh(mg_radius, mg_h);
            mesh.conductivity = mg_sigma;
            vft::write_mesh_file(mg_out, mesh);
        } else if (mesh_info->parsed()) {
            vft::TriMesh mesh = vft::read_mesh_file(mi_path);
            std::cout << "nodes = " << mesh.num_nodes() << '\n'
                      << "elements = " << mesh.num_elements() << '\n'
                      << "boundary_nodes = " << mesh.boundary_nodes.size() << '\n'
                      << "conductivity = "
                      << vft::format_shortest(mesh.conductivity) << '\n'
                      << "total_area = "
                      << vft::format_shortest(vft::total_area(mesh)) << '\n'
                      << "max_edge = "
                      << vft::format_shortest(vft::max_edge_length(mesh)) << '\n';
        } else if (plot->parsed()) {
            vft::cmd_plot(pl_mesh, pl_field, pl_out,
                          vft::parse_plot_style(pl_style));
        }
    } catch (const vft::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
