#pragma once

#include <string>
#include <vector>

#include "vft/config.hpp"
#include "vft/forward.hpp"
#include "vft/geometry.hpp"
#include "vft/inverse.hpp"
#include "vft/svg.hpp"

namespace vft {

/// Meshes, electrodes and chords shared by the pipeline stages. Electrodes
/// are snapped on the coarse mesh and matched by angle on the fine mesh, so
/// both stages reference the same physical contact points (with the default
/// nested meshes the positions coincide exactly).
struct ProblemGeometry {
    TriMesh fine, coarse;
    ElectrodeLayout electrodes_coarse, electrodes_fine;
    std::vector<Chord> chords;
};

ProblemGeometry build_problem_geometry(const ExperimentConfig& cfg);

/// Output file names inside cfg.output_dir.
std::string path_mesh_fine(const ExperimentConfig& cfg);
std::string path_mesh_coarse(const ExperimentConfig& cfg);
std::string path_potentials(const ExperimentConfig& cfg);
std::string path_field_true(const ExperimentConfig& cfg);
std::string path_measurements_clean(const ExperimentConfig& cfg);
std::string path_measurements(const ExperimentConfig& cfg, int realization);
std::string path_field_rec(const ExperimentConfig& cfg, int realization);
std::string path_field_rec_avg(const ExperimentConfig& cfg);
std::string path_report(const ExperimentConfig& cfg, int realization);
std::string path_eval(const ExperimentConfig& cfg);
std::string path_ray_matrix(const ExperimentConfig& cfg, RayFlavor flavor);

/// Forward stage: meshes, fine potential, projected true field, clean and
/// per-realization noisy measurements (seed + k for realization k).
void cmd_simulate(const ExperimentConfig& cfg, bool quiet = false);

/// Write both ray matrices for the coarse mesh in the triplet text format.
void cmd_assemble(const ExperimentConfig& cfg, bool quiet = false);

/// Solve every realization, write per-realization fields and reports plus
/// the averaged field.
void cmd_reconstruct(const ExperimentConfig& cfg, bool quiet = false);

/// Compare reconstructions against the projected true field; one CSV row per
/// realization plus an "avg" row for the averaged field.
void cmd_evaluate(const ExperimentConfig& cfg, bool quiet = false);

/// Render a field CSV over its mesh into an SVG file.
void cmd_plot(const std::string& mesh_path, const std::string& field_path,
              const std::string& svg_path, PlotStyle style);

}  // namespace vft
