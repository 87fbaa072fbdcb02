#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace vft {

/// Shortest decimal that parses back to the same double (used in CSV/SVG
/// output so files are byte-deterministic).
std::string format_shortest(double v);

/// 17 significant digits: bit-exact round-trip with a fixed width-ish look
/// (used in the mesh and matrix text formats).
std::string format_sig17(double v);

/// Strict double parse; throws std::runtime_error on trailing garbage.
/// Accepts "inf"/"infinity" (any case, optional sign).
double parse_double(const std::string& tok);

struct MeasurementRow {
    int chord_index = 0;
    int electrode_a = 0;
    int electrode_b = 0;
    double value = 0.0;
};

/// Header: chord_index,electrode_a,electrode_b,value
void write_measurements_csv(const std::string& path,
                            const std::vector<MeasurementRow>& rows);
std::vector<MeasurementRow> read_measurements_csv(const std::string& path);

/// Header: node,x,y,u
void write_potentials_csv(const std::string& path,
                          const std::vector<double>& xs,
                          const std::vector<double>& ys,
                          const Eigen::VectorXd& u);

struct FieldCsv {
    std::vector<double> xs, ys;
    Eigen::VectorXd values;  // length 2N: all ex, then all ey
};

/// Header: node,x,y,ex,ey
void write_field_csv(const std::string& path, const std::vector<double>& xs,
                     const std::vector<double>& ys,
                     const Eigen::VectorXd& field);
FieldCsv read_field_csv(const std::string& path);

/// key = value report lines, in the order given.
void write_report(const std::string& path,
                  const std::vector<std::pair<std::string, std::string>>& kv);

}  // namespace vft
