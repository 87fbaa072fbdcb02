#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "vft/config.hpp"
#include "vft/io.hpp"

using namespace vft;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) {
        path = (std::filesystem::temp_directory_path() / name).string();
    }
    ~TempFile() { std::remove(path.c_str()); }
};

std::vector<std::string> file_lines(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(bool(in));
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

std::vector<double> awkward_doubles() {
    std::vector<double> vals = {0.0,    1.0,   -1.0,  0.1,   1.0 / 3.0,
                                1e-300, 1e300, -0.25, 6.02e23};
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int i = 0; i < 50; ++i) vals.push_back(std::ldexp(unit(rng), i - 25));
    return vals;
}

}  // namespace

TEST_CASE("shortest formatting round-trips bit exactly") {
    for (double v : awkward_doubles()) {
        CAPTURE(v);
        const std::string s = format_shortest(v);
        CHECK(parse_double(s) == v);
    }
    CHECK(format_shortest(0.1) == "0.1");
    CHECK(format_shortest(1.0) == "1");
    CHECK(format_shortest(-0.5) == "-0.5");
}

TEST_CASE("seventeen-digit formatting round-trips bit exactly") {
    for (double v : awkward_doubles()) {
        CAPTURE(v);
        CHECK(parse_double(format_sig17(v)) == v);
    }
}

TEST_CASE("double parsing accepts infinities and rejects garbage") {
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(parse_double("inf") == inf);
    CHECK(parse_double("Infinity") == inf);
    CHECK(parse_double("-INF") == -inf);
    CHECK(parse_double("+inf") == inf);
    CHECK(parse_double("2.5e-3") == 2.5e-3);

    CHECK_THROWS_AS(parse_double(""), std::runtime_error);
    CHECK_THROWS_AS(parse_double("1.5x"), std::runtime_error);
    CHECK_THROWS_AS(parse_double("1.5 "), std::runtime_error);
    CHECK_THROWS_AS(parse_double("abc"), std::runtime_error);
    CHECK_THROWS_AS(parse_double("1,5"), std::runtime_error);
}

TEST_CASE("measurement files round-trip") {
    TempFile tmp("vft_io_meas.csv");
    std::vector<MeasurementRow> rows = {{0, 0, 1, 0.125},
                                        {1, 0, 2, -3.7e-11},
                                        {2, 1, 2, 1.0 / 3.0}};
    write_measurements_csv(tmp.path, rows);

    auto lines = file_lines(tmp.path);
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "chord_index,electrode_a,electrode_b,value");

    auto got = read_measurements_csv(tmp.path);
    REQUIRE(got.size() == rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        CHECK(got[i].chord_index == rows[i].chord_index);
        CHECK(got[i].electrode_a == rows[i].electrode_a);
        CHECK(got[i].electrode_b == rows[i].electrode_b);
        CHECK(got[i].value == rows[i].value);
    }
}

TEST_CASE("corrupt measurement files name the offending row") {
    TempFile tmp("vft_io_bad_meas.csv");
    std::ofstream(tmp.path) << "chord_index,electrode_a,electrode_b,value\n"
                               "0,0,1,0.5\n"
                               "1,0,2,zap\n";
    try {
        read_measurements_csv(tmp.path);
        FAIL("expected parse error");
    } catch (const std::runtime_error& err) {
        std::string msg = err.what();
        CHECK(msg.find("row 3") != std::string::npos);
        CHECK(msg.find("zap") != std::string::npos);
    }

    std::ofstream(tmp.path) << "chord_index,electrode_a,electrode_b,value\n"
                               "0,0,1\n";
    CHECK_THROWS_WITH_AS(read_measurements_csv(tmp.path),
                         doctest::Contains("expected 4 fields"),
                         std::runtime_error);

    CHECK_THROWS_WITH_AS(read_measurements_csv("/nonexistent/qqq.csv"),
                         doctest::Contains("cannot open"), std::runtime_error);
}

TEST_CASE("field files round-trip") {
    TempFile tmp("vft_io_field.csv");
    const int n = 7;
    std::vector<double> xs(n), ys(n);
    Eigen::VectorXd field(2 * n);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int i = 0; i < n; ++i) {
        xs[i] = unit(rng);
        ys[i] = unit(rng);
        field[i] = unit(rng);
        field[n + i] = unit(rng);
    }
    write_field_csv(tmp.path, xs, ys, field);

    auto lines = file_lines(tmp.path);
    REQUIRE(lines.size() == size_t(n) + 1);
    CHECK(lines[0] == "node,x,y,ex,ey");

    FieldCsv got = read_field_csv(tmp.path);
    REQUIRE(got.xs.size() == size_t(n));
    for (int i = 0; i < n; ++i) {
        CHECK(got.xs[i] == xs[i]);
        CHECK(got.ys[i] == ys[i]);
    }
    CHECK((got.values - field).lpNorm<Eigen::Infinity>() == 0.0);

    Eigen::VectorXd odd(2 * n + 1);
    CHECK_THROWS_AS(write_field_csv(tmp.path, xs, ys, odd),
                    std::invalid_argument);
}

TEST_CASE("field files require consecutive node ids") {
    TempFile tmp("vft_io_field_ids.csv");
    std::ofstream(tmp.path) << "node,x,y,ex,ey\n"
                               "0,0,0,1,0\n"
                               "2,0.5,0,1,0\n";
    CHECK_THROWS_WITH_AS(read_field_csv(tmp.path),
                         doctest::Contains("consecutive"), std::runtime_error);
}

TEST_CASE("potential files carry one row per node") {
    TempFile tmp("vft_io_pot.csv");
    std::vector<double> xs = {0.0, 0.5}, ys = {0.0, -0.25};
    Eigen::VectorXd u(2);
    u << 1.5, -2.25;
    write_potentials_csv(tmp.path, xs, ys, u);
    auto lines = file_lines(tmp.path);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "node,x,y,u");
    CHECK(lines[1] == "0,0,0,1.5");
    CHECK(lines[2] == "1,0.5,-0.25,-2.25");
}

TEST_CASE("report files preserve key order") {
    TempFile tmp("vft_io_report.txt");
    write_report(tmp.path, {{"zeta", "1"}, {"alpha", "two words"}});
    auto lines = file_lines(tmp.path);
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] == "zeta = 1");
    CHECK(lines[1] == "alpha = two words");
}

TEST_CASE("minimal experiment description fills in the defaults") {
    std::istringstream in(
        "# comment line\n"
        "fine_h = 0.05   # trailing comment\n"
        "\n"
        "coarse_h = 0.1\n");
    ExperimentConfig cfg = parse_config(in);
    CHECK(cfg.fine_h == 0.05);
    CHECK(cfg.coarse_h == 0.1);
    CHECK(cfg.radius == 1.0);
    CHECK(cfg.n_electrodes == 32);
    CHECK(cfg.sigma == 1.0);
    CHECK(cfg.dipole_x == 0.0);
    CHECK(cfg.dipole_y == 0.0);
    CHECK(cfg.qx == 1.0);
    CHECK(cfg.qy == 0.0);
    CHECK(cfg.snr_db == 40.0);
    CHECK(cfg.seed == 1);
    CHECK(cfg.alpha == 0.06);
    CHECK(cfg.beta == 0.016);
    CHECK(cfg.realizations == 10);
    CHECK(cfg.output_dir == "out");
}

TEST_CASE("experiment description accepts an infinite signal-to-noise") {
    std::istringstream in("fine_h = 0.05\ncoarse_h = 0.1\nsnr_db = inf\n");
    ExperimentConfig cfg = parse_config(in);
    CHECK(std::isinf(cfg.snr_db));
}

TEST_CASE("experiment description errors name the problem") {
    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return parse_config(in);
    };
    CHECK_THROWS_WITH_AS(parse("coarse_h = 0.1\n"),
                         doctest::Contains("fine_h"), ConfigError);
    CHECK_THROWS_WITH_AS(parse("fine_h = 0.05\n"),
                         doctest::Contains("coarse_h"), ConfigError);
    CHECK_THROWS_WITH_AS(parse("fine_h = 0.05\ncoarse_h = 0.1\nzz = 1\n"),
                         doctest::Contains("unknown key 'zz'"), ConfigError);
    CHECK_THROWS_WITH_AS(
        parse("fine_h = 0.05\ncoarse_h = 0.1\nfine_h = 0.01\n"),
        doctest::Contains("duplicate key 'fine_h'"), ConfigError);
    CHECK_THROWS_WITH_AS(parse("fine_h = spaghetti\ncoarse_h = 0.1\n"),
                         doctest::Contains("bad numeric value"), ConfigError);
    CHECK_THROWS_WITH_AS(parse("fine_h = 0.05\ncoarse_h = 0.1\nseed = 1.5\n"),
                         doctest::Contains("integer"), ConfigError);
    CHECK_THROWS_WITH_AS(parse("fine_h 0.05\ncoarse_h = 0.1\n"),
                         doctest::Contains("line 1"), ConfigError);
    CHECK_THROWS_WITH_AS(parse("fine_h = 2.0\ncoarse_h = 0.1\n"),
                         doctest::Contains("0 < h < radius"), ConfigError);
    CHECK_THROWS_WITH_AS(
        parse("fine_h = 0.05\ncoarse_h = 0.1\nn_electrodes = 2\n"),
        doctest::Contains("at least 3"), ConfigError);
    CHECK_THROWS_WITH_AS(
        parse("fine_h = 0.05\ncoarse_h = 0.1\nqx = 0\nqy = 0\n"),
        doctest::Contains("nonzero"), ConfigError);
    CHECK_THROWS_WITH_AS(
        parse("fine_h = 0.05\ncoarse_h = 0.1\nrealizations = 0\n"),
        doctest::Contains("at least 1"), ConfigError);
    CHECK_THROWS_WITH_AS(
        parse("fine_h = 0.05\ncoarse_h = 0.1\nalpha = -0.5\n"),
        doctest::Contains("nonnegative"), ConfigError);
    CHECK_THROWS_AS(parse_config_file("/nonexistent/experiment.cfg"),
                    ConfigError);
}
