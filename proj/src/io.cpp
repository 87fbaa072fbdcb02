#include "vft/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace vft {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open " + path);
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) fail("cannot open " + path + " for writing");
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

int parse_int(const std::string& tok, const std::string& ctx) {
    int v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
        fail(ctx + ": bad integer '" + tok + "'");
    }
    return v;
}

double parse_double_ctx(const std::string& tok, const std::string& ctx) {
    try {
        return parse_double(tok);
    } catch (const std::exception&) {
        fail(ctx + ": bad number '" + tok + "'");
    }
}

}  // namespace

std::string format_shortest(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string format_sig17(double v) {
    char buf[64];
    const auto res =
        std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& tok) {
    if (tok.empty()) fail("empty number token");
    std::string low;
    for (char c : tok) low.push_back(static_cast<char>(std::tolower(c)));
    bool neg = false;
    std::string body = low;
    if (body[0] == '+' || body[0] == '-') {
        neg = body[0] == '-';
        body = body.substr(1);
    }
    if (body == "inf" || body == "infinity") {
        const double inf = std::numeric_limits<double>::infinity();
        return neg ? -inf : inf;
    }
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
        fail("bad number '" + tok + "'");
    }
    return v;
}

void write_measurements_csv(const std::string& path,
                            const std::vector<MeasurementRow>& rows) {
    auto out = open_out(path);
    out << "chord_index,electrode_a,electrode_b,value\n";
    for (const auto& r : rows) {
        out << r.chord_index << ',' << r.electrode_a << ',' << r.electrode_b
            << ',' << format_shortest(r.value) << '\n';
    }
    if (!out) fail("write failed for " + path);
}

std::vector<MeasurementRow> read_measurements_csv(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) fail(path + ": empty file");
    std::vector<MeasurementRow> rows;
    long rowno = 1;
    while (std::getline(in, line)) {
        ++rowno;
        if (line.empty()) continue;
        const auto ctx = path + " row " + std::to_string(rowno);
        const auto f = split_csv_line(line);
        if (f.size() != 4) fail(ctx + ": expected 4 fields, got " +
                                std::to_string(f.size()));
        MeasurementRow r;
        r.chord_index = parse_int(f[0], ctx);
        r.electrode_a = parse_int(f[1], ctx);
        r.electrode_b = parse_int(f[2], ctx);
        r.value = parse_double_ctx(f[3], ctx);
        rows.push_back(r);
    }
    return rows;
}

void write_potentials_csv(const std::string& path,
                          const std::vector<double>& xs,
                          const std::vector<double>& ys,
                          const Eigen::VectorXd& u) {
    const auto n = static_cast<Eigen::Index>(xs.size());
    if (u.size() != n || ys.size() != xs.size()) {
        throw std::invalid_argument("write_potentials_csv: size mismatch");
    }
    auto out = open_out(path);
    out << "node,x,y,u\n";
    for (Eigen::Index i = 0; i < n; ++i) {
        out << i << ',' << format_shortest(xs[i]) << ','
            << format_shortest(ys[i]) << ',' << format_shortest(u[i]) << '\n';
    }
    if (!out) fail("write failed for " + path);
}

void write_field_csv(const std::string& path, const std::vector<double>& xs,
                     const std::vector<double>& ys,
                     const Eigen::VectorXd& field) {
    const auto n = static_cast<Eigen::Index>(xs.size());
    if (field.size() != 2 * n || ys.size() != xs.size()) {
        throw std::invalid_argument("write_field_csv: size mismatch");
    }
    auto out = open_out(path);
    out << "node,x,y,ex,ey\n";
    for (Eigen::Index i = 0; i < n; ++i) {
        out << i << ',' << format_shortest(xs[i]) << ','
            << format_shortest(ys[i]) << ',' << format_shortest(field[i])
            << ',' << format_shortest(field[n + i]) << '\n';
    }
    if (!out) fail("write failed for " + path);
}

FieldCsv read_field_csv(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) fail(path + ": empty file");
    std::vector<double> xs, ys, ex, ey;
    long rowno = 1;
    while (std::getline(in, line)) {
        ++rowno;
        if (line.empty()) continue;
        const auto ctx = path + " row " + std::to_string(rowno);
        const auto f = split_csv_line(line);
        if (f.size() != 5) fail(ctx + ": expected 5 fields, got " +
                                std::to_string(f.size()));
        const int node = parse_int(f[0], ctx);
        if (node != static_cast<int>(xs.size())) {
            fail(ctx + ": node ids must be consecutive from 0");
        }
        xs.push_back(parse_double_ctx(f[1], ctx));
        ys.push_back(parse_double_ctx(f[2], ctx));
        ex.push_back(parse_double_ctx(f[3], ctx));
        ey.push_back(parse_double_ctx(f[4], ctx));
    }
    FieldCsv out;
    out.xs = std::move(xs);
    out.ys = std::move(ys);
    const auto n = static_cast<Eigen::Index>(out.xs.size());
    out.values.resize(2 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out.values[i] = ex[i];
        out.values[n + i] = ey[i];
    }
    return out;
}

void write_report(const std::string& path,
                  const std::vector<std::pair<std::string, std::string>>& kv) {
    auto out = open_out(path);
    for (const auto& [k, v] : kv) out << k << " = " << v << '\n';
    if (!out) fail("write failed for " + path);
}

}  // namespace vft
