#include "vft/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "vft/io.hpp"

namespace vft {

namespace {

// Nine evenly spaced anchors of the viridis scale, interpolated linearly.
constexpr int kStops[9][3] = {
    {68, 1, 84},    {72, 40, 120},  {62, 74, 137},  {49, 104, 142},
    {38, 130, 142}, {31, 158, 137}, {53, 183, 121}, {109, 205, 89},
    {180, 222, 44},
};

std::string color_at(double t) {
    t = std::clamp(t, 0.0, 1.0);
    const double pos = t * 8.0;
    const int lo = std::min(7, static_cast<int>(pos));
    const double f = pos - lo;
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                  static_cast<int>(std::lround(kStops[lo][0] + f * (kStops[lo + 1][0] - kStops[lo][0]))),
                  static_cast<int>(std::lround(kStops[lo][1] + f * (kStops[lo + 1][1] - kStops[lo][1]))),
                  static_cast<int>(std::lround(kStops[lo][2] + f * (kStops[lo + 1][2] - kStops[lo][2]))));
    return buf;
}

}  // namespace

PlotStyle parse_plot_style(const std::string& name) {
    if (name == "magnitude") return PlotStyle::Magnitude;
    if (name == "quiver") return PlotStyle::Quiver;
    if (name == "both") return PlotStyle::Both;
    throw std::invalid_argument("plot: unknown style '" + name +
                                "' (use magnitude, quiver, or both)");
}

std::string render_field_svg(const TriMesh& mesh, const NodalField& field,
                             PlotStyle style) {
    const int n = mesh.num_nodes();
    if (field.num_nodes() != n) {
        throw std::invalid_argument("render_field_svg: field does not match mesh");
    }

    double xmin = mesh.nodes[0].x, xmax = xmin;
    double ymin = mesh.nodes[0].y, ymax = ymin;
    for (const Point2& p : mesh.nodes) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    const double span = std::max(xmax - xmin, ymax - ymin);
    if (!(span > 0.0)) throw std::invalid_argument("render_field_svg: flat mesh");

    constexpr double kSize = 760.0;
    constexpr double kPad = 20.0;
    const double scale = (kSize - 2.0 * kPad) / span;
    // SVG y runs downward; flip so the plot matches mesh coordinates.
    auto px = [&](Point2 p) { return kPad + (p.x - xmin) * scale; };
    auto py = [&](Point2 p) { return kSize - kPad - (p.y - ymin) * scale; };

    double vmin = field.magnitude(0), vmax = vmin;
    for (int i = 1; i < n; ++i) {
        const double m = field.magnitude(i);
        vmin = std::min(vmin, m);
        vmax = std::max(vmax, m);
    }
    const double vspan = vmax - vmin;

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize
        << "\" height=\"" << kSize + 30.0 << "\" viewBox=\"0 0 " << kSize
        << ' ' << kSize + 30.0 << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    if (style == PlotStyle::Magnitude || style == PlotStyle::Both) {
        out << "<g stroke=\"none\">\n";
        for (const auto& t : mesh.elements) {
            const double m = (field.magnitude(t[0]) + field.magnitude(t[1]) +
                              field.magnitude(t[2])) / 3.0;
            const double u = vspan > 0.0 ? (m - vmin) / vspan : 0.0;
            out << "<polygon points=\"";
            for (int k = 0; k < 3; ++k) {
                if (k) out << ' ';
                out << format_shortest(px(mesh.nodes[t[k]])) << ','
                    << format_shortest(py(mesh.nodes[t[k]]));
            }
            out << "\" fill=\"" << color_at(u) << "\"/>\n";
        }
        out << "</g>\n";
    }

    if (style == PlotStyle::Quiver || style == PlotStyle::Both) {
        // Unit-length arrows: direction only, sized to the mean node spacing.
        const double arrow = 0.55 * std::sqrt(total_area(mesh) / n) * scale;
        const std::string stroke =
            style == PlotStyle::Both ? "#ffffff" : "#1f3552";
        out << "<g stroke=\"" << stroke
            << "\" stroke-width=\"1.1\" fill=\"none\">\n";
        for (int i = 0; i < n; ++i) {
            const double m = field.magnitude(i);
            if (!(m > 0.0)) continue;
            const double ux = field.ex(i) / m, uy = field.ey(i) / m;
            const Point2 p = mesh.nodes[i];
            const double x0 = px(p) - 0.5 * arrow * ux;
            const double y0 = py(p) + 0.5 * arrow * uy;
            const double x1 = px(p) + 0.5 * arrow * ux;
            const double y1 = py(p) - 0.5 * arrow * uy;
            // Head: two short back-strokes at the tip.
            const double hx = 0.28 * arrow * ux, hy = 0.28 * arrow * uy;
            const double wx = 0.16 * arrow * -uy, wy = 0.16 * arrow * ux;
            out << "<path d=\"M" << format_shortest(x0) << ' '
                << format_shortest(y0) << " L" << format_shortest(x1) << ' '
                << format_shortest(y1) << " M"
                << format_shortest(x1 - hx + wx) << ' '
                << format_shortest(y1 + hy + wy) << " L"
                << format_shortest(x1) << ' ' << format_shortest(y1) << " L"
                << format_shortest(x1 - hx - wx) << ' '
                << format_shortest(y1 + hy - wy) << "\"/>\n";
        }
        out << "</g>\n";
    }

    out << "<text x=\"" << kPad << "\" y=\"" << kSize + 20.0
        << "\" font-family=\"monospace\" font-size=\"14\">min="
        << format_shortest(vmin) << " max=" << format_shortest(vmax)
        << "</text>\n";
    out << "</svg>\n";
    return out.str();
}

}  // namespace vft
