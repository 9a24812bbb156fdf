#include "dynrb/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dynrb {

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    // Use the shortest representation that round-trips.
    for (int prec = 1; prec < 17; ++prec) {
        char probe[40];
        std::snprintf(probe, sizeof(probe), "%.*g", prec, value);
        if (std::strtod(probe, nullptr) == value) return probe;
    }
    return buf;
}

void write_csv(const std::string& path, const CsvTable& table) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (size_t c = 0; c < table.header.size(); ++c)
        out << (c ? "," : "") << table.header[c];
    out << "\n";
    for (const auto& row : table.rows) {
        for (size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
        out << "\n";
    }
    if (!out) throw std::runtime_error("short write to " + path);
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.push_back("");
        if (first) {
            table.header = std::move(cells);
            first = false;
        } else {
            table.rows.push_back(std::move(cells));
        }
    }
    return table;
}

void write_vtk_cell_scalars(const std::string& path, const Mesh& mesh, const Vec& values,
                            const std::string& field_name) {
    if (values.size() != mesh.n_elements())
        throw std::invalid_argument("vtk: value count != element count");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "# vtk DataFile Version 3.0\n";
    out << field_name << "\n";
    out << "ASCII\n";
    out << "DATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh.n_nodes() << " double\n";
    for (const auto& p : mesh.node_coords)
        out << format_double(p[0]) << " " << format_double(p[1]) << " 0\n";
    out << "CELLS " << mesh.n_elements() << " " << 5 * mesh.n_elements() << "\n";
    for (const auto& conn : mesh.element_connectivity)
        out << "4 " << conn[0] << " " << conn[1] << " " << conn[2] << " " << conn[3] << "\n";
    out << "CELL_TYPES " << mesh.n_elements() << "\n";
    for (int e = 0; e < mesh.n_elements(); ++e) out << "9\n"; // VTK_QUAD
    out << "CELL_DATA " << mesh.n_elements() << "\n";
    out << "SCALARS " << field_name << " float 1\n";
    out << "LOOKUP_TABLE default\n";
    for (Eigen::Index e = 0; e < values.size(); ++e) out << format_double(values[e]) << "\n";
    if (!out) throw std::runtime_error("short write to " + path);
}

namespace {

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

} // namespace

void write_svg_lineplot(const std::string& path, const SvgPlotOptions& options,
                        const std::vector<SvgSeries>& series) {
    const double margin_l = 70, margin_r = 20, margin_t = 40, margin_b = 50;
    const double w = options.width, h = options.height;
    const double plot_w = w - margin_l - margin_r;
    const double plot_h = h - margin_t - margin_b;

    auto transform_y = [&](double y) { return options.log_y ? std::log10(y) : y; };

    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool any = false;
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) {
            if (options.log_y && y <= 0.0) continue;
            const double ty = transform_y(y);
            if (!any) {
                xmin = xmax = x;
                ymin = ymax = ty;
                any = true;
            } else {
                xmin = std::min(xmin, x);
                xmax = std::max(xmax, x);
                ymin = std::min(ymin, ty);
                ymax = std::max(ymax, ty);
            }
        }
    }
    if (xmax - xmin < 1e-300) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if (ymax - ymin < 1e-300) {
        ymin -= 0.5;
        ymax += 0.5;
    }

    auto px = [&](double x) { return margin_l + (x - xmin) / (xmax - xmin) * plot_w; };
    auto py = [&](double y) {
        return margin_t + (1.0 - (transform_y(y) - ymin) / (ymax - ymin)) * plot_h;
    };

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
    out << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << w / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"16\">"
        << xml_escape(options.title) << "</text>\n";

    // axes box and ticks
    out << "<rect x=\"" << margin_l << "\" y=\"" << margin_t << "\" width=\"" << plot_w
        << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";
    const int n_ticks = 5;
    for (int i = 0; i <= n_ticks; ++i) {
        const double fx = xmin + (xmax - xmin) * i / n_ticks;
        const double gx = px(fx);
        out << "<line x1=\"" << gx << "\" y1=\"" << margin_t + plot_h << "\" x2=\"" << gx
            << "\" y2=\"" << margin_t + plot_h + 5 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << gx << "\" y=\"" << margin_t + plot_h + 18
            << "\" text-anchor=\"middle\" font-size=\"11\">" << tick_label(fx) << "</text>\n";
        const double ty = ymin + (ymax - ymin) * i / n_ticks;
        const double fy = options.log_y ? std::pow(10.0, ty) : ty;
        const double gy = margin_t + (1.0 - static_cast<double>(i) / n_ticks) * plot_h;
        out << "<line x1=\"" << margin_l - 5 << "\" y1=\"" << gy << "\" x2=\"" << margin_l
            << "\" y2=\"" << gy << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << margin_l - 8 << "\" y=\"" << gy + 4
            << "\" text-anchor=\"end\" font-size=\"11\">" << tick_label(fy) << "</text>\n";
    }
    out << "<text x=\"" << margin_l + plot_w / 2 << "\" y=\"" << h - 10
        << "\" text-anchor=\"middle\" font-size=\"13\">" << xml_escape(options.xlabel)
        << "</text>\n";
    out << "<text x=\"16\" y=\"" << margin_t + plot_h / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
        << margin_t + plot_h / 2 << ")\">" << xml_escape(options.ylabel) << "</text>\n";

    double legend_y = margin_t + 14;
    for (const auto& s : series) {
        std::string pts;
        for (const auto& [x, y] : s.points) {
            if (options.log_y && y <= 0.0) continue;
            pts += tick_label(px(x)) + "," + tick_label(py(y)) + " ";
        }
        if (s.points.size() > 1)
            out << "<polyline fill=\"none\" stroke=\"" << s.color
                << "\" stroke-width=\"1.5\" points=\"" << pts << "\"/>\n";
        if (s.markers || s.points.size() == 1) {
            for (const auto& [x, y] : s.points) {
                if (options.log_y && y <= 0.0) continue;
                out << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y)
                    << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
            }
        }
        if (!s.label.empty()) {
            out << "<rect x=\"" << margin_l + plot_w - 150 << "\" y=\"" << legend_y - 9
                << "\" width=\"10\" height=\"10\" fill=\"" << s.color << "\"/>\n";
            out << "<text x=\"" << margin_l + plot_w - 136 << "\" y=\"" << legend_y
                << "\" font-size=\"12\">" << xml_escape(s.label) << "</text>\n";
            legend_y += 16;
        }
    }
    out << "</svg>\n";
    if (!out) throw std::runtime_error("short write to " + path);
}

} // namespace dynrb
