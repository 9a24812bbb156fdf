#pragma once

#include <string>
#include <vector>

#include "dynrb/mesh.hpp"
#include "dynrb/types.hpp"

namespace dynrb {

/// Shortest round-trip decimal representation (printf %.17g trimmed).
std::string format_double(double value);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path);

/// Legacy-format VTK unstructured grid with one scalar cell field.
void write_vtk_cell_scalars(const std::string& path, const Mesh& mesh, const Vec& values,
                            const std::string& field_name);

struct SvgSeries {
    std::string label;
    std::string color = "#1f77b4";
    bool markers = false;
    std::vector<std::pair<double, double>> points;
};

struct SvgPlotOptions {
    std::string title, xlabel, ylabel;
    bool log_y = false;
    int width = 720;
    int height = 480;
};

void write_svg_lineplot(const std::string& path, const SvgPlotOptions& options,
                        const std::vector<SvgSeries>& series);

} // namespace dynrb
