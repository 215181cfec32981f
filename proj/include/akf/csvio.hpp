#pragma once

#include <span>
#include <string>
#include <vector>

#include "akf/sde.hpp"

namespace akf {

// CSV emission with fixed round-trip formatting, so identical inputs give
// byte-identical files.
std::string format_double(double v);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);

// Schema: t,X,Y,dW,dV. Increments sit on the row of their left endpoint; the
// final row carries zeros.
void write_path_csv(const std::string& path, const PathPair& p);
PathPair read_path_csv(const std::string& path);

// Minimal SVG polyline chart of one or more columns against the first column.
std::string svg_line_chart(const std::vector<std::string>& names,
                           const std::vector<std::vector<double>>& columns,
                           int width = 720, int height = 400);

}  // namespace akf
