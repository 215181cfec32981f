#include "akf/csvio.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace akf {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
    if (columns.size() != header.size())
        throw std::invalid_argument("write_csv: header/column count mismatch");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path);
    for (std::size_t c = 0; c < header.size(); ++c)
        out << header[c] << (c + 1 < header.size() ? "," : "\n");
    const std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for (const auto& col : columns)
        if (col.size() != rows) throw std::invalid_argument("write_csv: ragged columns");
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < columns.size(); ++c)
            out << format_double(columns[c][r]) << (c + 1 < columns.size() ? "," : "\n");
}

void write_path_csv(const std::string& path, const PathPair& p) {
    std::vector<double> t(p.grid.n_nodes()), dw(p.grid.n_nodes(), 0.0), dv(p.grid.n_nodes(), 0.0);
    for (std::size_t k = 0; k < p.grid.n_nodes(); ++k) t[k] = p.grid.node(k);
    for (std::size_t k = 0; k < p.grid.steps; ++k) {
        dw[k] = p.dw[k];
        dv[k] = p.dv[k];
    }
    write_csv(path, {"t", "X", "Y", "dW", "dV"}, {t, p.x, p.y, dw, dv});
}

PathPair read_path_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_path_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != "t,X,Y,dW,dV")
        throw std::runtime_error("read_path_csv: unexpected header");
    std::vector<double> t, x, y, dw, dv;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        double vals[5];
        char comma;
        for (int c = 0; c < 5; ++c) {
            if (!(ss >> vals[c])) throw std::runtime_error("read_path_csv: bad row");
            if (c < 4 && !(ss >> comma)) throw std::runtime_error("read_path_csv: bad row");
        }
        t.push_back(vals[0]);
        x.push_back(vals[1]);
        y.push_back(vals[2]);
        dw.push_back(vals[3]);
        dv.push_back(vals[4]);
    }
    if (t.size() < 3) throw std::runtime_error("read_path_csv: too few rows");
    PathPair p;
    p.grid = TimeGrid(t.back(), t.size() - 1);
    p.x = std::move(x);
    p.y = std::move(y);
    dw.pop_back();
    dv.pop_back();
    p.dw = std::move(dw);
    p.dv = std::move(dv);
    p.y0 = p.y.front();
    return p;
}

std::string svg_line_chart(const std::vector<std::string>& names,
                           const std::vector<std::vector<double>>& columns,
                           int width, int height) {
    if (columns.size() < 2 || names.size() != columns.size())
        throw std::invalid_argument("svg_line_chart: need an x column and at least one series");
    const auto& xs = columns[0];
    double xmin = xs.front(), xmax = xs.back();
    double ymin = 0.0, ymax = 0.0;
    bool first = true;
    for (std::size_t c = 1; c < columns.size(); ++c)
        for (double v : columns[c]) {
            if (!std::isfinite(v)) continue;
            if (first) {
                ymin = ymax = v;
                first = false;
            }
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    if (!(ymax > ymin)) ymax = ymin + 1.0;
    if (!(xmax > xmin)) xmax = xmin + 1.0;
    const int mx = 45, my = 20;
    auto px = [&](double x) { return mx + (x - xmin) / (xmax - xmin) * (width - 2 * mx); };
    auto py = [&](double y) { return height - my - (y - ymin) / (ymax - ymin) * (height - 2 * my); };
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"};

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (std::size_t c = 1; c < columns.size(); ++c) {
        svg << "<polyline fill=\"none\" stroke=\"" << palette[(c - 1) % 5]
            << "\" stroke-width=\"1\" points=\"";
        for (std::size_t i = 0; i < xs.size() && i < columns[c].size(); ++i)
            svg << px(xs[i]) << "," << py(columns[c][i]) << " ";
        svg << "\"/>\n";
        svg << "<text x=\"" << (mx + 8) << "\" y=\"" << (my + 14 * static_cast<int>(c))
            << "\" fill=\"" << palette[(c - 1) % 5] << "\" font-size=\"11\">" << names[c]
            << "</text>\n";
    }
    svg << "<text x=\"4\" y=\"" << py(ymin) << "\" font-size=\"10\">" << format_double(ymin)
        << "</text>\n";
    svg << "<text x=\"4\" y=\"" << (py(ymax) + 10) << "\" font-size=\"10\">" << format_double(ymax)
        << "</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace akf
