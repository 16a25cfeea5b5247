#include "bitr/plot.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <utility>

namespace bitr {

namespace {

void check_grid(const GridSpec& g) {
  if (g.resolution < 1 || !(g.hi > g.lo) || !std::isfinite(g.lo) || !std::isfinite(g.hi))
    throw EmptyGridError("grid is empty: need resolution >= 1 and lo < hi");
}

double centre(const GridSpec& g, int i) {
  return g.lo + (g.hi - g.lo) * (i + 0.5) / g.resolution;
}

const std::array<const char*, 8> kPalette = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a",
                                             "#66a61e", "#e6ab02", "#a6761d", "#666666"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

DecisionGrid decision_grid(const DecisionFn& decide, const GridSpec& grid) {
  check_grid(grid);
  DecisionGrid cells(grid.resolution, std::vector<int>(grid.resolution));
  double x[2];
  for (int i = 0; i < grid.resolution; ++i) {
    x[1] = centre(grid, i);
    for (int j = 0; j < grid.resolution; ++j) {
      x[0] = centre(grid, j);
      cells[i][j] = decide(std::span<const double>(x, 2));
    }
  }
  return cells;
}

int count_regions(const DecisionGrid& cells) {
  const int rows = static_cast<int>(cells.size());
  if (rows == 0) return 0;
  const int cols = static_cast<int>(cells[0].size());
  std::vector<std::vector<char>> seen(rows, std::vector<char>(cols, 0));
  int regions = 0;
  std::vector<std::pair<int, int>> stack;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      if (seen[i][j]) continue;
      ++regions;
      const int arm = cells[i][j];
      stack.assign(1, {i, j});
      seen[i][j] = 1;
      while (!stack.empty()) {
        const auto [r, c] = stack.back();
        stack.pop_back();
        const std::array<std::pair<int, int>, 4> nb{{{r - 1, c}, {r + 1, c}, {r, c - 1}, {r, c + 1}}};
        for (const auto& [rr, cc] : nb) {
          if (rr < 0 || rr >= rows || cc < 0 || cc >= cols || seen[rr][cc]) continue;
          if (cells[rr][cc] != arm) continue;
          seen[rr][cc] = 1;
          stack.emplace_back(rr, cc);
        }
      }
    }
  return regions;
}

std::string boundary_svg(const std::vector<PlotPanel>& panels, const GridSpec& grid, int n_arms) {
  check_grid(grid);
  if (panels.empty()) throw std::invalid_argument("nothing to plot");
  for (const auto& p : panels)
    if (p.p != 2)
      throw UnsupportedError("decision plots need exactly 2 covariates, got " + std::to_string(p.p));

  const double size = 400.0, margin = 50.0, legend = 40.0;
  const double cell = size / grid.resolution;
  const double width = panels.size() * (size + margin) + margin;
  const double height = size + 2 * margin + legend;

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width) << "\" height=\""
     << fmt(height) << "\" viewBox=\"0 0 " << fmt(width) << ' ' << fmt(height) << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (std::size_t k = 0; k < panels.size(); ++k) {
    const auto cells = decision_grid(panels[k].decide, grid);
    const double ox = margin + k * (size + margin), oy = margin;
    os << "<g id=\"panel" << k << "\">\n"
       << "<text x=\"" << fmt(ox + size / 2) << "\" y=\"" << fmt(oy - 12)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
       << panels[k].title << "</text>\n";
    // Row i holds x2 = centre(i); draw with x2 increasing upwards and merge runs.
    for (int i = 0; i < grid.resolution; ++i) {
      const double y = oy + size - (i + 1) * cell;
      int j = 0;
      while (j < grid.resolution) {
        int end = j;
        while (end + 1 < grid.resolution && cells[i][end + 1] == cells[i][j]) ++end;
        const int arm = cells[i][j];
        os << "<rect x=\"" << fmt(ox + j * cell) << "\" y=\"" << fmt(y) << "\" width=\""
           << fmt((end - j + 1) * cell) << "\" height=\"" << fmt(cell) << "\" fill=\""
           << kPalette[static_cast<std::size_t>(arm) % kPalette.size()] << "\"/>\n";
        j = end + 1;
      }
    }
    os << "<rect x=\"" << fmt(ox) << "\" y=\"" << fmt(oy) << "\" width=\"" << fmt(size)
       << "\" height=\"" << fmt(size) << "\" fill=\"none\" stroke=\"black\"/>\n"
       << "<text x=\"" << fmt(ox) << "\" y=\"" << fmt(oy + size + 16)
       << "\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(grid.lo) << "</text>\n"
       << "<text x=\"" << fmt(ox + size) << "\" y=\"" << fmt(oy + size + 16)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(grid.hi)
       << "</text>\n"
       << "<text x=\"" << fmt(ox + size / 2) << "\" y=\"" << fmt(oy + size + 16)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">x1</text>\n"
       << "<text x=\"" << fmt(ox - 8) << "\" y=\"" << fmt(oy + size / 2)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">x2</text>\n"
       << "</g>\n";
  }

  for (int a = 0; a < n_arms; ++a) {
    const double lx = margin + a * 90.0, ly = size + 2 * margin;
    os << "<rect x=\"" << fmt(lx) << "\" y=\"" << fmt(ly) << "\" width=\"14\" height=\"14\" fill=\""
       << kPalette[static_cast<std::size_t>(a) % kPalette.size()] << "\"/>\n"
       << "<text x=\"" << fmt(lx + 20) << "\" y=\"" << fmt(ly + 12)
       << "\" font-family=\"sans-serif\" font-size=\"12\">arm " << a << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void emit_boundary_plot(const std::vector<PlotPanel>& panels, const GridSpec& grid, int n_arms,
                        const std::filesystem::path& out) {
  const std::string svg = boundary_svg(panels, grid, n_arms);
  std::ofstream f(out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + out.string());
  f << svg;
}

}  // namespace bitr
