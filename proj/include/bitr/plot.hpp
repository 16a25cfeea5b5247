#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bitr {

class UnsupportedError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class EmptyGridError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Square grid of cell centres over [lo, hi]².
struct GridSpec {
  double lo = -2.8;
  double hi = 2.8;
  int resolution = 100;
};

using DecisionFn = std::function<int(std::span<const double>)>;

struct PlotPanel {
  std::string title;
  int p = 2;
  DecisionFn decide;
};

/// cells[i][j]: decision at x1 = centre j, x2 = centre i.
using DecisionGrid = std::vector<std::vector<int>>;

DecisionGrid decision_grid(const DecisionFn& decide, const GridSpec& grid);

/// Number of 4-connected same-arm regions.
int count_regions(const DecisionGrid& cells);

/// Side-by-side heat panels coloured by decided arm.
std::string boundary_svg(const std::vector<PlotPanel>& panels, const GridSpec& grid, int n_arms);

void emit_boundary_plot(const std::vector<PlotPanel>& panels, const GridSpec& grid, int n_arms,
                        const std::filesystem::path& out);

}  // namespace bitr
