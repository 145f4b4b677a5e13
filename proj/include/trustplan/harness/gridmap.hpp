#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "trustplan/planning/model.hpp"

namespace trustplan::harness {

/// Office grid map.
///
///   # wall            . floor          R rubble (passable, costly)
///   S robot start     G goal point     C coffee machine
///   A room 1 floor    B room 2 floor (coffee is delivered here)
///
/// Header lines before the `grid` line:
///   cost <glyph> <rational>   entering cost for cells with that glyph
/// Lines starting with ';' are comments.
struct GridMap {
  std::vector<std::string> rows;
  std::map<char, planning::Rational> costs;

  int width() const { return rows.empty() ? 0 : static_cast<int>(rows.front().size()); }
  int height() const { return static_cast<int>(rows.size()); }
  char at(int x, int y) const { return rows[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)]; }
  bool passable(int x, int y) const;
  planning::Rational entry_cost(int x, int y) const;
  std::optional<std::pair<int, int>> find(char glyph) const;
};

class MapError : public std::runtime_error {
 public:
  MapError(int line, const std::string& message)
      : std::runtime_error("map line " + std::to_string(line) + ": " + message), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

GridMap parse_grid_map(const std::string& text);
GridMap load_grid_map(const std::string& path);

/// Grounded navigation task: one `at-x-y` fluent per open cell, a move action
/// between neighbouring open cells costing the target cell's entry cost, and
/// coffee pick-up and delivery actions when the map has a coffee machine.
/// The goal is the G cell, or coffee delivered to a B cell.
planning::PlanningModel grid_model(const GridMap& map);

/// Cell the robot occupies after an action named by grid_model, if any.
std::optional<std::pair<int, int>> cell_after(const std::string& action);

}  // namespace trustplan::harness
