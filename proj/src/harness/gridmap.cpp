#include "trustplan/harness/gridmap.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace trustplan::harness {

using planning::Rational;

namespace {

const std::string kGlyphs = "#.RSGCAB";

std::string cell(int x, int y) { return "at-" + std::to_string(x) + "-" + std::to_string(y); }

}  // namespace

bool GridMap::passable(int x, int y) const {
  return x >= 0 && y >= 0 && x < width() && y < height() && at(x, y) != '#';
}

Rational GridMap::entry_cost(int x, int y) const {
  auto it = costs.find(at(x, y));
  return it == costs.end() ? Rational(1) : it->second;
}

std::optional<std::pair<int, int>> GridMap::find(char glyph) const {
  for (int y = 0; y < height(); ++y) {
    for (int x = 0; x < width(); ++x) {
      if (at(x, y) == glyph) return std::make_pair(x, y);
    }
  }
  return std::nullopt;
}

GridMap parse_grid_map(const std::string& text) {
  GridMap map;
  map.costs['R'] = Rational(5);
  std::istringstream in(text);
  std::string line;
  int number = 0;
  bool in_grid = false;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!in_grid) {
      std::istringstream words(line);
      std::string word;
      if (!(words >> word) || word[0] == ';') continue;
      if (word == "grid") {
        in_grid = true;
      } else if (word == "cost") {
        std::string glyph, value;
        if (!(words >> glyph >> value) || glyph.size() != 1 || kGlyphs.find(glyph[0]) == std::string::npos ||
            glyph[0] == '#') {
          throw MapError(number, "expected: cost <glyph> <value>");
        }
        try {
          map.costs[glyph[0]] = planning::parse_rational(value);
        } catch (const std::exception&) {
          throw MapError(number, "bad cost '" + value + "'");
        }
        if (map.costs[glyph[0]] <= Rational(0)) throw MapError(number, "costs must be positive");
      } else {
        throw MapError(number, "unknown directive '" + word + "'");
      }
      continue;
    }
    if (line.empty() || line[0] == ';') continue;
    for (char c : line) {
      if (kGlyphs.find(c) == std::string::npos) throw MapError(number, std::string("unknown glyph '") + c + "'");
    }
    if (!map.rows.empty() && line.size() != map.rows.front().size()) {
      throw MapError(number, "rows must have equal width");
    }
    map.rows.push_back(line);
  }
  if (map.rows.empty()) throw MapError(number, "no grid rows");
  int starts = 0;
  for (const auto& row : map.rows) starts += static_cast<int>(std::count(row.begin(), row.end(), 'S'));
  if (starts != 1) throw MapError(number, "map needs exactly one start cell");
  bool goal = map.find('G').has_value();
  bool coffee = map.find('C').has_value();
  if (goal == coffee) throw MapError(number, "map needs either a goal cell or a coffee machine");
  if (coffee && !map.find('B')) throw MapError(number, "coffee delivery needs a room 2 cell");
  return map;
}

GridMap load_grid_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open map file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_grid_map(buf.str());
}

planning::PlanningModel grid_model(const GridMap& map) {
  planning::PlanningModel m;
  const bool coffee = map.find('C').has_value();
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      if (map.passable(x, y)) m.fluents.insert(cell(x, y));
    }
  }
  const int dx[] = {1, 0, -1, 0};
  const int dy[] = {0, 1, 0, -1};
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      if (!map.passable(x, y)) continue;
      for (int d = 0; d < 4; ++d) {
        int nx = x + dx[d];
        int ny = y + dy[d];
        if (!map.passable(nx, ny)) continue;
        m.actions.push_back({"move-" + std::to_string(x) + "-" + std::to_string(y) + "-" + std::to_string(nx) + "-" +
                                 std::to_string(ny),
                             map.entry_cost(nx, ny),
                             {cell(x, y)},
                             {cell(nx, ny)},
                             {cell(x, y)}});
      }
      if (coffee && map.at(x, y) == 'C') {
        m.actions.push_back({"pick-coffee-" + std::to_string(x) + "-" + std::to_string(y), Rational(1),
                             {cell(x, y)}, {"has-coffee"}, {}});
      }
      if (coffee && map.at(x, y) == 'B') {
        m.actions.push_back({"deliver-" + std::to_string(x) + "-" + std::to_string(y), Rational(1),
                             {cell(x, y), "has-coffee"}, {"delivered"}, {"has-coffee"}});
      }
    }
  }
  if (coffee) {
    m.fluents.insert("has-coffee");
    m.fluents.insert("delivered");
    m.goal = {"delivered"};
  } else {
    auto [gx, gy] = *map.find('G');
    m.goal = {cell(gx, gy)};
  }
  auto [sx, sy] = *map.find('S');
  m.init = {cell(sx, sy)};
  return planning::normalize_model(std::move(m));
}

std::optional<std::pair<int, int>> cell_after(const std::string& action) {
  auto numbers = [](const std::string& rest) {
    std::vector<int> out;
    std::istringstream in(rest);
    std::string part;
    while (std::getline(in, part, '-')) {
      try {
        std::size_t used = 0;
        int v = std::stoi(part, &used);
        if (used != part.size()) return std::vector<int>{};
        out.push_back(v);
      } catch (const std::exception&) {
        return std::vector<int>{};
      }
    }
    return out;
  };
  for (const std::string prefix : {"move-", "pick-coffee-", "deliver-"}) {
    if (action.rfind(prefix, 0) != 0) continue;
    auto v = numbers(action.substr(prefix.size()));
    if (prefix == "move-" && v.size() == 4) return std::make_pair(v[2], v[3]);
    if (prefix != "move-" && v.size() == 2) return std::make_pair(v[0], v[1]);
  }
  return std::nullopt;
}

}  // namespace trustplan::harness
