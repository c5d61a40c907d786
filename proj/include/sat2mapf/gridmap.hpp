#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <istream>
#include <optional>
#include <sstream>
#include <span>
#include <string>
#include <vector>

#include "sat2mapf/error.hpp"

namespace sat2mapf {

struct Cell {
  int row = 0;
  int col = 0;

  auto operator<=>(const Cell&) const = default;
};

inline std::string to_string(Cell c) { return std::to_string(c.row) + "," + std::to_string(c.col); }

// Fixed neighbor order: right, down, up, left. Every search in the project
// expands in this order so witnesses and explored-counts are reproducible.
inline constexpr std::array<Cell, 4> kDirections{{{0, 1}, {1, 0}, {-1, 0}, {0, -1}}};

// 4-connected grid of passable / obstacle cells.
class GridMap {
 public:
  GridMap() = default;
  GridMap(int height, int width, bool passable = true)
      : height_(height), width_(width), pass_(static_cast<size_t>(height) * width, passable ? 1 : 0) {
    if (height < 1 || width < 1) fail(Errc::bad_header, "map dimensions must be positive");
  }

  static GridMap solid(int height, int width) { return GridMap(height, width, false); }

  int height() const { return height_; }
  int width() const { return width_; }
  int num_cells() const { return height_ * width_; }

  bool in_bounds(Cell c) const { return c.row >= 0 && c.row < height_ && c.col >= 0 && c.col < width_; }

  bool passable(Cell c) const { return in_bounds(c) && pass_[index(c)] != 0; }

  void set_passable(Cell c, bool open) {
    if (!in_bounds(c)) fail(Errc::out_of_bounds, "cell " + to_string(c) + " outside map");
    pass_[index(c)] = open ? 1 : 0;
  }

  int open_cells() const {
    int n = 0;
    for (char p : pass_) n += p != 0;
    return n;
  }

  size_t index(Cell c) const { return static_cast<size_t>(c.row) * width_ + c.col; }

  bool operator==(const GridMap&) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<char> pass_;
};

// Exact shortest-path distances from one source; unreachable is explicit.
class DistanceField {
 public:
  DistanceField(Cell source, int height, int width)
      : source_(source), height_(height), width_(width),
        dist_(static_cast<size_t>(height) * width, kUnreachable) {}

  Cell source() const { return source_; }

  std::optional<int> at(Cell c) const {
    if (c.row < 0 || c.row >= height_ || c.col < 0 || c.col >= width_) return std::nullopt;
    const std::int32_t d = dist_[static_cast<size_t>(c.row) * width_ + c.col];
    if (d == kUnreachable) return std::nullopt;
    return d;
  }

  void set(Cell c, std::int32_t d) { dist_[static_cast<size_t>(c.row) * width_ + c.col] = d; }

 private:
  static constexpr std::int32_t kUnreachable = -1;
  Cell source_;
  int height_ = 0;
  int width_ = 0;
  std::vector<std::int32_t> dist_;
};

inline DistanceField bfs_distances(const GridMap& map, Cell source) {
  if (!map.in_bounds(source)) fail(Errc::out_of_bounds, "source " + to_string(source) + " outside map");
  if (!map.passable(source)) fail(Errc::source_blocked, "source " + to_string(source) + " is an obstacle");
  DistanceField field(source, map.height(), map.width());
  field.set(source, 0);
  std::deque<std::pair<Cell, std::int32_t>> queue{{source, 0}};
  while (!queue.empty()) {
    auto [cur, d] = queue.front();
    queue.pop_front();
    for (Cell dir : kDirections) {
      Cell next{cur.row + dir.row, cur.col + dir.col};
      if (!map.passable(next) || field.at(next)) continue;
      field.set(next, d + 1);
      queue.emplace_back(next, d + 1);
    }
  }
  return field;
}

// Shortest s->t path avoiding `blocked`, or nullopt if disconnected.
// Tie-breaking follows kDirections, so the returned path is deterministic.
inline std::optional<std::vector<Cell>> constrained_shortest_path(const GridMap& map,
                                                                  std::span<const Cell> blocked,
                                                                  Cell s, Cell t) {
  if (!map.passable(s) || !map.passable(t))
    fail(Errc::endpoint_blocked, "endpoint " + to_string(map.passable(s) ? t : s) + " not passable");
  std::vector<char> closed(static_cast<size_t>(map.num_cells()), 0);
  for (Cell b : blocked) {
    if (!map.in_bounds(b)) continue;
    closed[map.index(b)] = 1;
  }
  if (closed[map.index(s)] || closed[map.index(t)])
    fail(Errc::endpoint_blocked, "endpoint inside blocked set");

  std::vector<std::int32_t> parent(static_cast<size_t>(map.num_cells()), -1);
  parent[map.index(s)] = static_cast<std::int32_t>(map.index(s));
  std::deque<Cell> queue{s};
  while (!queue.empty()) {
    Cell cur = queue.front();
    queue.pop_front();
    if (cur == t) break;
    for (Cell dir : kDirections) {
      Cell next{cur.row + dir.row, cur.col + dir.col};
      if (!map.passable(next)) continue;
      const size_t ni = map.index(next);
      if (closed[ni] || parent[ni] >= 0) continue;
      parent[ni] = static_cast<std::int32_t>(map.index(cur));
      queue.push_back(next);
    }
  }
  if (parent[map.index(t)] < 0) return std::nullopt;
  std::vector<Cell> path;
  Cell cur = t;
  while (true) {
    path.push_back(cur);
    const size_t i = map.index(cur);
    if (static_cast<size_t>(parent[i]) == i) break;
    const auto pi = static_cast<size_t>(parent[i]);
    cur = Cell{static_cast<int>(pi) / map.width(), static_cast<int>(pi) % map.width()};
  }
  std::reverse(path.begin(), path.end());
  return path;
}

inline std::optional<int> constrained_shortest_len(const GridMap& map, std::span<const Cell> blocked,
                                                   Cell s, Cell t) {
  auto path = constrained_shortest_path(map, blocked, s, t);
  if (!path) return std::nullopt;
  return static_cast<int>(path->size()) - 1;
}

// MovingAI map format, bit-exact: `type octile`, `height H`, `width W`, `map`,
// then H rows of W characters from {., @}. The octile token is retained for
// benchmark compatibility; only 4-neighbor motion is ever generated.
inline GridMap read_map(std::istream& in) {
  std::string line;
  auto expect_line = [&](const std::string& what) {
    if (!std::getline(in, line)) fail(Errc::bad_header, "unexpected end of map header, expected " + what);
    return line;
  };
  if (expect_line("type") != "type octile") fail(Errc::bad_header, "expected `type octile`, got: " + line);
  long long height = -1, width = -1;
  {
    std::istringstream hs(expect_line("height"));
    std::string key;
    hs >> key >> height;
    if (key != "height" || hs.fail() || height < 1) fail(Errc::bad_header, "bad height line: " + line);
  }
  {
    std::istringstream ws(expect_line("width"));
    std::string key;
    ws >> key >> width;
    if (key != "width" || ws.fail() || width < 1) fail(Errc::bad_header, "bad width line: " + line);
  }
  if (expect_line("map") != "map") fail(Errc::bad_header, "expected `map`, got: " + line);

  GridMap map(static_cast<int>(height), static_cast<int>(width));
  for (int r = 0; r < height; ++r) {
    if (!std::getline(in, line)) fail(Errc::ragged_rows, "missing map row " + std::to_string(r));
    if (static_cast<long long>(line.size()) != width)
      fail(Errc::ragged_rows, "row " + std::to_string(r) + " has length " + std::to_string(line.size()));
    for (int c = 0; c < width; ++c) {
      if (line[static_cast<size_t>(c)] == '.') {
        map.set_passable({r, c}, true);
      } else if (line[static_cast<size_t>(c)] == '@') {
        map.set_passable({r, c}, false);
      } else {
        fail(Errc::illegal_character, std::string("map character `") + line[static_cast<size_t>(c)] + "`");
      }
    }
  }
  return map;
}

inline GridMap read_map(std::string_view text) {
  std::istringstream in{std::string(text)};
  return read_map(in);
}

inline std::string write_map(const GridMap& map) {
  std::ostringstream out;
  out << "type octile\nheight " << map.height() << "\nwidth " << map.width() << "\nmap\n";
  for (int r = 0; r < map.height(); ++r) {
    for (int c = 0; c < map.width(); ++c) out << (map.passable({r, c}) ? '.' : '@');
    out << '\n';
  }
  return out.str();
}

}  // namespace sat2mapf

template <>
struct std::hash<sat2mapf::Cell> {
  size_t operator()(const sat2mapf::Cell& c) const {
    return std::hash<long long>()((static_cast<long long>(c.row) << 32) ^ static_cast<unsigned>(c.col));
  }
};
