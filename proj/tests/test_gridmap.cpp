#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "sat2mapf/formula_gen.hpp"
#include "sat2mapf/gridmap.hpp"

using namespace sat2mapf;

namespace {

GridMap open3x3() { return GridMap(3, 3); }

GridMap random_map(std::mt19937& rng, int h, int w) {
  GridMap map(h, w);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      if (rng_below(rng, 4) == 0) map.set_passable({r, c}, false);
  return map;
}

// Brute-force shortest path by exhaustive simple-path DFS; independent of the
// BFS under test. Small maps only.
int exhaustive_shortest(const GridMap& map, const std::set<Cell>& blocked, Cell s, Cell t) {
  int best = -1;
  std::set<Cell> on_path{s};
  auto dfs = [&](auto&& self, Cell cur, int len) -> void {
    if (best >= 0 && len >= best) return;
    if (cur == t) {
      best = len;
      return;
    }
    for (Cell d : kDirections) {
      Cell next{cur.row + d.row, cur.col + d.col};
      if (!map.passable(next) || blocked.count(next) || on_path.count(next)) continue;
      on_path.insert(next);
      self(self, next, len + 1);
      on_path.erase(next);
    }
  };
  dfs(dfs, s, 0);
  return best;
}

}  // namespace

TEST_CASE("bfs on open 3x3") {
  const auto field = bfs_distances(open3x3(), {0, 0});
  CHECK(field.at({0, 0}) == 0);
  CHECK(field.at({2, 2}) == 4);
  CHECK(field.at({1, 2}) == 3);
}

TEST_CASE("bfs detours around a center obstacle") {
  GridMap map = open3x3();
  map.set_passable({1, 1}, false);
  const auto field = bfs_distances(map, {0, 0});
  CHECK(field.at({2, 2}) == 4);
  CHECK_FALSE(field.at({1, 1}).has_value());
}

TEST_CASE("bfs reports unreachable cells") {
  GridMap map(1, 3);
  map.set_passable({0, 1}, false);
  const auto field = bfs_distances(map, {0, 0});
  CHECK_FALSE(field.at({0, 2}).has_value());
  CHECK_FALSE(field.at({5, 5}).has_value());
}

TEST_CASE("bfs error paths") {
  GridMap map = open3x3();
  map.set_passable({1, 1}, false);
  CHECK_THROWS_AS(bfs_distances(map, {1, 1}), Error);
  CHECK_THROWS_AS(bfs_distances(map, {9, 9}), Error);
}

TEST_CASE("constrained length without blocks equals bfs") {
  std::mt19937 rng(3);
  for (int i = 0; i < 50; ++i) {
    const GridMap map = random_map(rng, 1 + rng_below(rng, 4), 1 + rng_below(rng, 5));
    for (int r1 = 0; r1 < map.height(); ++r1)
      for (int c1 = 0; c1 < map.width(); ++c1) {
        if (!map.passable({r1, c1})) continue;
        const auto field = bfs_distances(map, {r1, c1});
        for (int r2 = 0; r2 < map.height(); ++r2)
          for (int c2 = 0; c2 < map.width(); ++c2) {
            if (!map.passable({r2, c2})) continue;
            const auto len = constrained_shortest_len(map, {}, {r1, c1}, {r2, c2});
            const auto direct = field.at({r2, c2});
            CHECK(len.has_value() == direct.has_value());
            if (len && direct) CHECK(*len == *direct);
          }
      }
  }
}

TEST_CASE("blocked corridor has no bypass in one row") {
  const GridMap map(1, 5);
  const std::vector<Cell> blocked{{0, 2}};
  CHECK_FALSE(constrained_shortest_len(map, blocked, {0, 0}, {0, 4}).has_value());
}

TEST_CASE("single mid-row block on a 3-row map costs +2") {
  const GridMap map(3, 5);
  const Cell s{1, 0}, t{1, 4};
  const std::vector<Cell> blocked{{1, 2}};
  const auto len = constrained_shortest_len(map, blocked, s, t);
  REQUIRE(len.has_value());
  CHECK(*len == 6);  // manhattan 4 plus 2
  CHECK(*len == exhaustive_shortest(map, {{1, 2}}, s, t));
}

TEST_CASE("constrained endpoints may not be blocked") {
  const GridMap map(3, 3);
  const std::vector<Cell> blocked{{0, 0}};
  CHECK_THROWS_AS(constrained_shortest_len(map, blocked, {0, 0}, {2, 2}), Error);
}

TEST_CASE("constrained length agrees with exhaustive search on random maps") {
  std::mt19937 rng(17);
  for (int i = 0; i < 60; ++i) {
    const GridMap map = random_map(rng, 3, 4);
    std::set<Cell> blocked;
    if (rng_below(rng, 2) == 0) blocked.insert({rng_below(rng, 3), rng_below(rng, 4)});
    std::vector<Cell> open_cells;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 4; ++c)
        if (map.passable({r, c}) && !blocked.count({r, c})) open_cells.push_back({r, c});
    if (open_cells.size() < 2) continue;
    const Cell s = open_cells.front(), t = open_cells.back();
    const std::vector<Cell> blocked_list(blocked.begin(), blocked.end());
    const auto len = constrained_shortest_len(map, blocked_list, s, t);
    const int expected = exhaustive_shortest(map, blocked, s, t);
    if (expected < 0) {
      CHECK_FALSE(len.has_value());
    } else {
      REQUIRE(len.has_value());
      CHECK(*len == expected);
    }
  }
}

TEST_CASE("triangle inequality on random maps") {
  std::mt19937 rng(23);
  for (int i = 0; i < 20; ++i) {
    const GridMap map = random_map(rng, 4, 4);
    std::vector<Cell> cells;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c)
        if (map.passable({r, c})) cells.push_back({r, c});
    for (Cell u : cells) {
      const auto du = bfs_distances(map, u);
      for (Cell v : cells) {
        if (!du.at(v)) continue;
        const auto dv = bfs_distances(map, v);
        for (Cell w : cells) {
          if (!du.at(w) || !dv.at(w)) continue;
          CHECK(*du.at(w) <= *du.at(v) + *dv.at(w));
        }
      }
    }
  }
}

TEST_CASE("adding a blocked cell never shortens a path") {
  std::mt19937 rng(29);
  for (int i = 0; i < 50; ++i) {
    const GridMap map = random_map(rng, 3, 5);
    std::vector<Cell> cells;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 5; ++c)
        if (map.passable({r, c})) cells.push_back({r, c});
    if (cells.size() < 3) continue;
    const Cell s = cells[0], t = cells[cells.size() - 1];
    const Cell extra = cells[cells.size() / 2];
    if (extra == s || extra == t) continue;
    const auto base = constrained_shortest_len(map, {}, s, t);
    const std::vector<Cell> blocked{extra};
    const auto constrained = constrained_shortest_len(map, blocked, s, t);
    if (constrained) {
      REQUIRE(base.has_value());
      CHECK(*base <= *constrained);
    }
  }
}

TEST_CASE("map format round trip") {
  const char* text = "type octile\nheight 1\nwidth 2\nmap\n.@\n";
  const GridMap map = read_map(text);
  REQUIRE(map.height() == 1);
  REQUIRE(map.width() == 2);
  CHECK(map.passable({0, 0}));
  CHECK_FALSE(map.passable({0, 1}));
  CHECK(write_map(map) == text);

  std::mt19937 rng(31);
  for (int i = 0; i < 30; ++i) {
    const GridMap m = random_map(rng, 1 + rng_below(rng, 5), 1 + rng_below(rng, 6));
    CHECK(read_map(write_map(m)) == m);
  }
}

TEST_CASE("map format errors") {
  auto code_of = [](const char* text) {
    try {
      read_map(text);
    } catch (const Error& e) {
      return e.code();
    }
    FAIL("expected map error");
    return Errc::bad_format;
  };
  CHECK(code_of("type tile\nheight 1\nwidth 1\nmap\n.\n") == Errc::bad_header);
  CHECK(code_of("type octile\nheight 0\nwidth 1\nmap\n") == Errc::bad_header);
  CHECK(code_of("type octile\nheight 1\nwidth 3\nmap\n..\n") == Errc::ragged_rows);
  CHECK(code_of("type octile\nheight 2\nwidth 1\nmap\n.\n") == Errc::ragged_rows);
  CHECK(code_of("type octile\nheight 1\nwidth 1\nmap\nT\n") == Errc::illegal_character);
}
