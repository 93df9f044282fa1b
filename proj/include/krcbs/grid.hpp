#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace krcbs {

struct Cell {
  int x = 0;
  int y = 0;

  friend constexpr bool operator==(Cell, Cell) = default;
  friend constexpr auto operator<=>(Cell, Cell) = default;
};

constexpr int manhattan(Cell a, Cell b) noexcept {
  return (a.x > b.x ? a.x - b.x : b.x - a.x) + (a.y > b.y ? a.y - b.y : b.y - a.y);
}

std::string to_string(Cell c);

struct CellHash {
  std::size_t operator()(Cell c) const noexcept {
    return std::hash<std::uint64_t>{}((static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.x)) << 32) |
                                      static_cast<std::uint32_t>(c.y));
  }
};

// Move offsets in the fixed expansion order used everywhere: Up, Right, Down, Left.
// Row 0 is the top of the map, so Up decreases y.
inline constexpr std::array<Cell, 4> kMoves{{{0, -1}, {1, 0}, {0, 1}, {-1, 0}}};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& message);
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class GridMap {
 public:
  GridMap(int width, int height, std::vector<std::uint8_t> passable);

  static GridMap open(int width, int height);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int size() const noexcept { return width_ * height_; }

  bool in_bounds(Cell c) const noexcept { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }
  bool passable(Cell c) const noexcept { return in_bounds(c) && passable_[index(c)] != 0; }
  bool passable(int idx) const noexcept { return passable_[static_cast<std::size_t>(idx)] != 0; }
  void set_passable(Cell c, bool value);

  int index(Cell c) const noexcept { return c.y * width_ + c.x; }
  Cell cell(int idx) const noexcept { return {idx % width_, idx / width_}; }

  /// Passable 4-neighbours of `c` in Up, Right, Down, Left order. The cell itself is never included.
  std::vector<Cell> neighbors(Cell c) const;
  int degree(Cell c) const;
  int passable_count() const;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> passable_;
};

struct AgentTask {
  int id = 0;
  Cell start;
  Cell goal;
};

struct Instance {
  GridMap map;
  std::vector<AgentTask> tasks;
  int k = 0;
  std::string name;

  int num_agents() const noexcept { return static_cast<int>(tasks.size()); }
};

/// Parses a movingai `.map` file. `.` and `G` are passable; `@`, `T` and `O` are blocked.
GridMap parse_map(std::string_view text);
std::string render_map(const GridMap& map);

/// Parses a movingai `.scen` file against `map`. The optimal-length column is read and discarded.
std::vector<AgentTask> parse_scen(std::string_view text, const GridMap& map);

/// Builds an instance, rejecting duplicate starts/goals and unreachable goals.
Instance make_instance(GridMap map, std::vector<AgentTask> tasks, int k, std::string name = {});

std::string read_text_file(const std::filesystem::path& path);

}  // namespace krcbs
