#include "krcbs/grid.hpp"

#include <charconv>
#include <fstream>
#include <queue>
#include <sstream>
#include <unordered_set>

namespace krcbs {

std::string to_string(Cell c) { return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")"; }

ParseError::ParseError(int line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

GridMap::GridMap(int width, int height, std::vector<std::uint8_t> passable)
    : width_(width), height_(height), passable_(std::move(passable)) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("grid dimensions must be positive");
  if (passable_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw std::invalid_argument("passable grid size does not match width x height");
}

GridMap GridMap::open(int width, int height) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("grid dimensions must be positive");
  return GridMap(width, height, std::vector<std::uint8_t>(static_cast<std::size_t>(width * height), 1));
}

void GridMap::set_passable(Cell c, bool value) {
  if (!in_bounds(c)) throw std::out_of_range("cell " + to_string(c) + " outside map");
  passable_[static_cast<std::size_t>(index(c))] = value ? 1 : 0;
}

std::vector<Cell> GridMap::neighbors(Cell c) const {
  std::vector<Cell> out;
  out.reserve(4);
  for (Cell m : kMoves) {
    Cell n{c.x + m.x, c.y + m.y};
    if (passable(n)) out.push_back(n);
  }
  return out;
}

int GridMap::degree(Cell c) const {
  int d = 0;
  for (Cell m : kMoves)
    if (passable(Cell{c.x + m.x, c.y + m.y})) ++d;
  return d;
}

int GridMap::passable_count() const {
  int n = 0;
  for (auto p : passable_) n += p != 0;
  return n;
}

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = end + 1;
  }
  return lines;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

bool parse_int(std::string_view s, int& out) {
  s = trim(s);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

bool parse_header_value(std::string_view line, std::string_view key, int& value) {
  line = trim(line);
  if (line.substr(0, key.size()) != key) return false;
  std::string_view rest = line.substr(key.size());
  if (rest.empty() || (rest.front() != ' ' && rest.front() != '\t')) return false;
  return parse_int(rest, value);
}

}  // namespace

GridMap parse_map(std::string_view text) {
  auto lines = split_lines(text);
  if (lines.empty() || trim(lines[0]).substr(0, 4) != "type") throw ParseError(1, "expected 'type <name>' header");

  int height = -1;
  int width = -1;
  std::size_t row = 1;
  for (; row < lines.size(); ++row) {
    std::string_view line = trim(lines[row]);
    int value = 0;
    if (line == "map") break;
    if (parse_header_value(line, "height", value)) {
      height = value;
    } else if (parse_header_value(line, "width", value)) {
      width = value;
    } else {
      throw ParseError(static_cast<int>(row) + 1, "malformed header line '" + std::string(line) + "'");
    }
  }
  if (row >= lines.size()) throw ParseError(static_cast<int>(row) + 1, "missing 'map' line");
  if (height <= 0) throw ParseError(static_cast<int>(row) + 1, "missing or non-positive height");
  if (width <= 0) throw ParseError(static_cast<int>(row) + 1, "missing or non-positive width");

  std::vector<std::uint8_t> passable(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
  std::size_t first = row + 1;
  // Trailing blank lines are tolerated; anything else past the last row is an error.
  std::size_t last = lines.size();
  while (last > first && trim(lines[last - 1]).empty()) --last;
  std::size_t rows_found = last - first;
  if (rows_found != static_cast<std::size_t>(height)) {
    int at = static_cast<int>(first + std::min(rows_found, static_cast<std::size_t>(height))) + 1;
    throw ParseError(at, "expected " + std::to_string(height) + " map rows, found " + std::to_string(rows_found));
  }
  for (int y = 0; y < height; ++y) {
    std::string_view line = lines[first + static_cast<std::size_t>(y)];
    int line_no = static_cast<int>(first) + y + 1;
    if (line.size() != static_cast<std::size_t>(width))
      throw ParseError(line_no, "expected " + std::to_string(width) + " cells, found " + std::to_string(line.size()));
    for (int x = 0; x < width; ++x) {
      char ch = line[static_cast<std::size_t>(x)];
      std::uint8_t open = 0;
      switch (ch) {
        case '.':
        case 'G':
          open = 1;
          break;
        case '@':
        case 'T':
        case 'O':
          open = 0;
          break;
        default:
          throw ParseError(line_no, std::string("unknown cell character '") + ch + "'");
      }
      passable[static_cast<std::size_t>(y * width + x)] = open;
    }
  }
  return GridMap(width, height, std::move(passable));
}

std::string render_map(const GridMap& map) {
  std::string out = "type octile\nheight " + std::to_string(map.height()) + "\nwidth " + std::to_string(map.width()) +
                    "\nmap\n";
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) out += map.passable(Cell{x, y}) ? '.' : '@';
    out += '\n';
  }
  return out;
}

std::vector<AgentTask> parse_scen(std::string_view text, const GridMap& map) {
  auto lines = split_lines(text);
  if (lines.empty() || trim(lines[0]).substr(0, 7) != "version") throw ParseError(1, "expected 'version' line");

  std::vector<AgentTask> tasks;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    int line_no = static_cast<int>(i) + 1;
    if (trim(line).empty()) continue;

    std::vector<std::string_view> fields;
    const bool tabbed = line.find('\t') != std::string_view::npos;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      std::size_t end = tabbed ? line.find('\t', pos) : line.find_first_of(" \t", pos);
      if (end == std::string_view::npos) end = line.size();
      std::string_view field = line.substr(pos, end - pos);
      if (tabbed || !field.empty()) fields.push_back(field);
      pos = end + 1;
    }
    if (fields.size() != 9) throw ParseError(line_no, "expected 9 fields, found " + std::to_string(fields.size()));

    int w = 0, h = 0, sx = 0, sy = 0, gx = 0, gy = 0;
    if (!parse_int(fields[2], w) || !parse_int(fields[3], h) || !parse_int(fields[4], sx) ||
        !parse_int(fields[5], sy) || !parse_int(fields[6], gx) || !parse_int(fields[7], gy))
      throw ParseError(line_no, "non-integer coordinate field");
    if (w != map.width() || h != map.height())
      throw ParseError(line_no, "scenario size " + std::to_string(w) + "x" + std::to_string(h) +
                                    " does not match map " + std::to_string(map.width()) + "x" +
                                    std::to_string(map.height()));
    Cell start{sx, sy};
    Cell goal{gx, gy};
    if (!map.in_bounds(start) || !map.in_bounds(goal)) throw ParseError(line_no, "coordinate out of bounds");
    if (!map.passable(start)) throw ParseError(line_no, "start " + to_string(start) + " is blocked");
    if (!map.passable(goal)) throw ParseError(line_no, "goal " + to_string(goal) + " is blocked");
    tasks.push_back(AgentTask{static_cast<int>(tasks.size()), start, goal});
  }
  return tasks;
}

Instance make_instance(GridMap map, std::vector<AgentTask> tasks, int k, std::string name) {
  if (k < 0) throw std::invalid_argument("robustness radius k must be non-negative");
  std::unordered_set<Cell, CellHash> starts;
  std::unordered_set<Cell, CellHash> goals;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    auto& t = tasks[i];
    t.id = static_cast<int>(i);
    if (!map.passable(t.start) || !map.passable(t.goal))
      throw std::invalid_argument("agent " + std::to_string(i) + " has a blocked start or goal");
    if (!starts.insert(t.start).second)
      throw std::invalid_argument("duplicate start cell " + to_string(t.start));
    if (!goals.insert(t.goal).second) throw std::invalid_argument("duplicate goal cell " + to_string(t.goal));
  }

  // Connected-component labels decide reachability for every agent at once.
  std::vector<int> component(static_cast<std::size_t>(map.size()), -1);
  int label = 0;
  for (int idx = 0; idx < map.size(); ++idx) {
    if (!map.passable(idx) || component[static_cast<std::size_t>(idx)] >= 0) continue;
    std::queue<int> q;
    q.push(idx);
    component[static_cast<std::size_t>(idx)] = label;
    while (!q.empty()) {
      Cell c = map.cell(q.front());
      q.pop();
      for (Cell n : map.neighbors(c)) {
        int ni = map.index(n);
        if (component[static_cast<std::size_t>(ni)] < 0) {
          component[static_cast<std::size_t>(ni)] = label;
          q.push(ni);
        }
      }
    }
    ++label;
  }
  for (const auto& t : tasks) {
    if (component[static_cast<std::size_t>(map.index(t.start))] != component[static_cast<std::size_t>(map.index(t.goal))])
      throw std::invalid_argument("agent " + std::to_string(t.id) + " cannot reach its goal");
  }
  return Instance{std::move(map), std::move(tasks), k, std::move(name)};
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace krcbs
