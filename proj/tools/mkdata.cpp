// Writes a seeded random map plus scenario files in movingai format.
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "krcbs/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"random map and scenario generator"};
  int width = 32, height = 32, scens = 5, tasks = 25;
  double ratio = 0.1;
  std::uint64_t seed = 1;
  std::string dir = ".";
  std::string name = "random-32-32-10";
  app.add_option("--width", width);
  app.add_option("--height", height);
  app.add_option("--ratio", ratio);
  app.add_option("--scens", scens);
  app.add_option("--tasks", tasks);
  app.add_option("--seed", seed);
  app.add_option("--dir", dir);
  app.add_option("--name", name);
  CLI11_PARSE(app, argc, argv);

  auto map = krcbs::random_map(width, height, ratio, seed);
  std::ofstream(dir + "/" + name + ".map") << krcbs::render_map(map);
  for (int i = 1; i <= scens; ++i) {
    std::ofstream(dir + "/" + name + "-random-" + std::to_string(i) + ".scen")
        << krcbs::random_scen(map, name + ".map", tasks, seed * 1000 + static_cast<std::uint64_t>(i));
  }
  std::cout << "wrote " << name << " with " << scens << " scenarios\n";
  return 0;
}
