#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "krcbs/harness.hpp"

using namespace krcbs;

namespace {

void print_summary(const std::vector<RunRow>& rows) {
  std::cerr << "success rates (n, k, variant: solved/total)\n";
  for (const auto& [key, count] : success_rates(rows)) {
    std::fprintf(stderr, "  n=%d k=%d %-14s %d/%d (%.0f%%)\n", key.n, key.k, key.variant.c_str(), count.solved,
                 count.total, 100.0 * count.rate());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"k-robust multi-agent path finding benchmark runner"};
  std::string map_path;
  std::vector<std::string> scen_paths;
  std::string agents = "1";
  std::string ks = "1";
  std::string variants = "KCBS,KCBSH,KCBSH-RM,KCBSH-RM-C,KCBSH-RM-C-T";
  double time_limit = 10.0;
  std::uint64_t seed = 0;
  std::string out_format = "csv";
  std::string archetype;
  std::string output;
  bool no_timing = false;
  int random_count = 0;

  app.add_option("--map", map_path, "movingai .map file");
  app.add_option("--scen", scen_paths, "movingai .scen file (repeatable)");
  app.add_option("--agents", agents, "agent counts: a..b[:step] or a comma list");
  app.add_option("--k", ks, "robustness radii, comma separated");
  app.add_option("--variants", variants, "solver variants, comma separated");
  app.add_option("--time-limit", time_limit, "seconds per run");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--out", out_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--archetype", archetype, "rectangle:S, corridor:L[+siding] or target:D");
  app.add_option("--random", random_count, "run N random 6x6 instances with 2-3 agents");
  app.add_option("--output", output, "write rows here instead of stdout");
  app.add_flag("--no-timing", no_timing, "write '-' in the wall time column");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    BenchmarkOptions opts;
    opts.ks = parse_int_list(ks);
    opts.variants = parse_name_list(variants);
    opts.time_limit = time_limit;
    opts.seed = seed;
    opts.format = out_format == "json" ? OutputFormat::Json : OutputFormat::Csv;
    opts.timing = !no_timing;

    const int modes = !map_path.empty() + !archetype.empty() + (random_count > 0);
    if (modes != 1) throw UsageError("give exactly one of --map, --archetype or --random");

    std::unique_ptr<std::ofstream> file;
    if (!output.empty()) {
      file = std::make_unique<std::ofstream>(output);
      if (!*file) throw UsageError("cannot write " + output);
    }
    std::ostream& out = file ? *file : std::cout;

    std::vector<RunRow> rows;
    if (!map_path.empty()) {
      rows = run_benchmark(map_path, scen_paths, parse_agent_counts(agents), opts, out);
    } else if (!archetype.empty()) {
      rows = run_archetype(parse_archetype(archetype), opts, out);
    } else {
      RandomSuite suite;
      suite.count = random_count;
      rows = run_random_suite(suite, opts, out);
    }
    print_summary(rows);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
