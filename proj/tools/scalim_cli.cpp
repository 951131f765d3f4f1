#include "scalim/errors.hpp"
#include "scalim/experiments.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <vector>

using namespace scalim;

namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> out;
  std::optional<long long> seed;
  std::optional<double> rel_tol;
  std::optional<int> s;
  std::optional<double> mass;
};

ExperimentConfig resolve(const Overrides &o) {
  ExperimentConfig cfg;
  if (!o.config.empty())
    load_config_file(cfg, o.config);
  if (o.out)
    cfg.out_dir = *o.out;
  if (o.seed) {
    if (*o.seed < 0)
      throw ConfigError("seed must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(*o.seed);
  }
  if (o.rel_tol)
    cfg.rel_tol = *o.rel_tol;
  if (o.s)
    cfg.s = *o.s;
  if (o.mass)
    cfg.m = *o.mass;
  cfg.validate();
  return cfg;
}

using Runner = std::function<ResultTable(const ExperimentConfig &)>;

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Scaling-limit and direct-integral experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  Overrides o;
  app.add_option("--config", o.config, "key = value configuration file");
  app.add_option("--out", o.out, "output directory");
  app.add_option("--seed", o.seed, "random seed");
  app.add_option("--rel-tol", o.rel_tol, "quadrature tolerance");
  app.add_option("--s", o.s, "spatial dimension")->check(CLI::IsMember({2, 3}));
  app.add_option("--mass", o.mass, "particle mass");

  const std::vector<std::pair<std::string, Runner>> runners = {
      {"limit-gap", run_limit_gap}, {"symm-check", run_symm_check},
      {"expansion", run_expansion}, {"bounds", run_bounds},
      {"dirint", run_dirint}};
  std::vector<CLI::App *> subs;
  for (const auto &[name, run] : runners)
    subs.push_back(app.add_subcommand(name, "run the " + name + " experiment"));
  CLI::App *all = app.add_subcommand("all", "run every experiment");

  CLI11_PARSE(app, argc, argv);

  try {
    const ExperimentConfig cfg = resolve(o);
    std::vector<ResultTable> tables;
    for (std::size_t i = 0; i < runners.size(); ++i)
      if (all->parsed() || subs[i]->parsed()) {
        std::fprintf(stderr, "running %s\n", runners[i].first.c_str());
        tables.push_back(runners[i].second(cfg));
      }
    bool pass = true;
    for (const auto &t : tables) {
      write_csv(t, cfg.out_dir);
      std::size_t failed = 0;
      for (const auto &r : t.rows)
        failed += !r.pass;
      std::printf("%-12s %4zu rows  %s\n", t.name.c_str(), t.rows.size(),
                  failed ? ("FAIL (" + std::to_string(failed) + ")").c_str()
                         : "PASS");
      pass = pass && failed == 0;
    }
    write_summary(tables, cfg, cfg.out_dir);
    write_schema(cfg.out_dir);
    std::printf("config %s  output %s\n", cfg.hash().c_str(), cfg.out_dir.c_str());
    return pass ? 0 : 1;
  } catch (const Error &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
