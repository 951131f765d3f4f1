#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace scalim {

/// Every knob of the experiment runs. Defaults reproduce the acceptance
/// panels.
struct ExperimentConfig {
  int s = 3;
  double m = 1.0;
  double rel_tol = 1e-8;
  std::uint64_t seed = 20240601;
  std::string out_dir = "scalim_out";

  // Gaussian test function used by the vacuum and symmetry runs.
  double f_width = 1.0;
  double f_amp_re = 1.0;
  double f_amp_im = 0.5;

  std::vector<double> lambda_grid{1.0, 0.1, 0.01, 0.001};
  std::vector<double> mass_grid{1.0, 0.1, 0.01, 0.001};
  double time_shift = 1.0;
  std::vector<double> dilation_grid{0.1, 0.5, 2.0, 10.0};

  // Short-distance expansion.
  double expansion_width = 0.15;
  double expansion_beta = 4.0;
  int n_max = 3;
  int nu_cap = 2;
  int coherent_n = 8;
  std::uint64_t budget = 1'000'000;

  // Norm bounds: fitting and hold-out panels.
  double r0 = 1.0;
  std::vector<double> fit_beta{0.5, 4.0};
  std::vector<double> holdout_beta{1.0, 2.0};
  std::vector<double> fit_r{0.1, 1.0};
  std::vector<double> holdout_r{0.3, 0.6};
  std::vector<double> fit_energy{1.0, 8.0};
  std::vector<double> holdout_energy{2.0, 4.0};
  int bound_n_max = 3;
  double nuclearity_ratio = 0.1; // 6 r / beta
  double nuclearity_beta = 2.0;
  int nuclearity_n = 4;
  std::vector<double> scale_grid{0.125, 0.25, 0.5, 0.75, 1.0, 2.0};

  int dirint_trials = 100;

  /// Throws ConfigError on empty grids, out-of-range values or caps beyond
  /// the combinatorial budget.
  void validate() const;
  /// Canonical key=value listing (sorted by key).
  std::map<std::string, std::string> to_map() const;
  /// FNV-1a hash of the canonical listing, as 16 hex digits.
  std::string hash() const;
};

/// Sets one key from its textual value. Throws ConfigError on unknown keys
/// or malformed values.
void apply_setting(ExperimentConfig &cfg, const std::string &key,
                   const std::string &value);

/// Reads "key = value" lines ('#' starts a comment) on top of cfg.
void load_config_file(ExperimentConfig &cfg, const std::string &path);

struct ResultRow {
  std::string experiment;
  std::string param_json; // includes "config_hash"
  double value = 0.0;
  double tol = 0.0;
  bool pass = false; // value <= tol
};

struct ResultTable {
  std::string name;
  std::string config_hash;
  std::vector<ResultRow> rows;
  std::map<std::string, double> constants;
  std::vector<std::string> notes;

  /// Appends a row; params must be a JSON object text (or empty).
  void add(const std::string &experiment, const std::string &params,
           double value, double tol);
  bool all_pass() const;
};

ResultTable run_limit_gap(const ExperimentConfig &cfg);
ResultTable run_symm_check(const ExperimentConfig &cfg);
ResultTable run_expansion(const ExperimentConfig &cfg);
ResultTable run_bounds(const ExperimentConfig &cfg);
ResultTable run_dirint(const ExperimentConfig &cfg);

/// Writes <dir>/<name>.csv with columns experiment,param_json,value,tol,pass.
void write_csv(const ResultTable &t, const std::string &dir);
/// Writes <dir>/summary.json with the config, hash, constants and verdicts.
void write_summary(const std::vector<ResultTable> &tables,
                   const ExperimentConfig &cfg, const std::string &dir);
/// Writes <dir>/schema.json describing the CSV and summary columns.
void write_schema(const std::string &dir);

} // namespace scalim
