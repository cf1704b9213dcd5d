#pragma once

#include "table.hpp"

#include "dirac/basis.hpp"
#include "dirac/eriksen.hpp"
#include "dirac/matelem.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dirac::cli {

enum ExitCode { kOk = 0, kIoError = 1, kConfigError = 2, kInvariantBreach = 3, kNumericalFailure = 4 };

struct SeedSpec {
  std::string name;  // 1S1/2, 2P1/2, 2P3/2
  hydrogenic::QuantumNumbers q;
  eriksen::NonrelState nonrel = eriksen::NonrelState::S1;
};
// Accepts the three seed names (case-insensitive, "_" for "/"); throws ConfigError.
SeedSpec parse_seed(const std::string& name);

struct RunConfig {
  int Z = 92;
  std::optional<double> z_effective;
  std::string seed = "1S1/2";
  std::string preset = "desk";
  basis::BasisConfig basis = basis::BasisConfig::desk();
  std::string method = "both";  // eriksen, fw, both
  std::string out_dir;          // empty: nothing written
  std::string format = "csv";   // csv, json
  int threads = 1;
  matelem::BinRule bin_rule = matelem::BinRule::Midpoint;
  eriksen::NormForm norm_form = eriksen::NormForm::Squared;
  double r_cut = 0.01;
  bool radial = true;  // synthesis, norms, radial.csv
  bool unitarity = false;
  int offdiag_sample = 0;  // continuum-continuum quadrature probes
  double sum_tol = 1e-3;
  std::string cache_dir;  // radial sample cache; DIRAC_CACHE_DIR by default

  // Preset defaults for the basis; overrides are applied afterwards by the caller.
  static basis::BasisConfig preset_basis(const std::string& preset);
  double z_eff() const { return z_effective ? *z_effective : double(Z); }
  std::vector<eriksen::Method> methods() const;
  void validate() const;  // throws ConfigError
  nlohmann::json to_json() const;
};

struct Invariant {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool ok = true;
};

struct MethodReport {
  eriksen::Method method = eriksen::Method::Eriksen;
  Eigen::VectorXd amplitudes;
  eriksen::Aggregates aggregates;
  bool has_norms = false;
  eriksen::Norms norms;
  double peak_negative_energy = 0.0;  // argmax of |A|^2 over the negative block
};

struct RunReport {
  RunConfig config;
  std::string seed_label;
  basis::BlockLayout layout;
  std::vector<std::pair<std::string, double>> beta_seed_bound;  // label, <seed|beta|n>
  std::vector<MethodReport> methods;
  std::vector<Invariant> invariants;
  std::vector<std::pair<std::string, double>> timings;  // seconds
  double min_shifted_eigenvalue = 0.0;
  double commutator = 0.0;
  std::optional<std::pair<double, double>> unitarity;  // min, max singular value
  int offdiag_count = 0;
  double offdiag_max = 0.0;
  double offdiag_rms = 0.0;

  const MethodReport* find(eriksen::Method m) const;
  bool ok() const;
  int exit_code() const { return ok() ? kOk : kInvariantBreach; }
  nlohmann::json summary() const;
};

// basis -> beta -> S, Z -> amplitudes -> synthesis; writes the output files
// when config.out_dir is set. Computation errors propagate as exceptions.
RunReport run_pipeline(const RunConfig& config);

struct SweepRow {
  int Z = 0;
  std::string status;  // "ok", "invariant", or the error message
  int exit_code = kOk;
  std::optional<RunReport> report;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  int exit_code() const;  // worst per-Z code
  Table aggregates() const;
  Table beta_bound() const;  // one row of seed-bound elements per Z
  Table norms() const;
  nlohmann::json summary() const;
};

// One run per Z with the base config (out_dir ignored); failures are recorded per Z.
SweepResult sweep(const RunConfig& base, const std::vector<int>& Z_list);
void write_sweep(const SweepResult& s, const std::string& dir, const std::string& format);

// Maps an exception from the pipeline to an exit code.
int exit_code_for(const std::exception& e);

}  // namespace dirac::cli
