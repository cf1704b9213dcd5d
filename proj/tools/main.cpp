#include "pipeline.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>

using namespace dirac;
using dirac::cli::RunConfig;

namespace {

std::vector<int> parse_z_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    size_t used = 0;
    int z = 0;
    try {
      z = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw hydrogenic::ConfigError("bad entry '" + item + "' in Z list");
    out.push_back(z);
  }
  return out;
}

void print_run(const cli::RunReport& rep) {
  for (const auto& m : rep.methods) {
    const auto& a = m.aggregates;
    std::cout << eriksen::method_name(m.method) << ": P_seed " << a.p_seed << "  P_rest " << a.p_bound_rest << "  P+ "
              << a.p_plus << "  P- " << a.p_minus << "  total " << a.total;
    if (m.has_norms) std::cout << "  N_rUg " << m.norms.rUg << "  N_rUf " << m.norms.rUf;
    std::cout << '\n';
  }
  for (const auto& i : rep.invariants)
    if (!i.ok) std::cerr << "invariant breach: " << i.name << " = " << i.value << " (limit " << i.limit << ")\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Eriksen transformation of Dirac hydrogen-like bound states"};
  RunConfig cfg;
  std::optional<int> n_bound, n_pos, n_neg, gl_nodes;
  std::optional<double> dp, p_lower, r_min, r_log_end, r_max, step_fraction;
  std::string convention, bin_rule = "midpoint", norm_form = "squared", z_list;
  bool no_radial = false;
  bool sweep_mode = false;

  app.add_option("--Z", cfg.Z, "nuclear charge, 1..92")->capture_default_str();
  app.add_option("--z-effective", cfg.z_effective, "screened charge used in place of Z");
  app.add_option("--seed", cfg.seed, "1S1/2, 2P1/2 or 2P3/2")->capture_default_str();
  app.add_option("--preset", cfg.preset, "desk or paper")->capture_default_str();
  app.add_option("--n-bound", n_bound);
  app.add_option("--n-pos", n_pos);
  app.add_option("--n-neg", n_neg);
  app.add_option("--dp", dp, "momentum step (hbar Z/r_B)");
  app.add_option("--p-lower", p_lower);
  app.add_option("--convention", convention, "center or edge: meaning of --p-lower");
  app.add_option("--gl-nodes", gl_nodes, "Gauss-Legendre nodes per momentum bin");
  app.add_option("--r-min", r_min);
  app.add_option("--r-log-end", r_log_end);
  app.add_option("--r-max", r_max);
  app.add_option("--step-fraction", step_fraction, "uniform radial step in units of 2 pi / k_max");
  app.add_option("--method", cfg.method, "eriksen, fw or both")->capture_default_str();
  app.add_option("--out", cfg.out_dir, "output directory");
  app.add_option("--format", cfg.format, "csv or json")->capture_default_str();
  app.add_option("--threads", cfg.threads)->capture_default_str();
  app.add_option("--bin-rule", bin_rule, "midpoint or quadrature")->capture_default_str();
  app.add_option("--norm-form", norm_form, "squared or literal")->capture_default_str();
  app.add_option("--r-cut", cfg.r_cut, "lower radius for the cut norms")->capture_default_str();
  app.add_option("--sum-tol", cfg.sum_tol, "sum-rule tolerance")->capture_default_str();
  app.add_flag("--no-radial", no_radial, "skip synthesis and radial output");
  app.add_flag("--unitarity", cfg.unitarity, "singular values of U on the bound block");
  app.add_option("--offdiag-sample", cfg.offdiag_sample, "continuum off-diagonal quadrature probes");
  app.add_option("--cache-dir", cfg.cache_dir, "radial sample cache (default $DIRAC_CACHE_DIR)");
  auto* sw = app.add_option("--Z-list", z_list, "comma separated charges; runs a sweep");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kConfigError;
  }
  sweep_mode = sw->count() > 0;

  try {
    cfg.basis = RunConfig::preset_basis(cfg.preset);
    if (n_bound) cfg.basis.n_bound = *n_bound;
    if (n_pos) cfg.basis.n_pos = *n_pos;
    if (n_neg) cfg.basis.n_neg = *n_neg;
    if (dp) cfg.basis.dp = *dp;
    if (p_lower) cfg.basis.p_lower = *p_lower;
    if (gl_nodes) cfg.basis.gl_nodes = *gl_nodes;
    if (r_min) cfg.basis.r_min = *r_min;
    if (r_log_end) cfg.basis.r_log_end = *r_log_end;
    if (r_max) cfg.basis.r_max = *r_max;
    if (step_fraction) cfg.basis.step_fraction = *step_fraction;
    if (!convention.empty()) {
      if (convention == "center") cfg.basis.convention = basis::BinConvention::Center;
      else if (convention == "edge") cfg.basis.convention = basis::BinConvention::Edge;
      else throw hydrogenic::ConfigError("convention must be center or edge");
    }
    if (bin_rule == "midpoint") cfg.bin_rule = matelem::BinRule::Midpoint;
    else if (bin_rule == "quadrature") cfg.bin_rule = matelem::BinRule::Quadrature;
    else throw hydrogenic::ConfigError("bin rule must be midpoint or quadrature");
    if (norm_form == "squared") cfg.norm_form = eriksen::NormForm::Squared;
    else if (norm_form == "literal") cfg.norm_form = eriksen::NormForm::Literal;
    else throw hydrogenic::ConfigError("norm form must be squared or literal");
    cfg.radial = !no_radial;
    if (cfg.cache_dir.empty())
      if (const char* env = std::getenv("DIRAC_CACHE_DIR")) cfg.cache_dir = env;

    if (sweep_mode) {
      const auto zs = parse_z_list(z_list);
      cfg.Z = zs.empty() ? cfg.Z : zs.front();
      cfg.validate();
      const auto res = cli::sweep(cfg, zs);
      if (!cfg.out_dir.empty()) cli::write_sweep(res, cfg.out_dir, cfg.format);
      for (const auto& r : res.rows) std::cout << "Z=" << r.Z << "  " << r.status << '\n';
      res.aggregates().write_csv(std::cout);
      return res.exit_code();
    }

    const auto rep = cli::run_pipeline(cfg);
    print_run(rep);
    return rep.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::exit_code_for(e);
  }
}
