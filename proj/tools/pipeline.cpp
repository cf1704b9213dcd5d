#include "pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

namespace dirac::cli {

using basis::Block;
using eriksen::Method;
using hydrogenic::ConfigError;
using hydrogenic::QuantumNumbers;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class Stopwatch {
 public:
  explicit Stopwatch(std::vector<std::pair<std::string, double>>& out) : out_(out) {}
  void lap(const std::string& name) {
    const auto now = std::chrono::steady_clock::now();
    out_.emplace_back(name, std::chrono::duration<double>(now - last_).count());
    last_ = now;
  }

 private:
  std::vector<std::pair<std::string, double>>& out_;
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

const char* block_text(Block b) { return b == Block::Bound ? "bound" : b == Block::Positive ? "positive" : "negative"; }

std::string upper(std::string s) {
  for (auto& c : s) c = char(std::toupper(static_cast<unsigned char>(c)));
  std::replace(s.begin(), s.end(), '_', '/');
  return s;
}

void check(std::vector<Invariant>& inv, std::string name, double value, double limit, bool ok) {
  inv.push_back({std::move(name), value, limit, ok});
}

std::vector<Column> aggregate_columns() {
  return {{"Z", ColumnType::Int},        {"z_effective", ColumnType::Real}, {"seed", ColumnType::Text},
          {"method", ColumnType::Text},  {"p_seed", ColumnType::Real},      {"p_bound_rest", ColumnType::Real},
          {"p_plus", ColumnType::Real},  {"p_minus", ColumnType::Real},     {"total", ColumnType::Real},
          {"residual", ColumnType::Real}, {"status", ColumnType::Text}};
}

void aggregate_rows(Table& t, int Z, double z_eff, const std::string& seed, const RunReport* rep,
                    const std::string& status) {
  if (!rep) {
    t.add_row({(long long)Z, z_eff, seed, std::string("-"), kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, status});
    return;
  }
  for (const auto& m : rep->methods) {
    const auto& a = m.aggregates;
    t.add_row({(long long)Z, z_eff, seed, std::string(eriksen::method_name(m.method)), a.p_seed, a.p_bound_rest,
               a.p_plus, a.p_minus, a.total, a.residual, status});
  }
}

std::vector<Column> norm_columns() {
  return {{"Z", ColumnType::Int},        {"z_effective", ColumnType::Real}, {"method", ColumnType::Text},
          {"N_rg", ColumnType::Real},    {"N_rf", ColumnType::Real},        {"N_rUg", ColumnType::Real},
          {"N_rUf", ColumnType::Real},   {"N_rUg_cut", ColumnType::Real},   {"N_rUf_cut", ColumnType::Real}};
}

void norm_rows(Table& t, int Z, double z_eff, const RunReport& rep) {
  for (const auto& m : rep.methods) {
    if (!m.has_norms) continue;
    const auto& n = m.norms;
    t.add_row({(long long)Z, z_eff, std::string(eriksen::method_name(m.method)), n.rg, n.rf, n.rUg, n.rUf, n.rUg_cut,
               n.rUf_cut});
  }
}

Table beta_bound_table(const std::vector<std::pair<int, const RunReport*>>& rows, const RunConfig& cfg) {
  Table t;
  t.columns = {{"Z", ColumnType::Int}, {"z_effective", ColumnType::Real}};
  const RunReport* proto = nullptr;
  for (const auto& [Z, r] : rows)
    if (r) {
      proto = r;
      break;
    }
  if (proto)
    for (const auto& [label, v] : proto->beta_seed_bound) t.columns.push_back({label, ColumnType::Real});
  for (const auto& [Z, r] : rows) {
    std::vector<Cell> row{(long long)Z, r ? r->config.z_eff() : (cfg.z_effective ? *cfg.z_effective : double(Z))};
    for (size_t k = 2; k < t.columns.size(); ++k) row.emplace_back(r ? r->beta_seed_bound[k - 2].second : kNaN);
    t.add_row(std::move(row));
  }
  return t;
}

double peak_negative_energy(const basis::BasisSet& b, const Eigen::VectorXd& c) {
  const int lo = b.layout.n_plus();
  int best = -1;
  for (int i = lo; i < b.layout.dim(); ++i)
    if (best < 0 || c[i] * c[i] > c[best] * c[best]) best = i;
  return best < 0 ? kNaN : b.energies[best];
}

void load_or_sample(basis::BasisSet& b, const std::string& cache_dir, int threads) {
  namespace fs = std::filesystem;
  const fs::path path = fs::path(cache_dir) / ("radial_" + basis::cache_key(b) + ".bin");
  if (basis::load_radial_cache(b, path.string())) return;
  basis::sample_radial(b, threads);
  std::error_code ec;
  fs::create_directories(cache_dir, ec);
  basis::save_radial_cache(b, path.string());  // a failed save only costs the next run
}

}  // namespace

SeedSpec parse_seed(const std::string& name) {
  const std::string s = upper(name);
  if (s == "1S1/2" || s == "1S") return {"1S1/2", QuantumNumbers::bound(-1, 0.5, 0), eriksen::NonrelState::S1};
  if (s == "2P1/2") return {"2P1/2", QuantumNumbers::bound(1, 0.5, 1), eriksen::NonrelState::P2};
  if (s == "2P3/2") return {"2P3/2", QuantumNumbers::bound(-2, 0.5, 0), eriksen::NonrelState::P2};
  throw ConfigError("unknown seed state '" + name + "' (expected 1S1/2, 2P1/2 or 2P3/2)");
}

basis::BasisConfig RunConfig::preset_basis(const std::string& preset) {
  if (preset == "desk") return basis::BasisConfig::desk();
  if (preset == "paper") return basis::BasisConfig::paper();
  throw ConfigError("unknown preset '" + preset + "' (expected desk or paper)");
}

std::vector<Method> RunConfig::methods() const {
  if (method == "eriksen") return {Method::Eriksen};
  if (method == "fw") return {Method::FW};
  return {Method::Eriksen, Method::FW};
}

void RunConfig::validate() const {
  if (Z < 1 || Z > 92) throw ConfigError("Z must lie in 1..92");
  if (z_effective) {
    if (!(*z_effective > 0.0)) throw ConfigError("effective Z must be positive");
    if (!(hydrogenic::kAlpha * *z_effective < 1.0)) throw ConfigError("effective Z too large (alpha Z >= 1)");
  }
  parse_seed(seed);
  preset_basis(preset);
  if (method != "eriksen" && method != "fw" && method != "both")
    throw ConfigError("method must be eriksen, fw or both");
  if (format != "csv" && format != "json") throw ConfigError("format must be csv or json");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (!(r_cut >= 0.0)) throw ConfigError("r_cut must be >= 0");
  if (!(sum_tol > 0.0)) throw ConfigError("sum-rule tolerance must be positive");
  if (offdiag_sample < 0) throw ConfigError("offdiag sample count must be >= 0");
  basis.validate();
}

nlohmann::json RunConfig::to_json() const {
  const auto& c = basis;
  return {{"Z", Z},
          {"z_effective", z_eff()},
          {"seed", parse_seed(seed).name},
          {"preset", preset},
          {"method", method},
          {"format", format},
          {"threads", threads},
          {"bin_rule", bin_rule == matelem::BinRule::Midpoint ? "midpoint" : "quadrature"},
          {"norm_form", norm_form == eriksen::NormForm::Squared ? "squared" : "literal"},
          {"r_cut", r_cut},
          {"sum_tol", sum_tol},
          {"basis",
           {{"n_bound", c.n_bound},
            {"n_pos", c.n_pos},
            {"n_neg", c.n_neg},
            {"dp", c.dp},
            {"p_lower", c.p_lower},
            {"convention", c.convention == basis::BinConvention::Center ? "center" : "edge"},
            {"gl_nodes", c.gl_nodes},
            {"r_min", c.r_min},
            {"r_log_end", c.r_log_end},
            {"r_max", c.r_max},
            {"step_fraction", c.step_fraction},
            {"hash", c.hash()}}}};
}

const MethodReport* RunReport::find(Method m) const {
  for (const auto& r : methods)
    if (r.method == m) return &r;
  return nullptr;
}

bool RunReport::ok() const {
  return std::all_of(invariants.begin(), invariants.end(), [](const Invariant& i) { return i.ok; });
}

nlohmann::json RunReport::summary() const {
  nlohmann::json j;
  j["config"] = config.to_json();
  j["seed"] = seed_label;
  j["layout"] = {{"bound", layout.n_bound}, {"positive", layout.n_pos}, {"negative", layout.n_neg}, {"dim", layout.dim()}};
  nlohmann::json ms = nlohmann::json::object();
  nlohmann::json t4 = nlohmann::json::object();
  for (const auto& m : methods) {
    const auto& a = m.aggregates;
    nlohmann::json e = {{"aggregates",
                         {{"p_seed", a.p_seed},
                          {"p_bound_rest", a.p_bound_rest},
                          {"p_plus", a.p_plus},
                          {"p_minus", a.p_minus},
                          {"total", a.total},
                          {"residual", a.residual}}},
                        {"peak_negative_energy", m.peak_negative_energy}};
    if (m.has_norms) {
      const auto& n = m.norms;
      e["norms"] = {{"N_rg", n.rg},         {"N_rf", n.rf},         {"N_rUg", n.rUg},
                    {"N_rUf", n.rUf},       {"N_rUg_cut", n.rUg_cut}, {"N_rUf_cut", n.rUf_cut},
                    {"r_cut", n.r_cut}};
      t4["N_rg"] = n.rg;
      t4["N_rf"] = n.rf;
      const std::string tag = m.method == Method::FW ? "FW" : "";
      t4["N_rU" + tag + "g"] = n.rUg;
      t4["N_rU" + tag + "f"] = n.rUf;
    }
    ms[eriksen::method_name(m.method)] = std::move(e);
  }
  j["methods"] = std::move(ms);
  if (!t4.empty()) j["norms"] = std::move(t4);
  if (const auto* e = find(Method::Eriksen)) j["sum_rule_residual"] = e->aggregates.residual;
  j["spectral"] = {{"min_2_plus_xi", min_shifted_eigenvalue}, {"commutator", commutator}};
  if (unitarity) j["unitarity"] = {{"sigma_min", unitarity->first}, {"sigma_max", unitarity->second}};
  if (offdiag_count > 0)
    j["continuum_offdiagonal"] = {{"count", offdiag_count}, {"max_abs", offdiag_max}, {"rms", offdiag_rms}};
  nlohmann::json inv = nlohmann::json::array();
  for (const auto& i : invariants) inv.push_back({{"name", i.name}, {"value", i.value}, {"limit", i.limit}, {"ok", i.ok}});
  j["invariants"] = std::move(inv);
  nlohmann::json tm = nlohmann::json::object();
  for (const auto& [k, v] : timings) tm[k] = v;
  j["timings"] = std::move(tm);
  j["status"] = ok() ? "ok" : "invariant breach";
  j["exit_code"] = exit_code();
  return j;
}

RunReport run_pipeline(const RunConfig& cfg) {
  cfg.validate();
  RunReport rep;
  rep.config = cfg;
  Stopwatch watch(rep.timings);
  const auto seed = parse_seed(cfg.seed);
  rep.seed_label = seed.name;
  const auto ctx = hydrogenic::PhysicalContext::make(cfg.z_eff());

  auto b = basis::assemble_basis(seed.q, cfg.basis, ctx, false, cfg.threads);
  rep.layout = b.layout;
  if (cfg.radial && !cfg.cache_dir.empty()) load_or_sample(b, cfg.cache_dir, cfg.threads);
  watch.lap("basis");

  const auto beta = matelem::build_beta(b, {cfg.bin_rule, cfg.threads});
  for (int i = 0; i < b.layout.n_bound; ++i) rep.beta_seed_bound.emplace_back(b.labels[i].name(), beta(b.seed_index, i));
  watch.lap("beta");

  auto& inv = rep.invariants;
  check(inv, "beta_finite", beta.all_finite() ? 0.0 : 1.0, 0.0, beta.all_finite());

  const auto S = eriksen::build_S(b, beta);
  double cross = 0.0;
  for (int i = 0; i < b.layout.dim(); ++i)
    for (int j = 0; j < i; ++j)
      if (b.eps[i] != b.eps[j]) cross = std::max(cross, std::abs(S(i, j)));
  check(inv, "S_cross_sign_zero", cross, 0.0, cross == 0.0);

  const auto Z = eriksen::build_Z(S);
  rep.min_shifted_eigenvalue = Z.min_shifted_eigenvalue();
  rep.commutator = eriksen::commutator_norm(S, Z);
  check(inv, "two_plus_xi_positive", rep.min_shifted_eigenvalue, 0.0, rep.min_shifted_eigenvalue > 0.0);
  watch.lap("spectral");

  std::vector<eriksen::TransformResult> results;
  for (const auto m : cfg.methods())
    results.push_back(m == Method::Eriksen ? eriksen::eriksen_amplitudes(b, beta, Z) : eriksen::fw_amplitudes(b, beta));
  watch.lap("amplitudes");

  if (cfg.radial) {
    std::vector<eriksen::TransformResult*> ptrs;
    for (auto& r : results) ptrs.push_back(&r);
    eriksen::synthesize(b, ptrs, {cfg.threads, 0.0});
    for (auto& r : results) eriksen::norms_and_aggregates(b, r, cfg.norm_form, cfg.r_cut);
    watch.lap("synthesis");
  }

  for (const auto& r : results) {
    MethodReport m;
    m.method = r.method;
    m.amplitudes = r.amplitudes;
    m.aggregates = r.aggregates;
    m.has_norms = r.synthesized;
    m.norms = r.norms;
    m.peak_negative_energy = peak_negative_energy(b, r.amplitudes);
    rep.methods.push_back(std::move(m));
    const bool finite = r.amplitudes.allFinite();
    check(inv, std::string(eriksen::method_name(r.method)) + "_amplitudes_finite", finite ? 0.0 : 1.0, 0.0, finite);
  }
  if (const auto* e = rep.find(Method::Eriksen)) {
    const auto& a = e->aggregates;
    double worst = 0.0;
    for (double p : {a.p_seed, a.p_bound_rest, a.p_plus, a.p_minus})
      worst = std::max({worst, -p, p - 1.0});
    check(inv, "eriksen_probabilities_in_unit_interval", worst, 1e-12, worst <= 1e-12);
    check(inv, "eriksen_sum_rule", std::abs(a.residual), cfg.sum_tol, std::abs(a.residual) <= cfg.sum_tol);
  }

  if (cfg.unitarity) {
    const auto sv = eriksen::unitarity_singular_values(b, beta, Z);
    rep.unitarity = std::make_pair(sv.minCoeff(), sv.maxCoeff());
    watch.lap("unitarity");
  }

  if (cfg.offdiag_sample > 0) {
    std::mt19937_64 rng(20240917);
    const int n0 = b.layout.n_bound, np = b.layout.n_pos, nn = b.layout.n_neg;
    const size_t nr = b.grid.size();
    std::vector<double> gi(nr), fi(nr), gj(nr), fj(nr);
    double sum2 = 0.0;
    for (int k = 0; k < cfg.offdiag_sample; ++k) {
      const bool pos = nn == 0 || (np > 1 && (rng() & 1));
      const int base = pos ? n0 : n0 + np, count = pos ? np : nn;
      if (count < 2) break;
      const int i = base + int(rng() % count);
      int j = base + int(rng() % (count - 1));
      if (j >= i) ++j;
      basis::sample_state(b, i, b.grid.r, gi.data(), fi.data());
      basis::sample_state(b, j, b.grid.r, gj.data(), fj.data());
      double acc = 0.0;
      for (size_t q = 0; q < nr; ++q) acc += b.grid.w[q] * (gi[q] * gj[q] - fi[q] * fj[q]);
      rep.offdiag_max = std::max(rep.offdiag_max, std::abs(acc));
      sum2 += acc * acc;
      ++rep.offdiag_count;
    }
    if (rep.offdiag_count) rep.offdiag_rms = std::sqrt(sum2 / rep.offdiag_count);
    watch.lap("offdiag_sample");
  }

  if (cfg.out_dir.empty()) return rep;
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (!fs::is_directory(cfg.out_dir)) throw IoError("cannot create output directory " + cfg.out_dir);
  const auto& fmt = cfg.format;

  beta_bound_table({{cfg.Z, &rep}}, cfg).save(cfg.out_dir, "beta_bound", fmt);

  Table bc;
  bc.columns = {{"bound", ColumnType::Text}, {"n_r", ColumnType::Int},     {"eps", ColumnType::Int},
                {"p", ColumnType::Real},     {"K", ColumnType::Real},      {"energy", ColumnType::Real},
                {"beta", ColumnType::Real},  {"beta_bin", ColumnType::Real}};
  for (int n = 0; n < b.layout.n_bound; ++n) {
    const auto& qb = b.labels[n];
    for (int i = b.layout.n_bound; i < b.layout.dim(); ++i) {
      const auto& bin = b.bin_of(i);
      const double v = matelem::beta_bound_continuum(qb, b.labels[i], ctx);
      bc.add_row({qb.name(), (long long)qb.n_r, (long long)bin.eps, bin.center, ctx.to_compton_momentum(bin.center),
                  b.energies[i], v, beta(n, i)});
    }
  }
  bc.save(cfg.out_dir, "beta_continuum", fmt);

  Table am;
  am.columns = {{"method", ColumnType::Text}, {"index", ColumnType::Int},      {"block", ColumnType::Text},
                {"label", ColumnType::Text},  {"p", ColumnType::Real},         {"energy", ColumnType::Real},
                {"amplitude", ColumnType::Real}, {"probability", ColumnType::Real}};
  for (const auto& r : results)
    for (int i = 0; i < b.layout.dim(); ++i) {
      const auto blk = b.layout.block_of(i);
      const double c = r.amplitudes[i];
      am.add_row({std::string(eriksen::method_name(r.method)), (long long)i, std::string(block_text(blk)),
                  b.labels[i].name(), blk == Block::Bound ? 0.0 : b.bin_of(i).center, b.energies[i], c, c * c});
    }
  am.save(cfg.out_dir, "amplitudes", fmt);

  Table ag;
  ag.columns = aggregate_columns();
  aggregate_rows(ag, cfg.Z, cfg.z_eff(), seed.name, &rep, rep.ok() ? "ok" : "invariant");
  ag.save(cfg.out_dir, "aggregates", fmt);

  if (cfg.radial) {
    const auto& r = results.front().r;
    std::vector<double> g0(r.size()), f0(r.size());
    basis::sample_state(b, b.seed_index, r, g0.data(), f0.data());
    const auto nr_ref = eriksen::nonrel_reference(seed.nonrel, r);
    Table rad;
    rad.columns = {{"r", ColumnType::Real}, {"rg", ColumnType::Real}, {"rf", ColumnType::Real}};
    for (const auto& res : results) {
      const std::string tag = res.method == Method::FW ? "FW" : "";
      rad.columns.push_back({"rU" + tag + "g", ColumnType::Real});
      rad.columns.push_back({"rU" + tag + "f", ColumnType::Real});
    }
    rad.columns.push_back({"rgNR", ColumnType::Real});
    for (size_t k = 0; k < r.size(); ++k) {
      std::vector<Cell> row{r[k], g0[k], f0[k]};
      for (const auto& res : results) {
        row.emplace_back(res.upper[k]);
        row.emplace_back(res.lower[k]);
      }
      row.emplace_back(nr_ref[k]);
      rad.add_row(std::move(row));
    }
    rad.save(cfg.out_dir, "radial", fmt);

    Table nt;
    nt.columns = norm_columns();
    norm_rows(nt, cfg.Z, cfg.z_eff(), rep);
    nt.save(cfg.out_dir, "norms", fmt);
  }
  watch.lap("output");

  std::ofstream js(fs::path(cfg.out_dir) / "summary.json");
  js << rep.summary().dump(2) << '\n';
  if (!js) throw IoError("cannot write summary.json");
  return rep;
}

int SweepResult::exit_code() const {
  int worst = kOk;
  for (const auto& r : rows) worst = std::max(worst, r.exit_code);
  return worst;
}

Table SweepResult::aggregates() const {
  Table t;
  t.columns = aggregate_columns();
  for (const auto& r : rows) {
    const double z_eff = r.report ? r.report->config.z_eff() : double(r.Z);
    const std::string seed = r.report ? r.report->seed_label : "-";
    aggregate_rows(t, r.Z, z_eff, seed, r.report ? &*r.report : nullptr, r.status);
  }
  return t;
}

Table SweepResult::beta_bound() const {
  std::vector<std::pair<int, const RunReport*>> v;
  for (const auto& r : rows) v.emplace_back(r.Z, r.report ? &*r.report : nullptr);
  return beta_bound_table(v, RunConfig{});
}

Table SweepResult::norms() const {
  Table t;
  t.columns = norm_columns();
  for (const auto& r : rows)
    if (r.report) norm_rows(t, r.Z, r.report->config.z_eff(), *r.report);
  return t;
}

nlohmann::json SweepResult::summary() const {
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json e = {{"Z", r.Z}, {"status", r.status}, {"exit_code", r.exit_code}};
    if (r.report) e["summary"] = r.report->summary();
    runs.push_back(std::move(e));
  }
  return {{"runs", runs}, {"exit_code", exit_code()}};
}

SweepResult sweep(const RunConfig& base, const std::vector<int>& Z_list) {
  SweepResult out;
  for (int Z : Z_list) {
    RunConfig c = base;
    c.Z = Z;
    c.out_dir.clear();
    SweepRow row;
    row.Z = Z;
    try {
      row.report = run_pipeline(c);
      row.exit_code = row.report->exit_code();
      row.status = row.report->ok() ? "ok" : "invariant";
    } catch (const std::exception& e) {
      row.exit_code = exit_code_for(e);
      row.status = e.what();
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

void write_sweep(const SweepResult& s, const std::string& dir, const std::string& format) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) throw IoError("cannot create output directory " + dir);
  s.aggregates().save(dir, "aggregates", format);
  s.beta_bound().save(dir, "beta_bound", format);
  s.norms().save(dir, "norms", format);
  std::ofstream js(fs::path(dir) / "summary.json");
  js << s.summary().dump(2) << '\n';
  if (!js) throw IoError("cannot write summary.json");
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const IoError*>(&e)) return kIoError;
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const eriksen::DimensionError*>(&e)) return kConfigError;
  return kNumericalFailure;
}

}  // namespace dirac::cli
