#pragma once

#include "dirac/hydrogenic.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dirac::basis {

using hydrogenic::PhysicalContext;
using hydrogenic::QuantumNumbers;
using hydrogenic::RadialPair;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Whether the configured lower momentum limit is the first bin's center or its lower edge.
enum class BinConvention { Center, Edge };

struct MomentumBin {
  double center = 0.0;
  double width = 0.0;
  int eps = 1;
  double lo() const { return center - 0.5 * width; }
  double hi() const { return center + 0.5 * width; }
};

struct MomentumGrid {
  double dp = 0.1;
  int eps = 1;
  std::vector<double> centers;
  size_t size() const { return centers.size(); }
  MomentumBin bin(size_t i) const { return {centers[i], dp, eps}; }
};

struct BasisConfig {
  int n_bound = 40;
  int n_pos = 512;
  int n_neg = 1024;
  double dp = 0.1;
  double p_lower = 0.1;
  BinConvention convention = BinConvention::Center;
  int gl_nodes = 16;
  double r_min = 1e-6;
  double r_log_end = 1.0;
  double r_max = 200.0;
  // Uniform radial step is step_fraction * 2 pi / k_max.
  double step_fraction = 0.1;

  static BasisConfig paper();
  static BasisConfig desk();
  void validate() const;
  double k_max() const;
  std::string hash() const;
};

std::pair<MomentumGrid, MomentumGrid> build_momentum_grids(const BasisConfig& cfg);

// Radial samples with quadrature weights for integrals of the form int F(r) dr.
struct RadialGrid {
  std::vector<double> r;
  std::vector<double> w;
  size_t uniform_begin = 0;  // first index of the uniform segment
  double step = 0.0;         // uniform step
  size_t size() const { return r.size(); }
  std::string hash() const;
};

RadialGrid make_radial_grid(const BasisConfig& cfg);
// Logarithmic segment [r_min, r_log_end] followed by a uniform one up to r_max.
RadialGrid make_radial_grid(double r_min, double r_log_end, double r_max, double step);

// Psi(r) = Delta p^{-1/2} int_bin psi_p(r) dp by Gauss-Legendre in p.
RadialPair eigendifferential(const MomentumBin& bin, int kappa, const PhysicalContext& ctx,
                             const std::vector<double>& grid, int nodes = 16);
void eigendifferential(const MomentumBin& bin, int kappa, const PhysicalContext& ctx,
                       const std::vector<double>& grid, int nodes, double* rg, double* rf);

enum class Block { Bound, Positive, Negative };

struct BlockLayout {
  int n_bound = 0;
  int n_pos = 0;
  int n_neg = 0;
  int dim() const { return n_bound + n_pos + n_neg; }
  int n_plus() const { return n_bound + n_pos; }
  Block block_of(int i) const;
};

struct BasisSet {
  PhysicalContext ctx;
  QuantumNumbers seed;
  BasisConfig config;
  BlockLayout layout;
  std::vector<QuantumNumbers> labels;
  std::vector<MomentumBin> bins;  // continuum entries, in basis order after the bound block
  std::vector<double> energies;   // bound: W; continuum: energy at the bin center
  std::vector<int> eps;
  int seed_index = 0;

  // Optional sampled radial functions (rows = states).
  RadialGrid grid;
  RowMatrix rg;
  RowMatrix rf;
  bool has_radial() const { return rg.rows() == layout.dim() && rg.cols() > 0; }
  const MomentumBin& bin_of(int i) const { return bins[i - layout.n_bound]; }
};

// Labels, energies and grids; radial samples only when requested.
BasisSet assemble_basis(const QuantumNumbers& seed, const BasisConfig& cfg, const PhysicalContext& ctx,
                        bool with_radial = false, int threads = 1);
void sample_radial(BasisSet& b, int threads = 1);
// Radial functions of basis state i at arbitrary radii, without touching the stored samples.
void sample_state(const BasisSet& b, int i, const std::vector<double>& r, double* rg, double* rf);

// <i|j> over the radial grid, int (rg_i rg_j + rf_i rf_j) dr. Requires radial samples.
Eigen::MatrixXd gram_matrix(const BasisSet& b);

// First bound n_r for a kappa (1 for kappa > 0).
int first_radial_number(int kappa);

// Binary cache: one JSON header line followed by little-endian float64 arrays.
bool save_radial_cache(const BasisSet& b, const std::string& path);
bool load_radial_cache(BasisSet& b, const std::string& path);
std::string cache_key(const BasisSet& b);

}  // namespace dirac::basis
