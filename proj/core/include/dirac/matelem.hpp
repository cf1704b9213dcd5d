#pragma once

#include "dirac/basis.hpp"
#include "dirac/hydrogenic.hpp"

#include <Eigen/Core>

#include <array>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace dirac::matelem {

using basis::Block;
using basis::BlockLayout;
using basis::MomentumBin;
using hydrogenic::PhysicalContext;
using hydrogenic::QuantumNumbers;
using hydrogenic::RadialPair;

struct InsufficientGridError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SingularBinError : std::domain_error {
  using std::domain_error::domain_error;
};

enum class Provenance { Analytic, Quadrature, Model };
const char* provenance_name(Provenance p);
const char* block_name(Block b);

// Dense symmetric table over basis indices with packed lower-triangular storage.
class SymmetricMatrixTable {
 public:
  SymmetricMatrixTable() = default;
  explicit SymmetricMatrixTable(BlockLayout layout);

  int dim() const { return layout_.dim(); }
  const BlockLayout& layout() const { return layout_; }
  double operator()(int i, int j) const { return data_[index(i, j)]; }
  void set(int i, int j, double v) { data_[index(i, j)] = v; }

  Provenance provenance(Block a, Block b) const;
  void set_provenance(Block a, Block b, Provenance p);

  Eigen::MatrixXd dense() const;
  Eigen::MatrixXd block(Block a, Block b) const;
  bool all_finite() const;

  // Rows "i,j,value,block" for every stored entry with |value| > threshold (diagonal always).
  void write_csv(std::ostream& os, double threshold = 0.0) const;

 private:
  size_t index(int i, int j) const {
    if (i < j) std::swap(i, j);
    return size_t(i) * (size_t(i) + 1) / 2 + size_t(j);
  }
  BlockLayout layout_;
  std::vector<double> data_;
  std::array<Provenance, 9> prov_{};
};

// <n1|beta|n2> = int (g1 g2 - f1 f2) r^2 dr for bound states; generalized
// Gauss-Laguerre quadrature in t = (1/N1 + 1/N2) r, exact for the polynomial part.
// Returns 0 when (kappa, m) differ.
double beta_bound_bound(const QuantumNumbers& q1, const QuantumNumbers& q2, const PhysicalContext& ctx);
// Same integral with the plus sign (overlap).
double overlap_bound_bound(const QuantumNumbers& q1, const QuantumNumbers& q2, const PhysicalContext& ctx);
// Term-wise Euler integrals of the expanded polynomials; independent path, small n only.
double beta_bound_bound_euler(const QuantumNumbers& q1, const QuantumNumbers& q2, const PhysicalContext& ctx,
                              int sign = -1);

// Per-momentum <psi_p^eps|beta|n>, continuum normalized, closed form through
// terminating 2F1 (Laplace transform of the 1F1 product).
double beta_bound_continuum(const QuantumNumbers& qb, const QuantumNumbers& qc, const PhysicalContext& ctx);
// Same with the plus-sign integrand: <psi_p^eps|n>, zero by orthogonality.
double overlap_bound_continuum(const QuantumNumbers& qb, const QuantumNumbers& qc, const PhysicalContext& ctx);

enum class BinRule { Midpoint, Quadrature };

// <Psi_bin|beta|n>: sqrt(dp) beta(p_center) or dp^{-1/2} int_bin beta(p) dp.
double beta_discretized(const QuantumNumbers& qb, const MomentumBin& bin, int kappa, const PhysicalContext& ctx,
                        BinRule rule = BinRule::Midpoint, int nodes = 16);

// Bin average of 1/W_p times eps.
double beta_continuum_diagonal(const MomentumBin& bin, const PhysicalContext& ctx);
// (2 + xi)^{-1/2} with xi = -2 beta_diag = 2 <1/|W|>, for a negative-energy bin.
double z_negative_diagonal(const MomentumBin& bin, const PhysicalContext& ctx);

// Oracle by direct radial quadrature of int (g1 g2 + sign f1 f2) r^2 dr on
// one-period Gauss-Legendre panels (16 and 24 nodes, compared for the error
// estimate); continuum functions switch to their asymptotic series at large r.
struct OracleOptions {
  int sign = -1;
  double tol = 1e-10;  // relative to max(|result|, 1e-3 int |integrand|)
};
double quadrature_oracle(const QuantumNumbers& q1, const QuantumNumbers& q2, const PhysicalContext& ctx,
                         const OracleOptions& opt = {});
// On a shared sampled grid with explicit weights; the error estimate compares
// against the rule on every other point and throws InsufficientGridError.
double quadrature_oracle(const RadialPair& a, const RadialPair& b, const std::vector<double>& weights,
                         int sign = -1, double tol = 1e-6);

struct BetaOptions {
  BinRule rule = BinRule::Midpoint;
  int threads = 1;
};

// Full beta table over an assembled basis: bound-bound and bound-continuum
// analytic, continuum diagonal analytic, continuum off-diagonals zero.
SymmetricMatrixTable build_beta(const basis::BasisSet& b, const BetaOptions& opt = {});

// Quadrature estimate of a continuum-continuum off-diagonal element from the
// sampled eigendifferentials (needs radial samples); quantifies the zero model.
double continuum_offdiagonal_estimate(const basis::BasisSet& b, int i, int j);

}  // namespace dirac::matelem
