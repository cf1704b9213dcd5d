#pragma once

#include "dirac/basis.hpp"
#include "dirac/matelem.hpp"

#include <Eigen/Core>

#include <stdexcept>
#include <string>
#include <vector>

namespace dirac::eriksen {

using basis::BasisSet;
using basis::BlockLayout;
using matelem::SymmetricMatrixTable;

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// 2 + xi_s <= 0 somewhere: the inverse square root does not exist.
struct SquareRootError : std::domain_error {
  SquareRootError(const std::string& what, int index, double xi)
      : std::domain_error(what), index(index), xi(xi) {}
  int index;
  double xi;
};

// S_{ij} = (eps_i + eps_j) beta_{ij}; cross-sign entries are exact zeros.
SymmetricMatrixTable build_S(const BasisSet& b, const SymmetricMatrixTable& beta);

// Z = (2 + S)^{-1/2}, blockwise. The positive block (bound + positive continuum)
// goes through a dense symmetric eigendecomposition; the negative block uses the
// closed form when it is diagonal and falls back to a decomposition otherwise.
struct SpectralOperator {
  BlockLayout layout;
  Eigen::VectorXd xi_plus;
  Eigen::MatrixXd vectors_plus;
  Eigen::MatrixXd z_plus;
  Eigen::VectorXd xi_minus;
  Eigen::MatrixXd vectors_minus;  // empty when the negative block was diagonal
  Eigen::MatrixXd z_minus;

  bool negative_diagonal() const { return vectors_minus.size() == 0; }
  double operator()(int i, int j) const;
  Eigen::MatrixXd dense() const;
  double min_shifted_eigenvalue() const;  // min over s of 2 + xi_s
};

SpectralOperator build_Z(const SymmetricMatrixTable& S);

enum class Method { Eriksen, FW };
const char* method_name(Method m);

enum class NormForm { Squared, Literal };

struct Aggregates {
  double p_seed = 0.0;
  double p_bound_rest = 0.0;
  double p_plus = 0.0;
  double p_minus = 0.0;
  double total = 0.0;
  double residual = 0.0;  // total - 1
};

struct Norms {
  double rg = 0.0;   // seed, upper
  double rf = 0.0;   // seed, lower
  double rUg = 0.0;  // transformed, upper
  double rUf = 0.0;  // transformed, lower
  double rUg_cut = 0.0;  // same on r >= r_cut
  double rUf_cut = 0.0;
  double r_cut = 0.01;
  NormForm form = NormForm::Squared;
};

struct TransformResult {
  Method method = Method::Eriksen;
  int seed_index = 0;
  Eigen::VectorXd amplitudes;  // basis order: bound, positive, negative
  Aggregates aggregates;

  bool synthesized = false;
  std::vector<double> r;
  std::vector<double> upper;  // r U g
  std::vector<double> lower;  // r U f
  Norms norms;
};

Aggregates aggregate(const BlockLayout& layout, int seed_index, const Eigen::VectorXd& amplitudes);

// a = Z+ (e_seed + beta column) on the positive block, A- = Z-_ii beta_{i,seed}
// on the negative block. The seed must be a bound state.
TransformResult eriksen_amplitudes(const BasisSet& b, const SymmetricMatrixTable& beta, const SpectralOperator& Z);

// Linearized operator: 3/4 delta + 1/4 beta for same-sign pairs, 1/2 beta across signs.
TransformResult fw_amplitudes(const BasisSet& b, const SymmetricMatrixTable& beta);

struct SynthesisOptions {
  int threads = 1;
  // Skip states with |c|^2 below this when plotting; norms always use every state.
  double skip_below = 0.0;
};

// Fills r, upper, lower for every result on the basis grid. Uses stored radial
// samples when present and otherwise evaluates the states on the fly; the
// accumulation order is fixed, so the thread count does not change the bits.
void synthesize(const BasisSet& b, std::vector<TransformResult*> results, const SynthesisOptions& opt = {});
inline void synthesize(const BasisSet& b, TransformResult& result, const SynthesisOptions& opt = {}) {
  synthesize(b, std::vector<TransformResult*>{&result}, opt);
}

// int |F|^2 dr (Squared) or int |F| r dr (Literal, |f| r^2 as printed) over the grid, optionally from r_cut.
double radial_norm(const std::vector<double>& r, const std::vector<double>& w, const std::vector<double>& rF,
                   NormForm form = NormForm::Squared, double r_cut = 0.0);

// Norms of the seed and of the synthesized function.
void norms_and_aggregates(const BasisSet& b, TransformResult& result, NormForm form = NormForm::Squared,
                          double r_cut = 0.01);

enum class NonrelState { S1, P2 };
// r g^NR for the Schroedinger 1s or 2p function in units r_B/Z, unit norm.
std::vector<double> nonrel_reference(NonrelState s, const std::vector<double>& r);

// Singular values of U = Z (1 + beta lambda) applied to the bound block (all
// rows, bound columns). Continuum columns would need the continuum-continuum
// couplings that the model sets to zero, so they are left out.
Eigen::VectorXd unitarity_singular_values(const BasisSet& b, const SymmetricMatrixTable& beta,
                                          const SpectralOperator& Z);

// max |ZS - SZ| on the positive block.
double commutator_norm(const SymmetricMatrixTable& S, const SpectralOperator& Z);

}  // namespace dirac::eriksen
