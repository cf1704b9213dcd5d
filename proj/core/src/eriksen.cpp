#include "dirac/eriksen.hpp"

#include "dirac/parallel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

namespace dirac::eriksen {

using basis::Block;

SymmetricMatrixTable build_S(const BasisSet& b, const SymmetricMatrixTable& beta) {
  const BlockLayout& L = b.layout;
  if (beta.dim() != L.dim() || beta.layout().n_bound != L.n_bound || beta.layout().n_pos != L.n_pos)
    throw DimensionError("build_S: beta table does not match the basis");
  SymmetricMatrixTable S(L);
  for (int i = 0; i < L.dim(); ++i)
    for (int j = 0; j <= i; ++j) {
      const int e = b.eps[i] + b.eps[j];
      S.set(i, j, e == 0 ? 0.0 : e * beta(i, j));
    }
  for (Block x : {Block::Bound, Block::Positive, Block::Negative})
    for (Block y : {Block::Bound, Block::Positive, Block::Negative}) S.set_provenance(x, y, beta.provenance(x, y));
  return S;
}

double SpectralOperator::operator()(int i, int j) const {
  const int np = layout.n_plus();
  if (i < np && j < np) return z_plus(i, j);
  if (i >= np && j >= np) return z_minus(i - np, j - np);
  return 0.0;
}

Eigen::MatrixXd SpectralOperator::dense() const {
  const int np = layout.n_plus(), nn = layout.n_neg;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(np + nn, np + nn);
  out.topLeftCorner(np, np) = z_plus;
  out.bottomRightCorner(nn, nn) = z_minus;
  return out;
}

double SpectralOperator::min_shifted_eigenvalue() const {
  double m = std::numeric_limits<double>::infinity();
  if (xi_plus.size()) m = std::min(m, 2.0 + xi_plus.minCoeff());
  if (xi_minus.size()) m = std::min(m, 2.0 + xi_minus.minCoeff());
  return m;
}

namespace {

void check_root(const Eigen::VectorXd& xi, int offset) {
  for (int s = 0; s < xi.size(); ++s) {
    if (!(2.0 + xi[s] > 0.0)) {
      std::ostringstream m;
      m << "2 + xi <= 0 at eigenvalue " << offset + s << " (xi = " << xi[s] << ")";
      throw SquareRootError(m.str(), offset + s, xi[s]);
    }
  }
}

// (2 + A)^{-1/2} by eigendecomposition of a symmetric block.
void inverse_root(const Eigen::MatrixXd& A, int offset, Eigen::VectorXd& xi, Eigen::MatrixXd& V,
                  Eigen::MatrixXd& Z) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  if (es.info() != Eigen::Success) throw std::runtime_error("build_Z: eigendecomposition failed");
  xi = es.eigenvalues();
  V = es.eigenvectors();
  check_root(xi, offset);
  const Eigen::VectorXd d = (2.0 + xi.array()).rsqrt();
  Z = V * d.asDiagonal() * V.transpose();
}

}  // namespace

SpectralOperator build_Z(const SymmetricMatrixTable& S) {
  const BlockLayout& L = S.layout();
  const int np = L.n_plus(), nn = L.n_neg;
  SpectralOperator out;
  out.layout = L;

  Eigen::MatrixXd Sp(np, np);
  for (int i = 0; i < np; ++i)
    for (int j = 0; j <= i; ++j) Sp(i, j) = Sp(j, i) = S(i, j);
  inverse_root(Sp, 0, out.xi_plus, out.vectors_plus, out.z_plus);

  bool diagonal = true;
  for (int i = 1; i < nn && diagonal; ++i)
    for (int j = 0; j < i; ++j)
      if (S(np + i, np + j) != 0.0) {
        diagonal = false;
        break;
      }
  if (diagonal) {
    out.xi_minus.resize(nn);
    for (int i = 0; i < nn; ++i) out.xi_minus[i] = S(np + i, np + i);
    check_root(out.xi_minus, np);
    out.z_minus = Eigen::MatrixXd::Zero(nn, nn);
    for (int i = 0; i < nn; ++i) out.z_minus(i, i) = 1.0 / std::sqrt(2.0 + out.xi_minus[i]);
  } else {
    Eigen::MatrixXd Sn(nn, nn);
    for (int i = 0; i < nn; ++i)
      for (int j = 0; j <= i; ++j) Sn(i, j) = Sn(j, i) = S(np + i, np + j);
    inverse_root(Sn, np, out.xi_minus, out.vectors_minus, out.z_minus);
  }
  return out;
}

const char* method_name(Method m) { return m == Method::Eriksen ? "eriksen" : "fw"; }

Aggregates aggregate(const BlockLayout& L, int seed_index, const Eigen::VectorXd& c) {
  Aggregates a;
  for (int i = 0; i < L.dim(); ++i) {
    const double p = c[i] * c[i];
    switch (L.block_of(i)) {
      case Block::Bound:
        (i == seed_index ? a.p_seed : a.p_bound_rest) += p;
        break;
      case Block::Positive:
        a.p_plus += p;
        break;
      case Block::Negative:
        a.p_minus += p;
        break;
    }
  }
  a.total = a.p_seed + a.p_bound_rest + a.p_plus + a.p_minus;
  a.residual = a.total - 1.0;
  return a;
}

namespace {

void check_inputs(const BasisSet& b, const SymmetricMatrixTable& beta) {
  if (beta.dim() != b.layout.dim()) throw DimensionError("beta table does not match the basis");
  if (b.seed_index < 0 || b.seed_index >= b.layout.n_bound)
    throw std::invalid_argument("seed must be a bound state of the basis");
}

}  // namespace

TransformResult eriksen_amplitudes(const BasisSet& b, const SymmetricMatrixTable& beta, const SpectralOperator& Z) {
  check_inputs(b, beta);
  if (Z.layout.dim() != b.layout.dim()) throw DimensionError("Z does not match the basis");
  const int np = b.layout.n_plus(), nn = b.layout.n_neg, s = b.seed_index;
  const double es = b.eps[s];
  // column s of (1 + beta lambda)
  Eigen::VectorXd v(b.layout.dim());
  for (int i = 0; i < b.layout.dim(); ++i) v[i] = (i == s ? 1.0 : 0.0) + beta(i, s) * es;
  TransformResult r;
  r.method = Method::Eriksen;
  r.seed_index = s;
  r.amplitudes.resize(b.layout.dim());
  r.amplitudes.head(np).noalias() = Z.z_plus * v.head(np);
  if (Z.negative_diagonal())
    r.amplitudes.tail(nn) = Z.z_minus.diagonal().cwiseProduct(v.tail(nn));
  else
    r.amplitudes.tail(nn).noalias() = Z.z_minus * v.tail(nn);
  r.aggregates = aggregate(b.layout, s, r.amplitudes);
  return r;
}

TransformResult fw_amplitudes(const BasisSet& b, const SymmetricMatrixTable& beta) {
  check_inputs(b, beta);
  const int s = b.seed_index;
  const double es = b.eps[s];
  TransformResult r;
  r.method = Method::FW;
  r.seed_index = s;
  r.amplitudes.resize(b.layout.dim());
  for (int i = 0; i < b.layout.dim(); ++i) {
    if (b.eps[i] == es)
      r.amplitudes[i] = (i == s ? 0.75 : 0.0) + 0.25 * es * beta(i, s);
    else
      r.amplitudes[i] = 0.5 * es * beta(i, s);
  }
  r.aggregates = aggregate(b.layout, s, r.amplitudes);
  return r;
}

void synthesize(const BasisSet& b, std::vector<TransformResult*> results, const SynthesisOptions& opt) {
  const int dim = b.layout.dim();
  for (auto* res : results)
    if (!res || res->amplitudes.size() != dim) throw DimensionError("synthesize: amplitudes do not match the basis");
  const auto& r = b.grid.r;
  const size_t nr = r.size();
  const size_t nres = results.size();
  if (b.has_radial() && size_t(b.rg.cols()) != nr) throw DimensionError("synthesize: radial samples off grid");

  // Contiguous state groups summed in a fixed order.
  const int groups = std::min(dim, 32);
  std::vector<std::vector<double>> acc(groups, std::vector<double>(2 * nres * nr, 0.0));
  parallel_for(groups, opt.threads, [&](int g) {
    const int lo = int(int64_t(dim) * g / groups), hi = int(int64_t(dim) * (g + 1) / groups);
    std::vector<double> sg, sf;
    if (!b.has_radial()) {
      sg.resize(nr);
      sf.resize(nr);
    }
    double* out = acc[g].data();
    for (int i = lo; i < hi; ++i) {
      bool any = false;
      for (auto* res : results) any = any || res->amplitudes[i] != 0.0;
      if (!any) continue;
      const double* pg;
      const double* pf;
      if (b.has_radial()) {
        pg = b.rg.row(i).data();
        pf = b.rf.row(i).data();
      } else {
        basis::sample_state(b, i, r, sg.data(), sf.data());
        pg = sg.data();
        pf = sf.data();
      }
      for (size_t q = 0; q < nres; ++q) {
        const double c = results[q]->amplitudes[i];
        if (c == 0.0) continue;
        double* u = out + 2 * q * nr;
        double* l = u + nr;
        for (size_t k = 0; k < nr; ++k) {
          u[k] += c * pg[k];
          l[k] += c * pf[k];
        }
      }
    }
  });
  for (size_t q = 0; q < nres; ++q) {
    auto& res = *results[q];
    res.r = r;
    res.upper.assign(nr, 0.0);
    res.lower.assign(nr, 0.0);
    for (int g = 0; g < groups; ++g) {
      const double* u = acc[g].data() + 2 * q * nr;
      const double* l = u + nr;
      for (size_t k = 0; k < nr; ++k) {
        res.upper[k] += u[k];
        res.lower[k] += l[k];
      }
    }
    res.synthesized = true;
  }
}

double radial_norm(const std::vector<double>& r, const std::vector<double>& w, const std::vector<double>& rF,
                   NormForm form, double r_cut) {
  if (r.size() != w.size() || r.size() != rF.size()) throw DimensionError("radial_norm: size mismatch");
  double acc = 0.0;
  for (size_t k = 0; k < r.size(); ++k) {
    if (r[k] < r_cut) continue;
    acc += w[k] * (form == NormForm::Squared ? rF[k] * rF[k] : std::abs(rF[k]) * r[k]);
  }
  return acc;
}

void norms_and_aggregates(const BasisSet& b, TransformResult& result, NormForm form, double r_cut) {
  if (!result.synthesized) throw std::logic_error("norms_and_aggregates: synthesize first");
  const auto& r = b.grid.r;
  const auto& w = b.grid.w;
  if (result.r.size() != r.size()) throw DimensionError("norms_and_aggregates: grid mismatch");
  std::vector<double> sg(r.size()), sf(r.size());
  basis::sample_state(b, result.seed_index, r, sg.data(), sf.data());
  Norms& n = result.norms;
  n.form = form;
  n.r_cut = r_cut;
  n.rg = radial_norm(r, w, sg, form);
  n.rf = radial_norm(r, w, sf, form);
  n.rUg = radial_norm(r, w, result.upper, form);
  n.rUf = radial_norm(r, w, result.lower, form);
  n.rUg_cut = radial_norm(r, w, result.upper, form, r_cut);
  n.rUf_cut = radial_norm(r, w, result.lower, form, r_cut);
  result.aggregates = aggregate(b.layout, result.seed_index, result.amplitudes);
}

std::vector<double> nonrel_reference(NonrelState s, const std::vector<double>& r) {
  std::vector<double> out(r.size());
  const double c2p = 1.0 / (2.0 * std::sqrt(6.0));
  for (size_t k = 0; k < r.size(); ++k) {
    const double x = r[k];
    out[k] = s == NonrelState::S1 ? 2.0 * x * std::exp(-x) : c2p * x * x * std::exp(-0.5 * x);
  }
  return out;
}

Eigen::VectorXd unitarity_singular_values(const BasisSet& b, const SymmetricMatrixTable& beta,
                                          const SpectralOperator& Z) {
  const int dim = b.layout.dim(), np = b.layout.n_plus(), nb = b.layout.n_bound;
  if (beta.dim() != dim || Z.layout.dim() != dim) throw DimensionError("unitarity: dimension mismatch");
  Eigen::MatrixXd U(dim, nb);
  Eigen::VectorXd v(dim);
  for (int j = 0; j < nb; ++j) {
    for (int i = 0; i < dim; ++i) v[i] = (i == j ? 1.0 : 0.0) + beta(i, j) * b.eps[j];
    U.col(j).head(np).noalias() = Z.z_plus * v.head(np);
    U.col(j).tail(dim - np).noalias() = Z.z_minus * v.tail(dim - np);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(U);
  return svd.singularValues();
}

double commutator_norm(const SymmetricMatrixTable& S, const SpectralOperator& Z) {
  const int np = S.layout().n_plus();
  Eigen::MatrixXd Sp(np, np);
  for (int i = 0; i < np; ++i)
    for (int j = 0; j <= i; ++j) Sp(i, j) = Sp(j, i) = S(i, j);
  return (Z.z_plus * Sp - Sp * Z.z_plus).cwiseAbs().maxCoeff();
}

}  // namespace dirac::eriksen
