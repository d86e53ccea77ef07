#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "cicb/channel.hpp"
#include "cicb/errors.hpp"
#include "cicb/rng.hpp"

namespace cicb {

// Variable kinds of the joint Gaussian model. X: channel inputs; U: per-state
// side-information copies of the interference; S: per-state interference
// itself; Y: per-state receiver outputs. States are 1-based.
enum class Var : int { X1, X2, U1, U2, S1, S2, Y1, Y2 };

struct VarId {
  Var kind = Var::X1;
  int state = 0;
  auto operator<=>(const VarId&) const = default;
};

inline VarId x1() { return {Var::X1, 0}; }
inline VarId x2() { return {Var::X2, 0}; }
inline VarId u1(int n) { return {Var::U1, n}; }
inline VarId u2(int n) { return {Var::U2, n}; }
inline VarId s1(int n) { return {Var::S1, n}; }
inline VarId s2(int n) { return {Var::S2, n}; }
inline VarId y1(int n) { return {Var::Y1, n}; }
inline VarId y2(int n) { return {Var::Y2, n}; }

inline std::string var_name(VarId id) {
  switch (id.kind) {
    case Var::X1: return "X1";
    case Var::X2: return "X2";
    case Var::U1: return "U1s" + std::to_string(id.state);
    case Var::U2: return "U2s" + std::to_string(id.state);
    case Var::S1: return "S1s" + std::to_string(id.state);
    case Var::S2: return "S2s" + std::to_string(id.state);
    case Var::Y1: return "Y1s" + std::to_string(id.state);
    case Var::Y2: return "Y2s" + std::to_string(id.state);
  }
  return "?";
}

// I(subjects ; targets | given).
struct MISpec {
  std::vector<VarId> subjects;
  std::vector<VarId> targets;
  std::vector<VarId> given;
};

// Joint circularly symmetric Gaussian model over the inputs, the two
// degradation chains, the side-information copies, and the outputs.
// Variable order: X1, X2, U1(1..N), U2(1..N), S1(1..N), S2(1..N),
// Y1(1..N), Y2(1..N).
class GaussianSystem {
 public:
  GaussianSystem(DegradedChain chain, std::vector<VarId> ids, Eigen::MatrixXcd cov)
      : chain_(std::move(chain)), ids_(std::move(ids)), cov_(std::move(cov)) {}

  int n_states() const { return chain_.n_states; }
  double p1() const { return chain_.p1; }
  double p2() const { return chain_.p2; }
  const DegradedChain& chain() const { return chain_; }
  const std::vector<VarId>& ids() const { return ids_; }
  const Eigen::MatrixXcd& cov() const { return cov_; }

  // Position of a variable in the covariance matrix; throws
  // invalid_input_error for ids outside the model.
  int index(VarId id) const {
    const int n = chain_.n_states;
    auto check_state = [&](int s) {
      if (s < 1 || s > n)
        throw invalid_input_error("variable state index out of range: " + var_name(id));
    };
    switch (id.kind) {
      case Var::X1:
      case Var::X2:
        if (id.state != 0)
          throw invalid_input_error("input variables carry no state index");
        return id.kind == Var::X1 ? 0 : 1;
      case Var::U1: check_state(id.state); return 2 + (id.state - 1);
      case Var::U2: check_state(id.state); return 2 + n + (id.state - 1);
      case Var::S1: check_state(id.state); return 2 + 2 * n + (id.state - 1);
      case Var::S2: check_state(id.state); return 2 + 3 * n + (id.state - 1);
      case Var::Y1: check_state(id.state); return 2 + 4 * n + (id.state - 1);
      case Var::Y2: check_state(id.state); return 2 + 5 * n + (id.state - 1);
    }
    throw invalid_input_error("unknown variable kind");
  }

 private:
  DegradedChain chain_;
  std::vector<VarId> ids_;
  Eigen::MatrixXcd cov_;
};

namespace detail {

// Covariance of the chained noises: cov(W_n, W_m) for n >= m is the product
// of the ratios from stage m+1 through n (each stage has unit variance).
inline Eigen::MatrixXcd chain_noise_cov(const std::vector<ChainStage>& stages) {
  const int n = static_cast<int>(stages.size());
  Eigen::MatrixXcd k = Eigen::MatrixXcd::Identity(n, n);
  for (int row = 0; row < n; ++row) {
    std::complex<double> prod = 1.0;
    for (int col = row - 1; col >= 0; --col) {
      prod *= stages[col + 1].ratio;
      k(row, col) = prod;
      k(col, row) = std::conj(prod);
    }
  }
  return k;
}

}  // namespace detail

// Assembles the joint covariance from the degradation chains. Every model
// variable is a linear combination of the basis (X1, X2, and the four
// independent noise chains), so the covariance is B * Sigma0 * B^H.
inline GaussianSystem build_system(const DegradedChain& chain) {
  const int n = chain.n_states;
  if (n < 1) throw invalid_input_error("degraded chain has no states");
  const int n_basis = 2 + 4 * n;
  const int n_model = 2 + 6 * n;

  Eigen::MatrixXcd sigma0 = Eigen::MatrixXcd::Zero(n_basis, n_basis);
  sigma0(0, 0) = chain.p1;
  sigma0(1, 1) = chain.p2;
  const auto ku1 = detail::chain_noise_cov(chain.rx2);  // user-1 chain noises
  const auto ku2 = detail::chain_noise_cov(chain.rx1);  // user-2 chain noises
  sigma0.block(2, 2, n, n) = ku1;                       // U1 copies
  sigma0.block(2 + n, 2 + n, n, n) = ku2;               // U2 copies
  sigma0.block(2 + 2 * n, 2 + 2 * n, n, n) = ku1;       // S1 chain
  sigma0.block(2 + 3 * n, 2 + 3 * n, n, n) = ku2;       // S2 chain

  Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(n_model, n_basis);
  b(0, 0) = 1.0;  // X1
  b(1, 1) = 1.0;  // X2
  for (int i = 0; i < n; ++i) {
    const auto c1 = chain.rx2[i].cross;   // user-1 cross gain in state i+1
    const auto c2 = chain.rx1[i].cross;   // user-2 cross gain in state i+1
    const auto d1 = chain.rx1[i].direct;  // receiver-1 direct gain
    const auto d2 = chain.rx2[i].direct;  // receiver-2 direct gain
    b(2 + i, 0) = c1;                     // U1(i+1)
    b(2 + i, 2 + i) = 1.0;
    b(2 + n + i, 1) = c2;                 // U2(i+1)
    b(2 + n + i, 2 + n + i) = 1.0;
    b(2 + 2 * n + i, 0) = c1;             // S1(i+1)
    b(2 + 2 * n + i, 2 + 2 * n + i) = 1.0;
    b(2 + 3 * n + i, 1) = c2;             // S2(i+1)
    b(2 + 3 * n + i, 2 + 3 * n + i) = 1.0;
    b(2 + 4 * n + i, 0) = d1;             // Y1(i+1) = d1 X1 + S2(i+1)
    b(2 + 4 * n + i, 1) = c2;
    b(2 + 4 * n + i, 2 + 3 * n + i) = 1.0;
    b(2 + 5 * n + i, 1) = d2;             // Y2(i+1) = d2 X2 + S1(i+1)
    b(2 + 5 * n + i, 0) = c1;
    b(2 + 5 * n + i, 2 + 2 * n + i) = 1.0;
  }

  Eigen::MatrixXcd cov = b * sigma0 * b.adjoint();
  cov = 0.5 * (cov + cov.adjoint()).eval();

  std::vector<VarId> ids;
  ids.reserve(n_model);
  ids.push_back(x1());
  ids.push_back(x2());
  for (int i = 1; i <= n; ++i) ids.push_back(u1(i));
  for (int i = 1; i <= n; ++i) ids.push_back(u2(i));
  for (int i = 1; i <= n; ++i) ids.push_back(s1(i));
  for (int i = 1; i <= n; ++i) ids.push_back(s2(i));
  for (int i = 1; i <= n; ++i) ids.push_back(y1(i));
  for (int i = 1; i <= n; ++i) ids.push_back(y2(i));
  return GaussianSystem(chain, std::move(ids), std::move(cov));
}

namespace detail {

inline std::vector<int> canonical_indices(const GaussianSystem& sys,
                                          std::vector<VarId> vars) {
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  std::vector<int> idx;
  idx.reserve(vars.size());
  for (auto v : vars) idx.push_back(sys.index(v));
  return idx;
}

inline Eigen::MatrixXcd submatrix(const Eigen::MatrixXcd& m, const std::vector<int>& rows,
                                  const std::vector<int>& cols) {
  Eigen::MatrixXcd out(rows.size(), cols.size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < cols.size(); ++j) out(i, j) = m(rows[i], cols[j]);
  return out;
}

}  // namespace detail

// Differential entropy h(targets | given) in bits for the complex Gaussian
// model: log2((pi*e)^t * det of the conditional covariance). Conditioning uses
// a pseudo-inverse with an eigenvalue floor of 1e-12 relative to the trace, so
// exactly collinear given-blocks (duplicated states) are handled. Returns
// -infinity when the conditional covariance is singular (some target direction
// is determined by the conditioning); throws degenerate_error when an
// eigenvalue is negative beyond tolerance.
inline double cond_entropy(const GaussianSystem& sys, std::vector<VarId> targets,
                           std::vector<VarId> given) {
  const auto ti = detail::canonical_indices(sys, std::move(targets));
  if (ti.empty()) return 0.0;
  const auto gi = detail::canonical_indices(sys, std::move(given));

  const auto& cov = sys.cov();
  Eigen::MatrixXcd m = detail::submatrix(cov, ti, ti);
  const double trace_t = std::max(m.real().trace(), 1e-300);

  if (!gi.empty()) {
    Eigen::MatrixXcd sg = detail::submatrix(cov, gi, gi);
    Eigen::MatrixXcd stg = detail::submatrix(cov, ti, gi);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sg);
    if (es.info() != Eigen::Success)
      throw degenerate_error("eigendecomposition of the conditioning block failed");
    const double trace_g = std::max(sg.real().trace(), 1e-300);
    const double floor_g = 1e-12 * trace_g;
    Eigen::VectorXd inv = es.eigenvalues();
    for (int i = 0; i < inv.size(); ++i) {
      if (inv[i] < -1e-9 * std::max(1.0, trace_g))
        throw degenerate_error("conditioning covariance has a negative eigenvalue");
      inv[i] = inv[i] > floor_g ? 1.0 / inv[i] : 0.0;
    }
    const Eigen::MatrixXcd pinv =
        es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
    m -= stg * pinv * stg.adjoint();
    m = 0.5 * (m + m.adjoint()).eval();
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
  if (es.info() != Eigen::Success)
    throw degenerate_error("eigendecomposition of the conditional covariance failed");
  const double zero_tol = 1e-12 * trace_t;
  const double neg_tol = 1e-9 * std::max(1.0, trace_t);
  static const double log2_pi_e =
      std::log2(3.14159265358979323846 * 2.71828182845904523536);
  double bits = static_cast<double>(ti.size()) * log2_pi_e;
  bool singular = false;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const double lam = es.eigenvalues()[i];
    if (lam < -neg_tol)
      throw degenerate_error("conditional covariance has a negative eigenvalue");
    if (lam <= zero_tol) {
      singular = true;
      continue;
    }
    bits += std::log2(lam);
  }
  if (singular) return -std::numeric_limits<double>::infinity();
  return bits;
}

// Conditional mutual information I(subjects ; targets | given) in bits.
// Always nonnegative up to numerical noise; values in [-1e-9, 0) are clamped
// to 0, anything lower raises invariant_error. Degenerate combinations (for
// example a target fully determined by the conditioning) raise
// degenerate_error.
inline double cond_mi(const GaussianSystem& sys, const MISpec& spec) {
  const double h1 = cond_entropy(sys, spec.targets, spec.given);
  std::vector<VarId> wide = spec.given;
  wide.insert(wide.end(), spec.subjects.begin(), spec.subjects.end());
  const double h2 = cond_entropy(sys, spec.targets, wide);
  const bool inf1 = std::isinf(h1), inf2 = std::isinf(h2);
  if (inf1 && inf2)
    throw degenerate_error("mutual information undefined: targets degenerate under conditioning");
  if (inf2)
    throw degenerate_error("mutual information diverges: subjects determine the targets");
  if (inf1)
    throw invariant_error("conditioning increased a differential entropy to -infinity");
  double mi = h1 - h2;
  if (mi < -1e-9)
    throw invariant_error("conditional mutual information fell below -1e-9: " +
                          std::to_string(mi));
  return mi < 0.0 ? 0.0 : mi;
}

// Draws one realization of every model variable by simulating the generative
// recursions directly (inputs, then the four noise chains, then the derived
// variables). Output is aligned with ids(). This path shares no code with the
// covariance assembly, which makes it usable as an independent check of
// build_system.
inline Eigen::VectorXcd sample(const GaussianSystem& sys, rng_t& rng) {
  const auto& chain = sys.chain();
  const int n = chain.n_states;
  Eigen::VectorXcd out(2 + 6 * n);
  const std::complex<double> vx1 = cnormal(rng, chain.p1);
  const std::complex<double> vx2 = cnormal(rng, chain.p2);
  out[0] = vx1;
  out[1] = vx2;
  std::complex<double> wu1, ws1, wu2, ws2;
  for (int i = 0; i < n; ++i) {
    const auto& st1 = chain.rx2[i];  // user-1 chain
    const auto& st2 = chain.rx1[i];  // user-2 chain
    if (i == 0) {
      wu1 = cnormal(rng);
      ws1 = cnormal(rng);
      wu2 = cnormal(rng);
      ws2 = cnormal(rng);
    } else {
      wu1 = st1.ratio * wu1 + st1.residual * cnormal(rng);
      ws1 = st1.ratio * ws1 + st1.residual * cnormal(rng);
      wu2 = st2.ratio * wu2 + st2.residual * cnormal(rng);
      ws2 = st2.ratio * ws2 + st2.residual * cnormal(rng);
    }
    const auto s1v = st1.cross * vx1 + ws1;
    const auto s2v = st2.cross * vx2 + ws2;
    out[2 + i] = st1.cross * vx1 + wu1;          // U1
    out[2 + n + i] = st2.cross * vx2 + wu2;      // U2
    out[2 + 2 * n + i] = s1v;                    // S1
    out[2 + 3 * n + i] = s2v;                    // S2
    out[2 + 4 * n + i] = st2.direct * vx1 + s2v; // Y1
    out[2 + 5 * n + i] = st1.direct * vx2 + s1v; // Y2
  }
  return out;
}

}  // namespace cicb
