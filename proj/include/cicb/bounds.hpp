#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "cicb/constraints.hpp"
#include "cicb/errors.hpp"
#include "cicb/gaussian.hpp"
#include "cicb/polytope.hpp"

namespace cicb {

// Row bounds of the achievable region: the stated mutual information of each
// constraint evaluated on the Gaussian model.
inline std::vector<double> evaluate_mi(const ConstraintSystem& cons,
                                       const GaussianSystem& sys) {
  std::vector<double> out;
  out.reserve(cons.rows.size());
  for (const auto& row : cons.rows) out.push_back(cond_mi(sys, row.mi));
  return out;
}

// Row costs of the converse: the conditional output entropy of each row given
// its side-information set, minus the entropy of the interference given the
// interfering input. The latter is the noise floor that a certificate pays
// once per row.
inline std::vector<double> outer_coeffs(const ConstraintSystem& cons,
                                        const GaussianSystem& sys) {
  std::vector<double> out;
  out.reserve(cons.rows.size());
  for (const auto& row : cons.rows) {
    const VarId s = row.rx_user == 1 ? s2(row.rx_state) : s1(row.rx_state);
    const VarId x = row.rx_user == 1 ? x2() : x1();
    out.push_back(cond_entropy(sys, row.mi.targets, row.mi.given) -
                  cond_entropy(sys, {s}, {x}));
  }
  return out;
}

inline double c_in(const DualCertificate& cert, const std::vector<double>& row_values) {
  if (cert.w.size() != row_values.size())
    throw invalid_input_error("certificate width does not match the row values");
  double v = 0.0;
  for (size_t r = 0; r < row_values.size(); ++r) v += cert.w[r] * row_values[r];
  return v;
}

inline double c_out(const DualCertificate& cert, const std::vector<double>& row_coeffs) {
  if (cert.w.size() != row_coeffs.size())
    throw invalid_input_error("certificate width does not match the row coefficients");
  if (std::fabs(cert.omega1) > 1e-9 || std::fabs(cert.omega2) > 1e-9)
    throw precondition_error("outer evaluation requires zero slack multipliers");
  double v = 0.0;
  for (size_t r = 0; r < row_coeffs.size(); ++r) v += cert.w[r] * row_coeffs[r];
  return v;
}

inline Region2D region_inner(const ConstraintSystem& cons, const std::vector<double>& values,
                             int n_dirs, const SweepOptions& opts = {}) {
  auto hs = make_halfspaces(cons, values);
  return sweep_region([&](double a, double b) { return support_value(hs, a, b); }, n_dirs,
                      opts);
}

// Best slack-free certificate bound per direction. Only slack-free
// certificates yield valid converse hyperplanes, so the sweep pins the
// multiplier family rather than relying on the solver defaults. Directions
// with a negative coordinate fall back to their clipped counterpart, which
// is exact for a region that is down-closed inside the first quadrant.
inline Region2D region_outer(const ConstraintSystem& cons, const std::vector<double>& coeffs,
                             int n_dirs, const SweepOptions& opts = {}) {
  const DualOptions slack_free{.allow_omega = false, .minimize_omega = false};
  return sweep_region(
      [&](double a, double b) {
        return dual_min(cons, coeffs, std::max(a, 0.0), std::max(b, 0.0), slack_free).value;
      },
      n_dirs, opts);
}

// Finite real-amplitude input distribution for one transmitter.
struct DiscreteInput {
  std::vector<double> points;
  std::vector<double> probs;
};

namespace detail {

inline void validate_input(const DiscreteInput& in) {
  if (in.points.empty() || in.points.size() != in.probs.size())
    throw invalid_input_error("constellation points and probabilities must align");
  double total = 0.0;
  for (double p : in.probs) {
    if (p < 0.0) throw invalid_input_error("constellation probabilities must be nonnegative");
    total += p;
  }
  if (std::fabs(total - 1.0) > 1e-9)
    throw invalid_input_error("constellation probabilities must sum to one");
}

}  // namespace detail

// Scale a constellation so its average power is exactly the given value.
inline DiscreteInput normalize_power(DiscreteInput in, double power) {
  detail::validate_input(in);
  if (power <= 0.0) throw invalid_input_error("power must be positive");
  double m2 = 0.0;
  for (size_t i = 0; i < in.points.size(); ++i)
    m2 += in.probs[i] * in.points[i] * in.points[i];
  if (m2 <= 0.0) throw invalid_input_error("constellation carries no energy");
  const double scale = std::sqrt(power / m2);
  for (auto& x : in.points) x *= scale;
  return in;
}

// Nodes and weights for integration against exp(-u^2) on the real line.
struct GhRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline GhRule gauss_hermite(int n) {
  if (n < 1) throw invalid_input_error("quadrature order must be positive");
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double v = std::sqrt(k / 2.0);
    j(k, k - 1) = v;
    j(k - 1, k) = v;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  if (es.info() != Eigen::Success) throw invariant_error("quadrature eigensolve failed");
  GhRule rule;
  const double sqrt_pi = 1.7724538509055160273;
  for (int i = 0; i < n; ++i) {
    rule.nodes.push_back(es.eigenvalues()(i));
    const double v0 = es.eigenvectors()(0, i);
    rule.weights.push_back(sqrt_pi * v0 * v0);
  }
  return rule;
}

namespace detail {

struct MixtureBlocks {
  Eigen::VectorXcd g1;
  Eigen::VectorXcd g2;
  Eigen::MatrixXcd noise_cov;
};

// Mean coefficients on the two inputs and the input-free noise covariance of
// a variable set, read off the degradation chains. Outputs share their
// interference noise, copies run on independent chains.
inline MixtureBlocks mixture_blocks(const GaussianSystem& sys,
                                    const std::vector<VarId>& vars) {
  const auto& chain = sys.chain();
  const int n = chain.n_states;
  const int d = static_cast<int>(vars.size());
  MixtureBlocks mb;
  mb.g1 = Eigen::VectorXcd::Zero(d);
  mb.g2 = Eigen::VectorXcd::Zero(d);
  Eigen::MatrixXcd bn = Eigen::MatrixXcd::Zero(d, 4 * n);
  for (int v = 0; v < d; ++v) {
    const VarId id = vars[v];
    sys.index(id);
    const int st = id.state - 1;
    switch (id.kind) {
      case Var::X1:
      case Var::X2:
        throw invalid_input_error("inputs cannot appear in a mixture entropy");
      case Var::U1:
        mb.g1(v) = chain.rx2[st].cross;
        bn(v, st) = 1.0;
        break;
      case Var::U2:
        mb.g2(v) = chain.rx1[st].cross;
        bn(v, n + st) = 1.0;
        break;
      case Var::S1:
        mb.g1(v) = chain.rx2[st].cross;
        bn(v, 2 * n + st) = 1.0;
        break;
      case Var::S2:
        mb.g2(v) = chain.rx1[st].cross;
        bn(v, 3 * n + st) = 1.0;
        break;
      case Var::Y1:
        mb.g1(v) = chain.rx1[st].direct;
        mb.g2(v) = chain.rx1[st].cross;
        bn(v, 3 * n + st) = 1.0;
        break;
      case Var::Y2:
        mb.g2(v) = chain.rx2[st].direct;
        mb.g1(v) = chain.rx2[st].cross;
        bn(v, 2 * n + st) = 1.0;
        break;
    }
  }
  Eigen::MatrixXcd sigma = Eigen::MatrixXcd::Zero(4 * n, 4 * n);
  const auto ku1 = chain_noise_cov(chain.rx2);
  const auto ku2 = chain_noise_cov(chain.rx1);
  sigma.block(0, 0, n, n) = ku1;
  sigma.block(n, n, n, n) = ku2;
  sigma.block(2 * n, 2 * n, n, n) = ku1;
  sigma.block(3 * n, 3 * n, n, n) = ku2;
  mb.noise_cov = bn * sigma * bn.adjoint();
  mb.noise_cov = 0.5 * (mb.noise_cov + mb.noise_cov.adjoint()).eval();
  return mb;
}

// Differential entropy in bits of the variable set when the inputs take the
// given discrete real amplitudes. The conditional law given both inputs is a
// fixed Gaussian, so the joint is a finite mixture with common covariance;
// after whitening, all means live in the span of the two input directions,
// and only that low-dimensional marginal needs quadrature.
inline double mixture_entropy(const GaussianSystem& sys, std::vector<VarId> vars,
                              const DiscreteInput& in1, const DiscreteInput& in2,
                              const GhRule& rule) {
  validate_input(in1);
  validate_input(in2);
  if (vars.empty()) return 0.0;
  std::sort(vars.begin(), vars.end(), [&](VarId a, VarId b) {
    return sys.index(a) < sys.index(b);
  });
  vars.erase(std::unique(vars.begin(), vars.end(),
                         [&](VarId a, VarId b) { return sys.index(a) == sys.index(b); }),
             vars.end());
  const auto mb = mixture_blocks(sys, vars);
  const int d = static_cast<int>(vars.size());

  Eigen::MatrixXd creal(2 * d, 2 * d);
  creal << 0.5 * mb.noise_cov.real(), -0.5 * mb.noise_cov.imag(),
      0.5 * mb.noise_cov.imag(), 0.5 * mb.noise_cov.real();
  Eigen::LLT<Eigen::MatrixXd> llt(creal);
  if (llt.info() != Eigen::Success)
    throw degenerate_error("mixture noise covariance is singular");
  Eigen::MatrixXd l = llt.matrixL();
  double log2_det_l = 0.0;
  for (int i = 0; i < 2 * d; ++i) log2_det_l += std::log2(l(i, i));

  Eigen::MatrixXd gains(2 * d, 2);
  gains << mb.g1.real(), mb.g2.real(), mb.g1.imag(), mb.g2.imag();
  const Eigen::MatrixXd white = l.triangularView<Eigen::Lower>().solve(gains);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(white, Eigen::ComputeThinU);
  const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > 1e-10 * std::max(1.0, smax)) ++rank;

  const double pi_v = 3.14159265358979323846;
  const double e_v = 2.71828182845904523536;
  const double half_log2_2pie = 0.5 * std::log2(2.0 * pi_v * e_v);
  const double ln2 = std::log(2.0);

  double h_mix = 0.0;
  if (rank > 0) {
    const Eigen::MatrixXd q = svd.matrixU().leftCols(rank);
    const Eigen::VectorXd dir1 = q.transpose() * white.col(0);
    const Eigen::VectorXd dir2 = q.transpose() * white.col(1);
    struct Comp {
      double p;
      double c0, c1;
    };
    std::vector<Comp> comps;
    for (size_t i = 0; i < in1.points.size(); ++i) {
      for (size_t j = 0; j < in2.points.size(); ++j) {
        const double p = in1.probs[i] * in2.probs[j];
        if (p <= 0.0) continue;
        Comp comp;
        comp.p = p;
        comp.c0 = in1.points[i] * dir1(0) + in2.points[j] * dir2(0);
        comp.c1 = rank > 1 ? in1.points[i] * dir1(1) + in2.points[j] * dir2(1) : 0.0;
        comps.push_back(comp);
      }
    }
    auto ln_density = [&](double z0, double z1) {
      double best = -1e300;
      for (const auto& comp : comps) {
        const double d0 = z0 - comp.c0;
        const double d1 = z1 - comp.c1;
        best = std::max(best, std::log(comp.p) - 0.5 * (d0 * d0 + d1 * d1));
      }
      double acc = 0.0;
      for (const auto& comp : comps) {
        const double d0 = z0 - comp.c0;
        const double d1 = z1 - comp.c1;
        acc += std::exp(std::log(comp.p) - 0.5 * (d0 * d0 + d1 * d1) - best);
      }
      return best + std::log(acc) - rank * 0.5 * std::log(2.0 * pi_v);
    };
    const double sqrt2 = 1.4142135623730950488;
    const size_t nodes = rule.nodes.size();
    double expect = 0.0;
    for (const auto& comp : comps) {
      double inner = 0.0;
      if (rank == 1) {
        for (size_t k = 0; k < nodes; ++k)
          inner += rule.weights[k] * ln_density(comp.c0 + sqrt2 * rule.nodes[k], 0.0);
        inner /= 1.7724538509055160273;
      } else {
        for (size_t k = 0; k < nodes; ++k) {
          double row_acc = 0.0;
          const double z0 = comp.c0 + sqrt2 * rule.nodes[k];
          for (size_t m = 0; m < nodes; ++m)
            row_acc += rule.weights[m] * ln_density(z0, comp.c1 + sqrt2 * rule.nodes[m]);
          inner += rule.weights[k] * row_acc;
        }
        inner /= pi_v;
      }
      expect += comp.p * inner;
    }
    h_mix = -expect / ln2;
  }
  return h_mix + (2.0 * d - rank) * half_log2_2pie + log2_det_l;
}

}  // namespace detail

// h(targets | given) in bits under discrete real-amplitude inputs.
inline double mixture_cond_entropy(const GaussianSystem& sys,
                                   const std::vector<VarId>& targets,
                                   const std::vector<VarId>& given, const DiscreteInput& in1,
                                   const DiscreteInput& in2) {
  const auto rule = gauss_hermite(40);
  std::vector<VarId> joint = targets;
  joint.insert(joint.end(), given.begin(), given.end());
  return detail::mixture_entropy(sys, joint, in1, in2, rule) -
         detail::mixture_entropy(sys, given, in1, in2, rule);
}

// Converse row costs under discrete inputs. Points are used as passed; the
// interference-given-input term is the unit noise entropy exactly.
inline std::vector<double> outer_coeffs_discrete(const ConstraintSystem& cons,
                                                 const GaussianSystem& sys,
                                                 const DiscreteInput& in1,
                                                 const DiscreteInput& in2) {
  const auto rule = gauss_hermite(40);
  const double log2_pi_e = std::log2(3.14159265358979323846 * 2.71828182845904523536);
  std::map<std::vector<int>, double> memo;
  auto entropy_of = [&](const std::vector<VarId>& vars) {
    std::vector<int> key;
    key.reserve(vars.size());
    for (const auto& id : vars) key.push_back(sys.index(id));
    std::sort(key.begin(), key.end());
    key.erase(std::unique(key.begin(), key.end()), key.end());
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    const double h = detail::mixture_entropy(sys, vars, in1, in2, rule);
    memo.emplace(std::move(key), h);
    return h;
  };
  std::vector<double> out;
  out.reserve(cons.rows.size());
  for (const auto& row : cons.rows) {
    std::vector<VarId> joint = row.mi.targets;
    joint.insert(joint.end(), row.mi.given.begin(), row.mi.given.end());
    out.push_back(entropy_of(joint) - entropy_of(row.mi.given) - log2_pi_e);
  }
  return out;
}

}  // namespace cicb
