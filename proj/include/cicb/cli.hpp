#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "cicb/bounds.hpp"
#include "cicb/channel.hpp"
#include "cicb/constraints.hpp"
#include "cicb/det_oracle.hpp"
#include "cicb/errors.hpp"
#include "cicb/gap.hpp"
#include "cicb/gaussian.hpp"
#include "cicb/io.hpp"
#include "cicb/polytope.hpp"
#include "cicb/rebalance.hpp"
#include "cicb/rng.hpp"
#include "cicb/simplex.hpp"

namespace cicb {

enum class Command { region, gap, verify, dual_cert, rebalance_demo };

inline Command parse_command(const std::string& name) {
  if (name == "region") return Command::region;
  if (name == "gap") return Command::gap;
  if (name == "verify") return Command::verify;
  if (name == "dual-cert") return Command::dual_cert;
  if (name == "rebalance-demo") return Command::rebalance_demo;
  throw invalid_input_error("unknown command '" + name + "'");
}

inline const char* command_name(Command cmd) {
  switch (cmd) {
    case Command::region: return "region";
    case Command::gap: return "gap";
    case Command::verify: return "verify";
    case Command::dual_cert: return "dual-cert";
    case Command::rebalance_demo: return "rebalance-demo";
  }
  return "?";
}

struct RunConfig {
  Command command = Command::region;
  std::string channel_path;
  int directions = 361;
  std::string out_dir = ".";
  std::uint64_t seed = 42;
  double dir_a = 1.0;
  double dir_b = 1.0;
  std::vector<double> vector_arg;
};

namespace detail {

// Either channel kind reduced to the common pipeline inputs: the constraint
// system, the achievable row values, and the converse row coefficients.
struct LoadedProblem {
  bool deterministic = false;
  CompoundChannel gauss;
  DetSpec det;
  ConstraintSystem cons;
  std::vector<double> values;
  std::vector<double> coeffs;
};

inline LoadedProblem load_problem(const std::string& path) {
  const std::string text = read_text_file(path);
  LoadedProblem p;
  {
    std::istringstream sniff(text);
    p.deterministic = is_det_channel_text(sniff);
  }
  std::istringstream in(text);
  if (p.deterministic) {
    p.det = parse_det_channel(in);
    validate(p.det.channel);
    p.cons = gen_nstate(p.det.channel.n_states);
    p.values = det_evaluate_mi(p.det.channel, p.det.dist, p.cons);
    p.coeffs = det_outer_coeffs(p.det.channel, p.det.dist, p.cons);
  } else {
    p.gauss = canonicalize(parse_channel(in));
    const auto chain = build_degraded_chain(p.gauss);
    const auto sys = build_system(chain);
    p.cons = gen_nstate(chain.n_states);
    p.values = evaluate_mi(p.cons, sys);
    p.coeffs = outer_coeffs(p.cons, sys);
  }
  return p;
}

inline std::string vector_text(std::span<const double> v) {
  std::string out = "(";
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += fmt_g9(v[i]);
  }
  return out + ")";
}

inline void print_certificate(std::ostream& out, const char* label,
                              const ConstraintSystem& cons, const DualCertificate& cert) {
  out << label << " value " << fmt_g9(cert.value) << "\n";
  for (size_t r = 0; r < cert.w.size(); ++r)
    if (cert.w[r] > 1e-12)
      out << "  w " << cons.rows[r].tag << " " << fmt_g9(cert.w[r]) << "\n";
  if (std::fabs(cert.omega1) > 1e-12 || std::fabs(cert.omega2) > 1e-12)
    out << "  omega " << fmt_g9(cert.omega1) << " " << fmt_g9(cert.omega2) << "\n";
}

inline int run_region(const RunConfig& cfg, std::ostream& out) {
  const auto p = load_problem(cfg.channel_path);
  const auto inner = region_inner(p.cons, p.values, cfg.directions);
  const auto outer = region_outer(p.cons, p.coeffs, cfg.directions);
  std::filesystem::create_directories(cfg.out_dir);
  const auto csv = (std::filesystem::path(cfg.out_dir) / "region.csv").string();
  const auto svg = (std::filesystem::path(cfg.out_dir) / "region.svg").string();
  write_text_file(csv, bounds_csv(inner, outer));
  write_text_file(svg, region_svg(inner, outer));
  const auto sum_rate = [](const Region2D& region) {
    double best = 0.0;
    for (const auto& v : region.vertices) best = std::max(best, v[0] + v[1]);
    return best;
  };
  out << "wrote " << csv << " and " << svg << "\n";
  out << "inner bound: " << inner.vertices.size() << " vertices, sum rate "
      << fmt_g9(sum_rate(inner)) << "\n";
  out << "outer bound: " << outer.vertices.size() << " vertices, sum rate "
      << fmt_g9(sum_rate(outer)) << "\n";
  return 0;
}

inline int run_gap(const RunConfig& cfg, std::ostream& out) {
  const auto p = load_problem(cfg.channel_path);
  const GapReport report = p.deterministic
                               ? det_certify(p.det.channel, p.det.dist, cfg.directions)
                               : certify(p.gauss, cfg.directions);
  const std::string text = write_gap_report(report);
  std::filesystem::create_directories(cfg.out_dir);
  write_text_file((std::filesystem::path(cfg.out_dir) / "gap.txt").string(), text);
  out << text;
  return report.certified ? 0 : 1;
}

inline int run_dual_cert(const RunConfig& cfg, std::ostream& out) {
  if (cfg.dir_a < 0.0 || cfg.dir_b < 0.0 || cfg.dir_a + cfg.dir_b <= 0.0)
    throw invalid_input_error("direction weights must be nonnegative with a positive sum");
  const auto p = load_problem(cfg.channel_path);
  out << "direction a " << fmt_g9(cfg.dir_a) << " b " << fmt_g9(cfg.dir_b) << "\n";
  print_certificate(out, "inner", p.cons, dual_min(p.cons, p.values, cfg.dir_a, cfg.dir_b));
  print_certificate(out, "outer", p.cons,
                    dual_min(p.cons, p.coeffs, cfg.dir_a, cfg.dir_b,
                             {.allow_omega = false, .minimize_omega = false}));
  return 0;
}

inline int run_rebalance_demo(const RunConfig& cfg, std::ostream& out) {
  if (cfg.vector_arg.empty())
    throw invalid_input_error("rebalance-demo needs --vector with one rate per component");
  const auto p = load_problem(cfg.channel_path);
  const auto balanced = rebalance(p.cons, p.values, cfg.vector_arg);

  auto cond = p.cons;
  cond.form = RegionForm::conditional;
  auto list_violations = [&](const std::vector<double>& point) {
    const auto bad = violated_rows(cond, p.values, point);
    if (bad.empty()) return std::string("none");
    std::string text;
    for (size_t i = 0; i < bad.size(); ++i) {
      if (i) text += " ";
      text += bad[i];
    }
    return text;
  };

  out << "input " << vector_text(cfg.vector_arg) << "\n";
  out << "componentwise violations: " << list_violations(cfg.vector_arg) << "\n";
  std::vector<double> work = cfg.vector_arg;
  const int width = p.cons.n_states + 1;
  for (int user = 0; user < 2; ++user) {
    std::span<double> part(work.data() + user * width, static_cast<size_t>(width));
    absorb_inward(part);
    out << "user " << user + 1 << " after inward absorption " << vector_text(work) << "\n";
    spread_outward(part);
    out << "user " << user + 1 << " after outward spread " << vector_text(work) << "\n";
  }
  if (work != balanced)
    throw invariant_error("replayed cascade disagrees with the rebalance result");
  out << "output " << vector_text(balanced) << "\n";
  out << "componentwise violations: " << list_violations(balanced) << "\n";
  return 0;
}

inline CompoundChannel random_verify_channel(rng_t& gen, int n_states) {
  CompoundChannel ch;
  ch.p1 = std::pow(10.0, 1.5 * runif(gen));
  ch.p2 = std::pow(10.0, 1.5 * runif(gen));
  for (int s = 0; s < n_states; ++s) {
    ch.rx1.push_back({random_gain(gen, -10.0, 10.0), random_gain(gen, -10.0, 10.0)});
    ch.rx2.push_back({random_gain(gen, -10.0, 10.0), random_gain(gen, -10.0, 10.0)});
  }
  return canonicalize(ch);
}

inline DiscreteInput random_verify_input(rng_t& gen, double power) {
  DiscreteInput in;
  const int n = 2 + static_cast<int>(runif(gen) * 3.0);
  for (int i = 0; i < n; ++i) {
    in.points.push_back(runif(gen, -2.0, 2.0));
    in.probs.push_back(0.1 + runif(gen));
  }
  double total = 0.0;
  for (double p : in.probs) total += p;
  for (double& p : in.probs) p /= total;
  return normalize_power(in, power);
}

// The self-contained property suite behind the verify command. Each check
// reports one line; any failure flips the exit status.
inline int run_verify(const RunConfig& cfg, std::ostream& out) {
  rng_t gen(cfg.seed);
  int failures = 0;
  auto report = [&](const char* name, bool ok, const std::string& detail = "") {
    if (ok) {
      out << "ok " << name << "\n";
    } else {
      ++failures;
      out << "FAIL " << name << (detail.empty() ? "" : " (" + detail + ")") << "\n";
    }
  };

  const auto cons = gen_nstate(2);
  std::vector<std::pair<std::vector<double>, DualCertificate>> optimal;

  {
    double worst = 0.0;
    std::string where;
    for (int rep = 0; rep < 6; ++rep) {
      const auto ch = random_verify_channel(gen, 2);
      const auto values = evaluate_mi(cons, build_system(build_degraded_chain(ch)));
      const auto hs = make_halfspaces(cons, values);
      for (int i = 0; i < 9; ++i) {
        const double t = 0.5 * std::acos(-1.0) * i / 8.0;
        const double a = std::max(std::cos(t), 0.0);
        const double b = std::max(std::sin(t), 0.0);
        const auto cert = dual_min(cons, values, a, b);
        const double gap = std::fabs(support_value(hs, a, b) - cert.value);
        if (gap > worst) {
          worst = gap;
          where = "direction " + std::to_string(i) + ", channel " + std::to_string(rep);
        }
        if (std::fabs(cert.omega1) <= 1e-9 && std::fabs(cert.omega2) <= 1e-9)
          optimal.emplace_back(values, cert);
      }
    }
    report("strong-duality", worst <= 1e-7,
           "max |support - dual| " + fmt_g9(worst) + " at " + where);
  }

  {
    double worst = 0.0;
    for (const auto& [values, cert] : optimal)
      for (double res : check_prop1(cons, cert)) worst = std::max(worst, std::fabs(res));
    report("certificate-balance", worst <= 1e-8, "max residual " + fmt_g9(worst));
  }

  {
    double worst = 0.0;
    for (int rep = 0; rep < 3; ++rep) {
      const auto ch = random_verify_channel(gen, 2);
      const auto values = evaluate_mi(cons, build_system(build_degraded_chain(ch)));
      const auto swept = region_inner(cons, values, 181);
      const auto projected = polygon_from_halfspaces(project_rates(make_halfspaces(cons, values)));
      worst = std::max(worst, hausdorff(swept.vertices, projected));
    }
    report("projection-vs-sweep", worst <= 1e-6, "max Hausdorff distance " + fmt_g9(worst));
  }

  {
    const auto ch = random_verify_channel(gen, 2);
    const auto values = evaluate_mi(cons, build_system(build_degraded_chain(ch)));
    auto cond = cons;
    cond.form = RegionForm::conditional;
    const auto [rows_le, rhs_le] = le_rows(make_halfspaces(cons, values));
    const int dim = cons.dim();
    int checked = 0;
    bool ok = true;
    std::string detail_text;
    for (int draw = 0; draw < 200 && checked < 60; ++draw) {
      std::vector<double> objective(dim);
      for (double& c : objective) c = runif(gen, -1.0, 1.0);
      std::vector<double> point;
      try {
        point = lp_max_free(rows_le, rhs_le, objective).x;
      } catch (const unbounded_error&) {
        continue;
      }
      if (*std::min_element(point.begin(), point.end()) > -1e-9) continue;
      ++checked;
      const auto balanced = rebalance(cons, values, point);
      if (!violated_rows(cond, values, balanced, 1e-8).empty()) {
        ok = false;
        detail_text = "rebalanced point stays outside the componentwise region";
        break;
      }
      for (int user = 0; user < 2; ++user) {
        double before = 0.0, after = 0.0;
        for (int l = 0; l <= cons.n_states; ++l) {
          before += point[static_cast<size_t>(user * (cons.n_states + 1) + l)];
          after += balanced[static_cast<size_t>(user * (cons.n_states + 1) + l)];
        }
        if (std::fabs(before - after) > 1e-12) {
          ok = false;
          detail_text = "per-user sum not preserved";
        }
      }
      if (!ok) break;
    }
    if (checked < 10) {
      ok = false;
      detail_text = "too few vertices with negative components found";
    }
    report("rebalance-cascade", ok, detail_text);
  }

  {
    bool ok = true;
    std::string detail_text;
    const auto ch = random_verify_channel(gen, 2);
    const auto sys = build_system(build_degraded_chain(ch));
    const auto gauss_coeffs = outer_coeffs(cons, sys);
    for (int rep = 0; rep < 2 && ok; ++rep) {
      const auto in1 = random_verify_input(gen, ch.p1);
      const auto in2 = random_verify_input(gen, ch.p2);
      const auto disc_coeffs = outer_coeffs_discrete(cons, sys, in1, in2);
      for (int c = 0; c < 3 && ok; ++c) {
        const double t = 0.5 * std::acos(-1.0) * (c + runif(gen)) / 3.0;
        const auto cert =
            dual_min(cons, gauss_coeffs, std::max(std::cos(t), 0.0), std::max(std::sin(t), 0.0),
                     {.allow_omega = false, .minimize_omega = false});
        const double margin = c_out(cert, gauss_coeffs) + 1e-3 - c_out(cert, disc_coeffs);
        if (margin < 0.0) {
          ok = false;
          detail_text = "discrete certificate exceeds the Gaussian one by " + fmt_g9(-margin);
        }
      }
    }
    report("gaussian-dominance", ok, detail_text);
  }

  {
    bool ok = true;
    std::string detail_text;
    for (const auto& fixture : builtin_det_fixtures()) {
      DiscreteDist dist;
      dist.p1.assign(static_cast<size_t>(fixture.channel.nx1), 1.0 / fixture.channel.nx1);
      dist.p2.assign(static_cast<size_t>(fixture.channel.nx2), 1.0 / fixture.channel.nx2);
      const auto report_det = det_certify(fixture.channel, dist, 33);
      if (!report_det.certified || report_det.delta1 != 0.0 || report_det.delta2 != 0.0) {
        ok = false;
        detail_text = "fixture " + fixture.name;
        break;
      }
    }
    report("deterministic-fixtures", ok, detail_text);
  }

  out << (failures == 0 ? "verify: all checks passed\n"
                        : "verify: " + std::to_string(failures) + " check(s) failed\n");
  return failures == 0 ? 0 : 1;
}

}  // namespace detail

// Entry point shared by the binary and the tests. Returns 0 on success, 1 on
// a failed computation or verification, 2 on unusable input.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.directions < 3) throw invalid_input_error("at least three directions required");
    switch (cfg.command) {
      case Command::region: return detail::run_region(cfg, out);
      case Command::gap: return detail::run_gap(cfg, out);
      case Command::verify: return detail::run_verify(cfg, out);
      case Command::dual_cert: return detail::run_dual_cert(cfg, out);
      case Command::rebalance_demo: return detail::run_rebalance_demo(cfg, out);
    }
    throw invalid_input_error("unknown command");
  } catch (const parse_error& e) {
    err << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const invalid_input_error& e) {
    err << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace cicb
