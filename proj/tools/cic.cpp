#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cicb/cli.hpp"
#include "cicb/errors.hpp"
#include "cicb/io.hpp"

namespace {

std::vector<double> parse_vector_flag(const std::string& text) {
  std::vector<double> out;
  size_t start = 0;
  while (start <= text.size()) {
    const size_t comma = text.find(',', start);
    const std::string item =
        text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    cicb::detail::Token tok{item, static_cast<int>(start) + 1};
    out.push_back(cicb::detail::parse_real(tok, 1));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inner and outer capacity region bounds for finite-state interference channels"};
  app.get_formatter()->column_width(28);

  std::string command = "region";
  std::string channel;
  std::string out_dir = ".";
  std::string vector_text;
  int directions = 361;
  std::uint64_t seed = 42;
  double dir_a = 1.0;
  double dir_b = 1.0;

  app.add_option("--command", command,
                 "one of region, gap, verify, dual-cert, rebalance-demo")
      ->capture_default_str();
  app.add_option("--channel", channel, "channel spec file (Gaussian or deterministic)");
  app.add_option("--directions", directions, "direction count for region sweeps")
      ->capture_default_str();
  app.add_option("--out", out_dir, "output directory for CSV/SVG/report files")
      ->capture_default_str();
  app.add_option("--seed", seed, "seed for the randomized verify suite")->capture_default_str();
  app.add_option("--dir-a", dir_a, "R1 weight for dual-cert")->capture_default_str();
  app.add_option("--dir-b", dir_b, "R2 weight for dual-cert")->capture_default_str();
  app.add_option("--vector", vector_text,
                 "comma-separated rate components for rebalance-demo");

  CLI11_PARSE(app, argc, argv);

  cicb::RunConfig cfg;
  try {
    cfg.command = cicb::parse_command(command);
    if (!vector_text.empty()) cfg.vector_arg = parse_vector_flag(vector_text);
  } catch (const cicb::error& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  }
  cfg.channel_path = channel;
  cfg.directions = directions;
  cfg.out_dir = out_dir;
  cfg.seed = seed;
  cfg.dir_a = dir_a;
  cfg.dir_b = dir_b;

  const bool needs_channel = cfg.command != cicb::Command::verify;
  if (needs_channel && cfg.channel_path.empty()) {
    std::cerr << "invalid input: --channel is required for the " << command << " command\n";
    return 2;
  }
  return cicb::run(cfg, std::cout, std::cerr);
}
