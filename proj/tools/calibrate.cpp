// Prints the largest KS distance between i.i.d. N(0,1) samples and the normal
// law over a grid of seeds; used to freeze the scaling thresholds.

#include <cstdint>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "polylab/metrics.hpp"

int main(int argc, char** argv) {
  CLI::App app{"KS threshold calibration"};
  std::size_t samples = 20000;
  std::size_t coordinates = 1;
  std::size_t seeds = 100;
  std::uint64_t seed = 1;
  app.add_option("--samples", samples)->check(CLI::PositiveNumber);
  app.add_option("--coordinates", coordinates)->check(CLI::PositiveNumber);
  app.add_option("--seeds", seeds)->check(CLI::PositiveNumber);
  app.add_option("--seed", seed);
  CLI11_PARSE(app, argc, argv);

  const double ks = polylab::calibrate_ks_threshold(samples, coordinates, seeds, seed);
  std::cout << nlohmann::json{{"samples", samples}, {"coordinates", coordinates}, {"seeds", seeds}, {"seed", seed},
                              {"maxKs", ks}}
                   .dump()
            << '\n';
  return 0;
}
