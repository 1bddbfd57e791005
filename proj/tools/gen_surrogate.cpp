// Writes a surrogate hourly OEE CSV (timestamp,oee).
#include <iostream>

#include <CLI11.hpp>

#include "oeecast/errors.hpp"
#include "oeecast/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Surrogate OEE series generator"};
  std::string id = "GH2", output;
  std::uint64_t seed = 0;
  app.add_option("--id", id, "GH2, H2 or GM2 (sets the length)");
  app.add_option("--seed", seed, "Generator seed");
  app.add_option("--output", output, "Output CSV")->required();
  CLI11_PARSE(app, argc, argv);
  try {
    const auto ts = oeecast::synthetic_oee(oeecast::surrogate_profile(id, seed));
    oeecast::save_csv(output, ts, "oee");
  } catch (const oeecast::Error& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
  return 0;
}
