#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "graphtube/error.hpp"
#include "graphtube/experiments.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitError = 1;
constexpr int kExitCriteria = 2;

} // namespace

int main(int argc, char** argv) {
  using namespace graphtube;
  CLI::App app{"graph-like thin domain experiments"};
  std::string experiment, config_path, out_dir;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string kinds;
  for (auto k : all_experiment_kinds()) kinds += (kinds.empty() ? "" : ", ") + to_string(k);
  app.add_option("experiment", experiment, "one of: " + kinds)->required();
  app.add_option("--config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory")->required();
  auto* seed_opt = app.add_option("--seed", seed, "overrides the config seed");
  auto* threads_opt = app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitError;
  }

  try {
    const auto kind = parse_experiment_kind(experiment);
    if (!kind) throw InvalidParameter("unknown experiment '" + experiment + "'; expected one of: " + kinds);
    std::ifstream in(config_path);
    if (!in) throw Error("cannot open config " + config_path);
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw InvalidParameter("config " + config_path + ": " + e.what());
    }
    auto cfg = config_from_json(*kind, doc);
    if (*seed_opt) cfg.seed = seed;
    if (*threads_opt) cfg.threads = threads;

    const auto result = run_experiment(cfg);
    std::filesystem::create_directories(out_dir);
    for (const auto& p : emit_outputs(result, out_dir)) std::cout << "wrote " << p.string() << "\n";
    for (const auto& c : result.criteria)
      std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
    return result.passed() ? kExitPass : kExitCriteria;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
