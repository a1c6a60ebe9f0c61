// lambdagent-harness: fault-injection experiment driver. Injects the five
// known fault types into known-good baselines and scores lint detection.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lambdagent/fault.hpp"
#include "lambdagent/version.hpp"

namespace la = lambdagent;

int main(int argc, char** argv) {
  CLI::App app{"fault-injection matrix for agent configurations"};
  app.require_subcommand(1);

  std::string baselineDir;
  std::string format = "human";
  CLI::App* cmdMatrix =
      app.add_subcommand("run-matrix", "inject all fault kinds into every baseline");
  cmdMatrix->add_option("--baselines", baselineDir, "directory of known-good configs")
      ->required();
  cmdMatrix->add_option("--format", format, "output mode")
      ->check(CLI::IsMember({"human", "structured"}));
  app.add_subcommand("version", "print the version");

  CLI11_PARSE(app, argc, argv);

  if (!cmdMatrix->parsed()) {
    std::cout << "lambdagent-harness " << la::kVersion << "\n";
    return 0;
  }

  try {
    std::vector<std::string> files;
    for (const auto& entry : std::filesystem::directory_iterator(baselineDir)) {
      if (!entry.is_regular_file()) continue;
      std::string ext = entry.path().extension().string();
      if (ext == ".yaml" || ext == ".yml" || ext == ".json")
        files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
      std::cerr << "error: no baseline configs under " << baselineDir << "\n";
      return 2;
    }
    std::vector<la::CanonicalConfig> baselines;
    baselines.reserve(files.size());
    for (const auto& file : files) baselines.push_back(la::loadCanonicalConfig(file));

    if (format == "structured") {
      std::cout << la::renderMatrixStructured(baselines, la::allFaultKinds());
    }
    la::MatrixReport report = la::runMatrix(baselines, la::allFaultKinds());
    std::cout << la::renderMatrixReport(report);
    bool perfect = report.detected == report.injected &&
                   report.falsePositivesOnBaselines == 0;
    return perfect ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
