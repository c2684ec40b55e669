// Command-line front end: analyze | verify <suite> | sweep.

#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "chanres/harness.hpp"

namespace {

void add_common(CLI::App* app, chanres::RunConfig& cfg, std::string& report_path) {
  static const std::map<std::string, chanres::ClassTag> classes{{"mio", chanres::ClassTag::MIO},
                                                                {"dio", chanres::ClassTag::DIO}};
  static const std::map<std::string, chanres::DistanceMeasure> measures{
      {"trace", chanres::DistanceMeasure::TraceDistance},
      {"fidelity", chanres::DistanceMeasure::FidelityDistance},
      {"dmax", chanres::DistanceMeasure::MaxRelativeEntropy}};
  static const std::map<std::string, chanres::OutputFormat> formats{{"json", chanres::OutputFormat::Json},
                                                                    {"csv", chanres::OutputFormat::Csv}};
  app->add_option("--dim", cfg.dim, "Hilbert space dimension")->check(CLI::Range(1, 16));
  app->add_option("--class", cfg.cls, "Free channel class")->transform(CLI::CheckedTransformer(classes, CLI::ignore_case));
  app->add_option("--measure", cfg.measure, "Distance measure")
      ->transform(CLI::CheckedTransformer(measures, CLI::ignore_case));
  app->add_option("--tol", cfg.tol, "Certified gap tolerance")->check(CLI::Range(1e-8, 1e-2));
  app->add_option("--trials", cfg.trials, "Randomized trials")->check(CLI::NonNegativeNumber);
  app->add_option("--seed", cfg.seed, "PRNG seed");
  app->add_option("--restarts", cfg.restarts, "Multistart restarts")->check(CLI::NonNegativeNumber);
  app->add_option("--out", cfg.out, "Output format")->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
  app->add_option("--report", report_path, "Write the report to this file instead of stdout");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Channel resource calculator: coherence generating power and discrimination games"};
  app.require_subcommand(1);
  chanres::RunConfig cfg;
  std::string report_path;

  auto* analyze = app.add_subcommand("analyze", "Measures, powers and memberships of channel specs");
  add_common(analyze, cfg, report_path);
  analyze->add_option("--input", cfg.inputs, "Channel spec JSON file(s)")->required();

  auto* verify = app.add_subcommand("verify", "Run a randomized verification suite");
  add_common(verify, cfg, report_path);
  verify->add_option("suite", cfg.tag, "Suite name")->required()->check(CLI::IsMember(chanres::verify_tags()));

  auto* sweep = app.add_subcommand("sweep", "Tabulate powers and discrimination values over generated channels");
  add_common(sweep, cfg, report_path);
  sweep->add_option("--count", cfg.count, "Number of generated channels")->check(CLI::NonNegativeNumber);
  sweep->add_option("--generator", cfg.generator, "haar-unitary or random-channel")
      ->check(CLI::IsMember({"haar-unitary", "random-channel"}));
  sweep->add_flag("--include-dephasing", cfg.include_dephasing, "Prepend the dephasing channel");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : chanres::kExitInvalid;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  const chanres::CommandResult res = chanres::run_command(cfg);
  const bool is_error_text = res.report.rfind("error:", 0) == 0;
  if (is_error_text) {
    std::cerr << res.report;
  } else if (!report_path.empty()) {
    std::ofstream f(report_path, std::ios::binary);
    if (!f) {
      std::cerr << "error: cannot write " << report_path << "\n";
      return chanres::kExitInvalid;
    }
    f << res.report;
  } else {
    std::cout << res.report;
  }
  return res.exit_code;
}
