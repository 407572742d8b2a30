// resil: run resilience campaigns on a simulated or remote cluster backend,
// re-analyze persisted results, and render reports.
#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "resil/artifacts.hpp"
#include "resil/config.hpp"
#include "resil/orchestrator.hpp"
#include "resil/remote.hpp"

namespace {

namespace fs = std::filesystem;
using namespace resil;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int cmd_run(const std::string& plan_path, const std::string& backend_flag,
            const std::string& endpoint_flag, bool seed_set, std::uint64_t seed,
            std::string out_dir, int baseline_intensity, bool quiet) {
  if (!fs::exists(plan_path)) {
    std::cerr << "resil: plan file not found: " << plan_path << "\n";
    return kExitUsage;
  }

  ExperimentPlan plan;
  try {
    plan = parse_plan(read_file(plan_path));
  } catch (const PlanError& e) {
    std::cerr << "resil: invalid plan: " << e.what() << "\n";
    return kExitUsage;
  }
  if (seed_set) plan.seed = seed;

  const auto report = validate_plan(plan);
  if (!report.ok()) {
    std::cerr << "resil: plan is not runnable:\n";
    for (const auto& v : report.violations) std::cerr << "  - " << v << "\n";
    return kExitUsage;
  }

  BackendKind kind = plan.backend;
  if (!backend_flag.empty()) kind = backend_kind_from_string(backend_flag);
  std::string endpoint = endpoint_flag;
  if (endpoint.empty()) {
    if (const char* env = std::getenv("RESIL_ENDPOINT")) endpoint = env;
  }
  if (kind == BackendKind::remote && endpoint.empty()) {
    std::cerr << "resil: the http backend needs --endpoint or RESIL_ENDPOINT\n";
    return kExitUsage;
  }

  if (out_dir.empty()) out_dir = "results-" + plan.name;

  try {
    artifacts::OutputWriter writer(out_dir, plan);

    std::string last_progress;
    const auto sink = [&](const std::string& case_id, const orch::PhaseEvent& e) {
      writer.append_event(case_id, e);
      if (quiet) return;
      const std::string key = case_id + "/" + e.phase;
      if (key != last_progress) {
        std::cerr << "[" << case_id << "] " << e.phase << " " << e.event << "\n";
        last_progress = key;
      }
    };
    const auto on_result = [&](const ExperimentCase& c, const orch::ExperimentResult& r) {
      writer.append_result(c, r);
      if (!quiet && !r.completed) {
        std::cerr << "[" << c.case_id << "] aborted: " << r.abort_reason << "\n";
      }
    };

    orch::BackendFactory factory;
    if (kind == BackendKind::sim) {
      factory = orch::sim_backend_factory(plan);
    } else {
      factory = [endpoint](const ExperimentCase&) -> std::unique_ptr<ClusterBackend> {
        return std::make_unique<remote::HttpBackend>(endpoint);
      };
    }

    const auto campaign = orch::run_campaign(plan, factory, on_result, sink);
    writer.finish(campaign, baseline_intensity);

    if (!campaign.aborted_cases.empty() || !campaign.unrun_cases.empty()) {
      std::cerr << "resil: campaign finished with " << campaign.aborted_cases.size()
                << " aborted and " << campaign.unrun_cases.size() << " unrun cases\n";
      return kExitRuntime;
    }
    if (!quiet) {
      std::cerr << "resil: " << campaign.results.size() << " experiments completed, outputs in "
                << out_dir << "\n";
    }
    return kExitOk;
  } catch (const metrics::MissingBaselineError& e) {
    std::cerr << "resil: " << e.what() << " (partial outputs preserved)\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "resil: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int cmd_analyze(const std::string& in_dir, int baseline_intensity) {
  try {
    artifacts::analyze_run(in_dir, baseline_intensity);
    return kExitOk;
  } catch (const metrics::MissingBaselineError& e) {
    std::cerr << "resil: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "resil: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int cmd_report(const std::string& in_dir, int baseline_intensity) {
  try {
    artifacts::write_report(in_dir, baseline_intensity);
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "resil: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"resilience evaluation engine for cloud-edge container clusters"};
  app.require_subcommand(1);

  std::string plan_path, backend_flag, endpoint, out_dir, in_dir;
  std::uint64_t seed = 0;
  int baseline_intensity = 25;
  bool quiet = false;

  auto* run = app.add_subcommand("run", "expand a plan and execute the campaign");
  run->add_option("--plan", plan_path, "experiment plan file")->required();
  run->add_option("--backend", backend_flag, "cluster backend")
      ->check(CLI::IsMember({"sim", "http"}));
  run->add_option("--endpoint", endpoint, "http backend endpoint (host:port)");
  auto* seed_opt = run->add_option("--seed", seed, "override the plan seed");
  run->add_option("--out", out_dir, "output directory (default results-<plan>)");
  run->add_option("--baseline-intensity", baseline_intensity,
                  "baseline intensity percent for z-scores");
  run->add_flag("--quiet", quiet, "suppress progress output");

  auto* analyze = app.add_subcommand("analyze", "regenerate zscores.csv from a run directory");
  analyze->add_option("--in", in_dir, "run directory")->required();
  analyze->add_option("--baseline-intensity", baseline_intensity,
                      "baseline intensity percent for z-scores");

  auto* report = app.add_subcommand("report", "render report.md from a run directory");
  report->add_option("--in", in_dir, "run directory")->required();
  report->add_option("--baseline-intensity", baseline_intensity,
                     "baseline intensity percent for z-scores");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (run->parsed()) {
    return cmd_run(plan_path, backend_flag, endpoint, seed_opt->count() > 0, seed, out_dir,
                   baseline_intensity, quiet);
  }
  if (analyze->parsed()) return cmd_analyze(in_dir, baseline_intensity);
  return cmd_report(in_dir, baseline_intensity);
}
