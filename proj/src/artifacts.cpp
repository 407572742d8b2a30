#include "resil/artifacts.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>

#include "resil/load.hpp"

namespace resil::artifacts {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt_timeout(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string z_cell(const std::optional<double>& z) {
  if (!z) return "";
  if (std::isinf(*z)) return *z > 0 ? "inf" : "-inf";
  return csv_float(*z);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(field);
      field.clear();
    } else {
      field += ch;
    }
  }
  fields.push_back(field);
  return fields;
}

void write_zscore_rows(std::ofstream& out, const metrics::ZScoreTable& table) {
  out << kZScoresHeader << "\n";
  for (const auto& row : table.rows) {
    out << row.case_id << ',' << row.group_key << ',' << z_cell(row.z_mean) << ','
        << z_cell(row.z_p95) << ',' << (row.degenerate ? 1 : 0) << "\n";
  }
}

std::string make_group_key(const std::string& fault_type, const std::string& deployment_mode,
                           const std::string& topology, const std::string& workload_mode,
                           int threads, double timeout_s) {
  return fault_type + "|" + deployment_mode + "|" + topology + "|" + workload_mode + "|t" +
         std::to_string(threads) + "|to" + fmt_timeout(timeout_s);
}

}  // namespace

std::string csv_float(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

double csv_round(double v) { return std::strtod(csv_float(v).c_str(), nullptr); }

std::string group_key_of(const ExperimentCase& c) {
  return make_group_key(to_string(c.fault.action), to_string(c.deployment_mode),
                        to_string(c.topology.kind), to_string(c.workload.mode),
                        c.workload.threads, c.workload.timeout_s);
}

std::string SummaryRow::group_key() const {
  return make_group_key(fault_type, deployment_mode, topology, workload_mode, threads,
                        timeout_s);
}

OutputWriter::OutputWriter(std::filesystem::path out_dir, const ExperimentPlan& plan)
    : dir_(std::move(out_dir)), plan_(plan) {
  std::filesystem::create_directories(dir_);
  requests_.open(dir_ / "requests.csv", std::ios::trunc);
  summary_.open(dir_ / "summary.csv", std::ios::trunc);
  events_.open(dir_ / "events.log", std::ios::trunc);
  if (!requests_ || !summary_ || !events_) {
    throw std::runtime_error("cannot open output files under " + dir_.string());
  }
  requests_ << kRequestsHeader << "\n";
  summary_ << kSummaryHeader << "\n";
}

void OutputWriter::append_event(const std::string& case_id, const orch::PhaseEvent& event) {
  ordered_json line;
  line["ts_ms"] = event.ts_ms;
  line["case_id"] = case_id;
  line["phase"] = event.phase;
  line["event"] = event.event;
  line["detail"] = event.detail;
  events_ << line.dump() << "\n";
  events_.flush();
}

void OutputWriter::append_result(const ExperimentCase& c, const orch::ExperimentResult& r) {
  for (const auto& rec : r.records) {
    requests_ << rec.experiment_id << ',' << rec.request_id << ',' << csv_float(rec.send_ts_ms)
              << ',' << (rec.latency_ms ? csv_float(*rec.latency_ms) : "") << ','
              << to_string(rec.outcome) << ',' << rec.error_class << "\n";
  }
  requests_.flush();

  if (r.records.empty()) return;  // aborted before any request was issued

  summary_ << c.case_id << ',' << to_string(c.fault.action) << ',' << c.intensity << ','
           << to_string(c.workload.mode) << ',' << c.workload.threads << ','
           << csv_float(c.workload.timeout_s) << ',' << to_string(c.deployment_mode) << ','
           << to_string(c.topology.kind) << ',' << r.summary.total_requests << ','
           << r.summary.failed_requests << ',' << csv_float(r.summary.failure_rate) << ','
           << csv_float(r.summary.mean_rt_ms) << ','
           << (r.summary.mean_rt_success_ms ? csv_float(*r.summary.mean_rt_success_ms) : "")
           << ',' << (r.summary.p95_ms ? csv_float(*r.summary.p95_ms) : "") << "\n";
  summary_.flush();

  // Analysis sees the CSV-rounded latencies so that re-analysis of the
  // persisted files reproduces identical z-scores.
  metrics::CaseMetrics cm;
  cm.case_id = c.case_id;
  cm.group_key = group_key_of(c);
  cm.intensity = c.intensity;
  std::vector<RequestRecord> rounded = r.records;
  for (auto& rec : rounded) {
    if (rec.latency_ms) rec.latency_ms = csv_round(*rec.latency_ms);
    if (rec.outcome == RequestStatus::success) cm.success_latencies.push_back(*rec.latency_ms);
  }
  cm.summary = metrics::summarize(rounded, c.workload.timeout_s);
  case_metrics_.push_back(std::move(cm));
}

metrics::ZScoreTable OutputWriter::finish(const orch::CampaignResult& campaign,
                                          int baseline_intensity) {
  const auto table = metrics::zscore_normalize(case_metrics_, baseline_intensity);
  std::ofstream zs(dir_ / "zscores.csv", std::ios::trunc);
  write_zscore_rows(zs, table);

  ordered_json manifest;
  manifest["schema_version"] = 1;
  manifest["plan_name"] = plan_.name;
  manifest["seed"] = plan_.seed;
  manifest["baseline_intensity"] = baseline_intensity;
  manifest["cases_executed"] = campaign.results.size();
  // experiment-level counterpart to the per-request failure_rate
  manifest["experiment_failure_rate"] =
      campaign.results.empty()
          ? 0.0
          : static_cast<double>(campaign.aborted_cases.size()) /
                static_cast<double>(campaign.results.size());
  ordered_json aborted = ordered_json::array();
  for (const auto& [id, reason] : campaign.aborted_cases) {
    aborted.push_back({{"case_id", id}, {"reason", reason}});
  }
  manifest["aborted_cases"] = aborted;
  manifest["unrun_cases"] = campaign.unrun_cases;
  manifest["plan_text"] = serialize_plan(plan_);
  manifest["files"] = {{"requests", "requests.csv"},
                       {"summary", "summary.csv"},
                       {"zscores", "zscores.csv"},
                       {"events", "events.log"}};
  std::ofstream mf(dir_ / "manifest.json", std::ios::trunc);
  mf << manifest.dump(2) << "\n";
  return table;
}

metrics::ZScoreTable write_outputs(const orch::CampaignResult& campaign,
                                   const std::vector<ExperimentCase>& cases,
                                   const ExperimentPlan& plan,
                                   const std::filesystem::path& out_dir,
                                   int baseline_intensity) {
  OutputWriter writer(out_dir, plan);
  std::map<std::string, const ExperimentCase*> by_id;
  for (const auto& c : cases) by_id[c.case_id] = &c;
  for (const auto& r : campaign.results) {
    for (const auto& e : r.phase_log) writer.append_event(r.case_id, e);
    writer.append_result(*by_id.at(r.case_id), r);
  }
  return writer.finish(campaign, baseline_intensity);
}

LoadedRun load_run(const std::filesystem::path& dir) {
  LoadedRun run;

  std::ifstream summary(dir / "summary.csv");
  if (!summary) throw std::runtime_error("missing " + (dir / "summary.csv").string());
  std::string line;
  std::getline(summary, line);  // header
  while (std::getline(summary, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 14) throw std::runtime_error("malformed summary.csv row: " + line);
    SummaryRow row;
    row.case_id = f[0];
    row.fault_type = f[1];
    row.intensity = std::stoi(f[2]);
    row.workload_mode = f[3];
    row.threads = std::stoi(f[4]);
    row.timeout_s = std::strtod(f[5].c_str(), nullptr);
    row.deployment_mode = f[6];
    row.topology = f[7];
    row.total = std::stoull(f[8]);
    row.failed = std::stoull(f[9]);
    row.failure_rate = std::strtod(f[10].c_str(), nullptr);
    row.mean_rt_ms = std::strtod(f[11].c_str(), nullptr);
    if (!f[12].empty()) row.mean_rt_success_ms = std::strtod(f[12].c_str(), nullptr);
    if (!f[13].empty()) row.p95_ms = std::strtod(f[13].c_str(), nullptr);
    run.summaries.push_back(std::move(row));
  }

  std::ifstream requests(dir / "requests.csv");
  if (!requests) throw std::runtime_error("missing " + (dir / "requests.csv").string());
  std::getline(requests, line);  // header
  while (std::getline(requests, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 6) throw std::runtime_error("malformed requests.csv row: " + line);
    RequestRecord rec;
    rec.experiment_id = f[0];
    rec.request_id = std::stoull(f[1]);
    rec.send_ts_ms = std::strtod(f[2].c_str(), nullptr);
    if (!f[3].empty()) rec.latency_ms = std::strtod(f[3].c_str(), nullptr);
    rec.outcome = request_status_from_string(f[4]);
    rec.error_class = f[5];
    run.records_by_case[rec.experiment_id].push_back(std::move(rec));
  }

  const auto manifest_path = dir / "manifest.json";
  if (std::filesystem::exists(manifest_path)) {
    std::ifstream mf(manifest_path);
    const auto manifest = nlohmann::json::parse(mf);
    run.plan_name = manifest.value("plan_name", "");
    run.plan_seed = manifest.value("seed", std::uint64_t{0});
    run.experiment_failure_rate = manifest.value("experiment_failure_rate", 0.0);
    if (manifest.contains("aborted_cases")) {
      for (const auto& a : manifest["aborted_cases"]) {
        run.aborted_cases.emplace_back(a.value("case_id", ""), a.value("reason", ""));
      }
    }
  }
  return run;
}

std::vector<metrics::CaseMetrics> case_metrics_of(const LoadedRun& run) {
  std::vector<metrics::CaseMetrics> out;
  for (const auto& row : run.summaries) {
    metrics::CaseMetrics cm;
    cm.case_id = row.case_id;
    cm.group_key = row.group_key();
    cm.intensity = row.intensity;
    const auto it = run.records_by_case.find(row.case_id);
    if (it == run.records_by_case.end() || it->second.empty()) continue;
    for (const auto& rec : it->second) {
      if (rec.outcome == RequestStatus::success) cm.success_latencies.push_back(*rec.latency_ms);
    }
    cm.summary = metrics::summarize(it->second, row.timeout_s);
    out.push_back(std::move(cm));
  }
  return out;
}

metrics::ZScoreTable analyze_run(const std::filesystem::path& dir, int baseline_intensity) {
  const auto run = load_run(dir);
  const auto table = metrics::zscore_normalize(case_metrics_of(run), baseline_intensity);
  std::ofstream zs(dir / "zscores.csv", std::ios::trunc);
  if (!zs) throw std::runtime_error("cannot write " + (dir / "zscores.csv").string());
  write_zscore_rows(zs, table);
  return table;
}

std::vector<double> collect_request_z(const LoadedRun& run, int baseline_intensity,
                                      const std::function<bool(const SummaryRow&)>& select) {
  // Pool baseline success latencies per group.
  std::map<std::string, std::vector<double>> baseline_pool;
  for (const auto& row : run.summaries) {
    if (row.intensity != baseline_intensity) continue;
    const auto it = run.records_by_case.find(row.case_id);
    if (it == run.records_by_case.end()) continue;
    auto& pool = baseline_pool[row.group_key()];
    for (const auto& rec : it->second) {
      if (rec.outcome == RequestStatus::success) pool.push_back(*rec.latency_ms);
    }
  }
  std::map<std::string, metrics::GroupBaseline> baselines;
  for (const auto& [group, pool] : baseline_pool) {
    if (pool.empty()) continue;
    metrics::GroupBaseline b;
    b.mu = metrics::mean_of(pool);
    b.sigma = metrics::population_sigma(pool);
    b.sample_count = pool.size();
    b.intensity = baseline_intensity;
    b.degenerate = b.sigma < metrics::kSigmaFloor;
    baselines[group] = b;
  }

  std::vector<double> zs;
  for (const auto& row : run.summaries) {
    if (!select(row)) continue;
    const auto bit = baselines.find(row.group_key());
    if (bit == baselines.end()) continue;
    const auto rit = run.records_by_case.find(row.case_id);
    if (rit == run.records_by_case.end()) continue;
    for (const auto& rec : rit->second) {
      if (rec.outcome == RequestStatus::success) {
        zs.push_back(metrics::zscore(*rec.latency_ms, bit->second.mu, bit->second.sigma));
      }
    }
  }
  return zs;
}

std::vector<PatternCheck> evaluate_patterns(const LoadedRun& run, int baseline_intensity) {
  std::vector<PatternCheck> checks;

  // Pool success latencies per (group, intensity).
  std::map<std::string, std::map<int, std::vector<double>>> by_group;
  std::map<std::string, const SummaryRow*> group_row;
  for (const auto& row : run.summaries) {
    const auto it = run.records_by_case.find(row.case_id);
    if (it == run.records_by_case.end()) continue;
    auto& pool = by_group[row.group_key()][row.intensity];
    for (const auto& rec : it->second) {
      if (rec.outcome == RequestStatus::success) pool.push_back(*rec.latency_ms);
    }
    group_row.emplace(row.group_key(), &row);
  }

  for (const auto& [group, per_intensity] : by_group) {
    const SummaryRow& row = *group_row.at(group);
    if (row.fault_type == "network-loss") {
      PatternCheck check;
      check.name = "loss-survivorship " + group;
      const auto at75 = per_intensity.find(75);
      const auto at100 = per_intensity.find(100);
      if (at75 != per_intensity.end() && !at75->second.empty() &&
          at100 != per_intensity.end() && !at100->second.empty()) {
        const double m75 = metrics::mean_of(at75->second);
        const double m100 = metrics::mean_of(at100->second);
        check.applicable = true;
        check.holds = m100 < m75;
        check.detail = "mean_rt_success 100%=" + csv_float(m100) + " ms vs 75%=" +
                       csv_float(m75) + " ms";
      } else {
        check.detail = "needs successful requests at 75% and 100%";
      }
      checks.push_back(std::move(check));
    }
    if (row.fault_type == "network-partition" && row.deployment_mode == "cloud_edge") {
      PatternCheck check;
      check.name = "partition-stability " + group;
      bool all_below = true;
      bool any = false;
      std::string detail;
      for (const auto& [intensity, pool] : per_intensity) {
        const auto zs = collect_request_z(run, baseline_intensity,
                                          [&](const SummaryRow& r) {
                                            return r.group_key() == group &&
                                                   r.intensity == intensity;
                                          });
        if (zs.empty()) continue;
        any = true;
        const double med = metrics::median_of(zs);
        all_below = all_below && med < 0.5;
        detail += (detail.empty() ? "" : ", ") + std::to_string(intensity) + "%: median z=" +
                  csv_float(med);
      }
      check.applicable = any;
      check.holds = any && all_below;
      check.detail = detail.empty() ? "no successful requests" : detail;
      checks.push_back(std::move(check));
    }
  }

  PatternCheck delay;
  delay.name = "delay-amplification (cloud chain vs edge monolith)";
  delay.detail = "requires paired cloud and cloud-edge campaigns";
  checks.push_back(std::move(delay));
  PatternCheck bandwidth;
  bandwidth.name = "bandwidth-volatility (edge vs cloud)";
  bandwidth.detail = "requires paired cloud and cloud-edge campaigns";
  checks.push_back(std::move(bandwidth));
  return checks;
}

std::string render_report(const LoadedRun& run, const metrics::ZScoreTable& table,
                          const std::vector<PatternCheck>& checks) {
  std::map<std::string, std::optional<double>> z_mean_by_case;
  for (const auto& row : table.rows) z_mean_by_case[row.case_id] = row.z_mean;

  // fault type -> intensity -> rows
  std::map<std::string, std::map<int, std::vector<const SummaryRow*>>> grouped;
  for (const auto& row : run.summaries) grouped[row.fault_type][row.intensity].push_back(&row);

  std::ostringstream out;
  out << "# Resilience report: " << (run.plan_name.empty() ? "campaign" : run.plan_name)
      << "\n\n";
  out << run.summaries.size() << " experiments, experiment_failure_rate "
      << csv_float(run.experiment_failure_rate) << "\n";
  for (const auto& [fault_type, by_intensity] : grouped) {
    out << "\n## " << fault_type << "\n\n";
    out << "| intensity | cases | mean_rt_ms | p95_ms | failure_rate | z_mean |\n";
    out << "|---:|---:|---:|---:|---:|---:|\n";
    for (const auto& [intensity, rows] : by_intensity) {
      double mean_rt = 0, p95 = 0, failure = 0, z_sum = 0;
      std::size_t p95_n = 0, z_n = 0;
      for (const auto* r : rows) {
        mean_rt += r->mean_rt_ms;
        failure += r->failure_rate;
        if (r->p95_ms) {
          p95 += *r->p95_ms;
          ++p95_n;
        }
        const auto z = z_mean_by_case.find(r->case_id);
        if (z != z_mean_by_case.end() && z->second && std::isfinite(*z->second)) {
          z_sum += *z->second;
          ++z_n;
        }
      }
      const auto n = static_cast<double>(rows.size());
      out << "| " << intensity << "% | " << rows.size() << " | " << csv_float(mean_rt / n)
          << " | " << (p95_n ? csv_float(p95 / p95_n) : "-") << " | "
          << csv_float(failure / n) << " | " << (z_n ? csv_float(z_sum / z_n) : "-")
          << " |\n";
    }
  }

  out << "\n## Directional pattern checks\n\n";
  out << "| check | result | detail |\n|---|---|---|\n";
  for (const auto& c : checks) {
    out << "| " << c.name << " | " << (!c.applicable ? "n/a" : c.holds ? "holds" : "violated")
        << " | " << c.detail << " |\n";
  }

  if (!run.aborted_cases.empty()) {
    out << "\n## Aborted cases\n\n";
    for (const auto& [id, reason] : run.aborted_cases) {
      out << "- " << id << ": " << reason << "\n";
    }
  }
  return out.str();
}

void write_report(const std::filesystem::path& dir, int baseline_intensity) {
  const auto run = load_run(dir);
  const auto table = metrics::zscore_normalize(case_metrics_of(run), baseline_intensity);
  const auto checks = evaluate_patterns(run, baseline_intensity);
  std::ofstream out(dir / "report.md", std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + (dir / "report.md").string());
  out << render_report(run, table, checks);
}

}  // namespace resil::artifacts
