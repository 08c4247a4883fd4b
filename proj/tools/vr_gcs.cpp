#include "vrgcs/vrgcs.h"

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <cstdio>
#include <optional>
#include <string>

namespace {

std::atomic<bool> g_interrupted{false};

void on_signal(int) { g_interrupted = true; }

int report_failure(const char* what, vrgcs_status status) {
  std::fprintf(stderr, "vr-gcs: %s: %s: %s\n", what, vrgcs_status_string(status), vrgcs_last_error());
  return 1;
}

int serve(const std::string& config, const std::optional<std::string>& world, std::optional<int> port,
          const std::optional<std::string>& script, bool fast, const std::optional<std::string>& latency_csv) {
  vrgcs_server_options options;
  vrgcs_server_options_init(&options);
  options.config_path = config.c_str();
  options.world_path = world ? world->c_str() : nullptr;
  options.script_path = script ? script->c_str() : nullptr;
  options.latency_csv_path = latency_csv ? latency_csv->c_str() : nullptr;
  options.port = port ? *port : -1;
  options.fast = fast ? 1 : 0;

  vrgcs_server* server = nullptr;
  if (vrgcs_status s = vrgcs_server_create(&options, &server); s != VRGCS_OK) return report_failure("startup", s);
  if (vrgcs_status s = vrgcs_server_start(server); s != VRGCS_OK) {
    vrgcs_server_destroy(server);
    return report_failure("startup", s);
  }
  uint16_t bound = 0;
  vrgcs_server_port(server, &bound);
  std::fprintf(stderr, "vr-gcs: serving on port %u\n", static_cast<unsigned>(bound));

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);

  int32_t finished = 0;
  while (!g_interrupted && !finished) {
    if (vrgcs_status s = vrgcs_server_wait(server, 100, &finished); s != VRGCS_OK) {
      vrgcs_server_destroy(server);
      return report_failure("run", s);
    }
  }

  int exit_code = 0;
  if (vrgcs_status s = vrgcs_server_stop(server); s != VRGCS_OK) exit_code = report_failure("shutdown", s);

  if (script) {
    vrgcs_mission_report report;
    if (vrgcs_server_mission_report(server, &report) == VRGCS_OK) {
      std::printf("min_wall_clearance_m %.4f\n", report.min_wall_clearance);
      std::printf("return_error_m %.4f\n", report.return_error);
      std::printf("touchdown_speed_mps %.4f\n", report.touchdown_speed);
      std::printf("latency_ms max %.3f mean %.3f median %.3f\n", report.max_latency_ms, report.mean_latency_ms,
                  report.median_latency_ms);
      std::printf("mission %s\n", report.passed ? "PASSED" : "FAILED");
      if (!report.passed) exit_code = 2;
    } else {
      std::fprintf(stderr, "vr-gcs: mission did not finish\n");
      exit_code = 2;
    }
  }
  vrgcs_server_destroy(server);
  return exit_code;
}

int analyze(const std::string& csv) {
  vrgcs_latency_stats stats;
  if (vrgcs_status s = vrgcs_latency_stats_from_csv(csv.c_str(), &stats); s != VRGCS_OK)
    return report_failure("analyze", s);
  std::printf("probes %llu\n", static_cast<unsigned long long>(stats.count));
  std::printf("mean_ms %.6f\n", stats.mean_ms);
  std::printf("median_ms %.6f\n", stats.median_ms);
  std::printf("max_ms %.6f\n", stats.max_ms);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"VR ground-station server"};
  app.require_subcommand(1);

  std::string config;
  std::optional<std::string> world, script, latency_csv;
  std::optional<int> port;
  bool fast = false;
  CLI::App* serve_cmd = app.add_subcommand("serve", "Run the simulation and stream to clients");
  serve_cmd->add_option("--config", config, "Config file (key = value)")->required()->check(CLI::ExistingFile);
  serve_cmd->add_option("--world", world, "World file; overrides the config")->check(CLI::ExistingFile);
  serve_cmd->add_option("--port", port, "Listening port; 0 picks a free one")->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--script", script, "Headless pilot script; exits when it completes")
      ->check(CLI::ExistingFile);
  serve_cmd->add_flag("--fast", fast, "Run simulated time as fast as possible");
  serve_cmd->add_option("--latency-csv", latency_csv, "Write latency probes here on shutdown");

  std::string csv;
  CLI::App* analyze_cmd = app.add_subcommand("analyze", "Summarize a latency CSV");
  analyze_cmd->add_option("--csv", csv, "Latency CSV")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  if (*serve_cmd) return serve(config, world, port, script, fast, latency_csv);
  return analyze(csv);
}
