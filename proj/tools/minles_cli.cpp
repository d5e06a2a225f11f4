#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "minles/minles.h"

namespace {

int exit_code(minles_status s) {
  if (s == MINLES_OK) return 0;
  std::fprintf(stderr, "minles: %s\n", minles_last_error());
  return minles_status_is_user_error(s) ? 1 : 2;
}

struct ConfigHandle {
  minles_config* ptr = nullptr;
  ~ConfigHandle() { minles_config_free(ptr); }
};

struct ReportHandle {
  minles_report* ptr = nullptr;
  ~ReportHandle() { minles_report_free(ptr); }
};

void print_report(const minles_report* r) {
  for (std::size_t i = 0; i < minles_report_stage_count(r); ++i) {
    std::printf("stage %-9s %.3f s\n", minles_report_stage_name(r, i), minles_report_stage_seconds(r, i));
  }
  std::printf("leaves %zu -> %zu, flagged %zu, closure %zu, in band %.1f%%\n", minles_report_leaves_before(r),
              minles_report_leaves_after(r), minles_report_flagged(r), minles_report_closure(r),
              100.0 * minles_report_band_fraction(r));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"minles: finite-volume LES toolkit with numerical-dissipation estimators"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(minles_version()));

  std::string config_path;
  std::vector<std::string> overrides;
  std::string mode = "both";
  bool reuse = false;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "configuration file (INI)")->required();
    sub->add_option("--set", overrides, "override a key, as section.key=value")->take_all();
  };
  CLI::App* run = app.add_subcommand("run", "simulate the base case and collect statistics");
  CLI::App* budget = app.add_subcommand("budget", "replay snapshots and evaluate KE/TKE budgets");
  CLI::App* estimate = app.add_subcommand("estimate", "evaluate the quality estimators per column");
  CLI::App* adapt = app.add_subcommand("adapt", "full adaptation cycle with one rerun");
  CLI::App* report = app.add_subcommand("report", "summarize artifacts into report.txt and report.csv");
  for (CLI::App* sub : {run, budget, estimate, adapt, report}) add_common(sub);
  budget->add_option("--mode", mode, "ke, tke or both")->check(CLI::IsMember({"ke", "tke", "both"}));
  adapt->add_flag("--reuse-base", reuse, "keep a complete base run already in the output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  ConfigHandle cfg;
  if (const minles_status s = minles_config_load(config_path.c_str(), &cfg.ptr); s != MINLES_OK) return exit_code(s);
  for (const std::string& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "minles: --set expects section.key=value, got '%s'\n", o.c_str());
      return 1;
    }
    const std::string key = o.substr(0, eq), value = o.substr(eq + 1);
    if (const minles_status s = minles_config_set(cfg.ptr, key.c_str(), value.c_str()); s != MINLES_OK) {
      return exit_code(s);
    }
  }

  minles_status s = MINLES_OK;
  ReportHandle rep;
  if (run->parsed()) {
    s = minles_run(cfg.ptr);
  } else if (budget->parsed()) {
    const minles_budget_mode m = mode == "ke" ? MINLES_BUDGET_KE : mode == "tke" ? MINLES_BUDGET_TKE : MINLES_BUDGET_BOTH;
    s = minles_budget(cfg.ptr, m);
  } else if (estimate->parsed()) {
    s = minles_estimate(cfg.ptr);
  } else if (adapt->parsed()) {
    s = minles_adapt(cfg.ptr, reuse ? 1 : 0, &rep.ptr);
    if (s == MINLES_OK) print_report(rep.ptr);
  } else if (report->parsed()) {
    s = minles_report_write(cfg.ptr, &rep.ptr);
  }
  if (s == MINLES_OK) std::printf("outputs in %s\n", minles_config_output_dir(cfg.ptr));
  return exit_code(s);
}
