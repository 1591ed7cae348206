// bandit-lab: experiment runner CLI over the C interface.

#include <unistd.h>

#include <climits>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bandit_lab/bandit_lab.h"

namespace {

constexpr const char* kAcceptanceEnvVar = "BANDIT_LAB_ACCEPTANCE_BIN";
constexpr const char* kAcceptanceName = "bandit_lab_acceptance";

int report(bl_status status, const char* action) {
  std::fprintf(stderr, "bandit-lab: %s failed (%s): %s\n", action, bl_status_string(status), bl_last_error_message());
  return 2;
}

std::string text_of(bl_status (*fn)(const bl_experiment*, char*, size_t, size_t*), const bl_experiment* exp) {
  size_t len = 0;
  if (fn(exp, nullptr, 0, &len) != BL_OK) return {};
  std::string out(len + 1, '\0');
  if (fn(exp, out.data(), out.size(), &len) != BL_OK) return {};
  out.resize(len);
  return out;
}

int cmd_run(const std::string& config_path, const std::string& out_dir, int workers, bool plots) {
  bl_config* cfg = nullptr;
  if (bl_status s = bl_config_load(config_path.c_str(), &cfg); s != BL_OK) return report(s, "loading config");
  if (bl_status s = bl_config_apply_env_seed_offset(cfg); s != BL_OK) {
    bl_config_free(cfg);
    return report(s, "applying seed offset");
  }
  bl_experiment* exp = nullptr;
  bl_status s = bl_experiment_run(cfg, workers, &exp);
  bl_config_free(cfg);
  if (s != BL_OK) return report(s, "running experiment");
  int rc = 0;
  if ((s = bl_experiment_write_outputs(exp, out_dir.c_str())) != BL_OK) {
    rc = report(s, "writing outputs");
  } else if (plots && (s = bl_experiment_emit_plots(exp, out_dir.c_str())) != BL_OK) {
    rc = report(s, "writing plots");
  } else {
    std::fputs(text_of(bl_experiment_summary_csv, exp).c_str(), stdout);
    std::fprintf(stderr, "outputs written to %s\n", out_dir.c_str());
  }
  bl_experiment_free(exp);
  return rc;
}

int cmd_bound(long long S, long long K, long long N, long long T) {
  double value = 0.0;
  if (bl_status s = bl_system_regret_bound(S, K, N, T, &value); s != BL_OK) return report(s, "evaluating bound");
  std::printf("%.17g\n", value);
  return 0;
}

std::filesystem::path self_dir() {
  std::error_code ec;
  const auto exe = std::filesystem::read_symlink("/proc/self/exe", ec);
  return ec ? std::filesystem::current_path() : exe.parent_path();
}

int cmd_verify() {
  std::filesystem::path bin;
  if (const char* env = std::getenv(kAcceptanceEnvVar); env != nullptr && *env != '\0') {
    bin = env;
  } else {
    bin = self_dir() / kAcceptanceName;
  }
  if (!std::filesystem::exists(bin)) {
    std::fprintf(stderr, "bandit-lab: acceptance binary not found at %s (set %s)\n", bin.c_str(), kAcceptanceEnvVar);
    return 2;
  }
  const std::string path = bin.string();
  std::vector<char*> argv{const_cast<char*>(path.c_str()), nullptr};
  std::fflush(nullptr);
  execv(path.c_str(), argv.data());
  std::perror("bandit-lab: exec");
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rate-constrained multi-agent bandit experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "results";
  int workers = 1;
  bool plots = false;
  auto* run = app.add_subcommand("run", "Run an experiment config and write CSV (and SVG) outputs");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory")->capture_default_str();
  run->add_option("--workers", workers, "Worker threads")->check(CLI::Range(1, 1024))->capture_default_str();
  run->add_flag("--plots", plots, "Also write rate and regret SVG plots");

  long long S = 0, K = 0, N = 0, T = 0;
  auto* bound = app.add_subcommand("bound", "Evaluate the finite-time system regret bound");
  bound->add_option("--S", S, "Contexts")->required()->check(CLI::PositiveNumber);
  bound->add_option("--K", K, "Arms")->required()->check(CLI::PositiveNumber);
  bound->add_option("--N", N, "Agents")->required()->check(CLI::PositiveNumber);
  bound->add_option("--T", T, "Horizon in virtual rounds")->required()->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify", "Run the acceptance suite");

  CLI11_PARSE(app, argc, argv);
  if (run->parsed()) return cmd_run(config_path, out_dir, workers, plots);
  if (bound->parsed()) return cmd_bound(S, K, N, T);
  if (verify->parsed()) return cmd_verify();
  return 1;
}
