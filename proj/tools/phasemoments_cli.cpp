// Command-line front end. Talks to the library only through phasemoments.h.

#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "phasemoments/phasemoments.h"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct Failure {
  int exit_code;
};

// Aborts the command with a message when st is not PM_OK. Usage-type
// statuses map to exit code 2.
void check(pm_status st, const char* context) {
  if (st == PM_OK) return;
  std::fprintf(stderr, "phasemoments: %s: %s error: %s\n", context, pm_status_name(st), pm_last_error());
  const bool usage = st == PM_ERR_INVALID_ARGUMENT || st == PM_ERR_CONFIGURATION;
  throw Failure{usage ? kExitUsage : kExitFailure};
}

[[noreturn]] void usage_error(const std::string& message) {
  std::fprintf(stderr, "phasemoments: %s\n", message.c_str());
  throw Failure{kExitUsage};
}

template <class T, void (*Destroy)(T*)>
struct Deleter {
  void operator()(T* p) const { Destroy(p); }
};
using ConfigPtr = std::unique_ptr<pm_config, Deleter<pm_config, pm_config_destroy>>;
using RecordsPtr = std::unique_ptr<pm_records, Deleter<pm_records, pm_records_destroy>>;
using MomentsPtr = std::unique_ptr<pm_moments, Deleter<pm_moments, pm_moments_destroy>>;
using DistributionPtr = std::unique_ptr<pm_distribution, Deleter<pm_distribution, pm_distribution_destroy>>;
using TablePtr = std::unique_ptr<pm_kernel_table, Deleter<pm_kernel_table, pm_kernel_table_destroy>>;

std::string config_string(const pm_config* cfg, const char* key) {
  std::size_t n = 0;
  check(pm_config_get(cfg, key, nullptr, 0, &n), "config");
  std::string s(n, '\0');
  check(pm_config_get(cfg, key, s.data(), n, nullptr), "config");
  s.resize(n - 1);
  return s;
}

std::string artifact(const pm_config* cfg, const char* name) {
  std::size_t n = 0;
  check(pm_artifact_path(cfg, name, nullptr, 0, &n), "output path");
  std::string s(n, '\0');
  check(pm_artifact_path(cfg, name, s.data(), n, nullptr), "output path");
  s.resize(n - 1);
  return s;
}

void ensure_parent(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (parent.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(parent, ec);
  if (ec) {
    std::fprintf(stderr, "phasemoments: cannot create %s: %s\n", parent.c_str(), ec.message().c_str());
    throw Failure{kExitFailure};
  }
}

// Options shared by the config-driven commands. Precedence: file, then the
// output-directory environment variable, then --set.
struct ConfigOptions {
  std::string path;
  std::vector<std::string> sets;

  void add_to(CLI::App* cmd) {
    cmd->add_option("-c,--config", path, "run configuration file")->check(CLI::ExistingFile);
    cmd->add_option("-s,--set", sets, "override a config key (key=value), repeatable");
  }

  ConfigPtr build(bool validate) const {
    pm_config* raw = nullptr;
    if (path.empty()) {
      check(pm_config_create(&raw), "config");
    } else {
      check(pm_config_load(path.c_str(), &raw), path.c_str());
    }
    ConfigPtr cfg(raw);
    check(pm_config_apply_environment(cfg.get()), "config");
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) usage_error("--set expects key=value, got '" + s + "'");
      auto trim = [](std::string t) {
        const auto b = t.find_first_not_of(" \t");
        const auto e = t.find_last_not_of(" \t");
        return b == std::string::npos ? std::string() : t.substr(b, e - b + 1);
      };
      check(pm_config_set(cfg.get(), trim(s.substr(0, eq)).c_str(), trim(s.substr(eq + 1)).c_str()), "--set");
    }
    if (validate) check(pm_config_validate(cfg.get()), "config");
    return cfg;
  }
};

std::string eta_tag(double eta) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", eta);
  return buf;
}

int cmd_kernel_table(const ConfigOptions& co, const std::vector<int>& ks, double eta, const pm_kernel_spec& base,
                     double grid_step, const std::string& output_dir) {
  if (!(eta > 0.5 && eta <= 1.0)) usage_error("--eta must lie in (1/2, 1]; loss compensation fails at eta <= 1/2");
  if (!(grid_step > 0.0)) usage_error("--grid-step must be positive");
  ConfigPtr cfg = co.build(false);
  const std::string dir = output_dir.empty() ? config_string(cfg.get(), "output_dir") : output_dir;
  const pm_config* provenance = co.path.empty() && co.sets.empty() ? nullptr : cfg.get();
  for (int k : ks) {
    pm_kernel_spec spec = base;
    spec.k = k;
    spec.eta = eta;
    pm_kernel_table* raw = nullptr;
    check(pm_kernel_table_build(&spec, grid_step, &raw), "kernel-table");
    TablePtr table(raw);
    const std::string path =
        (std::filesystem::path(dir) / ("kernel_k" + std::to_string(k) + "_eta" + eta_tag(eta) + ".txt")).string();
    ensure_parent(path);
    check(pm_kernel_table_save(table.get(), path.c_str(), provenance), path.c_str());
    std::printf("%s\n", path.c_str());
  }
  return 0;
}

int cmd_simulate(const ConfigOptions& co, std::string out) {
  ConfigPtr cfg = co.build(true);
  if (out.empty()) out = artifact(cfg.get(), "records.txt");
  pm_records* raw = nullptr;
  check(pm_simulate(cfg.get(), &raw), "simulate");
  RecordsPtr records(raw);
  ensure_parent(out);
  check(pm_records_save(records.get(), out.c_str(), cfg.get()), out.c_str());
  std::printf("%s\n", out.c_str());
  return 0;
}

int cmd_estimate(const ConfigOptions& co, std::string in, std::string out) {
  ConfigPtr cfg = co.build(false);
  if (in.empty()) in = artifact(cfg.get(), "records.txt");
  if (out.empty()) out = artifact(cfg.get(), "moments.txt");
  pm_records* rraw = nullptr;
  check(pm_records_load(in.c_str(), &rraw), in.c_str());
  RecordsPtr records(rraw);
  pm_moments* mraw = nullptr;
  check(pm_estimate(cfg.get(), records.get(), &mraw), "estimate");
  MomentsPtr moments(mraw);
  ensure_parent(out);
  check(pm_moments_save(moments.get(), out.c_str(), cfg.get()), out.c_str());
  std::printf("%s\n", out.c_str());
  return 0;
}

int cmd_reconstruct(const ConfigOptions& co, std::string in, std::string out) {
  ConfigPtr cfg = co.build(false);
  if (in.empty()) in = artifact(cfg.get(), "moments.txt");
  if (out.empty()) out = artifact(cfg.get(), "distribution.txt");
  pm_moments* mraw = nullptr;
  check(pm_moments_load(in.c_str(), &mraw), in.c_str());
  MomentsPtr moments(mraw);
  pm_distribution* draw = nullptr;
  check(pm_reconstruct(cfg.get(), moments.get(), &draw), "reconstruct");
  DistributionPtr dist(draw);
  ensure_parent(out);
  check(pm_distribution_save(dist.get(), out.c_str(), cfg.get()), out.c_str());
  std::printf("%s\n", out.c_str());
  return 0;
}

int cmd_pipeline(const ConfigOptions& co) {
  ConfigPtr cfg = co.build(true);
  check(pm_pipeline(
            cfg.get(), [](const char* kind, const char* path, void*) { std::printf("%s: %s\n", kind, path); },
            nullptr),
        "pipeline");
  return 0;
}

int cmd_verify(const pm_kernel_spec& base, double grid_step) {
  std::printf("%-9s %2s %6s %12s %9s %s\n", "suite", "k", "n|r", "residual", "tolerance", "result");
  int failed = 0;
  const pm_status st = pm_verify(
      &base, grid_step,
      [](const pm_identity_check* c, void*) {
        std::printf("%-9s %2d %6g %12.3e %9.0e %s\n", c->suite, c->k, c->param, c->residual, c->tolerance,
                    c->passed ? "pass" : "FAIL");
      },
      nullptr, &failed);
  if (st == PM_ERR_VERIFICATION) {
    std::printf("%d check(s) failed\n", failed);
    return kExitFailure;
  }
  check(st, "verify");
  std::printf("all checks passed\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Direct sampling of exponential phase moments from simulated homodyne data"};
  app.require_subcommand(1);
  app.set_version_flag("--version", pm_version());

  pm_kernel_spec base;
  pm_kernel_spec_default(&base);
  double grid_step = 0.005;
  auto add_kernel_flags = [&](CLI::App* cmd) {
    cmd->add_option("--l0", base.l0, "highest Hermite series index")->capture_default_str();
    cmd->add_option("--x0", base.x0, "series/asymptotic switch point")->capture_default_str();
    cmd->add_option("--f-truncation", base.f_truncation, "explicit terms of the F_k sums")->capture_default_str();
    cmd->add_option("--grid-step", grid_step, "kernel table spacing")->capture_default_str();
  };

  ConfigOptions co;

  auto* kt = app.add_subcommand("kernel-table", "tabulate quantum kernels");
  std::vector<int> ks{1};
  double eta = 1.0;
  std::string output_dir;
  kt->add_option("--k", ks, "kernel orders")->check(CLI::PositiveNumber)->capture_default_str();
  kt->add_option("--eta", eta, "detection efficiency to compensate")->capture_default_str();
  kt->add_option("--output-dir", output_dir, "directory for the tables (default: config output_dir)");
  add_kernel_flags(kt);
  co.add_to(kt);

  std::string records_in, moments_in, out;
  auto* sim = app.add_subcommand("simulate", "simulate homodyne records");
  co.add_to(sim);
  sim->add_option("-o,--out", out, "record file (default: <output_dir>/records.txt)");

  auto* est = app.add_subcommand("estimate", "estimate phase moments from records");
  co.add_to(est);
  est->add_option("-r,--records", records_in, "record file (default: <output_dir>/records.txt)");
  est->add_option("-o,--out", out, "moments file (default: <output_dir>/moments.txt)");

  auto* rec = app.add_subcommand("reconstruct", "phase distribution from moments");
  co.add_to(rec);
  rec->add_option("-m,--moments", moments_in, "moments file (default: <output_dir>/moments.txt)");
  rec->add_option("-o,--out", out, "distribution file (default: <output_dir>/distribution.txt)");

  auto* pipe = app.add_subcommand("pipeline", "simulate, estimate and reconstruct");
  co.add_to(pipe);

  auto* ver = app.add_subcommand("verify", "run the kernel identity suites");
  add_kernel_flags(ver);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*kt) return cmd_kernel_table(co, ks, eta, base, grid_step, output_dir);
    if (*sim) return cmd_simulate(co, out);
    if (*est) return cmd_estimate(co, records_in, out);
    if (*rec) return cmd_reconstruct(co, moments_in, out);
    if (*pipe) return cmd_pipeline(co);
    if (*ver) return cmd_verify(base, grid_step);
  } catch (const Failure& f) {
    return f.exit_code;
  }
  return kExitUsage;
}
