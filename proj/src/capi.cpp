#include "phasemoments/phasemoments.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <utility>

#include "phasemoments/config.hpp"
#include "phasemoments/error.hpp"
#include "phasemoments/estimator.hpp"
#include "phasemoments/kernels.hpp"
#include "phasemoments/pipeline.hpp"
#include "phasemoments/reconstruct.hpp"
#include "phasemoments/simulator.hpp"
#include "phasemoments/states.hpp"
#include "phasemoments/textio.hpp"

using namespace phasemoments;

struct pm_config {
  RunConfig value;
};
struct pm_kernel_table {
  KernelTable value;
};
struct pm_state {
  DensityMatrix value;
};
struct pm_records {
  MeasurementSet value;
};
struct pm_moments {
  std::vector<MomentEstimate> value;
};
struct pm_distribution {
  PhaseDistribution value;
};

namespace {

thread_local std::string g_last_error;

pm_status set_error(pm_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs f, translating exceptions into status codes.
template <class F>
pm_status guarded(F&& f) {
  try {
    g_last_error.clear();
    f();
    return PM_OK;
  } catch (const Error& e) {
    return set_error(static_cast<pm_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(PM_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(PM_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(PM_ERR_INTERNAL, "unknown failure");
  }
}

void need(const void* p, const char* what) {
  require(p != nullptr, ErrorCode::invalid_argument, std::string(what) + " must not be null");
}

void copy_string(const std::string& s, char* buf, std::size_t cap, std::size_t* needed) {
  if (needed) *needed = s.size() + 1;
  if (buf == nullptr && cap == 0) return;  // size query
  need(buf, "buffer");
  require(cap > s.size(), ErrorCode::invalid_argument,
          "buffer too small: " + std::to_string(s.size() + 1) + " bytes needed");
  std::memcpy(buf, s.c_str(), s.size() + 1);
}

std::optional<std::uint64_t> provenance_hash(const pm_config* cfg) {
  if (cfg == nullptr) return std::nullopt;
  return cfg->value.hash();
}

KernelSpec to_spec(const pm_kernel_spec& s) {
  KernelSpec out;
  out.k = s.k;
  out.eta = s.eta;
  out.l0 = s.l0;
  out.x0 = s.x0;
  out.f_truncation = s.f_truncation;
  out.matched_tail = s.matched_tail != 0;
  return out;
}

pm_kernel_spec from_spec(const KernelSpec& s) {
  return {s.k, s.eta, s.l0, s.x0, s.f_truncation, s.matched_tail ? 1 : 0};
}

}  // namespace

extern "C" {

const char* pm_last_error(void) { return g_last_error.c_str(); }

const char* pm_status_name(pm_status status) {
  if (status == PM_OK) return "ok";
  if (status < PM_ERR_INVALID_ARGUMENT || status > PM_ERR_INTERNAL) return "unknown";
  return error_code_name(static_cast<ErrorCode>(status));
}

const char* pm_version(void) { return "1.0.0"; }

pm_status pm_config_create(pm_config** out) {
  return guarded([&] {
    need(out, "out");
    *out = new pm_config{};
  });
}

pm_status pm_config_parse(const char* text, pm_config** out) {
  return guarded([&] {
    need(text, "text");
    need(out, "out");
    *out = new pm_config{RunConfig::parse(text)};
  });
}

pm_status pm_config_load(const char* path, pm_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new pm_config{RunConfig::load(path)};
  });
}

pm_status pm_config_set(pm_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    need(cfg, "config");
    need(key, "key");
    need(value, "value");
    cfg->value.set(key, value);
  });
}

pm_status pm_config_get(const pm_config* cfg, const char* key, char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    need(cfg, "config");
    need(key, "key");
    copy_string(cfg->value.get(key), buf, cap, needed);
  });
}

pm_status pm_config_to_text(const pm_config* cfg, char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    need(cfg, "config");
    copy_string(cfg->value.to_text(), buf, cap, needed);
  });
}

pm_status pm_config_hash(const pm_config* cfg, uint64_t* out) {
  return guarded([&] {
    need(cfg, "config");
    need(out, "out");
    *out = cfg->value.hash();
  });
}

pm_status pm_config_validate(const pm_config* cfg) {
  return guarded([&] {
    need(cfg, "config");
    cfg->value.validate();
  });
}

pm_status pm_config_apply_environment(pm_config* cfg) {
  return guarded([&] {
    need(cfg, "config");
    cfg->value.apply_environment();
  });
}

void pm_config_destroy(pm_config* cfg) { delete cfg; }

void pm_kernel_spec_default(pm_kernel_spec* spec) {
  if (spec) *spec = from_spec(KernelSpec{});
}

pm_status pm_kernel_eval(const pm_kernel_spec* spec, double x, double* out) {
  return guarded([&] {
    need(spec, "spec");
    need(out, "out");
    *out = QuantumKernel(to_spec(*spec))(x);
  });
}

pm_status pm_classical_kernel(int k, double x, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = classical_kernel(k, x);
  });
}

pm_status pm_kernel_table_build(const pm_kernel_spec* spec, double grid_step, pm_kernel_table** out) {
  return guarded([&] {
    need(spec, "spec");
    need(out, "out");
    *out = new pm_kernel_table{build_kernel_table(to_spec(*spec), grid_step)};
  });
}

pm_status pm_kernel_table_save(const pm_kernel_table* t, const char* path, const pm_config* provenance) {
  return guarded([&] {
    need(t, "table");
    need(path, "path");
    save_kernel_table(t->value, path, provenance_hash(provenance));
  });
}

pm_status pm_kernel_table_load(const char* path, pm_kernel_table** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new pm_kernel_table{load_kernel_table(path)};
  });
}

pm_status pm_kernel_table_eval(const pm_kernel_table* t, double x, double* out) {
  return guarded([&] {
    need(t, "table");
    need(out, "out");
    *out = t->value(x);
  });
}

pm_status pm_kernel_table_spec(const pm_kernel_table* t, pm_kernel_spec* out) {
  return guarded([&] {
    need(t, "table");
    need(out, "out");
    *out = from_spec(t->value.spec());
  });
}

void pm_kernel_table_destroy(pm_kernel_table* t) { delete t; }

pm_status pm_state_build(const pm_config* cfg, pm_state** out) {
  return guarded([&] {
    need(cfg, "config");
    need(out, "out");
    *out = new pm_state{build_state(cfg->value.state)};
  });
}

pm_status pm_state_mean_photon_number(const pm_state* s, double* out) {
  return guarded([&] {
    need(s, "state");
    need(out, "out");
    *out = s->value.mean_photon_number();
  });
}

pm_status pm_state_exact_moment(const pm_state* s, int k, double* re, double* im) {
  return guarded([&] {
    need(s, "state");
    need(re, "re");
    need(im, "im");
    const cplx v = exact_moment(s->value, k);
    *re = v.real();
    *im = v.imag();
  });
}

pm_status pm_state_phase_density(const pm_state* s, double phi, double* out) {
  return guarded([&] {
    need(s, "state");
    need(out, "out");
    *out = exact_phase_dist(s->value, phi);
  });
}

pm_status pm_state_quadrature_density(const pm_state* s, double x, double theta, double* out) {
  return guarded([&] {
    need(s, "state");
    need(out, "out");
    *out = quadrature_pdf(s->value, x, theta);
  });
}

void pm_state_destroy(pm_state* s) { delete s; }

pm_status pm_simulate(const pm_config* cfg, pm_records** out) {
  return guarded([&] {
    need(cfg, "config");
    need(out, "out");
    *out = new pm_records{simulate_stage(cfg->value)};
  });
}

pm_status pm_records_save(const pm_records* r, const char* path, const pm_config* provenance) {
  return guarded([&] {
    need(r, "records");
    need(path, "path");
    save_records(r->value, path, provenance_hash(provenance));
  });
}

pm_status pm_records_load(const char* path, pm_records** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new pm_records{load_records(path)};
  });
}

pm_status pm_records_n_phases(const pm_records* r, int* out) {
  return guarded([&] {
    need(r, "records");
    need(out, "out");
    *out = r->value.plan.n_phases;
  });
}

pm_status pm_records_count(const pm_records* r, int phase, int* out) {
  return guarded([&] {
    need(r, "records");
    need(out, "out");
    require(phase >= 0 && phase < r->value.plan.n_phases, ErrorCode::invalid_argument, "phase index out of range");
    *out = static_cast<int>(r->value.records[phase].size());
  });
}

pm_status pm_records_get(const pm_records* r, int phase, double* buf, size_t cap) {
  return guarded([&] {
    need(r, "records");
    need(buf, "buffer");
    require(phase >= 0 && phase < r->value.plan.n_phases, ErrorCode::invalid_argument, "phase index out of range");
    const auto& v = r->value.records[phase];
    require(cap >= v.size(), ErrorCode::invalid_argument, "buffer too small for phase records");
    std::copy(v.begin(), v.end(), buf);
  });
}

void pm_records_destroy(pm_records* r) { delete r; }

pm_status pm_estimate(const pm_config* cfg, const pm_records* r, pm_moments** out) {
  return guarded([&] {
    need(cfg, "config");
    need(r, "records");
    need(out, "out");
    *out = new pm_moments{estimate_stage(cfg->value, r->value)};
  });
}

pm_status pm_moments_save(const pm_moments* m, const char* path, const pm_config* provenance) {
  return guarded([&] {
    need(m, "moments");
    need(path, "path");
    save_moments(m->value, path, provenance_hash(provenance));
  });
}

pm_status pm_moments_load(const char* path, pm_moments** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new pm_moments{load_moments(path)};
  });
}

pm_status pm_moments_count(const pm_moments* m, int* out) {
  return guarded([&] {
    need(m, "moments");
    need(out, "out");
    *out = static_cast<int>(m->value.size());
  });
}

pm_status pm_moments_get(const pm_moments* m, int index, pm_moment* out) {
  return guarded([&] {
    need(m, "moments");
    need(out, "out");
    require(index >= 0 && index < static_cast<int>(m->value.size()), ErrorCode::invalid_argument,
            "moment index out of range");
    const auto& e = m->value[index];
    *out = {e.k, e.value.real(), e.value.imag(), e.sigma_re(), e.sigma_im(), e.compensated ? 1 : 0,
            e.eta_assumed, e.n_phases};
  });
}

void pm_moments_destroy(pm_moments* m) { delete m; }

pm_status pm_reconstruct(const pm_config* cfg, const pm_moments* m, pm_distribution** out) {
  return guarded([&] {
    need(cfg, "config");
    need(m, "moments");
    need(out, "out");
    *out = new pm_distribution{reconstruct_stage(cfg->value, m->value)};
  });
}

pm_status pm_distribution_save(const pm_distribution* d, const char* path, const pm_config* provenance) {
  return guarded([&] {
    need(d, "distribution");
    need(path, "path");
    save_distribution(d->value, path, provenance_hash(provenance));
  });
}

pm_status pm_distribution_load(const char* path, pm_distribution** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new pm_distribution{load_distribution(path)};
  });
}

pm_status pm_distribution_size(const pm_distribution* d, int* out) {
  return guarded([&] {
    need(d, "distribution");
    need(out, "out");
    *out = d->value.M();
  });
}

pm_status pm_distribution_get(const pm_distribution* d, int index, double* phi, double* value) {
  return guarded([&] {
    need(d, "distribution");
    require(index >= 0 && index < d->value.M(), ErrorCode::invalid_argument, "grid index out of range");
    if (phi) *phi = d->value.phi[index];
    if (value) *value = d->value.values[index];
  });
}

void pm_distribution_destroy(pm_distribution* d) { delete d; }

pm_status pm_pipeline(const pm_config* cfg, pm_artifact_callback cb, void* user) {
  return guarded([&] {
    need(cfg, "config");
    const auto a = run_pipeline(cfg->value);
    if (cb) {
      cb("records", a.records.c_str(), user);
      cb("moments", a.moments.c_str(), user);
      cb("distribution", a.distribution.c_str(), user);
    }
  });
}

pm_status pm_artifact_path(const pm_config* cfg, const char* name, char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    need(cfg, "config");
    need(name, "name");
    copy_string(artifact_path(cfg->value, name), buf, cap, needed);
  });
}

pm_status pm_verify(const pm_kernel_spec* base, double grid_step, pm_check_callback cb, void* user, int* failed) {
  int n_failed = 0;
  const pm_status st = guarded([&] {
    const KernelSpec spec = base ? to_spec(*base) : KernelSpec{};
    for (const auto& c : verify_identities(spec, grid_step)) {
      if (!c.passed()) ++n_failed;
      if (cb) {
        const pm_identity_check out{c.suite.c_str(), c.k, c.param, c.residual, c.tolerance, c.passed() ? 1 : 0};
        cb(&out, user);
      }
    }
  });
  if (failed) *failed = n_failed;
  if (st != PM_OK) return st;
  if (n_failed > 0) {
    return set_error(PM_ERR_VERIFICATION, std::to_string(n_failed) + " identity check(s) failed");
  }
  return PM_OK;
}

}  // extern "C"
