#include "phasemoments/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "phasemoments/error.hpp"

namespace phasemoments {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* what) {
  fail(ErrorCode::configuration, "invalid value '" + value + "' for " + key + ": expected " + what);
}

int to_int(const std::string& key, const std::string& v) {
  int out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) bad_value(key, v, "an integer");
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  int base = 10;
  std::size_t skip = 0;
  if (v.size() > 2 && v[0] == '0' && (v[1] == 'x' || v[1] == 'X')) {
    base = 16;
    skip = 2;
  }
  const auto r = std::from_chars(v.data() + skip, v.data() + v.size(), out, base);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) bad_value(key, v, "an unsigned 64-bit integer");
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  if (v.empty()) bad_value(key, v, "a number");
  char* end = nullptr;
  const double out = std::strtod(v.c_str(), &end);
  if (end != v.c_str() + v.size() || !std::isfinite(out)) bad_value(key, v, "a finite number");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, v, "true or false");
}

std::vector<int> to_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  if (trim(v).empty()) return out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_int(key, trim(item)));
  return out;
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

struct Field {
  std::string key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    auto num = [&](const char* key, double RunConfig::*member) {
      f.push_back({key, [member](const RunConfig& c) { return format_double(c.*member); },
                   [member, key](RunConfig& c, const std::string& v) { c.*member = to_double(key, v); }});
    };
    auto integer = [&](const char* key, int RunConfig::*member) {
      f.push_back({key, [member](const RunConfig& c) { return std::to_string(c.*member); },
                   [member, key](RunConfig& c, const std::string& v) { c.*member = to_int(key, v); }});
    };
    f.push_back({"state.kind", [](const RunConfig& c) { return std::string(state_kind_name(c.state.kind)); },
                 [](RunConfig& c, const std::string& v) { c.state.kind = parse_state_kind(v); }});
    f.push_back({"state.alpha_re", [](const RunConfig& c) { return format_double(c.state.alpha.real()); },
                 [](RunConfig& c, const std::string& v) { c.state.alpha.real(to_double("state.alpha_re", v)); }});
    f.push_back({"state.alpha_im", [](const RunConfig& c) { return format_double(c.state.alpha.imag()); },
                 [](RunConfig& c, const std::string& v) { c.state.alpha.imag(to_double("state.alpha_im", v)); }});
    f.push_back({"state.xi_re", [](const RunConfig& c) { return format_double(c.state.xi.real()); },
                 [](RunConfig& c, const std::string& v) { c.state.xi.real(to_double("state.xi_re", v)); }});
    f.push_back({"state.xi_im", [](const RunConfig& c) { return format_double(c.state.xi.imag()); },
                 [](RunConfig& c, const std::string& v) { c.state.xi.imag(to_double("state.xi_im", v)); }});
    f.push_back({"state.fock_n", [](const RunConfig& c) { return std::to_string(c.state.fock_n); },
                 [](RunConfig& c, const std::string& v) { c.state.fock_n = to_int("state.fock_n", v); }});
    f.push_back({"state.n_max", [](const RunConfig& c) { return std::to_string(c.state.n_max); },
                 [](RunConfig& c, const std::string& v) { c.state.n_max = to_int("state.n_max", v); }});
    f.push_back({"state.leakage_tol", [](const RunConfig& c) { return format_double(c.state.leakage_tol); },
                 [](RunConfig& c, const std::string& v) { c.state.leakage_tol = to_double("state.leakage_tol", v); }});
    integer("plan.n_phases", &RunConfig::n_phases);
    integer("plan.events_per_phase", &RunConfig::events_per_phase);
    f.push_back({"plan.events",
                 [](const RunConfig& c) {
                   std::string s;
                   for (std::size_t i = 0; i < c.events.size(); ++i) s += (i ? "," : "") + std::to_string(c.events[i]);
                   return s;
                 },
                 [](RunConfig& c, const std::string& v) { c.events = to_int_list("plan.events", v); }});
    num("plan.eta", &RunConfig::eta);
    f.push_back({"seed", [](const RunConfig& c) { return std::to_string(c.seed); },
                 [](RunConfig& c, const std::string& v) { c.seed = to_u64("seed", v); }});
    f.push_back({"kernel.l0", [](const RunConfig& c) { return std::to_string(c.kernel.l0); },
                 [](RunConfig& c, const std::string& v) { c.kernel.l0 = to_int("kernel.l0", v); }});
    f.push_back({"kernel.x0", [](const RunConfig& c) { return format_double(c.kernel.x0); },
                 [](RunConfig& c, const std::string& v) { c.kernel.x0 = to_double("kernel.x0", v); }});
    f.push_back({"kernel.f_truncation", [](const RunConfig& c) { return std::to_string(c.kernel.f_truncation); },
                 [](RunConfig& c, const std::string& v) { c.kernel.f_truncation = to_int("kernel.f_truncation", v); }});
    f.push_back({"kernel.matched_tail", [](const RunConfig& c) { return bool_text(c.kernel.matched_tail); },
                 [](RunConfig& c, const std::string& v) { c.kernel.matched_tail = to_bool("kernel.matched_tail", v); }});
    num("kernel.grid_step", &RunConfig::grid_step);
    f.push_back({"kernel.compensate", [](const RunConfig& c) { return bool_text(c.compensate); },
                 [](RunConfig& c, const std::string& v) { c.compensate = to_bool("kernel.compensate", v); }});
    integer("k_max", &RunConfig::k_max);
    f.push_back({"reconstruction.method", [](const RunConfig& c) { return std::string(method_name(c.method)); },
                 [](RunConfig& c, const std::string& v) { c.method = parse_method(v); }});
    integer("reconstruction.K", &RunConfig::recon_K);
    integer("reconstruction.M", &RunConfig::recon_M);
    num("reconstruction.reg_lambda", &RunConfig::reg_lambda);
    f.push_back({"reconstruction.normalize",
                 [](const RunConfig& c) { return c.normalize ? bool_text(*c.normalize) : std::string("default"); },
                 [](RunConfig& c, const std::string& v) {
                   if (v == "default") c.normalize.reset();
                   else c.normalize = to_bool("reconstruction.normalize", v);
                 }});
    f.push_back({"output_dir", [](const RunConfig& c) { return c.output_dir; },
                 [](RunConfig& c, const std::string& v) {
                   require(!v.empty(), ErrorCode::configuration, "output_dir must not be empty");
                   c.output_dir = v;
                 }});
    return f;
  }();
  return table;
}

const Field& find_field(const std::string& key) {
  for (const auto& f : fields()) {
    if (f.key == key) return f;
  }
  fail(ErrorCode::configuration, "unknown configuration key '" + key + "'");
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // Prefer the shortest representation that still round-trips.
  for (int prec = 1; prec <= 17; ++prec) {
    char shorter[40];
    std::snprintf(shorter, sizeof shorter, "%.*g", prec, v);
    if (std::strtod(shorter, nullptr) == v) return shorter;
  }
  return buf;
}

std::string format_hash(std::uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::set<std::string> seen;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (eq == std::string::npos) fail(ErrorCode::configuration, where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) fail(ErrorCode::configuration, where + "duplicate key '" + key + "'");
    try {
      cfg.set(key, value);
    } catch (const Error& e) {
      fail(ErrorCode::configuration, where + e.what());
    }
  }
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::io, "cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse(ss.str());
  } catch (const Error& e) {
    fail(e.code(), path + ": " + e.what());
  }
}

void RunConfig::set(const std::string& key, const std::string& value) {
  find_field(key).set(*this, trim(value));
}

std::string RunConfig::get(const std::string& key) const { return find_field(key).get(*this); }

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> k = [] {
    std::vector<std::string> out;
    for (const auto& f : fields()) out.push_back(f.key);
    return out;
  }();
  return k;
}

std::string RunConfig::to_text() const {
  std::string out;
  for (const auto& f : fields()) out += f.key + " = " + f.get(*this) + "\n";
  return out;
}

std::uint64_t RunConfig::hash() const {
  std::string text;
  for (const auto& f : fields()) {
    if (f.key != "output_dir") text += f.key + " = " + f.get(*this) + "\n";
  }
  return fnv1a64(text);
}

void RunConfig::apply_environment() {
  const char* dir = std::getenv(kOutputDirEnv);
  if (dir && *dir) output_dir = dir;
}

bool RunConfig::normalize_effective() const {
  if (normalize) return *normalize;
  return method == ReconstructionMethod::least_squares;
}

ExperimentPlan RunConfig::plan() const {
  ExperimentPlan p;
  p.state = state;
  p.n_phases = n_phases;
  p.events = events.empty() ? std::vector<int>(std::max(n_phases, 0), events_per_phase) : events;
  p.eta = eta;
  p.seed = seed;
  return p;
}

KernelSpec RunConfig::kernel_spec(int k) const {
  KernelSpec s = kernel;
  s.k = k;
  s.eta = (compensate && eta < 1.0) ? eta : 1.0;
  return s;
}

void RunConfig::validate() const {
  try {
    plan().validate();
  } catch (const Error& e) {
    fail(ErrorCode::configuration, e.what());
  }
  if (compensate && eta < 1.0) {
    require(eta > 0.5, ErrorCode::configuration,
            "loss compensation needs plan.eta > 1/2; set kernel.compensate = false to estimate without it");
  }
  require(grid_step > 0.0, ErrorCode::configuration, "kernel.grid_step must be positive");
  try {
    kernel_spec(1).validate();
  } catch (const Error& e) {
    fail(ErrorCode::configuration, e.what());
  }
  require(k_max >= 1, ErrorCode::configuration, "k_max must be >= 1");
  require(k_max < n_phases, ErrorCode::configuration,
          "k_max must be smaller than the number of phases (" + std::to_string(n_phases) + ")");
  require(recon_K >= 1 && recon_K <= k_max, ErrorCode::configuration,
          "reconstruction.K must lie in [1, k_max]");
  if (method == ReconstructionMethod::fourier) {
    require(recon_M > 2 * recon_K, ErrorCode::configuration, "reconstruction.M must exceed 2K");
  } else {
    require(recon_M >= 8 * recon_K, ErrorCode::configuration,
            "reconstruction.M must be at least 8K for least squares");
  }
  require(reg_lambda >= 0.0, ErrorCode::configuration, "reconstruction.reg_lambda must be >= 0");
}

}  // namespace phasemoments
