#include "phasemoments/textio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "phasemoments/config.hpp"
#include "phasemoments/error.hpp"

namespace phasemoments {

namespace {

constexpr const char* kMagic = "# phasemoments ";

// Per-phase counts are written as plan.events_per_phase when all are equal.
constexpr const char* kRecordHeaderKeys[] = {
    "state.kind",   "state.alpha_re",  "state.alpha_im", "state.xi_re",      "state.xi_im", "state.fock_n",
    "state.n_max",  "state.leakage_tol", "plan.n_phases", "plan.events", "plan.eta",    "seed"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(const char* format, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

class Writer {
 public:
  Writer(const std::string& path, const char* kind, std::optional<std::uint64_t> hash)
      : path_(path), out_(path) {
    require(static_cast<bool>(out_), ErrorCode::io, "cannot write " + path);
    out_ << kMagic << kind << " v1\n";
    if (hash) field("config_hash", format_hash(*hash));
  }
  void field(const std::string& key, const std::string& value) { out_ << "# " << key << " = " << value << '\n'; }
  void comment(const std::string& text) { out_ << "# " << text << '\n'; }
  std::ofstream& stream() { return out_; }
  void close() {
    out_.close();
    require(!out_.fail(), ErrorCode::io, "error while writing " + path_);
  }

 private:
  std::string path_;
  std::ofstream out_;
};

std::string where(const std::string& path, int line) { return path + ":" + std::to_string(line) + ": "; }

double parse_number(const std::string& text, const std::string& path, int line) {
  const std::string t = trim(text);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  require(!t.empty() && end == t.c_str() + t.size() && std::isfinite(v), ErrorCode::parse,
          where(path, line) + "malformed number '" + t + "'");
  return v;
}

long parse_integer(const std::string& text, const std::string& path, int line) {
  const std::string t = trim(text);
  char* end = nullptr;
  const long v = std::strtol(t.c_str(), &end, 10);
  require(!t.empty() && end == t.c_str() + t.size(), ErrorCode::parse,
          where(path, line) + "malformed integer '" + t + "'");
  return v;
}

std::vector<std::string> split(const std::string& row, char sep) {
  std::vector<std::string> out;
  if (sep == ' ') {
    std::istringstream in(row);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
  }
  std::stringstream ss(row);
  std::string tok;
  while (std::getline(ss, tok, sep)) out.push_back(trim(tok));
  return out;
}

const std::string& header_value(const TextFile& f, const std::string& key, const std::string& path) {
  const auto it = f.header.find(key);
  require(it != f.header.end(), ErrorCode::parse, path + ": header lacks '" + key + "'");
  return it->second;
}

double header_number(const TextFile& f, const std::string& key, const std::string& path) {
  return parse_number(header_value(f, key, path), path, 0);
}

}  // namespace

TextFile read_text_file(const std::string& path, const char* expected_kind) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::io, "cannot open " + path);
  TextFile f;
  std::string line;
  int lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (first) {
      first = false;
      const std::string magic = kMagic;
      require(line.rfind(magic, 0) == 0, ErrorCode::schema,
              path + " is not a phasemoments file (missing '" + trim(magic) + "' header)");
      const auto parts = split(line.substr(magic.size()), ' ');
      require(parts.size() == 2 && parts[1] == "v1", ErrorCode::schema,
              where(path, 1) + "unsupported file header");
      f.kind = parts[0];
      require(f.kind == expected_kind, ErrorCode::schema,
              path + " holds " + f.kind + " data, expected " + expected_kind);
      continue;
    }
    if (!line.empty() && line[0] == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos) f.header[trim(line.substr(1, eq - 1))] = trim(line.substr(eq + 1));
      continue;
    }
    if (trim(line).empty()) continue;
    f.rows.emplace_back(lineno, line);
  }
  require(!first, ErrorCode::schema, path + " is empty");
  return f;
}

void save_kernel_table(const KernelTable& table, const std::string& path,
                       std::optional<std::uint64_t> config_hash) {
  Writer w(path, kKernelTableKind, config_hash);
  const auto& s = table.spec();
  w.field("kernel.k", std::to_string(s.k));
  w.field("kernel.eta", format_double(s.eta));
  w.field("kernel.l0", std::to_string(s.l0));
  w.field("kernel.x0", format_double(s.x0));
  w.field("kernel.f_truncation", std::to_string(s.f_truncation));
  w.field("kernel.matched_tail", s.matched_tail ? "true" : "false");
  w.field("kernel.grid_step", format_double(table.grid_step()));
  w.field("tail.x_switch", format_double(table.tail().x_switch));
  w.field("tail.shift", format_double(table.tail().shift));
  w.field("tail.coeff", format_double(table.tail().coeff));
  w.field("tail.power", std::to_string(table.tail().power));
  w.comment("beyond |x| = tail.x_switch: classical limit + coeff * |sqrt(eta) x|^-power");
  w.comment("columns: x K");
  auto& out = w.stream();
  for (int i = 0; i < table.size(); ++i) {
    out << fmt("%.17g", table.node(i)) << ' ' << fmt("%.17g", table.values()[i]) << '\n';
  }
  w.close();
}

KernelTable load_kernel_table(const std::string& path) {
  const TextFile f = read_text_file(path, kKernelTableKind);
  KernelSpec spec;
  spec.k = static_cast<int>(parse_integer(header_value(f, "kernel.k", path), path, 0));
  spec.eta = header_number(f, "kernel.eta", path);
  spec.l0 = static_cast<int>(parse_integer(header_value(f, "kernel.l0", path), path, 0));
  spec.x0 = header_number(f, "kernel.x0", path);
  spec.f_truncation = static_cast<int>(parse_integer(header_value(f, "kernel.f_truncation", path), path, 0));
  spec.matched_tail = header_value(f, "kernel.matched_tail", path) == "true";
  const double step = header_number(f, "kernel.grid_step", path);
  TailRule tail;
  tail.k = spec.k;
  tail.sqrt_eta = std::sqrt(spec.eta);
  tail.x_switch = header_number(f, "tail.x_switch", path);
  tail.shift = header_number(f, "tail.shift", path);
  tail.coeff = header_number(f, "tail.coeff", path);
  tail.power = static_cast<int>(parse_integer(header_value(f, "tail.power", path), path, 0));
  std::vector<double> values;
  values.reserve(f.rows.size());
  for (const auto& [line, row] : f.rows) {
    const auto cols = split(row, ' ');
    require(cols.size() == 2, ErrorCode::parse, where(path, line) + "expected two columns 'x K'");
    parse_number(cols[0], path, line);
    values.push_back(parse_number(cols[1], path, line));
  }
  try {
    return KernelTable(spec, step, std::move(values), tail);
  } catch (const Error& e) {
    fail(ErrorCode::parse, path + ": " + e.what());
  }
}

void save_records(const MeasurementSet& ms, const std::string& path,
                  std::optional<std::uint64_t> config_hash) {
  ms.validate();
  Writer w(path, kRecordsKind, config_hash);
  RunConfig c;
  c.state = ms.plan.state;
  c.n_phases = ms.plan.n_phases;
  c.events = ms.plan.events;
  c.eta = ms.plan.eta;
  c.seed = ms.plan.seed;
  const bool uniform = std::all_of(c.events.begin(), c.events.end(), [&](int n) { return n == c.events[0]; });
  if (uniform) {
    c.events_per_phase = c.events[0];
    c.events.clear();
  }
  for (const char* key : kRecordHeaderKeys) {
    if (std::string(key) == "plan.events" && uniform) key = "plan.events_per_phase";
    w.field(key, c.get(key));
  }
  w.comment("columns: l, theta_l, x");
  auto& out = w.stream();
  char buf[96];
  for (int l = 0; l < ms.plan.n_phases; ++l) {
    const double th = ms.plan.theta(l);
    for (double x : ms.records[l]) {
      std::snprintf(buf, sizeof buf, "%d, %.15g, %.15g\n", l, th, x);
      out << buf;
    }
  }
  w.close();
}

MeasurementSet load_records(const std::string& path) {
  const TextFile f = read_text_file(path, kRecordsKind);
  RunConfig c;
  for (const char* key : kRecordHeaderKeys) {
    if (std::string(key) == "plan.events" && !f.header.count(key)) key = "plan.events_per_phase";
    try {
      c.set(key, header_value(f, key, path));
    } catch (const Error& e) {
      fail(ErrorCode::parse, path + ": " + e.what());
    }
  }
  MeasurementSet ms;
  ms.plan = c.plan();
  try {
    ms.plan.validate();
  } catch (const Error& e) {
    fail(ErrorCode::parse, path + ": invalid plan in header: " + e.what());
  }
  const int N = ms.plan.n_phases;
  ms.records.assign(N, {});
  for (int l = 0; l < N; ++l) ms.records[l].reserve(ms.plan.events[l]);
  for (const auto& [line, row] : f.rows) {
    const auto cols = split(row, ',');
    require(cols.size() == 3, ErrorCode::parse, where(path, line) + "expected 'l, theta, x'");
    const long l = parse_integer(cols[0], path, line);
    require(l >= 0 && l < N, ErrorCode::parse,
            where(path, line) + "phase index " + std::to_string(l) + " outside 0.." + std::to_string(N - 1));
    const double th = parse_number(cols[1], path, line);
    require(std::abs(th - ms.plan.theta(static_cast<int>(l))) <= 1e-12 * (1.0 + std::abs(th)),
            ErrorCode::parse, where(path, line) + "theta does not match phase " + std::to_string(l));
    ms.records[l].push_back(parse_number(cols[2], path, line));
  }
  for (int l = 0; l < N; ++l) {
    require(ms.records[l].size() == static_cast<std::size_t>(ms.plan.events[l]), ErrorCode::parse,
            path + ": phase " + std::to_string(l) + " has " + std::to_string(ms.records[l].size()) +
                " records, header declares " + std::to_string(ms.plan.events[l]));
  }
  return ms;
}

void save_moments(const std::vector<MomentEstimate>& moments, const std::string& path,
                  std::optional<std::uint64_t> config_hash) {
  Writer w(path, kMomentsKind, config_hash);
  w.field("n_phases", std::to_string(moments.empty() ? 0 : moments.front().n_phases));
  w.comment("columns: k re im sigma_re sigma_im compensated eta");
  auto& out = w.stream();
  char buf[200];
  for (const auto& m : moments) {
    std::snprintf(buf, sizeof buf, "%d %.17g %.17g %.17g %.17g %d %.17g\n", m.k, m.value.real(),
                  m.value.imag(), m.sigma_re(), m.sigma_im(), m.compensated ? 1 : 0, m.eta_assumed);
    out << buf;
  }
  w.close();
}

std::vector<MomentEstimate> load_moments(const std::string& path) {
  const TextFile f = read_text_file(path, kMomentsKind);
  const int n_phases = static_cast<int>(parse_integer(header_value(f, "n_phases", path), path, 0));
  std::vector<MomentEstimate> out;
  for (const auto& [line, row] : f.rows) {
    const auto cols = split(row, ' ');
    require(cols.size() == 7, ErrorCode::parse,
            where(path, line) + "expected 'k re im sigma_re sigma_im compensated eta'");
    MomentEstimate m;
    m.k = static_cast<int>(parse_integer(cols[0], path, line));
    require(m.k >= 1, ErrorCode::parse, where(path, line) + "moment order must be >= 1");
    m.value = {parse_number(cols[1], path, line), parse_number(cols[2], path, line)};
    const double sr = cols[3] == "inf" ? INFINITY : parse_number(cols[3], path, line);
    const double si = cols[4] == "inf" ? INFINITY : parse_number(cols[4], path, line);
    require(sr >= 0 && si >= 0, ErrorCode::parse, where(path, line) + "negative standard deviation");
    m.var_re = sr * sr;
    m.var_im = si * si;
    m.single_event_phase = std::isinf(sr) || std::isinf(si);
    m.compensated = parse_integer(cols[5], path, line) != 0;
    m.eta_assumed = parse_number(cols[6], path, line);
    m.n_phases = n_phases;
    out.push_back(m);
  }
  return out;
}

void save_distribution(const PhaseDistribution& p, const std::string& path,
                       std::optional<std::uint64_t> config_hash) {
  Writer w(path, kDistributionKind, config_hash);
  w.field("method", method_name(p.method));
  w.field("K", std::to_string(p.K));
  w.field("M", std::to_string(p.M()));
  w.field("reg_lambda", format_double(p.reg_lambda));
  w.field("normalize", p.normalized ? "true" : "false");
  w.comment("columns: phi P");
  auto& out = w.stream();
  for (int m = 0; m < p.M(); ++m) out << fmt("%.17g", p.phi[m]) << ' ' << fmt("%.17g", p.values[m]) << '\n';
  w.close();
}

PhaseDistribution load_distribution(const std::string& path) {
  const TextFile f = read_text_file(path, kDistributionKind);
  PhaseDistribution p;
  p.method = parse_method(header_value(f, "method", path));
  p.K = static_cast<int>(parse_integer(header_value(f, "K", path), path, 0));
  p.reg_lambda = header_number(f, "reg_lambda", path);
  p.normalized = header_value(f, "normalize", path) == "true";
  for (const auto& [line, row] : f.rows) {
    const auto cols = split(row, ' ');
    require(cols.size() == 2, ErrorCode::parse, where(path, line) + "expected 'phi P'");
    p.phi.push_back(parse_number(cols[0], path, line));
    p.values.push_back(parse_number(cols[1], path, line));
  }
  const long M = parse_integer(header_value(f, "M", path), path, 0);
  require(M == p.M(), ErrorCode::parse, path + ": header declares M = " + std::to_string(M) +
                                            " but the file has " + std::to_string(p.M()) + " rows");
  return p;
}

}  // namespace phasemoments
