#include "nlac/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "nlac/error.hpp"
#include "nlac/verify.hpp"

namespace nlac {

using Json = nlohmann::ordered_json;

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// --- parsing ---------------------------------------------------------------

struct LineCol {
  std::size_t line = 1;
  std::size_t column = 1;
};

LineCol locate(std::string_view text, std::size_t byte) {
  LineCol lc;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++lc.line;
      lc.column = 1;
    } else {
      ++lc.column;
    }
  }
  return lc;
}

class Section {
 public:
  Section(const Json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail(path_, "must be an object");
  }

  static void fail(const std::string& key, const std::string& what) {
    throw InvalidArgument("manifest: " + key + " " + what);
  }

  std::string key(const char* name) const { return path_.empty() ? name : path_ + "." + name; }

  const Json* find(const char* name) {
    seen_.insert(name);
    auto it = node_.find(name);
    if (it == node_.end() || it->is_null()) return nullptr;
    return &*it;
  }

  void number(const char* name, double& out) {
    if (const Json* v = find(name)) {
      if (!v->is_number()) fail(key(name), "must be a number");
      out = v->get<double>();
      if (!std::isfinite(out)) fail(key(name), "must be finite");
    }
  }

  void number(const char* name, std::optional<double>& out) {
    if (const Json* v = find(name)) {
      if (!v->is_number()) fail(key(name), "must be a number");
      out = v->get<double>();
    }
  }

  void integer(const char* name, int& out) {
    if (const Json* v = find(name)) {
      if (!v->is_number_integer()) fail(key(name), "must be an integer");
      const auto raw = v->get<std::int64_t>();
      if (raw < -(1LL << 30) || raw > (1LL << 30)) fail(key(name), "is out of range");
      out = int(raw);
    }
  }

  void boolean(const char* name, bool& out) {
    if (const Json* v = find(name)) {
      if (!v->is_boolean()) fail(key(name), "must be true or false");
      out = v->get<bool>();
    }
  }

  void text(const char* name, std::string& out) {
    if (const Json* v = find(name)) {
      if (!v->is_string()) fail(key(name), "must be a string");
      out = v->get<std::string>();
    }
  }

  void numbers(const char* name, std::vector<double>& out) {
    if (const Json* v = find(name)) {
      if (!v->is_array()) fail(key(name), "must be an array of numbers");
      out.clear();
      for (const auto& e : *v) {
        if (!e.is_number()) fail(key(name), "must be an array of numbers");
        out.push_back(e.get<double>());
      }
    }
  }

  Section child(const char* name) {
    static const Json empty = Json::object();
    const Json* v = find(name);
    return Section(v ? *v : empty, key(name));
  }

  void reject_unknown() const {
    for (const auto& [k, v] : node_.items()) {
      if (!seen_.count(k)) fail(path_.empty() ? k : path_ + "." + k, "is not a recognized key");
    }
  }

 private:
  const Json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

Json parse_strict(std::string_view text) {
  // Each open object keeps the keys seen so far and its path.
  struct Frame {
    std::set<std::string> keys;
    std::string path;
    std::string last;
  };
  std::vector<Frame> stack;
  std::string duplicate;
  Json::parser_callback_t cb = [&](int, Json::parse_event_t event, Json& parsed) {
    switch (event) {
      case Json::parse_event_t::object_start: {
        std::string path;
        if (!stack.empty()) path = stack.back().path.empty() ? stack.back().last : stack.back().path + "." + stack.back().last;
        stack.push_back({{}, path, {}});
        break;
      }
      case Json::parse_event_t::key: {
        const std::string k = parsed.get<std::string>();
        auto& top = stack.back();
        if (!top.keys.insert(k).second && duplicate.empty()) {
          duplicate = top.path.empty() ? k : top.path + "." + k;
        }
        top.last = k;
        break;
      }
      case Json::parse_event_t::object_end:
        stack.pop_back();
        break;
      default:
        break;
    }
    return true;
  };
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end(), cb);
  } catch (const Json::parse_error& e) {
    const LineCol lc = locate(text, e.byte == 0 ? 0 : e.byte - 1);
    std::string what = e.what();
    if (auto pos = what.find("; "); pos != std::string::npos) what = what.substr(pos + 2);
    throw FormatError("manifest: parse error at line " + std::to_string(lc.line) + ", column " +
                      std::to_string(lc.column) + ": " + what);
  }
  if (!duplicate.empty()) {
    throw FormatError("manifest: parse error: duplicate key '" + duplicate + "'");
  }
  return doc;
}

const char* rule_name(EtaRule r) {
  switch (r) {
    case EtaRule::zero: return "zero";
    case EtaRule::pow4: return "pow4";
    case EtaRule::custom: return "custom";
  }
  return "zero";
}

const char* initial_name(InitialKind k) {
  switch (k) {
    case InitialKind::circle: return "circle";
    case InitialKind::constant: return "constant";
    case InitialKind::random: return "random";
  }
  return "circle";
}

double default_beta(int dim) { return dim == 3 ? 0.5 : 1.5; }

void validate_manifest(StudyManifest& m) {
  auto fail = Section::fail;
  const auto& kinds = study_kinds();
  if (std::find(kinds.begin(), kinds.end(), m.study) == kinds.end()) fail("study", "'" + m.study + "' is not a known study");

  try {
    (void)make_grid(m.grid.dim, m.grid.n);
  } catch (const InvalidArgument& e) {
    fail("grid", std::string("is invalid: ") + e.what());
  }

  if (!m.kernel.beta) m.kernel.beta = default_beta(m.grid.dim);
  if (m.grid.dim >= 2) {
    try {
      (void)mollifier_spec(m);
    } catch (const Error& e) {
      fail("kernel", std::string("is invalid: ") + e.what());
    }
  }

  PotentialSpec pot = PotentialSpec::quartic();
  try {
    pot = potential_spec(m);
  } catch (const Error& e) {
    fail("potential.coefficients", std::string("are invalid: ") + e.what());
  }

  const auto& s = m.solver;
  if (!(s.epsilon > 0.0)) fail("solver.epsilon", "must be positive");
  if (!(s.dt > 0.0)) fail("solver.dt", "must be positive");
  if (!(s.t_end > 0.0)) fail("solver.t_end", "must be positive");
  if (!(s.stabilizer >= 0.0)) fail("solver.stabilizer", "must be nonnegative");
  if (s.diagnostic_stride < 1) fail("solver.diagnostic_stride", "must be >= 1");
  if (s.eta && !(*s.eta > 0.0 && std::isfinite(*s.eta))) fail("solver.eta", "must be positive");
  if (s.dt > dt_max(pot, s.stabilizer, s.epsilon)) {
    fail("solver.dt", "exceeds dt_max = " + fmt17(dt_max(pot, s.stabilizer, s.epsilon)));
  }

  auto& g = m.geometry;
  if (!g.center.empty() && int(g.center.size()) != m.grid.dim) fail("geometry.center", "must have one entry per dimension");
  if (g.radius0 > 0.0 && g.radius0 < std::numbers::pi && !g.delta0) g.delta0 = default_delta0(g.radius0);
  if (m.grid.dim >= 2) {
    try {
      (void)interface_spec(m);
    } catch (const InvalidArgument& e) {
      fail("geometry", std::string("is invalid: ") + e.what());
    }
  }

  const auto& p = m.params;
  auto positive = [&](const char* key, const std::vector<double>& v) {
    for (double x : v) {
      if (!(x > 0.0) || !std::isfinite(x)) fail(std::string("params.") + key, "entries must be positive");
    }
  };
  positive("etas", p.etas);
  positive("r_values", p.r_values);
  positive("epsilons", p.epsilons);
  if (p.fields < 1) fail("params.fields", "must be >= 1");
  if (p.trials < 1) fail("params.trials", "must be >= 1");
  if (!(p.eta_constant > 0.0)) fail("params.eta_constant", "must be positive");
  if (!(p.dt_factor > 0.0)) fail("params.dt_factor", "must be positive");
  if (!(p.tol > 0.0)) fail("params.tol", "must be positive");
}

}  // namespace

const std::vector<std::string>& study_kinds() {
  static const std::vector<std::string> kinds{"simulate", "consistency", "ehrling", "spectral-floor",
                                              "compare-local", "mcf"};
  return kinds;
}

StudyManifest parse_manifest(std::string_view text) {
  const Json doc = parse_strict(text);
  StudyManifest m;
  Section root(doc, "");
  root.text("study", m.study);
  if (const Json* v = root.find("seed")) {
    if (!v->is_number_unsigned()) Section::fail("seed", "must be a nonnegative integer");
    m.seed = v->get<std::uint64_t>();
  }
  root.text("output_dir", m.output_dir);
  {
    Section s = root.child("grid");
    s.integer("dim", m.grid.dim);
    s.integer("n", m.grid.n);
    s.reject_unknown();
  }
  {
    Section s = root.child("kernel");
    s.number("beta", m.kernel.beta);
    s.number("bump_radius", m.kernel.bump_radius);
    s.number("bump_amplitude", m.kernel.bump_amplitude);
    s.reject_unknown();
  }
  {
    Section s = root.child("potential");
    s.numbers("coefficients", m.potential.coefficients);
    s.reject_unknown();
  }
  {
    Section s = root.child("solver");
    s.number("epsilon", m.solver.epsilon);
    s.number("dt", m.solver.dt);
    s.number("t_end", m.solver.t_end);
    s.number("stabilizer", m.solver.stabilizer);
    s.integer("diagnostic_stride", m.solver.diagnostic_stride);
    s.boolean("dealias", m.solver.dealias);
    s.number("eta", m.solver.eta);
    s.boolean("track_interface", m.solver.track_interface);
    s.reject_unknown();
  }
  {
    Section s = root.child("geometry");
    s.number("radius0", m.geometry.radius0);
    s.number("delta0", m.geometry.delta0);
    s.numbers("center", m.geometry.center);
    s.reject_unknown();
  }
  {
    Section s = root.child("initial");
    std::string kind = initial_name(m.initial.kind);
    s.text("kind", kind);
    if (kind == "circle") m.initial.kind = InitialKind::circle;
    else if (kind == "constant") m.initial.kind = InitialKind::constant;
    else if (kind == "random") m.initial.kind = InitialKind::random;
    else Section::fail("initial.kind", "must be one of circle, constant, random");
    s.number("value", m.initial.value);
    s.reject_unknown();
  }
  {
    Section s = root.child("params");
    s.numbers("etas", m.params.etas);
    s.integer("fields", m.params.fields);
    s.numbers("r_values", m.params.r_values);
    s.integer("trials", m.params.trials);
    s.numbers("epsilons", m.params.epsilons);
    std::string rule = rule_name(m.params.eta_rule);
    s.text("eta_rule", rule);
    if (rule == "zero") m.params.eta_rule = EtaRule::zero;
    else if (rule == "pow4") m.params.eta_rule = EtaRule::pow4;
    else if (rule == "custom") m.params.eta_rule = EtaRule::custom;
    else Section::fail("params.eta_rule", "must be one of zero, pow4, custom");
    s.number("eta_constant", m.params.eta_constant);
    s.number("eta_exponent", m.params.eta_exponent);
    s.number("dt_factor", m.params.dt_factor);
    s.number("tol", m.params.tol);
    s.reject_unknown();
  }
  root.reject_unknown();
  validate_manifest(m);
  return m;
}

static std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

StudyManifest load_manifest(const std::filesystem::path& path) { return parse_manifest(read_file(path)); }

std::string manifest_json(const StudyManifest& m) {
  auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  Json j;
  j["study"] = m.study;
  j["seed"] = m.seed;
  j["output_dir"] = m.output_dir;
  j["grid"] = {{"dim", m.grid.dim}, {"n", m.grid.n}};
  j["kernel"] = {{"beta", opt(m.kernel.beta)},
                 {"bump_radius", m.kernel.bump_radius},
                 {"bump_amplitude", m.kernel.bump_amplitude}};
  j["potential"] = {{"coefficients", m.potential.coefficients}};
  j["solver"] = {{"epsilon", m.solver.epsilon},         {"dt", m.solver.dt},
                 {"t_end", m.solver.t_end},             {"stabilizer", m.solver.stabilizer},
                 {"diagnostic_stride", m.solver.diagnostic_stride}, {"dealias", m.solver.dealias},
                 {"eta", opt(m.solver.eta)},            {"track_interface", m.solver.track_interface}};
  j["geometry"] = {{"radius0", m.geometry.radius0}, {"delta0", opt(m.geometry.delta0)}, {"center", m.geometry.center}};
  j["initial"] = {{"kind", initial_name(m.initial.kind)}, {"value", m.initial.value}};
  j["params"] = {{"etas", m.params.etas},
                 {"fields", m.params.fields},
                 {"r_values", m.params.r_values},
                 {"trials", m.params.trials},
                 {"epsilons", m.params.epsilons},
                 {"eta_rule", rule_name(m.params.eta_rule)},
                 {"eta_constant", m.params.eta_constant},
                 {"eta_exponent", m.params.eta_exponent},
                 {"dt_factor", m.params.dt_factor},
                 {"tol", m.params.tol}};
  return j.dump(2) + "\n";
}

void save_manifest(const StudyManifest& manifest, const std::filesystem::path& path) {
  write_text(path, manifest_json(manifest));
}

MollifierSpec mollifier_spec(const StudyManifest& m) {
  MollifierSpec s;
  s.dim = m.grid.dim;
  s.beta = m.kernel.beta.value_or(default_beta(m.grid.dim));
  s.bump_radius = m.kernel.bump_radius;
  s.bump_amplitude = m.kernel.bump_amplitude;
  return normalize(s);
}

PotentialSpec potential_spec(const StudyManifest& m) {
  if (m.potential.coefficients.empty()) return PotentialSpec::quartic();
  return PotentialSpec::custom(m.potential.coefficients);
}

InterfaceSpec interface_spec(const StudyManifest& m) {
  Point center{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < m.geometry.center.size() && i < 3; ++i) center[i] = m.geometry.center[i];
  return make_interface(m.grid.dim, m.geometry.radius0, m.geometry.delta0, center);
}

SolverConfig solver_config(const StudyManifest& m, std::size_t workers) {
  SolverConfig c;
  c.epsilon = m.solver.epsilon;
  c.dt = m.solver.dt;
  c.t_end = m.solver.t_end;
  c.stabilizer = m.solver.stabilizer;
  c.potential = potential_spec(m);
  c.grid = make_grid(m.grid.dim, m.grid.n);
  c.diagnostic_stride = m.solver.diagnostic_stride;
  c.seed = m.seed;
  c.dealias = m.solver.dealias;
  if (m.solver.eta) {
    c.op = NonlocalOperator{std::make_shared<const SymbolTable>(symbol_table(mollifier_spec(m), *m.solver.eta, c.grid, workers))};
  }
  if (m.solver.track_interface) c.track_interface = interface_spec(m);
  validate(c);
  return c;
}

Field initial_field(const StudyManifest& m, const SolverConfig& config) {
  switch (m.initial.kind) {
    case InitialKind::constant:
      return Field(config.grid, std::vector<double>(config.grid.size(), m.initial.value));
    case InitialKind::random: {
      // Scaled to sup norm value (or 1) so the maximum principle applies.
      Field f = random_band_limited(config.grid, m.seed);
      const double target = m.initial.value != 0.0 ? std::abs(m.initial.value) : 1.0;
      const double sup = f.sup_norm();
      if (sup > 0.0) {
        for (double& v : f.values()) v *= target / sup;
      }
      return f;
    }
    case InitialKind::circle:
      break;
  }
  const InterfaceSpec spec = interface_spec(m);
  return approximate_solution(config.grid, spec, spec.radius0, config.epsilon, config.potential);
}

// --- snapshots ---------------------------------------------------------------

namespace {

constexpr std::size_t kHeader = 4 + 1 + 4 + 1;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(char((bits >> (8 * i)) & 0xff));
}

std::uint64_t get_le(std::string_view bytes, std::size_t offset, int width) {
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) v |= std::uint64_t(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
  return v;
}

}  // namespace

std::string encode_snapshot(const Field& field) {
  const TorusGrid& g = field.grid();
  std::string out;
  out.reserve(kHeader + 8 * g.size());
  out += "NLAC";
  out.push_back(char(g.dim()));
  put_u32(out, std::uint32_t(g.n()));
  out.push_back(char(0));
  for (double v : field.values()) put_f64(out, v);
  return out;
}

Field decode_snapshot(std::string_view bytes) {
  if (bytes.size() < 4 || bytes.substr(0, 4) != "NLAC") throw FormatError("snapshot: bad magic");
  if (bytes.size() < kHeader) throw FormatError("snapshot: truncated header");
  const int dim = static_cast<unsigned char>(bytes[4]);
  const auto n = get_le(bytes, 5, 4);
  const int flag = static_cast<unsigned char>(bytes[9]);
  if (flag != 0) throw FormatError("snapshot: unsupported flag " + std::to_string(flag));
  if (n > (1u << 20)) throw FormatError("snapshot: invalid header (N = " + std::to_string(n) + ")");
  TorusGrid grid{2, 4};
  try {
    grid = make_grid(dim, int(n));
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("snapshot: invalid header: ") + e.what());
  }
  const std::size_t expected = kHeader + 8 * grid.size();
  if (bytes.size() != expected) {
    throw FormatError("snapshot: payload is " + std::to_string(bytes.size() - kHeader) + " bytes, header implies " +
                      std::to_string(expected - kHeader));
  }
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = std::bit_cast<double>(get_le(bytes, kHeader + 8 * i, 8));
  return Field(grid, std::move(values));
}

void write_snapshot(const Field& field, const std::filesystem::path& path) { write_text(path, encode_snapshot(field)); }

Field read_snapshot(const std::filesystem::path& path) { return decode_snapshot(read_file(path)); }

// --- text outputs ----------------------------------------------------------

std::string run_csv(const RunRecord& r) {
  const bool radius = !r.interface_radius.empty();
  std::string out = radius ? "t,energy,sup_norm,h0,h1,h2,h3,radius\n" : "t,energy,sup_norm,h0,h1,h2,h3\n";
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    out += fmt17(r.times[i]) + "," + fmt17(r.energy[i]) + "," + fmt17(r.sup_norm[i]);
    for (double h : r.sobolev[i]) out += "," + fmt17(h);
    if (radius) out += "," + fmt17(r.interface_radius[i]);
    out += "\n";
  }
  return out;
}

std::string symbol_csv(const SymbolTable& table) {
  std::string out = "k_abs,m_eta\n";
  for (const auto& [k, m] : table.radial()) out += fmt17(k) + "," + fmt17(m) + "\n";
  return out;
}

std::string profile_csv(const PotentialSpec& potential, double rho_min, double rho_max, int count) {
  if (count < 2 || !(rho_max > rho_min)) throw InvalidArgument("profile_csv: need count >= 2 and rho_max > rho_min");
  std::string out = "rho,theta\n";
  for (int i = 0; i < count; ++i) {
    const double rho = rho_min + (rho_max - rho_min) * double(i) / double(count - 1);
    out += fmt17(rho) + "," + fmt17(optimal_profile(potential, rho)) + "\n";
  }
  return out;
}

std::string report_json(const StudyReport& r) {
  Json j;
  j["study"] = r.study;
  Json params = Json::object();
  for (const auto& [k, v] : r.params) params[k] = v;
  j["params"] = params;
  Json table = Json::array();
  for (const auto& [p, e] : r.table) table.push_back({p, e});
  j["table"] = table;
  if (r.fit) {
    j["slope"] = r.fit->slope;
    j["intercept"] = r.fit->intercept;
    j["r_squared"] = r.fit->r_squared;
  } else {
    j["slope"] = nullptr;
    j["intercept"] = nullptr;
    j["r_squared"] = nullptr;
  }
  j["passed"] = r.passed;
  Json metrics = Json::object();
  for (const auto& [k, v] : r.metrics) metrics[k] = v;
  j["metrics"] = metrics;
  return j.dump(2) + "\n";
}

void write_text(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument("cannot write '" + path.string() + "'");
  out.write(contents.data(), std::streamsize(contents.size()));
  if (!out) throw InvalidArgument("write failed for '" + path.string() + "'");
}

}  // namespace nlac
