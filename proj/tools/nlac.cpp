// nlac: batch front end for simulations and verification studies.
//
// Exit codes: 0 success, 1 failed check or aborted run, 2 usage or
// validation error. Failures print one line `nlac: error=<kind> <message>`
// on stderr.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nlac/error.hpp"
#include "nlac/io.hpp"
#include "nlac/kernel.hpp"
#include "nlac/parallel.hpp"
#include "nlac/potential.hpp"
#include "nlac/solver.hpp"
#include "nlac/verify.hpp"

namespace fs = std::filesystem;

namespace {

struct Globals {
  std::string manifest;
  std::string out = "./out";
  std::size_t workers = 0;
  std::optional<std::uint64_t> seed;
};

struct CheckFailed {
  std::string message;
};

nlac::StudyManifest manifest_for(const Globals& g) {
  if (g.manifest.empty()) throw CLI::RequiredError("--manifest");
  nlac::StudyManifest m = nlac::load_manifest(g.manifest);
  if (g.seed) m.seed = *g.seed;
  return m;
}

std::vector<double> or_default(const std::vector<double>& v, std::vector<double> fallback) {
  return v.empty() ? fallback : v;
}

int finish(const nlac::StudyReport& report, const Globals& g) {
  const fs::path path = fs::path(g.out) / (report.study + ".json");
  nlac::write_text(path, nlac::report_json(report));
  std::cout << report.study << ": " << (report.passed ? "passed" : "FAILED") << " (" << path.string() << ")\n";
  if (!report.passed) throw CheckFailed{report.study + " check failed, see " + path.string()};
  return 0;
}

int simulate(const Globals& g) {
  const auto m = manifest_for(g);
  const nlac::SolverConfig config = nlac::solver_config(m, g.workers);
  const nlac::Field initial = nlac::initial_field(m, config);
  const fs::path out(g.out);
  try {
    const nlac::RunRecord rec = nlac::run(config, initial);
    nlac::write_text(out / "run.csv", nlac::run_csv(rec));
    nlac::write_snapshot(rec.final_state, out / "final.nlac");
  } catch (const nlac::BlowUpError& e) {
    nlac::write_text(out / "run.csv", nlac::run_csv(e.partial()));
    throw CheckFailed{e.what()};
  }
  std::cout << "simulate: wrote " << (out / "run.csv").string() << " and " << (out / "final.nlac").string() << "\n";
  return 0;
}

int consistency(const Globals& g) {
  const auto m = manifest_for(g);
  const nlac::TorusGrid grid = nlac::make_grid(m.grid.dim, m.grid.n);
  const auto etas = or_default(m.params.etas, {0.0625, 0.03125, 0.015625, 0.0078125, 0.00390625});
  std::vector<nlac::Field> fields;
  for (int i = 0; i < m.params.fields; ++i) fields.push_back(nlac::random_band_limited(grid, m.seed + std::uint64_t(i)));
  return finish(nlac::consistency_study(nlac::mollifier_spec(m), grid, etas, fields, g.workers), g);
}

int ehrling(const Globals& g) {
  const auto m = manifest_for(g);
  const nlac::TorusGrid grid = nlac::make_grid(m.grid.dim, m.grid.n);
  const auto rs = or_default(m.params.r_values, {1.0, 2.0, 4.0, 8.0});
  return finish(nlac::ehrling_check(nlac::mollifier_spec(m), grid, rs, m.params.trials, m.seed, g.workers), g);
}

int spectral_floor(const Globals& g) {
  const auto m = manifest_for(g);
  const nlac::TorusGrid grid = nlac::make_grid(m.grid.dim, m.grid.n);
  const auto eps = or_default(m.params.epsilons, {0.1, 0.05, 0.025});
  nlac::SpectralFloorOptions opt;
  opt.tol = m.params.tol;
  opt.seed = m.seed;
  return finish(nlac::spectral_floor_study(grid, nlac::interface_spec(m), eps, nlac::potential_spec(m), opt, g.workers), g);
}

int compare_local(const Globals& g) {
  const auto m = manifest_for(g);
  nlac::StudyManifest local = m;
  local.solver.eta.reset();
  local.solver.track_interface = false;
  const nlac::SolverConfig base = nlac::solver_config(local, g.workers);
  const double e4 = std::pow(base.epsilon, 4);
  const auto etas = or_default(m.params.etas, {e4, e4 / 2, e4 / 4, e4 / 8});
  const nlac::Field initial = nlac::initial_field(m, base);
  return finish(nlac::compare_nonlocal_local(base, nlac::mollifier_spec(m), etas, initial, g.workers), g);
}

int mcf(const Globals& g) {
  const auto m = manifest_for(g);
  nlac::McfStudy s;
  s.interface = nlac::interface_spec(m);
  s.epsilons = or_default(m.params.epsilons, {m.solver.epsilon});
  s.eta_rule = m.params.eta_rule;
  s.eta_constant = m.params.eta_constant;
  s.eta_exponent = m.params.eta_exponent;
  s.grid = nlac::make_grid(m.grid.dim, m.grid.n);
  s.potential = nlac::potential_spec(m);
  if (s.eta_rule != nlac::EtaRule::zero) s.mollifier = nlac::mollifier_spec(m);
  s.t_end = m.solver.t_end;
  s.dt_factor = m.params.dt_factor;
  s.diagnostic_stride = m.solver.diagnostic_stride;
  s.stabilizer = m.solver.stabilizer;
  return finish(nlac::mcf_convergence(s, g.workers), g);
}

struct ProfileArgs {
  double rho_min = -10.0;
  double rho_max = 10.0;
  int count = 2001;
  std::vector<double> coefficients;
};

int profile(const Globals& g, const ProfileArgs& a) {
  nlac::PotentialSpec pot = nlac::PotentialSpec::quartic();
  if (!g.manifest.empty()) pot = nlac::potential_spec(manifest_for(g));
  if (!a.coefficients.empty()) pot = nlac::PotentialSpec::custom(a.coefficients);
  const fs::path path = fs::path(g.out) / "profile.csv";
  nlac::write_text(path, nlac::profile_csv(pot, a.rho_min, a.rho_max, a.count));
  std::cout << "profile: wrote " << path.string() << "\n";
  return 0;
}

struct SymbolArgs {
  int dim = 2;
  int n = 64;
  double eta = 0.0625;
  std::optional<double> beta;
};

int symbol(const Globals& g, const SymbolArgs& a) {
  nlac::MollifierSpec spec;
  nlac::TorusGrid grid = nlac::make_grid(a.dim, a.n);
  if (!g.manifest.empty()) {
    const auto m = manifest_for(g);
    spec = nlac::mollifier_spec(m);
    grid = nlac::make_grid(m.grid.dim, m.grid.n);
  } else {
    spec = nlac::default_mollifier(a.dim);
    if (a.beta) {
      spec.beta = *a.beta;
      spec = nlac::normalize(spec);
    }
  }
  const nlac::SymbolTable table = nlac::symbol_table(spec, a.eta, grid, g.workers);
  const fs::path path = fs::path(g.out) / "symbol.csv";
  nlac::write_text(path, nlac::symbol_csv(table));
  std::cout << "symbol: wrote " << path.string() << "\n";
  return 0;
}

int fail(const char* kind, const std::string& message, int code) {
  std::string line = message;
  for (char& c : line) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  std::cerr << "nlac: error=" << kind << " " << line << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlocal Allen-Cahn spectral simulator and verification harness", "nlac"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--manifest", g.manifest, "Study manifest (JSON)");
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--workers", g.workers, "Worker threads (default: NLAC_WORKERS, else logical cores)");
  app.add_option("--seed", g.seed, "Seed overriding the manifest");

  ProfileArgs pa;
  SymbolArgs sa;
  auto* sim = app.add_subcommand("simulate", "Run one simulation; write run.csv and final.nlac");
  auto* con = app.add_subcommand("consistency", "Rate of L_eta -> -Laplacian on random fields");
  auto* ehr = app.add_subcommand("ehrling", "Nonlocal Ehrling inequality on random fields");
  auto* flo = app.add_subcommand("spectral-floor", "Smallest eigenvalue of the linearized operator");
  auto* cmp = app.add_subcommand("compare-local", "Nonlocal vs local solution gap as eta decreases");
  auto* mc = app.add_subcommand("mcf", "Sharp-interface convergence to mean curvature flow");
  auto* pro = app.add_subcommand("profile", "Tabulate the optimal profile");
  pro->add_option("--rho-min", pa.rho_min)->capture_default_str();
  pro->add_option("--rho-max", pa.rho_max)->capture_default_str();
  pro->add_option("--count", pa.count)->capture_default_str();
  pro->add_option("--coefficients", pa.coefficients, "Ascending polynomial coefficients of a custom potential");
  auto* sym = app.add_subcommand("symbol", "Export the multiplier m_eta on a grid");
  sym->add_option("--dim", sa.dim)->capture_default_str();
  sym->add_option("--n", sa.n)->capture_default_str();
  sym->add_option("--eta", sa.eta)->capture_default_str();
  sym->add_option("--beta", sa.beta);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 2);
  }
  if (g.workers == 0) g.workers = nlac::default_worker_count();

  try {
    if (sim->parsed()) return simulate(g);
    if (con->parsed()) return consistency(g);
    if (ehr->parsed()) return ehrling(g);
    if (flo->parsed()) return spectral_floor(g);
    if (cmp->parsed()) return compare_local(g);
    if (mc->parsed()) return mcf(g);
    if (pro->parsed()) return profile(g, pa);
    if (sym->parsed()) return symbol(g, sa);
  } catch (const CheckFailed& e) {
    return fail("check", e.message, 1);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 2);
  } catch (const nlac::FormatError& e) {
    return fail("format", e.what(), 2);
  } catch (const nlac::InvalidArgument& e) {
    return fail("validation", e.what(), 2);
  } catch (const nlac::NumericalError& e) {
    return fail("numerical", e.what(), 1);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 1);
  }
  return fail("usage", "no subcommand", 2);
}
