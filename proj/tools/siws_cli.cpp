// Command-line front end for the layered SIWS simulator and its stability
// certificates.
//
// Exit status: 0 = success, 1 = not-certified / violations found (artifacts
// still written), 2 = invalid input.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "siws/config_io.hpp"
#include "siws/experiments.hpp"

namespace fs = std::filesystem;

namespace {

struct GlobalOptions {
  std::string config;
  std::string out_dir = ".";
  std::string format = "text";
  std::uint64_t seed = 1;
  std::size_t horizon = 0;  // 0 = no override
  double sigma = 0.5;
  bool per_node = false;
};

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

void emit(const GlobalOptions& opt, const nlohmann::json& machine,
          const std::string& human) {
  if (opt.format == "json")
    std::cout << machine.dump(2) << "\n";
  else
    std::cout << human;
}

siws::ExperimentSpec load_spec(const GlobalOptions& opt) {
  std::ifstream in(opt.config);
  if (!in) throw siws::ConfigError("config: cannot open '" + opt.config + "'");
  nlohmann::json doc = nlohmann::json::parse(in);
  siws::ExperimentSpec spec;
  if (doc.contains("system")) {
    spec = siws::parse_experiment(doc);
  } else {
    spec.schedule = siws::parse_system(doc);
    const auto& shape = spec.schedule.shape();
    spec.ranges.x.assign(shape.m, {0.0, 0.0});
    spec.ranges.w.assign(shape.m, {0.0, 0.0});
  }
  spec.seed = opt.seed != 1 || spec.seed == 0 ? opt.seed : spec.seed;
  if (opt.horizon > 0) spec.horizon = opt.horizon;
  spec.sigma = opt.sigma;
  spec.per_node = spec.per_node || opt.per_node;
  return spec;
}

std::string certificates_text(const std::vector<siws::Certificate>& certs) {
  std::string out;
  for (const auto& c : certs) {
    out += "virus " + std::to_string(c.virus + 1) + " [" + c.theorem +
           "]: " + siws::to_string(c.verdict) + " (rho_sup=" + std::to_string(c.rho_sup);
    if (c.slow)
      out += ", kappa_obs=" + std::to_string(c.slow->kappa_obs) +
             ", kappa_star=" + std::to_string(c.slow->kappa_star);
    out += ")";
    if (!c.detail.empty()) out += " -- " + c.detail;
    out += "\n";
  }
  return out;
}

int run_check(const GlobalOptions& opt) {
  auto schedule = siws::load_system_file(opt.config, /*validate=*/false);
  auto report = siws::check_all(schedule, siws::LayeredState::zero(schedule.shape()));
  write_file(fs::path(opt.out_dir) / "report.json", report.to_json().dump(2) + "\n");
  std::string human;
  for (const auto& c : report.checks) {
    human += std::string(c.pass ? "pass" : "FAIL") + "  " + c.name + "\n";
    for (const auto& o : c.offenders)
      human += "      " + o.where + " = " + std::to_string(o.value) + "\n";
  }
  emit(opt, report.to_json(), human);
  return report.all_pass() ? 0 : 1;
}

int run_certify(const GlobalOptions& opt) {
  auto spec = load_spec(opt);
  auto certs = siws::certify_auto(spec.schedule, spec.sigma);
  nlohmann::json j = nlohmann::json::array();
  bool all = true;
  for (const auto& c : certs) {
    j.push_back(c.to_json());
    all &= c.verdict == siws::Verdict::certified;
  }
  write_file(fs::path(opt.out_dir) / "certificates.json", j.dump(2) + "\n");
  emit(opt, j, certificates_text(certs));
  return all ? 0 : 1;
}

int run_kappa(const GlobalOptions& opt) {
  auto spec = load_spec(opt);
  nlohmann::json rows = nlohmann::json::array();
  std::string human = "virus  alpha1      L           kappa_obs   kappa_star  certified\n";
  bool all = true;
  for (std::size_t r = 0; r < spec.schedule.shape().m; ++r) {
    auto cert = siws::certify_tv_slow(spec.schedule, r, 1, spec.sigma);
    rows.push_back(cert.to_json());
    const bool ok = cert.verdict == siws::Verdict::certified;
    all &= ok;
    char line[160];
    if (cert.slow) {
      std::snprintf(line, sizeof line, "%-6zu %-11.6g %-11.6g %-11.6g %-11.6g %s\n",
                    r + 1, cert.slow->alpha1, cert.slow->l_bound, cert.slow->kappa_obs,
                    cert.slow->kappa_star, ok ? "yes" : "no");
      human += line;
    } else {
      human += std::to_string(r + 1) + "  " + siws::to_string(cert.verdict) + "\n";
    }
  }
  write_file(fs::path(opt.out_dir) / "kappa.json", rows.dump(2) + "\n");
  emit(opt, rows, human);
  return all ? 0 : 1;
}

int run_compare_r0(const GlobalOptions& opt) {
  auto spec = load_spec(opt);
  if (spec.schedule.kind() != siws::ScheduleKind::constant) {
    std::cerr << "compare-R0 requires a constant schedule\n";
    return 2;
  }
  nlohmann::json rows = nlohmann::json::array();
  std::string human = "virus  rho(M_f)    rho(M)      ordering\n";
  bool ok = true;
  for (std::size_t r = 0; r < spec.schedule.shape().m; ++r) {
    auto cmp = siws::reproduction_comparison(spec.schedule.frame_at(0, r),
                                             spec.schedule.shape(), r);
    rows.push_back({{"virus", r + 1},
                    {"applicable", cmp.applicable},
                    {"detail", cmp.detail},
                    {"rho_full", cmp.rho_full},
                    {"rho_individual", cmp.rho_individual},
                    {"ordering_holds", cmp.ordering_holds}});
    char line[160];
    if (cmp.applicable) {
      std::snprintf(line, sizeof line, "%-6zu %-11.8g %-11.8g %s\n", r + 1, cmp.rho_full,
                    cmp.rho_individual, cmp.ordering_holds ? "holds" : "VIOLATED");
      human += line;
      ok &= cmp.ordering_holds;
    } else {
      human += std::to_string(r + 1) + "  inapplicable: " + cmp.detail + "\n";
    }
  }
  write_file(fs::path(opt.out_dir) / "compare_r0.json", rows.dump(2) + "\n");
  emit(opt, rows, human);
  return ok ? 0 : 1;
}

int write_bundle(const GlobalOptions& opt, const siws::ExperimentSpec& spec,
                 const siws::ExperimentBundle& bundle) {
  const fs::path out_dir(opt.out_dir);
  const std::string stem = spec.name + "_" + std::to_string(spec.seed);
  write_file(out_dir / (stem + "_summary.json"), bundle.summary.dump(2) + "\n");
  if (!bundle.ran) {
    emit(opt, bundle.summary, "assumption gate failed; see " + stem + "_summary.json\n");
    return 1;
  }
  {
    std::ofstream csv(out_dir / (stem + ".csv"));
    siws::write_trajectory_csv(csv, bundle.trajectory, spec.schedule.shape(), spec.stride,
                               spec.per_node);
  }
  nlohmann::json jcerts = nlohmann::json::array();
  for (const auto& c : bundle.certificates) jcerts.push_back(c.to_json());
  write_file(out_dir / (stem + "_certificates.json"), jcerts.dump(2) + "\n");

  std::string human = "experiment " + spec.name + " (seed " + std::to_string(spec.seed) +
                      "): " + std::to_string(bundle.trajectory.steps) + " steps\n";
  human += certificates_text(bundle.certificates);
  bool all = true;
  for (const auto& c : bundle.certificates) all &= c.verdict == siws::Verdict::certified;
  emit(opt, bundle.summary, human);
  return all ? 0 : 1;
}

int run_simulate(const GlobalOptions& opt) {
  auto spec = load_spec(opt);
  return write_bundle(opt, spec, siws::run_experiment(spec));
}

int run_reproduce(const GlobalOptions& opt, const std::string& which,
                  const std::string& configs_dir) {
  std::vector<std::string> names;
  if (which == "all")
    names = {"fig2", "fig3", "fig4", "fig5"};
  else
    names = {which};
  int status = 0;
  for (const auto& name : names) {
    const fs::path path = fs::path(configs_dir) / (name + ".json");
    auto spec = siws::load_experiment_file(path.string());
    if (opt.horizon > 0) spec.horizon = opt.horizon;
    spec.sigma = opt.sigma;
    GlobalOptions local = opt;
    local.seed = spec.seed;
    const int rc = write_bundle(local, spec, siws::run_experiment(spec));
    status = std::max(status, rc);
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Layered multi-virus SIWS simulator and stability certificates"};
  app.require_subcommand(1);

  GlobalOptions opt;
  std::string reproduce_target;
  std::string configs_dir = "configs";

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", opt.config, "system or experiment config (JSON)");
    if (config_required) c->required();
    sub->add_option("--out", opt.out_dir, "output directory");
    sub->add_option("--seed", opt.seed, "seed for initial-state sampling");
    sub->add_option("--horizon", opt.horizon, "horizon override (steps)");
    sub->add_option("--sigma", opt.sigma, "Theorem-3 sigma in (0,1)");
    sub->add_option("--format", opt.format, "text|json")
        ->check(CLI::IsMember({"text", "json"}));
    sub->add_flag("--per-node", opt.per_node, "full per-node state columns in CSV");
  };

  auto* simulate = app.add_subcommand("simulate", "roll out a trajectory, write CSV + summary");
  add_common(simulate, true);
  auto* certify = app.add_subcommand("certify", "emit eradication certificates (auto-selects theorem)");
  add_common(certify, true);
  auto* check = app.add_subcommand("check", "validate the model assumptions, write report");
  add_common(check, true);
  auto* kappa = app.add_subcommand("kappa", "Theorem-3 constants table");
  add_common(kappa, true);
  auto* compare = app.add_subcommand("compare-R0", "reproduction-number ordering with/without infrastructure");
  add_common(compare, true);
  auto* reproduce = app.add_subcommand("reproduce", "run a shipped experiment (fig2..fig5 or all)");
  reproduce->add_option("figure", reproduce_target, "fig2|fig3|fig4|fig5|all")->required();
  reproduce->add_option("--configs", configs_dir, "directory of shipped experiment configs");
  add_common(reproduce, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Map every parse failure onto the documented "invalid input" status;
    // --help keeps its conventional success status.
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed()) return run_simulate(opt);
    if (certify->parsed()) return run_certify(opt);
    if (check->parsed()) return run_check(opt);
    if (kappa->parsed()) return run_kappa(opt);
    if (compare->parsed()) return run_compare_r0(opt);
    if (reproduce->parsed()) return run_reproduce(opt, reproduce_target, configs_dir);
  } catch (const siws::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: config parse: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
