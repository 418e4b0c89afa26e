// athermal: thermodynamic quantities of quantum channels from the command line.
//
// Subcommands: report, work-capacity, one-shot, audit, divergence.
// Exit codes: 0 success, 1 input error, 2 numerical failure.

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "athermal/audit.hpp"
#include "athermal/divergences.hpp"
#include "athermal/io.hpp"
#include "athermal/resource.hpp"
#include "athermal/thermo.hpp"

namespace {

using namespace athermal;

std::uint64_t env_seed() {
  const char* raw = std::getenv("ATHERMAL_SEED");
  if (!raw) return 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(raw, &end, 10);
  if (end == raw || *end != '\0') {
    throw InputError("ATHERMAL_SEED must be an unsigned integer");
  }
  return static_cast<std::uint64_t>(v);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Field {
  std::string name;
  std::string value;
  bool numeric = true;
};

void emit(const std::string& format, const std::string& title, const std::vector<Field>& fields) {
  if (format == "json") {
    io::json j;
    for (const Field& f : fields) {
      if (f.numeric) {
        j[f.name] = std::strtod(f.value.c_str(), nullptr);
      } else {
        j[f.name] = f.value;
      }
    }
    std::cout << j.dump(2) << "\n";
  } else if (format == "csv") {
    std::cout << "field,value\n";
    for (const Field& f : fields) std::cout << f.name << "," << f.value << "\n";
  } else {
    std::cout << title << "\n";
    for (const Field& f : fields) std::cout << "  " << f.name << ": " << f.value << "\n";
  }
}

// --units bits divides nat-valued quantities by ln 2 for display.
double display(double nats, bool bits) { return bits ? nats / std::log(2.0) : nats; }

int cmd_report(const std::string& channel_file, const std::string& bath_file,
               const std::string& format, bool bits) {
  const Channel n = io::load_channel(channel_file);
  const ThermalContext ctx = io::load_bath(bath_file);
  MirrorAscentOptions opts;
  opts.seed = env_seed();
  const ThermoReport r = channel_thermo_report(n, ctx, opts);

  std::vector<Field> fields;
  fields.push_back({"beta", fmt(r.beta)});
  fields.push_back({"thermal_free_energy", fmt(r.thermal_free_energy)});
  fields.push_back({"free_energy", fmt(r.free_energy)});
  fields.push_back({"extractable_work", fmt(r.extractable_work)});
  fields.push_back({"energy", fmt(r.energy)});
  fields.push_back({"entropy", fmt(display(r.entropy, bits))});
  fields.push_back({"helmholtz_gap", fmt(r.helmholtz_gap)});
  fields.push_back({"thermal_free_energy_certificate", to_string(r.thermal_free_energy_certificate), false});
  fields.push_back({"free_energy_certificate", to_string(r.free_energy_certificate), false});
  fields.push_back({"entropy_certificate", to_string(r.entropy_certificate), false});
  fields.push_back({"units", bits ? "bits" : "nats", false});
  emit(format, "channel thermodynamic report", fields);
  return 0;
}

int cmd_work_capacity(const std::string& from_file, const std::string& to_file,
                      const std::string& bath_file, const std::string& format) {
  const Channel n = io::load_channel(from_file);
  const Channel m = io::load_channel(to_file);
  const ThermalContext ctx = io::load_bath(bath_file);
  MirrorAscentOptions opts;
  opts.seed = env_seed();
  const WorkCapacity wc = work_capacity(n, m, ctx, opts);

  std::vector<Field> fields;
  fields.push_back({"work_capacity", fmt(wc.value)});
  fields.push_back({"free_energy_difference_form", fmt(wc.free_energy_form)});
  fields.push_back({"divergence_difference_form", fmt(wc.divergence_form)});
  emit(format, "thermodynamic work capacity", fields);
  return 0;
}

int cmd_one_shot(const std::string& channel_file, const std::string& bath_file, double eps,
                 int copies, const std::string& mode, const std::string& format, bool bits) {
  const Channel n = io::load_channel(channel_file);
  const ThermalContext ctx = io::load_bath(bath_file);
  SearchBudget budget;
  budget.seed = env_seed() + 1;

  std::vector<Field> fields;
  fields.push_back({"mode", mode, false});
  fields.push_back({"epsilon", fmt(eps)});
  bool partial = false;
  for (int k = 1; k <= copies; ++k) {
    try {
      const OneShotResult r = (mode == "distill") ? one_shot_distill(n, ctx, eps, budget, k)
                                                  : one_shot_cost(n, ctx, eps, k);
      const double nats = (mode == "distill") ? *r.distill_nats : *r.cost_nats;
      const std::string prefix = "copies_" + std::to_string(k) + "_";
      fields.push_back({prefix + "raw_divergence", fmt(display(r.raw_divergence, bits))});
      fields.push_back({prefix + "golden_units", fmt(display(nats, bits))});
      fields.push_back({prefix + "rate_per_copy", fmt(display(r.rate_per_copy, bits))});
    } catch (const NumericalError&) {
      partial = true;
      fields.push_back({"partial", "budget exceeded at copies=" + std::to_string(k), false});
      break;
    }
  }
  fields.push_back({"units", bits ? "bits" : "nats", false});
  emit(format, "one-shot athermality " + mode, fields);
  return partial ? 2 : 0;
}

int cmd_divergence(const std::string& channel_file, const std::string& bath_file,
                   const std::string& kind, const std::string& target, double eps,
                   const std::string& format, bool bits) {
  const Channel n = io::load_channel(channel_file);
  const ThermalContext ctx = io::load_bath(bath_file);
  const int d = ctx.dim();

  HermitianOperator omega = ctx.gamma.as_operator();
  if (target == "gibbs-operator") {
    omega = ctx.gamma_hat;
  } else if (target == "maximally-mixed") {
    omega = HermitianOperator(Matrix::Identity(d, d) / double(d));
  } else if (target == "identity") {
    omega = HermitianOperator(Matrix::Identity(d, d));
  }

  DivergenceReport r;
  if (kind == "rel") {
    MirrorAscentOptions opts;
    opts.seed = env_seed();
    r = channel_rel_entropy_replacer(n, omega, opts);
  } else if (kind == "max") {
    r = channel_max_rel_entropy(n, omega);
  } else if (kind == "ht") {
    SearchBudget budget;
    budget.seed = env_seed() + 1;
    r = channel_ht_rel_entropy(n, omega, eps, budget);
  } else {
    r = smoothed_channel_max_rel_entropy(n, omega, eps);
  }

  std::vector<Field> fields;
  fields.push_back({"kind", to_string(r.kind), false});
  fields.push_back({"target", target, false});
  fields.push_back({"value", fmt(display(r.value, bits))});
  fields.push_back({"certificate", to_string(r.certificate), false});
  fields.push_back({"iterations", std::to_string(r.iterations)});
  fields.push_back({"residual", fmt(r.residual)});
  fields.push_back({"units", bits ? "bits" : "nats", false});
  emit(format, "channel divergence", fields);
  return 0;
}

int cmd_audit(const std::string& suite, std::uint64_t seed, int samples, const std::string& format) {
  const audit::SuiteReport report = audit::run_suite(suite, seed, samples);
  if (format == "json") {
    io::json j;
    j["suite"] = report.suite;
    j["seed"] = seed;
    io::json checks = io::json::array();
    for (const audit::Check& c : report.checks) {
      io::json jc;
      jc["name"] = c.name;
      jc["pass"] = c.pass;
      jc["residual"] = c.residual;
      if (!c.detail.empty()) jc["detail"] = c.detail;
      checks.push_back(std::move(jc));
    }
    j["checks"] = std::move(checks);
    j["all_pass"] = report.all_pass();
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "audit suite: " << report.suite << " (seed " << seed << ")\n";
    for (const audit::Check& c : report.checks) {
      std::cout << "  " << (c.pass ? "PASS" : "FAIL") << " " << c.name
                << " residual=" << fmt(c.residual);
      if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
      std::cout << "\n";
    }
  }
  return report.all_pass() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"thermodynamic quantities of quantum channels"};
  app.require_subcommand(1);

  std::string channel_file, bath_file, from_file, to_file;
  std::string format = "table";
  std::string units = "nats";
  std::string mode = "distill";
  std::string kind = "rel";
  std::string target = "gibbs";
  std::string suite;
  double eps = 0.05;
  int copies = 1;
  std::uint64_t seed = 0;
  int samples = 10;
  bool seed_given = false;

  auto add_format = [&](CLI::App* cmd) {
    cmd->add_option("--format", format, "output format")->check(CLI::IsMember({"json", "csv", "table"}));
    cmd->add_option("--units", units, "display units for nat-valued quantities")
        ->check(CLI::IsMember({"nats", "bits"}));
  };

  CLI::App* report = app.add_subcommand("report", "full thermodynamic report for one channel");
  report->add_option("--channel", channel_file, "channel spec file")->required();
  report->add_option("--bath", bath_file, "bath spec file")->required();
  add_format(report);

  CLI::App* capacity = app.add_subcommand("work-capacity", "work capacity of a channel conversion");
  capacity->add_option("--from", from_file, "source channel spec")->required();
  capacity->add_option("--to", to_file, "target channel spec")->required();
  capacity->add_option("--bath", bath_file, "bath spec file")->required();
  add_format(capacity);

  CLI::App* one_shot = app.add_subcommand("one-shot", "one-shot distillation / formation");
  one_shot->add_option("--channel", channel_file, "channel spec file")->required();
  one_shot->add_option("--bath", bath_file, "bath spec file")->required();
  one_shot->add_option("--epsilon", eps, "error tolerance in (0,1)")->required();
  one_shot->add_option("--copies", copies, "parallel copies (trend table when > 1)")
      ->check(CLI::Range(1, 3));
  one_shot->add_option("--mode", mode, "distill or cost")->check(CLI::IsMember({"distill", "cost"}));
  add_format(one_shot);

  CLI::App* divergence = app.add_subcommand("divergence", "channel divergence against a replacer");
  divergence->add_option("--channel", channel_file, "channel spec file")->required();
  divergence->add_option("--bath", bath_file, "bath spec file")->required();
  divergence->add_option("--kind", kind, "divergence kind")
      ->check(CLI::IsMember({"rel", "max", "ht", "smoothed-max"}));
  divergence->add_option("--target", target, "replacer target")
      ->check(CLI::IsMember({"gibbs", "gibbs-operator", "maximally-mixed", "identity"}));
  divergence->add_option("--epsilon", eps, "error tolerance for ht / smoothed-max");
  add_format(divergence);

  CLI::App* audit_cmd = app.add_subcommand("audit", "run a property audit suite");
  audit_cmd->add_option("--suite", suite, "suite name")->required();
  audit_cmd->add_option("--seed", seed, "random seed (defaults to ATHERMAL_SEED)")
      ->each([&](const std::string&) { seed_given = true; });
  audit_cmd->add_option("--samples", samples, "sampled instances per property")->check(CLI::PositiveNumber);
  audit_cmd->add_option("--format", format, "output format")
      ->check(CLI::IsMember({"json", "table"}));

  CLI11_PARSE(app, argc, argv);

  try {
    const bool bits = (units == "bits");
    if (report->parsed()) return cmd_report(channel_file, bath_file, format, bits);
    if (capacity->parsed()) return cmd_work_capacity(from_file, to_file, bath_file, format);
    if (one_shot->parsed()) return cmd_one_shot(channel_file, bath_file, eps, copies, mode, format, bits);
    if (divergence->parsed()) {
      if ((kind == "ht" || kind == "smoothed-max") && !(eps >= 0.0 && eps < 1.0)) {
        throw InputError("divergence: --epsilon must lie in [0, 1)");
      }
      return cmd_divergence(channel_file, bath_file, kind, target, eps, format, bits);
    }
    if (audit_cmd->parsed()) {
      if (!seed_given) seed = env_seed();
      return cmd_audit(suite, seed, samples, format);
    }
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
