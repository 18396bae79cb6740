// qtm: certify quantum-thermodynamic advantages of steady-state thermal
// machines against their classical equivalents.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qtm/equivalents.hpp"
#include "qtm/fcs.hpp"
#include "qtm/machines.hpp"
#include "qtm/montecarlo.hpp"
#include "qtm/sweep.hpp"
#include "qtm/thermo.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitConditioning = 3;
constexpr int kExitInfeasible = 4;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw qtm::DomainError{"cannot open " + path};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw qtm::DomainError{"cannot write " + out};
  f << text;
}

qtm::MachineSpec resolve_machine(const std::string& name_or_file,
                                 const std::map<std::string, double>& params) {
  if (name_or_file == "amplifier" || name_or_file == "fridge" || name_or_file == "nic")
    return qtm::machine_from_params(name_or_file, params);
  return qtm::load_machine(name_or_file);
}

int status_exit_code(qtm::RowStatus s) {
  switch (s) {
    case qtm::RowStatus::ok:
    case qtm::RowStatus::equilibrium: return 0;
    case qtm::RowStatus::invalid: return kExitValidation;
    case qtm::RowStatus::infeasible: return kExitInfeasible;
    default: return kExitConditioning;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"steady-state thermal machine certification"};
  app.require_subcommand(1);

  uint64_t seed = 1;
  int threads = 0;
  std::string out;
  app.add_option("--seed", seed, "global RNG seed");
  app.add_option("--threads", threads, "worker threads (0 = hardware)");
  app.add_option("--out", out, "output path (default stdout)");

  std::map<std::string, double> params;
  auto add_params_opt = [&params](CLI::App* cmd) {
    cmd->add_option("--param,-p", [&params](const std::vector<std::string>& vals) {
      for (const auto& v : vals) {
        auto eq = v.find('=');
        if (eq == std::string::npos) return false;
        params[v.substr(0, eq)] = std::stod(v.substr(eq + 1));
      }
      return true;
    }, "machine parameter name=value (repeatable)");
  };

  std::string machine_arg;
  auto* analyze = app.add_subcommand("analyze", "one CertificationReport as JSON");
  analyze->add_option("machine", machine_arg, "spec file or builtin name")->required();
  add_params_opt(analyze);

  auto* equivalent = app.add_subcommand("equivalent", "emit classical equivalent + feasibility");
  equivalent->add_option("machine", machine_arg, "spec file or builtin name")->required();
  add_params_opt(equivalent);

  std::string config_path;
  auto* sweep = app.add_subcommand("sweep", "parameter sweep to CSV");
  sweep->add_option("--config", config_path, "sweep config JSON")->required();

  auto* grid = app.add_subcommand("grid", "2-d grid scan to CSV");
  grid->add_option("--config", config_path, "grid config JSON")->required();

  double mc_duration = 0.0;
  long trajectories = 8;
  auto* verify = app.add_subcommand("verify", "ICS vs Monte Carlo comparison table");
  verify->add_option("--machine", machine_arg, "spec file or builtin name")->required();
  verify->add_option("--trajectories", trajectories, "number of trajectories");
  verify->add_option("--duration", mc_duration, "trajectory duration (0 = auto)");
  add_params_opt(verify);

  std::string csv_path, column = "R";
  int bins = 50;
  auto* hist = app.add_subcommand("hist", "bin counts of a sweep CSV column");
  hist->add_option("csv", csv_path, "sweep CSV file")->required();
  hist->add_option("--column", column, "column name");
  hist->add_option("--bins", bins, "bin count");

  bool gnuplot = false;
  sweep->add_flag("--gnuplot", gnuplot, "also emit a companion gnuplot script");
  grid->add_flag("--gnuplot", gnuplot, "also emit a companion gnuplot script");

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed()) {
      qtm::MachineSpec spec = resolve_machine(machine_arg, params);
      qtm::CertificationReport rep = qtm::certify(spec);
      emit(out, rep.to_json() + "\n");
      return status_exit_code(rep.status);
    }
    if (equivalent->parsed()) {
      qtm::MachineSpec spec = resolve_machine(machine_arg, params);
      auto validation = qtm::validate_machine(spec);
      if (!validation.ok()) {
        for (const auto& e : validation.errors) std::cerr << "error: " << e << "\n";
        return kExitValidation;
      }
      if (spec.coherence_class == qtm::CoherenceClass::noise_induced)
        spec = qtm::nic_basis_change(spec);
      qtm::EquivalenceReport rep = qtm::classical_equivalent(spec);
      emit(out, rep.to_json() + "\n");
      return rep.feasible ? 0 : kExitInfeasible;
    }
    if (sweep->parsed()) {
      qtm::SweepConfig cfg = qtm::sweep_config_from_json(slurp(config_path));
      if (seed != 1) cfg.seed = seed;
      qtm::SweepResult res = qtm::run_sweep(cfg, threads);
      const std::string path = out.empty() ? cfg.out : out;
      emit(path, res.to_csv());
      if (gnuplot && !path.empty()) {
        std::ofstream g(path + ".gp");
        g << "set datafile separator ','\nset style data histograms\n"
          << "plot '" << path << "' using (column('R')) bins=60 with boxes title 'R'\n";
      }
      return 0;
    }
    if (grid->parsed()) {
      qtm::GridConfig cfg = qtm::grid_config_from_json(slurp(config_path));
      qtm::GridResult res = qtm::grid_scan(cfg, threads);
      const std::string path = out.empty() ? cfg.out : out;
      emit(path, res.to_csv());
      if (gnuplot && !path.empty()) {
        std::ofstream g(path + ".gp");
        g << "set datafile separator ','\nset view map\n"
          << "splot '" << path << "' using 2:3:4 with points pt 5 palette title 'R'\n";
      }
      return 0;
    }
    if (verify->parsed()) {
      qtm::MachineSpec spec = resolve_machine(machine_arg, params);
      auto validation = qtm::validate_machine(spec);
      if (!validation.ok()) {
        for (const auto& e : validation.errors) std::cerr << "error: " << e << "\n";
        return kExitValidation;
      }
      if (spec.coherence_class == qtm::CoherenceClass::noise_induced)
        spec = qtm::nic_basis_change(spec);
      qtm::Monitor mon;
      mon.bath = spec.kind == qtm::MachineKind::nic ? "work" : "cold";
      qtm::GeneratorMatrix gen = qtm::build_quantum_generator(spec);
      qtm::CurrentStats ics = qtm::cumulants(qtm::dress_with_counting(gen, spec, mon));
      qtm::EquivalenceReport eq = qtm::classical_equivalent(spec);
      std::ostringstream os;
      os << "side,trajectory,seed,duration,c1,c1_err,c2,c2_err,rng\n";
      char buf[256];
      std::snprintf(buf, sizeof buf, "ics,,,,%.12g,0,%.12g,0,\n", ics.c1, ics.c2);
      os << buf;
      double duration = mc_duration;
      if (duration <= 0) duration = 2e3 / std::max(std::fabs(ics.c1), 1e-6);
      for (long t = 0; t < trajectories; ++t) {
        qtm::TrajectoryStats mc =
            qtm::quantum_jump_unravel(spec, mon, duration, qtm::draw_seed(seed, t));
        std::snprintf(buf, sizeof buf, "mc_quantum,%ld,%llu,%.6g,%.12g,%.3g,%.12g,%.3g,%s\n", t,
                      (unsigned long long)qtm::draw_seed(seed, t), duration, mc.c1, mc.c1_err,
                      mc.c2, mc.c2_err, mc.rng.c_str());
        os << buf;
      }
      if (eq.feasible) {
        qtm::CurrentStats ics_cl = qtm::cumulants(qtm::dress_with_counting(
            qtm::build_classical_generator(eq.equivalent), eq.equivalent, mon));
        std::snprintf(buf, sizeof buf, "ics_classical,,,,%.12g,0,%.12g,0,\n", ics_cl.c1,
                      ics_cl.c2);
        os << buf;
        for (long t = 0; t < trajectories; ++t) {
          qtm::TrajectoryStats mc =
              qtm::gillespie(eq.equivalent, mon, duration, qtm::draw_seed(seed ^ 0xABCD, t));
          std::snprintf(buf, sizeof buf, "mc_classical,%ld,%llu,%.6g,%.12g,%.3g,%.12g,%.3g,%s\n",
                        t, (unsigned long long)qtm::draw_seed(seed ^ 0xABCD, t), duration, mc.c1,
                        mc.c1_err, mc.c2, mc.c2_err, mc.rng.c_str());
          os << buf;
        }
      }
      emit(out, os.str());
      return 0;
    }
    if (hist->parsed()) {
      qtm::Histogram h = qtm::histogram_csv(slurp(csv_path), column, bins);
      emit(out, h.to_csv());
      return 0;
    }
  } catch (const qtm::DomainError& e) {
    std::cerr << "error: " << e.what << "\n";
    return kExitValidation;
  } catch (const qtm::SweepError& e) {
    std::cerr << "error: " << e.what << "\n";
    return kExitValidation;
  } catch (const qtm::SteadyStateError& e) {
    std::cerr << "error: " << e.what << "\n";
    return kExitConditioning;
  } catch (const qtm::ConditioningError& e) {
    std::cerr << "error: " << e.what << "\n";
    return kExitConditioning;
  } catch (const qtm::EquivalenceError& e) {
    std::cerr << "error: " << e.what << "\n";
    return kExitValidation;
  } catch (const qtm::GeneratorError& e) {
    std::cerr << "error: " << e.what << "\n";
    return kExitValidation;
  } catch (const qtm::MonteCarloError& e) {
    std::cerr << "error: " << e.what << "\n";
    return kExitConditioning;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
