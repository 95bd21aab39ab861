//
// Copyright 2026 The dpadapt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// dpadapt command-line tool.
//
//   dpadapt run       --input data.csv --out-dir out [--method dp-adapt] ...
//   dpadapt simulate  --scenario grid --pattern 1 --trials 5 --seed 7 ...
//   dpadapt privacy   --mu 0.24 --epsilon 0.5
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 internal invariant
// violation. Flags may also come from an INI/TOML file given by --config;
// command-line flags take precedence.

#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "dpadapt/errors.h"
#include "dpadapt/io.h"
#include "dpadapt/methods.h"
#include "dpadapt/privacy.h"
#include "dpadapt/rng.h"
#include "dpadapt/selection.h"
#include "dpadapt/simulation.h"
#include "dpadapt/version.h"

namespace {

namespace fs = std::filesystem;
using dpadapt::ContractViolation;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

// Options shared by `run` and `simulate`. Unset optionals keep the
// command's defaults.
struct MethodFlags {
  std::optional<double> alpha;
  std::optional<double> mu;
  std::optional<double> epsilon;
  std::optional<double> delta;
  std::string noise = "gaussian";
  std::optional<std::string> kernel;
  std::optional<double> delta_g;
  std::optional<int> m;
  std::optional<double> s0;
  std::optional<int> em_iterations;
  std::optional<int> refit_every;
  std::optional<double> ridge;
  std::optional<double> bh_nu;
  std::optional<double> bh_eta;
  bool zero_noise = false;
};

void AddMethodFlags(CLI::App& cmd, MethodFlags& f) {
  cmd.add_option("--alpha", f.alpha, "Target FDR level in (0, 1)");
  auto* mu = cmd.add_option("--mu", f.mu, "GDP budget mu");
  auto* eps = cmd.add_option("--epsilon", f.epsilon, "(epsilon, delta) budget");
  auto* del = cmd.add_option("--delta", f.delta, "(epsilon, delta) budget");
  mu->excludes(eps)->excludes(del);
  eps->needs(del);
  del->needs(eps);
  cmd.add_option("--noise", f.noise, "Peeling noise: gaussian or laplace")
      ->check(CLI::IsMember({"gaussian", "laplace"}));
  cmd.add_option("--kernel", f.kernel, "Transform kernel: gaussian or truncnorm:<M>");
  cmd.add_option("--delta-g", f.delta_g, "Sensitivity on the G^-1 scale");
  cmd.add_option("--m", f.m, "Peeling size");
  cmd.add_option("--s0", f.s0, "Initial threshold in (0, 0.5)");
  cmd.add_option("--em-iterations", f.em_iterations, "EM iterations per refit");
  cmd.add_option("--refit-every", f.refit_every,
                 "Greedy removals between refits (0 = max(1, m/20))");
  cmd.add_option("--ridge", f.ridge, "Ridge on the pi(x) weights");
  cmd.add_option("--bh-nu", f.bh_nu, "DP-BH truncation nu (default 0.5 alpha/n)");
  cmd.add_option("--bh-eta", f.bh_eta, "DP-BH multiplicative sensitivity");
  cmd.add_flag("--zero-noise-for-testing", f.zero_noise,
               "Disable all privacy noise (output is marked non-private)");
}

// Overlays the flags on `s`. Budget flags replace the budget as a whole.
void ApplyMethodFlags(const MethodFlags& f, dpadapt::MethodSettings& s) {
  if (f.alpha) s.alpha = *f.alpha;
  if (f.kernel) s.kernel_name = *f.kernel;
  if (f.delta_g) s.delta_g = *f.delta_g;
  if (f.m) s.m = *f.m;
  if (f.s0) s.s0 = *f.s0;
  if (f.em_iterations) s.em.iterations = *f.em_iterations;
  if (f.refit_every) s.em.refit_every = *f.refit_every;
  if (f.ridge) s.em.ridge = *f.ridge;
  if (f.bh_nu) s.bh_nu = *f.bh_nu;
  if (f.bh_eta) s.bh_eta = *f.bh_eta;
  s.noise = dpadapt::ParseNoiseFamily(f.noise);
  s.zero_noise_for_testing = f.zero_noise;
  if (f.mu) {
    s.budget = dpadapt::PrivacyBudget::Gdp(*f.mu);
  } else if (f.epsilon) {
    s.budget = dpadapt::PrivacyBudget::FromEpsilonDelta(*f.epsilon, *f.delta);
    s.bh_epsilon = *f.epsilon;
    s.bh_delta = *f.delta;
  }
  if (s.noise == dpadapt::NoiseFamily::kLaplace &&
      !s.budget.specified_as_epsilon_delta()) {
    throw ContractViolation("--noise laplace needs --epsilon and --delta");
  }
}

std::string ProvenanceLine(const nlohmann::json& config) {
  return "# dpadapt " + std::string(dpadapt::kVersion) + " " + config.dump() +
         "\n";
}

std::string RejectionsCsv(const dpadapt::MethodOutcome& outcome,
                          const std::vector<std::string>& ids,
                          const nlohmann::json& config) {
  std::string out = ProvenanceLine(config) + "id,noisy_p,threshold\n";
  for (const auto& row : outcome.rows) {
    out += ids[row.index] + "," + dpadapt::FormatShortest(row.noisy_p) + "," +
           dpadapt::FormatShortest(row.threshold) + "\n";
  }
  return out;
}

// --- run ---------------------------------------------------------------

struct RunFlags {
  std::string input;
  std::string out_dir;
  std::string method = "dp-adapt";
  std::optional<std::uint64_t> seed;
  std::vector<double> alpha_grid;
  std::string preset;
  MethodFlags method_flags;
};

int CmdRun(const RunFlags& flags) {
  dpadapt::MethodSettings settings;
  std::vector<double> alphas = flags.alpha_grid;
  const MethodFlags& f = flags.method_flags;
  if (flags.preset == "bottomly-like") {
    settings.budget = dpadapt::PrivacyBudget::Gdp(0.25);
    settings.delta_g = 3e-5;
    settings.m = 2500;
    settings.kernel_name = "gaussian";
    if (alphas.empty() && !f.alpha) {
      for (int k = 1; k <= 10; ++k) alphas.push_back(k / 100.0);
    }
  } else if (!flags.preset.empty()) {
    throw ContractViolation("unknown preset '" + flags.preset + "'");
  }
  const dpadapt::MethodId method = dpadapt::ParseMethod(flags.method);
  if (dpadapt::IsPrivate(method) && !f.zero_noise) {
    if (flags.preset.empty() && !f.mu && !f.epsilon) {
      throw ContractViolation("a private method needs --mu or --epsilon/--delta");
    }
    if (method == dpadapt::MethodId::kDpBh && !f.epsilon) {
      throw ContractViolation("dp-bh needs an (epsilon, delta) budget");
    }
    if (!flags.seed) throw ContractViolation("a private method needs --seed");
  }
  ApplyMethodFlags(f, settings);
  if (!alphas.empty() && f.alpha) {
    throw ContractViolation("--alpha and --alpha-grid are mutually exclusive");
  }
  if (alphas.empty()) alphas.push_back(settings.alpha);

  const dpadapt::PValueTable table = dpadapt::IngestCsv(flags.input);
  const std::uint64_t seed = flags.seed.value_or(0);
  if (static_cast<std::size_t>(settings.m) > table.size() &&
      (method == dpadapt::MethodId::kDpAdapt ||
       method == dpadapt::MethodId::kDpBh)) {
    throw ContractViolation("--m exceeds the number of hypotheses (" +
                            std::to_string(table.size()) + ")");
  }

  nlohmann::json config = {{"command", "run"},
                           {"input", flags.input},
                           {"method", flags.method},
                           {"preset", flags.preset},
                           {"alphas", alphas},
                           {"seed", seed},
                           {"settings", settings.ToJson()}};
  const dpadapt::Rng rng(seed);
  const auto outcomes =
      dpadapt::RunMethodAlphaGrid(method, table.data, settings, alphas, rng);

  nlohmann::json runs = nlohmann::json::array();
  const fs::path out_dir(flags.out_dir);
  for (const auto& outcome : outcomes) {
    runs.push_back(dpadapt::OutcomeToJson(outcome, table.ids));
    const std::string name =
        alphas.size() == 1
            ? "rejections.csv"
            : "rejections_alpha_" + dpadapt::FormatShortest(outcome.alpha) + ".csv";
    dpadapt::AtomicWriteFile(out_dir / name,
                             RejectionsCsv(outcome, table.ids, config));
  }
  const nlohmann::json report = {{"tool", "dpadapt"},
                                 {"version", dpadapt::kVersion},
                                 {"config", config},
                                 {"seed", seed},
                                 {"n", table.size()},
                                 {"runs", runs}};
  dpadapt::AtomicWriteFile(out_dir / "report.json", report.dump(2) + "\n");
  for (const auto& outcome : outcomes) {
    std::cout << "alpha=" << dpadapt::FormatShortest(outcome.alpha)
              << " rejections=" << outcome.rejected.size() << "\n";
    for (const auto& w : outcome.warnings) std::cerr << "warning: " << w << "\n";
  }
  return kExitOk;
}

// --- simulate --------------------------------------------------------------

struct SimulateFlags {
  std::string scenario = "no-side-info";
  int pattern = 1;
  std::optional<int> n;
  std::optional<int> t;
  std::optional<double> beta;
  std::string nulls = "uniform";
  std::optional<int> grid_side;
  std::vector<std::string> methods;
  int trials = 100;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string out_dir;
  bool timing = false;
  MethodFlags method_flags;
};

int CmdSimulate(const SimulateFlags& flags) {
  dpadapt::CampaignConfig config;
  const dpadapt::NullDist nulls = dpadapt::ParseNullDist(flags.nulls);
  if (flags.scenario == "no-side-info") {
    config = dpadapt::DeskNoSideInfoCampaign(nulls);
    if (flags.n) config.scenario.n = *flags.n;
    if (flags.t) config.scenario.t = *flags.t;
    if (flags.beta) config.scenario.beta = *flags.beta;
    if (!flags.method_flags.bh_nu) {
      config.settings.bh_nu = 0.0;  // 0.5 alpha / n for the final n
    }
  } else if (flags.scenario == "grid") {
    if (flags.pattern < 1 || flags.pattern > 3) {
      throw ContractViolation("--pattern must be 1, 2 or 3");
    }
    config = dpadapt::DeskGridCampaign(
        static_cast<dpadapt::GridPattern>(flags.pattern), flags.beta.value_or(3.5));
    config.scenario.null_dist = nulls;
    if (flags.grid_side) {
      config.scenario.grid_side = *flags.grid_side;
      if (!flags.method_flags.m) {
        config.settings.m =
            std::max<int>(1, static_cast<int>(config.scenario.size() / 20));
      }
    }
    if (!flags.method_flags.bh_nu) config.settings.bh_nu = 0.0;
  } else {
    throw ContractViolation("--scenario must be no-side-info or grid");
  }
  ApplyMethodFlags(flags.method_flags, config.settings);
  if (!flags.methods.empty()) {
    config.methods.clear();
    for (const auto& name : flags.methods) {
      config.methods.push_back(dpadapt::ParseMethod(name));
    }
  }
  config.trials = flags.trials;
  config.base_seed = flags.seed;
  config.workers = flags.workers;

  const dpadapt::CampaignResult result = dpadapt::RunCampaign(config);
  const nlohmann::json manifest =
      dpadapt::CampaignManifest(result, flags.timing);
  const std::string provenance = ProvenanceLine(config.ToJson());
  const fs::path out_dir(flags.out_dir);
  dpadapt::AtomicWriteFile(out_dir / "trials.csv",
                           provenance + dpadapt::CampaignLongCsv(result, flags.timing));
  dpadapt::AtomicWriteFile(
      out_dir / "summary.csv",
      provenance + dpadapt::CampaignSummaryCsv(result, flags.timing));
  dpadapt::AtomicWriteFile(out_dir / "manifest.json", manifest.dump(2) + "\n");
  std::cout << dpadapt::CampaignSummaryCsv(result, flags.timing);
  return kExitOk;
}

// --- privacy -----------------------------------------------------------

struct PrivacyFlags {
  std::optional<double> mu;
  std::optional<double> epsilon;
  std::optional<double> delta;
  std::vector<double> compose;
  std::optional<double> delta_g;
  int m = 1;
  std::string noise = "gaussian";
};

int CmdPrivacy(const PrivacyFlags& f) {
  nlohmann::json out;
  if (f.m < 1) throw ContractViolation("--m must be >= 1");
  if (!f.compose.empty()) {
    std::vector<dpadapt::PrivacyBudget> parts;
    for (double mu : f.compose) parts.push_back(dpadapt::PrivacyBudget::Gdp(mu));
    out["compose"] = f.compose;
    out["mu"] = dpadapt::Compose(parts).mu();
  } else if (f.delta_g) {
    // Calibration calculator.
    if (f.noise == "gaussian") {
      double mu = 0.0;
      if (f.mu) {
        mu = *f.mu;
      } else if (f.epsilon && f.delta) {
        mu = dpadapt::DeltaToGdp(*f.epsilon, *f.delta);
      } else {
        throw ContractViolation("calibration needs --mu or --epsilon/--delta");
      }
      const dpadapt::NoiseSpec noise =
          dpadapt::MirrorPeelNoise(*f.delta_g, mu, f.m);
      out = {{"noise", "gaussian"}, {"delta_g", *f.delta_g}, {"mu", mu},
             {"m", f.m}, {"per_round_sd", noise.scale()}};
    } else {
      if (!f.epsilon || !f.delta) {
        throw ContractViolation("Laplace calibration needs --epsilon and --delta");
      }
      const auto cal =
          dpadapt::CalibrateLaplace(*f.delta_g, f.m, *f.epsilon, *f.delta);
      out = {{"noise", "laplace"}, {"delta_g", *f.delta_g},
             {"epsilon", *f.epsilon}, {"delta", *f.delta}, {"m", f.m},
             {"lambda", cal.noise.scale()}, {"warnings", cal.warnings}};
    }
  } else if (f.mu && f.epsilon && !f.delta) {
    out = {{"mu", *f.mu}, {"epsilon", *f.epsilon},
           {"delta", dpadapt::GdpToDelta(*f.mu, *f.epsilon)}};
  } else if (f.epsilon && f.delta && !f.mu) {
    out = {{"epsilon", *f.epsilon}, {"delta", *f.delta},
           {"mu", dpadapt::DeltaToGdp(*f.epsilon, *f.delta)}};
  } else {
    throw ContractViolation(
        "give --mu with --epsilon, --epsilon with --delta, --compose, or "
        "--delta-g for calibration");
  }
  std::cout << out.dump() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private adaptive FDR control"};
  app.set_version_flag("--version", std::string(dpadapt::kVersion));
  app.set_config("--config", "", "INI/TOML file with flag values");
  app.require_subcommand(1);

  RunFlags run;
  CLI::App* run_cmd = app.add_subcommand("run", "Run one method on a CSV file");
  run_cmd->add_option("--input", run.input, "CSV with columns id, p[, x1, ...]")
      ->required();
  run_cmd->add_option("--out-dir", run.out_dir, "Output directory")->required();
  run_cmd->add_option("--method", run.method,
                      "dp-adapt, adapt, dp-bh, dp-bonf or bh");
  run_cmd->add_option("--seed", run.seed, "Seed for the privacy noise");
  run_cmd->add_option("--alpha-grid", run.alpha_grid,
                      "Several alpha levels from one private release")
      ->delimiter(',');
  run_cmd->add_option("--preset", run.preset, "Parameter preset: bottomly-like");
  AddMethodFlags(*run_cmd, run.method_flags);

  SimulateFlags sim;
  CLI::App* sim_cmd =
      app.add_subcommand("simulate", "Monte Carlo campaign on synthetic data");
  sim_cmd->add_option("--scenario", sim.scenario, "no-side-info or grid");
  sim_cmd->add_option("--pattern", sim.pattern, "Grid pattern 1, 2 or 3");
  sim_cmd->add_option("--n", sim.n, "Hypotheses (no-side-info)");
  sim_cmd->add_option("--t", sim.t, "True effects (no-side-info)");
  sim_cmd->add_option("--beta", sim.beta, "Signal strength");
  sim_cmd->add_option("--nulls", sim.nulls, "uniform, beta22 or pow-cubic");
  sim_cmd->add_option("--grid-side", sim.grid_side, "Grid side length");
  sim_cmd->add_option("--methods", sim.methods, "Comma-separated method list")
      ->delimiter(',');
  sim_cmd->add_option("--trials", sim.trials, "Number of trials");
  sim_cmd->add_option("--seed", sim.seed, "Base seed")->required();
  sim_cmd->add_option("--workers", sim.workers, "Worker threads");
  sim_cmd->add_option("--out-dir", sim.out_dir, "Output directory")->required();
  sim_cmd->add_flag("--timing", sim.timing, "Record wall times in the outputs");
  AddMethodFlags(*sim_cmd, sim.method_flags);

  PrivacyFlags priv;
  CLI::App* priv_cmd =
      app.add_subcommand("privacy", "GDP / (epsilon, delta) calculator");
  auto* p_mu = priv_cmd->add_option("--mu", priv.mu, "GDP parameter");
  priv_cmd->add_option("--epsilon", priv.epsilon, "epsilon");
  auto* p_delta = priv_cmd->add_option("--delta", priv.delta, "delta");
  p_mu->excludes(p_delta);
  priv_cmd->add_option("--compose", priv.compose, "Compose GDP parameters")
      ->delimiter(',');
  priv_cmd->add_option("--delta-g", priv.delta_g, "Calibrate noise for this sensitivity");
  priv_cmd->add_option("--m", priv.m, "Peeling size for calibration");
  priv_cmd->add_option("--noise", priv.noise, "gaussian or laplace")
      ->check(CLI::IsMember({"gaussian", "laplace"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (run_cmd->parsed()) return CmdRun(run);
    if (sim_cmd->parsed()) return CmdSimulate(sim);
    if (priv_cmd->parsed()) return CmdPrivacy(priv);
  } catch (const dpadapt::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const dpadapt::InvariantViolation& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const ContractViolation& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const dpadapt::NoSolutionError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
