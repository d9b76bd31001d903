// Copyright 2026 The svqs Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// svqs: batch experiments for subspace-trained time-evolution circuits.
//
//   svqs <subcommand> [--config FILE] [--out FILE] [--seed N] [--shots N]
//
// Exit status: 0 ok, 1 configuration error, 2 numerical non-convergence.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "svqs/analysis.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNonConvergence = 2;

struct Options {
    std::string config_path;
    std::optional<std::string> out;
    std::optional<std::int64_t> seed;
    std::optional<std::int64_t> shots;
};

/// "runs/a.csv" + "training_log" -> "runs/a.training_log.csv".
std::string sibling(const std::string& path, const std::string& tag) {
    const auto slash = path.find_last_of('/');
    const auto dot = path.find_last_of('.');
    const std::string stem = dot != std::string::npos && (slash == std::string::npos || dot > slash)
                                 ? path.substr(0, dot)
                                 : path;
    return stem + "." + tag + ".csv";
}

class Run {
  public:
    Run(std::string subcommand, const Options& opt) : subcommand_(std::move(subcommand)) {
        cfg_ = opt.config_path.empty() ? svqs::ExperimentConfig::from_file(svqs::ConfigFile{})
                                       : svqs::ExperimentConfig::load(opt.config_path);
        if (opt.out) {
            cfg_.output_path = *opt.out;
        }
        if (opt.seed) {
            if (*opt.seed < 0) {
                throw svqs::ConfigError("--seed must be non-negative");
            }
            cfg_.seed = static_cast<std::uint64_t>(*opt.seed);
            cfg_.optimizer.rng_seed = cfg_.seed;
        }
        if (opt.shots) {
            cfg_.shots = *opt.shots;
        }
        cfg_.validate();
        config_path_ = opt.config_path;
    }

    [[nodiscard]] const svqs::ExperimentConfig& config() const { return cfg_; }

    void emit(const svqs::CsvTable& table, const std::string& path) {
        table.write(path);
        outputs_.push_back({{"path", path}, {"schema", "svqs." + table.schema() + "/" + std::to_string(table.version())},
                            {"rows", table.rows().size()}});
    }

    void note_status(const svqs::RunStatus& s) {
        status_["converged"] = s.converged;
        status_["unconverged_steps"] = s.unconverged_steps;
        status_["stalled"] = s.stalled;
    }

    void note(const std::string& key, nlohmann::json value) { status_[key] = std::move(value); }

    /// Manifest goes next to the main output even when the run fails midway.
    void write_manifest(int exit_code) const {
        nlohmann::json m;
        m["tool"] = "svqs";
        m["version"] = SVQS_VERSION;
        m["subcommand"] = subcommand_;
        m["config_file"] = config_path_;
        m["config"] = cfg_.resolved();
        m["outputs"] = outputs_;
        m["status"] = status_;
        m["exit_code"] = exit_code;
        const std::string path = cfg_.output_path + ".manifest.json";
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        f << m.dump(2) << '\n';
        if (!f) {
            std::cerr << "svqs: cannot write manifest '" << path << "'\n";
        }
    }

  private:
    std::string subcommand_;
    std::string config_path_;
    svqs::ExperimentConfig cfg_;
    nlohmann::json outputs_ = nlohmann::json::array();
    nlohmann::json status_ = nlohmann::json::object();
};

int finish(Run& run, bool converged) {
    const int code = converged ? kExitOk : kExitNonConvergence;
    run.write_manifest(code);
    if (!converged) {
        std::cerr << "svqs: optimization did not converge on every step; outputs written\n";
    }
    return code;
}

int cmd_train(Run& run, bool sweep_only) {
    const auto& cfg = run.config();
    if (sweep_only && cfg.random_sweep_count == 0) {
        throw svqs::ConfigError("sweep needs a positive count", 0, "sweep.random_states");
    }
    const auto ex = svqs::run_train_experiment(cfg, !sweep_only);
    run.emit(svqs::train_table(ex.rows), cfg.output_path);
    run.emit(svqs::training_log_table(ex.training.record), sibling(cfg.output_path, "training_log"));
    run.note_status(ex.status);
    return finish(run, ex.status.converged);
}

int cmd_compare_fewer(Run& run) {
    const auto& cfg = run.config();
    const auto ex = svqs::compare_fewer_states(cfg);
    run.emit(svqs::compare_fewer_table(ex), cfg.output_path);
    for (const auto& [set, r] : ex.runs) {
        run.emit(svqs::training_log_table(r.training.record),
                 sibling(cfg.output_path, "training_log." + std::string(svqs::to_string(set))));
    }
    run.note_status(ex.status);
    return finish(run, ex.status.converged);
}

int cmd_entanglement(Run& run) {
    const auto& cfg = run.config();
    const auto setup = svqs::make_setup(cfg);
    const auto tr = svqs::train_subspace(setup.basis, setup.ansatz, setup.trotter, cfg.n_steps, cfg.optimizer,
                                         cfg.shots, cfg.training_set);
    const auto rows = svqs::run_entanglement_experiment(tr.trajectory, setup.basis, setup.trotter.circuit, cfg.model,
                                                        cfg.dt, svqs::theta_grid(cfg.theta_points));
    run.emit(svqs::entanglement_table(rows), cfg.output_path);
    run.emit(svqs::training_log_table(tr.record), sibling(cfg.output_path, "training_log"));
    const auto status = svqs::status_of(tr.record);
    run.note_status(status);
    return finish(run, status.converged);
}

int cmd_bound_surface(Run& run) {
    const auto& cfg = run.config();
    svqs::FidelityConstraints fc;
    try {
        fc = svqs::surface_constraints(cfg.bounds);
    } catch (const svqs::Error& e) {
        throw svqs::ConfigError(e.what(), 0, "bounds");
    }
    const auto s = svqs::bound_surface(fc, cfg.bounds.theta_points, cfg.bounds.phi_points, cfg.bounds.tol);
    run.emit(svqs::bound_surface_table(s), cfg.output_path);
    run.note("converged", s.converged);
    return finish(run, s.converged);
}

int cmd_warmstart(Run& run) {
    const auto& cfg = run.config();
    const auto ex = svqs::run_warmstart_experiment(cfg);
    run.emit(svqs::warmstart_table(ex.report), cfg.output_path);
    run.note_status(ex.status);
    run.note("thm2_admissible", ex.report.thm2_admissible);
    return finish(run, ex.status.converged);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Subspace variational quantum simulation experiments"};
    app.require_subcommand(1);
    Options opt;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "Configuration file (key = value lines)")->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out, "Main CSV output path (overrides run.output)");
        sub->add_option("--seed", opt.seed, "Random seed (overrides run.seed)");
        sub->add_option("--shots", opt.shots, "Shots per fidelity estimate, 0 = exact (overrides run.shots)");
        return sub;
    };
    struct Command {
        const char* name;
        const char* help;
    };
    const std::vector<Command> commands = {
        {"train", "Train and score training and random subspace states against the Trotter circuit"},
        {"sweep", "Train and score random subspace states only"},
        {"bound-surface", "Worst-case fidelity bound over two-level superpositions"},
        {"warmstart", "Cost variance around a trained center next to its analytic floors"},
        {"entanglement", "Concentratable entanglement of trained, Trotter and exact evolution"},
        {"compare-fewer", "Train with full, basis-only and single-state training sets"},
    };
    for (const auto& c : commands) {
        add_common(app.add_subcommand(c.name, c.help));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    std::optional<Run> run;
    try {
        run.emplace(name, opt);
        if (name == "train") {
            return cmd_train(*run, false);
        }
        if (name == "sweep") {
            return cmd_train(*run, true);
        }
        if (name == "compare-fewer") {
            return cmd_compare_fewer(*run);
        }
        if (name == "entanglement") {
            return cmd_entanglement(*run);
        }
        if (name == "bound-surface") {
            return cmd_bound_surface(*run);
        }
        return cmd_warmstart(*run);
    } catch (const svqs::ConfigError& e) {
        std::cerr << "svqs: " << e.what() << '\n';
        if (run) {
            run->note("error", e.what());
            run->write_manifest(kExitConfig);
        }
        return kExitConfig;
    } catch (const svqs::NumericalError& e) {
        std::cerr << "svqs: numerical failure: " << e.what() << '\n';
        if (run) {
            run->note("error", e.what());
            run->write_manifest(kExitNonConvergence);
        }
        return kExitNonConvergence;
    } catch (const svqs::Error& e) {
        std::cerr << "svqs: invalid input: " << e.what() << '\n';
        if (run) {
            run->note("error", e.what());
            run->write_manifest(kExitConfig);
        }
        return kExitConfig;
    }
}
