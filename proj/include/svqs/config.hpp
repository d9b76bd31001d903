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
/**
 * @file
 * Experiment configuration: a flat `section.key = value` text format.
 *
 * Grammar, one entry per line:
 *
 *     # comment (also allowed after a value)
 *     model.n_qubits = 2
 *     subspace.states = 00; 11
 *     subspace.states = amps(0.6, 0.8i, 0, 0); 01
 *
 * Keys are case-sensitive and must be known; blank lines are ignored;
 * repeating a key is an error. Amplitude entries accept `a`, `bi` or `a+bi`.
 */
#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "svqs/ansatz.hpp"
#include "svqs/hamiltonian.hpp"
#include "svqs/quantum_core.hpp"
#include "svqs/training.hpp"

namespace svqs {

/// Malformed or inconsistent configuration; carries the offending line and key.
class ConfigError : public Error {
  public:
    ConfigError(const std::string& message, int line = 0, std::string key = {})
        : Error(format(message, line, key)), line_(line), key_(std::move(key)) {}

    [[nodiscard]] int line() const noexcept { return line_; }
    [[nodiscard]] const std::string& key() const noexcept { return key_; }

  private:
    static std::string format(const std::string& message, int line, const std::string& key) {
        std::string out = "config";
        if (line > 0) {
            out += " line " + std::to_string(line);
        }
        if (!key.empty()) {
            out += " [" + key + "]";
        }
        return out + ": " + message;
    }

    int line_;
    std::string key_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return out;
}

inline std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (s.empty()) {
        return std::nullopt;
    }
    std::string buf(s);
    char* end = nullptr;
    const double v = std::strtod(buf.c_str(), &end);
    if (end != buf.c_str() + buf.size() || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

inline std::optional<std::int64_t> parse_int(std::string_view s) {
    s = trim(s);
    std::int64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        return std::nullopt;
    }
    return v;
}

/// `a`, `bi`, `a+bi`, `a-bi` (also `i`, `-i`).
inline std::optional<cplx> parse_complex(std::string_view s) {
    s = trim(s);
    if (s.empty()) {
        return std::nullopt;
    }
    if (s.back() != 'i') {
        auto re = parse_double(s);
        return re ? std::optional<cplx>(cplx(*re, 0.0)) : std::nullopt;
    }
    const std::string_view body = s.substr(0, s.size() - 1);
    std::size_t split_at = std::string_view::npos;
    for (std::size_t k = body.size(); k-- > 1;) {
        if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            split_at = k;
            break;
        }
    }
    auto imag_of = [](std::string_view t) -> std::optional<double> {
        if (t.empty() || t == "+") {
            return 1.0;
        }
        if (t == "-") {
            return -1.0;
        }
        return parse_double(t);
    };
    if (split_at == std::string_view::npos) {
        auto im = imag_of(body);
        return im ? std::optional<cplx>(cplx(0.0, *im)) : std::nullopt;
    }
    auto re = parse_double(body.substr(0, split_at));
    auto im = imag_of(body.substr(split_at));
    if (!re || !im) {
        return std::nullopt;
    }
    return cplx(*re, *im);
}

} // namespace detail

/// Raw key/value entries with their source line numbers.
class ConfigFile {
  public:
    struct Entry {
        std::string value;
        int line = 0;
    };

    static ConfigFile parse(std::string_view text) {
        ConfigFile cfg;
        int line_no = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            const auto nl = text.find('\n', pos);
            std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
            ++line_no;
            pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
            if (const auto hash = line.find('#'); hash != std::string_view::npos) {
                line = line.substr(0, hash);
            }
            line = detail::trim(line);
            if (line.empty()) {
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) {
                throw ConfigError("expected 'key = value'", line_no);
            }
            const std::string key(detail::trim(line.substr(0, eq)));
            const std::string value(detail::trim(line.substr(eq + 1)));
            if (key.empty()) {
                throw ConfigError("empty key", line_no);
            }
            if (value.empty()) {
                throw ConfigError("empty value", line_no, key);
            }
            if (cfg.entries_.count(key) != 0) {
                throw ConfigError("duplicate key (first set on line " + std::to_string(cfg.entries_[key].line) + ")",
                                  line_no, key);
            }
            cfg.entries_[key] = {value, line_no};
        }
        return cfg;
    }

    static ConfigFile load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            throw ConfigError("cannot open config file '" + path + "'");
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse(ss.str());
    }

    [[nodiscard]] const std::map<std::string, Entry>& entries() const noexcept { return entries_; }
    [[nodiscard]] const Entry* find(const std::string& key) const {
        const auto it = entries_.find(key);
        return it == entries_.end() ? nullptr : &it->second;
    }

  private:
    std::map<std::string, Entry> entries_;
};

struct ExperimentConfig {
    IsingParams model;
    double dt = 0.1;
    int n_steps = 30;
    int trotter_order = 2;
    AnsatzFamily ansatz_family = AnsatzFamily::Su4Block;
    int ansatz_layers = 1;
    OptimizerConfig optimizer = OptimizerConfig::defaults_for(OptimizerKind::SequentialMinimal);
    /// Basis-state specifiers as written; empty means |0...0>, |1...1>.
    std::vector<std::string> subspace;
    TrainingSet training_set = TrainingSet::Full;
    int random_sweep_count = 0;
    std::int64_t shots = 0;
    std::uint64_t seed = 0;
    std::string output_path = "svqs_out.csv";

    int theta_points = 9;

    struct Bounds {
        double F0 = 0.99;
        double F1 = 0.99;
        double F1_plus = 0.99;
        std::optional<double> F1_minus;
        int theta_points = 21;
        int phi_points = 21;
        double tol = 1e-8;
    } bounds;

    struct WarmStart {
        double r0 = 0.5;
        double dt = 0.0;
        double r = 0.0;
        int samples = 10000;
        int center_steps = 1;
    } warmstart;

    void validate() const {
        try {
            model.validate();
            optimizer.validate();
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw ConfigError(e.what());
        }
        if (!(dt > 0.0)) {
            throw ConfigError("dt must be positive", 0, "schedule.dt");
        }
        if (n_steps < 0) {
            throw ConfigError("n_steps must be non-negative", 0, "schedule.n_steps");
        }
        if (trotter_order != 1 && trotter_order != 2) {
            throw ConfigError("only orders 1 and 2 are supported", 0, "trotter.order");
        }
        if (ansatz_layers < 1) {
            throw ConfigError("layers must be at least 1", 0, "ansatz.layers");
        }
        if (random_sweep_count < 0) {
            throw ConfigError("must be non-negative", 0, "sweep.random_states");
        }
        if (shots < 0) {
            throw ConfigError("must be non-negative", 0, "run.shots");
        }
        if (theta_points < 1) {
            throw ConfigError("must be at least 1", 0, "entanglement.theta_points");
        }
        if (bounds.theta_points < 2 || bounds.phi_points < 2) {
            throw ConfigError("grid needs at least 2 points per axis", 0, "bounds.theta_points");
        }
        if (!(warmstart.r0 > 0.0 && warmstart.r0 < 1.0)) {
            throw ConfigError("must lie in (0, 1)", 0, "warmstart.r0");
        }
        if (warmstart.samples < 2) {
            throw ConfigError("must be at least 2", 0, "warmstart.samples");
        }
    }

    /// Parsed orthonormal basis; parse and orthonormality problems become ConfigError.
    [[nodiscard]] SubspaceBasis basis() const;

    /// Every key with its resolved value, in key order.
    [[nodiscard]] std::map<std::string, std::string> resolved() const;

    static ExperimentConfig from_file(const ConfigFile& file);
    static ExperimentConfig load(const std::string& path) { return from_file(ConfigFile::load(path)); }
};

namespace detail {

inline std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline StateVector parse_state_spec(std::string_view spec, int n_qubits) {
    spec = trim(spec);
    if (spec.rfind("amps(", 0) == 0) {
        if (spec.back() != ')') {
            throw ConfigError("amplitude list must end with ')'");
        }
        const auto parts = split(spec.substr(5, spec.size() - 6), ',');
        const std::size_t dim = detail::dim_of(n_qubits);
        if (parts.size() != dim) {
            throw ConfigError("amplitude list has " + std::to_string(parts.size()) + " entries, expected " +
                              std::to_string(dim));
        }
        CVector amps(static_cast<Eigen::Index>(dim));
        for (std::size_t k = 0; k < dim; ++k) {
            const auto v = parse_complex(parts[k]);
            if (!v) {
                throw ConfigError("bad amplitude '" + std::string(parts[k]) + "'");
            }
            amps[static_cast<Eigen::Index>(k)] = *v;
        }
        if (amps.norm() == 0.0) {
            throw ConfigError("amplitude list is zero");
        }
        return StateVector::normalized(std::move(amps));
    }
    if (static_cast<int>(spec.size()) != n_qubits || spec.find_first_not_of("01") != std::string_view::npos) {
        throw ConfigError("basis state '" + std::string(spec) + "' is not a " + std::to_string(n_qubits) +
                          "-bit string");
    }
    return StateVector::from_bitstring(spec);
}

} // namespace detail

inline SubspaceBasis ExperimentConfig::basis() const {
    std::vector<std::string> specs = subspace;
    if (specs.empty()) {
        specs = {std::string(static_cast<std::size_t>(model.n_qubits), '0'),
                 std::string(static_cast<std::size_t>(model.n_qubits), '1')};
    }
    std::vector<StateVector> states;
    for (const auto& s : specs) {
        try {
            states.push_back(detail::parse_state_spec(s, model.n_qubits));
        } catch (const ConfigError& e) {
            throw ConfigError(e.what(), 0, "subspace.states");
        }
    }
    try {
        return SubspaceBasis(std::move(states));
    } catch (const Error& e) {
        throw ConfigError(e.what(), 0, "subspace.states");
    }
}

inline std::map<std::string, std::string> ExperimentConfig::resolved() const {
    using detail::format_number;
    std::map<std::string, std::string> m;
    m["model.n_qubits"] = std::to_string(model.n_qubits);
    m["model.J"] = format_number(model.J);
    m["model.g"] = format_number(model.g);
    m["model.h"] = format_number(model.h);
    m["schedule.dt"] = format_number(dt);
    m["schedule.n_steps"] = std::to_string(n_steps);
    m["trotter.order"] = std::to_string(trotter_order);
    m["ansatz.family"] = std::string(to_string(ansatz_family));
    m["ansatz.layers"] = std::to_string(ansatz_layers);
    m["optimizer.kind"] = std::string(to_string(optimizer.kind));
    m["optimizer.halting_threshold"] = format_number(optimizer.halting_threshold);
    m["optimizer.learning_rate"] = format_number(optimizer.learning_rate);
    m["optimizer.max_iterations"] = std::to_string(optimizer.max_iterations);
    std::string states;
    const std::vector<std::string> specs =
        subspace.empty() ? std::vector<std::string>{std::string(static_cast<std::size_t>(model.n_qubits), '0'),
                                                    std::string(static_cast<std::size_t>(model.n_qubits), '1')}
                         : subspace;
    for (std::size_t k = 0; k < specs.size(); ++k) {
        states += (k ? "; " : "") + specs[k];
    }
    m["subspace.states"] = states;
    m["training_set"] = std::string(to_string(training_set));
    m["sweep.random_states"] = std::to_string(random_sweep_count);
    m["run.shots"] = std::to_string(shots);
    m["run.seed"] = std::to_string(seed);
    m["run.output"] = output_path;
    m["entanglement.theta_points"] = std::to_string(theta_points);
    m["bounds.F0"] = format_number(bounds.F0);
    m["bounds.F1"] = format_number(bounds.F1);
    m["bounds.F1_plus"] = format_number(bounds.F1_plus);
    m["bounds.F1_minus"] = bounds.F1_minus ? format_number(*bounds.F1_minus) : "none";
    m["bounds.theta_points"] = std::to_string(bounds.theta_points);
    m["bounds.phi_points"] = std::to_string(bounds.phi_points);
    m["bounds.tol"] = format_number(bounds.tol);
    m["warmstart.r0"] = format_number(warmstart.r0);
    m["warmstart.dt"] = warmstart.dt > 0.0 ? format_number(warmstart.dt) : "auto";
    m["warmstart.r"] = warmstart.r > 0.0 ? format_number(warmstart.r) : "auto";
    m["warmstart.samples"] = std::to_string(warmstart.samples);
    m["warmstart.center_steps"] = std::to_string(warmstart.center_steps);
    return m;
}

inline ExperimentConfig ExperimentConfig::from_file(const ConfigFile& file) {
    ExperimentConfig c;
    bool max_iter_set = false;
    for (const auto& [key, entry] : file.entries()) {
        const std::string& v = entry.value;
        auto fail = [&](const std::string& why) { throw ConfigError(why + " (got '" + v + "')", entry.line, key); };
        auto real = [&] {
            const auto x = detail::parse_double(v);
            if (!x) {
                fail("expected a number");
            }
            return *x;
        };
        auto integer = [&] {
            const auto x = detail::parse_int(v);
            if (!x) {
                fail("expected an integer");
            }
            return *x;
        };
        auto small_int = [&] {
            const auto x = integer();
            if (x < -1000000000 || x > 1000000000) {
                fail("integer out of range");
            }
            return static_cast<int>(x);
        };
        try {
            if (key == "model.n_qubits") {
                c.model.n_qubits = small_int();
            } else if (key == "model.J") {
                c.model.J = real();
            } else if (key == "model.g") {
                c.model.g = real();
            } else if (key == "model.h") {
                c.model.h = real();
            } else if (key == "schedule.dt") {
                c.dt = real();
            } else if (key == "schedule.n_steps") {
                c.n_steps = small_int();
            } else if (key == "trotter.order") {
                c.trotter_order = small_int();
            } else if (key == "ansatz.family") {
                c.ansatz_family = parse_ansatz_family(v);
            } else if (key == "ansatz.layers") {
                c.ansatz_layers = small_int();
            } else if (key == "optimizer.kind") {
                c.optimizer.kind = parse_optimizer_kind(v);
            } else if (key == "optimizer.halting_threshold") {
                c.optimizer.halting_threshold = real();
            } else if (key == "optimizer.learning_rate") {
                c.optimizer.learning_rate = real();
            } else if (key == "optimizer.max_iterations") {
                c.optimizer.max_iterations = small_int();
                max_iter_set = true;
            } else if (key == "subspace.states") {
                c.subspace.clear();
                for (auto s : detail::split(v, ';')) {
                    if (s.empty()) {
                        fail("empty state specifier");
                    }
                    c.subspace.emplace_back(s);
                }
            } else if (key == "training_set") {
                c.training_set = parse_training_set(v);
            } else if (key == "sweep.random_states") {
                c.random_sweep_count = small_int();
            } else if (key == "run.shots") {
                c.shots = integer();
            } else if (key == "run.seed") {
                const auto s = integer();
                if (s < 0) {
                    fail("seed must be non-negative");
                }
                c.seed = static_cast<std::uint64_t>(s);
            } else if (key == "run.output") {
                c.output_path = v;
            } else if (key == "entanglement.theta_points") {
                c.theta_points = small_int();
            } else if (key == "bounds.F0") {
                c.bounds.F0 = real();
            } else if (key == "bounds.F1") {
                c.bounds.F1 = real();
            } else if (key == "bounds.F1_plus") {
                c.bounds.F1_plus = real();
            } else if (key == "bounds.F1_minus") {
                c.bounds.F1_minus = real();
            } else if (key == "bounds.theta_points") {
                c.bounds.theta_points = small_int();
            } else if (key == "bounds.phi_points") {
                c.bounds.phi_points = small_int();
            } else if (key == "bounds.tol") {
                c.bounds.tol = real();
            } else if (key == "warmstart.r0") {
                c.warmstart.r0 = real();
            } else if (key == "warmstart.dt") {
                c.warmstart.dt = real();
            } else if (key == "warmstart.r") {
                c.warmstart.r = real();
            } else if (key == "warmstart.samples") {
                c.warmstart.samples = small_int();
            } else if (key == "warmstart.center_steps") {
                c.warmstart.center_steps = small_int();
            } else {
                throw ConfigError("unknown key", entry.line, key);
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw ConfigError(e.what(), entry.line, key);
        }
    }
    if (!max_iter_set) {
        c.optimizer.max_iterations = OptimizerConfig::defaults_for(c.optimizer.kind).max_iterations;
    }
    c.optimizer.rng_seed = c.seed;
    c.validate();
    static_cast<void>(c.basis());
    return c;
}

} // namespace svqs
