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

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("svqs_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string write_config(const std::string& text) const {
        const auto p = dir_ / "run.cfg";
        std::ofstream(p) << text;
        return p.string();
    }

    int run(const std::string& args) const {
        const std::string cmd = std::string(SVQS_CLI_PATH) + " " + args + " > " + (dir_ / "stdout").string() +
                                " 2> " + (dir_ / "stderr").string();
        const int raw = std::system(cmd.c_str());
        return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    }

    [[nodiscard]] std::string out(const std::string& name = "out.csv") const { return (dir_ / name).string(); }

    static std::string slurp(const std::string& path) {
        std::ifstream f(path, std::ios::binary);
        std::ostringstream s;
        s << f.rdbuf();
        return s.str();
    }

    fs::path dir_;
};

} // namespace

TEST_F(Cli, TrainWritesCsvAndManifest) {
    const auto cfg = write_config("schedule.n_steps = 2\nsweep.random_states = 1\n");
    ASSERT_EQ(run("train --config " + cfg + " --out " + out() + " --seed 3"), 0);
    const auto csv = slurp(out());
    EXPECT_EQ(csv.rfind("# schema: svqs.train/1\n", 0), 0u);
    EXPECT_EQ(csv.find('\r'), std::string::npos);
    const auto manifest = nlohmann::json::parse(slurp(out() + ".manifest.json"));
    EXPECT_EQ(manifest["subcommand"], "train");
    EXPECT_EQ(manifest["config"]["run.seed"], "3");
    EXPECT_EQ(manifest["exit_code"], 0);
    EXPECT_TRUE(fs::exists(out("out.training_log.csv")));
}

TEST_F(Cli, ConfigErrorsExitWithOne) {
    EXPECT_EQ(run("train --config " + write_config("model.spins = 2\n") + " --out " + out()), 1);
    EXPECT_NE(slurp((dir_ / "stderr").string()).find("line 1"), std::string::npos);
    EXPECT_EQ(run("train --config " + write_config("schedule.dt = 0\n") + " --out " + out()), 1);
    EXPECT_EQ(run("sweep --config " + write_config("sweep.random_states = 0\n") + " --out " + out()), 1);
    EXPECT_EQ(run("train --config /nonexistent.cfg"), 1);
    EXPECT_EQ(run("frobnicate"), 1);
}

TEST_F(Cli, NonConvergenceExitsWithTwoAndKeepsOutput) {
    const auto cfg = write_config("schedule.n_steps = 2\noptimizer.max_iterations = 1\n"
                                  "optimizer.halting_threshold = 1e-12\n");
    ASSERT_EQ(run("train --config " + cfg + " --out " + out()), 2);
    EXPECT_TRUE(fs::exists(out()));
    const auto manifest = nlohmann::json::parse(slurp(out() + ".manifest.json"));
    EXPECT_EQ(manifest["exit_code"], 2);
    EXPECT_EQ(manifest["status"]["converged"], false);
}

TEST_F(Cli, EverySubcommandRuns) {
    const auto cfg = write_config("schedule.n_steps = 2\nsweep.random_states = 2\nbounds.theta_points = 3\n"
                                  "bounds.phi_points = 3\nwarmstart.samples = 200\nentanglement.theta_points = 3\n");
    for (const std::string sub : {"sweep", "bound-surface", "entanglement", "compare-fewer"}) {
        EXPECT_EQ(run(sub + " --config " + cfg + " --out " + out(sub + ".csv")), 0) << sub;
        EXPECT_TRUE(fs::exists(out(sub + ".csv.manifest.json"))) << sub;
    }
    const auto ws = write_config("ansatz.family = zxz-cnot\nwarmstart.samples = 200\n");
    EXPECT_EQ(run("warmstart --config " + ws + " --out " + out("ws.csv")), 0);
}

TEST_F(Cli, RerunIsByteIdentical) {
    const auto cfg = write_config("schedule.n_steps = 3\nsweep.random_states = 5\n");
    ASSERT_EQ(run("train --config " + cfg + " --out " + out("a.csv")), 0);
    ASSERT_EQ(run("train --config " + cfg + " --out " + out("b.csv")), 0);
    EXPECT_EQ(slurp(out("a.csv")), slurp(out("b.csv")));
}
