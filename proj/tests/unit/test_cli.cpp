// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tcp_client.hpp"

namespace st = sonotrace::testing;
namespace fs = std::filesystem;

namespace {

struct Result {
  int status = -1;
  std::string out;
};

// Runs the CLI through the shell with stderr discarded.
Result run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " '" SONOTRACE_CLI_PATH "' " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int raw = ::pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::vector<std::uint8_t> slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

const char* const kScene = R"({
  "frequencies": {"start": 25000, "stop": 48000, "count": 4},
  "materials": [{"id": "board", "beta_smooth": 0.2, "beta_edge": 0.8, "k_smooth": 0.9, "k_edge": 0.4, "diffraction": 0.05}],
  "meshes": [{"id": "plate", "primitive": {"type": "plate", "width": 2.0, "height": 2.0, "nx": 6, "ny": 6}}],
  "instances": [{"id": "wall", "mesh": "plate", "material": "board", "position": [0, 0, 1.715], "direction": [0, 0, -1]}],
  "emitters": [{"id": "tx", "position": [0, 0, 0], "rays": 300, "max_bounces": 2, "max_distance": 10.0}],
  "receivers": [{"id": "rx", "position": [0.1, 0, 0]}]
})";

std::string scene_file(const fs::path& dir) {
  const auto p = dir / "scene.json";
  std::ofstream(p) << kScene;
  return p.string();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("info reports the cache footprint of a huge plate") {
    const auto r = run("info '" SONOTRACE_EXAMPLES_DIR "/huge_plate.json'");
    CHECK(r.status == 0);
    CHECK(r.out.find("triangles: 67108864") != std::string::npos);
    CHECK(r.out.find("16384 MiB") != std::string::npos);
    CHECK(r.out.find("default") != std::string::npos);
  }

  TEST_CASE("usage and runtime errors have distinct exit codes") {
    CHECK(run("--no-such-flag").status == 2);
    CHECK(run("simulate").status == 2);
    const fs::path dir = st::make_temp_dir("cli_err");
    CHECK(run("info '" + (dir / "missing.json").string() + "'").status == 1);
    CHECK(run("simulate '" + scene_file(dir) + "' --out '" + dir.string() + "' --components bogus").status == 1);
  }

  TEST_CASE("simulate is repeatable and writes sidecars") {
    const fs::path dir = st::make_temp_dir("cli_sim");
    const auto scene = scene_file(dir);
    const auto a = dir / "a";
    const auto b = dir / "b";
    REQUIRE(run("simulate '" + scene + "' --out '" + a.string() + "' --seed 7 --dump-hits").status == 0);
    REQUIRE(run("--workers 3 simulate '" + scene + "' --out '" + b.string() + "' --seed 7").status == 0);
    const auto bytes = slurp(a / "contributions.stpc");
    CHECK(bytes == slurp(b / "contributions.stpc"));
    const auto decoded = st::decode_export(bytes);
    CHECK(decoded.seed == 7);
    CHECK(decoded.components == 7);
    CHECK(decoded.bins == 4);
    CHECK(fs::exists(a / "hits_0.sthb"));
    CHECK(fs::exists(a / "hits_0.sthb.json"));
    std::ifstream side(a / "contributions.stpc.json");
    const auto meta = nlohmann::json::parse(side);
    CHECK(meta["seed"] == 7);
    CHECK(meta["records"] == decoded.records.size());
    CHECK(meta["format"] == "sonotrace-contributions");

    // The worker count from the environment does not change the output.
    const auto c = dir / "c";
    REQUIRE(run("simulate '" + scene + "' --out '" + c.string() + "' --seed 7", "SONOTRACE_WORKERS=2").status == 0);
    CHECK(slurp(c / "contributions.stpc") == bytes);
  }

  TEST_CASE("component selection") {
    const fs::path dir = st::make_temp_dir("cli_components");
    const auto scene = scene_file(dir);
    REQUIRE(run("simulate '" + scene + "' --out '" + (dir / "none").string() + "' --components none").status == 0);
    const auto none = st::decode_export(slurp(dir / "none" / "contributions.stpc"));
    CHECK(none.records.empty());
    CHECK(none.components == 0);
    REQUIRE(run("simulate '" + scene + "' --out '" + (dir / "p").string() + "' --passive").status == 0);
    const auto passive = st::decode_export(slurp(dir / "p" / "contributions.stpc"));
    REQUIRE(passive.records.size() == 1);
    CHECK(passive.records[0].kind == 2);
  }

  TEST_CASE("preprocess and synthesize outputs") {
    const fs::path dir = st::make_temp_dir("cli_synth");
    const auto scene = scene_file(dir);
    REQUIRE(run("preprocess '" + scene + "' --out '" + dir.string() + "'").status == 0);
    CHECK(fs::file_size(dir / "curvature.stc") == 128 + 8 * 72 * 16);
    CHECK(fs::exists(dir / "curvature.stc.json"));

    const auto out = dir / "syn";
    REQUIRE(run("synthesize '" + scene + "' --out '" + out.string() +
                "' --signal chirp:25000:50000:0.0025 --fs 100000 --spectrogram 256 --components specular")
                .status == 0);
    for (const char* name : {"ir_tx_rx.wav", "ir_tx_rx.f64", "ir_tx_rx.wav.json", "rx_rx.wav", "rx_rx.f64.json",
                             "rx_rx_spectrogram.csv"}) {
      CHECK_MESSAGE(fs::exists(out / name), name);
    }
    std::ifstream side(out / "ir_tx_rx.f64.json");
    const auto meta = nlohmann::json::parse(side);
    CHECK(meta["fs"] == 100000.0);
    CHECK(meta["encoding"] == "raw-f64-le");
    CHECK(run("synthesize '" + scene + "' --out '" + out.string() + "' --signal chirp:1:2").status == 1);
  }

  TEST_CASE("serve answers and stops on SIGTERM") {
    const fs::path dir = st::make_temp_dir("cli_serve");
    const auto scene = scene_file(dir);
    int fds[2];
    REQUIRE(::pipe(fds) == 0);
    const pid_t pid = ::fork();
    REQUIRE(pid >= 0);
    if (pid == 0) {
      ::dup2(fds[1], STDOUT_FILENO);
      ::close(fds[0]);
      ::close(fds[1]);
      ::execl(SONOTRACE_CLI_PATH, SONOTRACE_CLI_PATH, "serve", scene.c_str(), "--port", "0", nullptr);
      ::_exit(127);
    }
    ::close(fds[1]);
    std::string line;
    char ch = 0;
    while (::read(fds[0], &ch, 1) == 1 && ch != '\n') line.push_back(ch);
    ::close(fds[0]);
    REQUIRE(line.rfind("listening 127.0.0.1:", 0) == 0);
    const auto port = static_cast<std::uint16_t>(std::stoi(line.substr(line.rfind(':') + 1)));
    {
      st::TcpClient c("127.0.0.1", port);
      CHECK(c.request(2, {}).type == 0x8002);
    }
    ::kill(pid, SIGTERM);
    int status = 0;
    ::waitpid(pid, &status, 0);
    CHECK(WIFEXITED(status));
    CHECK(WEXITSTATUS(status) == 0);
  }
}
