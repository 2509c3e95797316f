// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

// sonotrace command-line front end. Uses only the C API.

#include <sonotrace/sonotrace.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr uint64_t kDefaultSeed = 0;

struct CliError {
  std::string kind;
  std::string message;
};

void check(st_status status) {
  if (status != ST_OK) throw CliError{st_status_name(status), st_last_error()};
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using ScenePtr = std::unique_ptr<st_scene_t, Deleter<st_scene_t, st_scene_free>>;
using SetPtr = std::unique_ptr<st_contributions_t, Deleter<st_contributions_t, st_contributions_free>>;
using SignalPtr = std::unique_ptr<st_signal_t, Deleter<st_signal_t, st_signal_free>>;

json take_json(char* text) {
  json j = json::parse(text);
  st_free(text);
  return j;
}

ScenePtr load(const std::string& path, unsigned workers) {
  st_scene_t* scene = nullptr;
  check(st_scene_load(path.c_str(), workers, &scene));
  return ScenePtr(scene);
}

json summary(const st_scene_t* scene) {
  char* text = nullptr;
  check(st_scene_summary_json(scene, &text));
  return take_json(text);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw CliError{"IoError", "cannot create '" + dir + "': " + ec.message()};
}

// Every binary artifact gets "<file>.json" next to it.
void write_sidecar(const fs::path& artifact, json meta) {
  meta["tool"] = std::string("sonotrace ") + st_version();
  meta["artifact"] = artifact.filename().string();
  std::ofstream out(artifact.string() + ".json", std::ios::trunc);
  out << meta.dump(2) << '\n';
  if (!out) throw CliError{"IoError", "cannot write sidecar for '" + artifact.string() + "'"};
}

uint32_t parse_components(const std::string& list) {
  if (list.empty() || list == "all") return ST_ALL_COMPONENTS;
  if (list == "none") return 0;
  uint32_t flags = 0;
  std::size_t start = 0;
  while (start <= list.size()) {
    const auto end = std::min(list.find(',', start), list.size());
    const auto name = list.substr(start, end - start);
    if (name == "specular") flags |= ST_SPECULAR;
    else if (name == "diffraction") flags |= ST_DIFFRACTION;
    else if (name == "passive") flags |= ST_PASSIVE;
    else throw CliError{"InvalidArgument", "unknown component '" + name + "'"};
    start = end + 1;
  }
  return flags;
}

json component_names(uint32_t flags) {
  json j = json::array();
  if (flags & ST_SPECULAR) j.push_back("specular");
  if (flags & ST_DIFFRACTION) j.push_back("diffraction");
  if (flags & ST_PASSIVE) j.push_back("passive");
  return j;
}

struct ComponentOptions {
  bool specular = false;
  bool diffraction = false;
  bool passive = false;
  std::string list;

  void add_to(CLI::App* cmd) {
    cmd->add_flag("--specular", specular, "Include specular reflections");
    cmd->add_flag("--diffraction", diffraction, "Include curvature-sampled diffraction");
    cmd->add_flag("--passive", passive, "Include direct source-receiver paths");
    cmd->add_option("--components", list, "Comma list of components, 'all' or 'none'");
  }
  // No selection at all means every component.
  uint32_t flags() const {
    uint32_t f = (specular ? ST_SPECULAR : 0) | (diffraction ? ST_DIFFRACTION : 0) | (passive ? ST_PASSIVE : 0);
    if (!list.empty()) return f | parse_components(list);
    return f == 0 ? ST_ALL_COMPONENTS : f;
  }
};

void cmd_info(const std::string& scene_path) {
  char* text = nullptr;
  check(st_scene_describe(scene_path.c_str(), &text));
  const json d = take_json(text);
  const uint64_t bytes = d["footprint_bytes"];
  const double mib = static_cast<double>(bytes) / (1024.0 * 1024.0);
  std::printf("triangles: %llu\n", static_cast<unsigned long long>(d["triangles"].get<uint64_t>()));
  std::printf("instances: %llu\n", static_cast<unsigned long long>(d["instances"].get<uint64_t>()));
  std::printf("emitters: %llu\n", static_cast<unsigned long long>(d["emitters"].get<uint64_t>()));
  std::printf("receivers: %llu\n", static_cast<unsigned long long>(d["receivers"].get<uint64_t>()));
  std::printf("bins: %llu\n", static_cast<unsigned long long>(d["bins"].get<uint64_t>()));
  std::printf("footprint: %.0f MiB (%llu bytes)\n", mib, static_cast<unsigned long long>(bytes));
  std::printf("materials:\n");
  std::printf("  %-16s %8s %10s %8s\n", "id", "eta", "area_ref", "c_sat");
  for (const auto& m : d["materials"]) {
    const std::string area = m.contains("area_ref") && !m["area_ref"].is_null()
                                 ? std::to_string(m["area_ref"].get<double>())
                                 : std::string("median");
    std::printf("  %-16s %8g %10s %8g\n", m["id"].get<std::string>().c_str(), m["eta"].get<double>(), area.c_str(),
                m["c_sat"].get<double>());
  }
}

void cmd_preprocess(const std::string& scene_path, const std::string& out_dir, unsigned workers) {
  ensure_dir(out_dir);
  auto scene = load(scene_path, workers);
  st_scene_counts counts{};
  check(st_scene_counts_get(scene.get(), &counts));
  const fs::path file = fs::path(out_dir) / "curvature.stc";
  check(st_preprocess_write_cache(scene.get(), file.c_str()));
  write_sidecar(file, {{"format", "sonotrace-curvature-cache"},
                       {"version", 1},
                       {"scene", scene_path},
                       {"triangles", counts.triangles},
                       {"bins", counts.bins},
                       {"seed", nullptr}});
  std::printf("%s\n", file.c_str());
}

SetPtr run_simulation(const st_scene_t* scene, uint32_t components, uint64_t seed, unsigned workers) {
  st_contributions_t* set = nullptr;
  check(st_simulate(scene, components, seed, workers, &set));
  return SetPtr(set);
}

void cmd_simulate(const std::string& scene_path, const std::string& out_dir, uint32_t components, uint64_t seed,
                  unsigned workers, bool dump_hits) {
  ensure_dir(out_dir);
  auto scene = load(scene_path, workers);
  st_scene_counts counts{};
  check(st_scene_counts_get(scene.get(), &counts));
  auto set = run_simulation(scene.get(), components, seed, workers);
  const fs::path file = fs::path(out_dir) / "contributions.stpc";
  check(st_contributions_write(set.get(), components, seed, file.c_str()));
  write_sidecar(file, {{"format", "sonotrace-contributions"},
                       {"version", 1},
                       {"scene", scene_path},
                       {"seed", seed},
                       {"components", component_names(components)},
                       {"records", st_contributions_size(set.get())},
                       {"sources", counts.emitters},
                       {"receivers", counts.receivers},
                       {"bins", counts.bins}});
  std::printf("%s\n", file.c_str());
  if (dump_hits) {
    for (uint32_t s = 0; s < counts.emitters; ++s) {
      const fs::path hits = fs::path(out_dir) / ("hits_" + std::to_string(s) + ".sthb");
      check(st_write_hits(scene.get(), s, workers, hits.c_str()));
      write_sidecar(hits, {{"format", "sonotrace-hits"}, {"version", 1}, {"scene", scene_path}, {"emitter", s},
                           {"seed", seed}});
      std::printf("%s\n", hits.c_str());
    }
  }
}

SignalPtr load_signal(const std::string& spec, double fs) {
  st_signal_t* sig = nullptr;
  if (spec.rfind("chirp:", 0) == 0) {
    double f0 = 0, f1 = 0, dur = 0;
    if (std::sscanf(spec.c_str(), "chirp:%lf:%lf:%lf", &f0, &f1, &dur) != 3) {
      throw CliError{"InvalidArgument", "chirp signal must be chirp:F0:F1:DURATION"};
    }
    if (fs <= 0.0) throw CliError{"InvalidArgument", "--fs is required with a chirp signal"};
    check(st_signal_chirp(f0, f1, dur, fs, &sig));
  } else {
    check(st_read_wav(spec.c_str(), &sig));
  }
  return SignalPtr(sig);
}

void write_signal(const st_signal_t* sig, const fs::path& stem, json meta) {
  const fs::path wav = stem.string() + ".wav";
  const fs::path raw = stem.string() + ".f64";
  check(st_signal_write_wav(sig, wav.c_str()));
  check(st_signal_write_raw(sig, raw.c_str()));
  meta["fs"] = st_signal_rate(sig);
  meta["samples"] = st_signal_length(sig);
  meta["encoding"] = "float32-wav";
  write_sidecar(wav, meta);
  meta["encoding"] = "raw-f64-le";
  write_sidecar(raw, meta);
  std::printf("%s\n%s\n", wav.c_str(), raw.c_str());
}

struct SynthOptions {
  std::string out_dir;
  std::string signal;
  double fs = 0.0;
  uint32_t n_fft = 0;
  uint32_t spectrogram_window = 0;
  uint32_t spectrogram_hop = 0;
};

void cmd_synthesize(const std::string& scene_path, const SynthOptions& opt, uint32_t components, uint64_t seed,
                    unsigned workers) {
  ensure_dir(opt.out_dir);
  SignalPtr emitted;
  double fs = opt.fs;
  if (!opt.signal.empty()) {
    emitted = load_signal(opt.signal, fs);
    if (fs <= 0.0) fs = st_signal_rate(emitted.get());
  }
  const double duration = emitted ? st_signal_length(emitted.get()) / st_signal_rate(emitted.get()) : 0.0;

  auto scene = load(scene_path, workers);
  const json info = summary(scene.get());
  auto set = run_simulation(scene.get(), components, seed, workers);
  const auto& emitters = info["emitters"];
  const auto& receivers = info["receivers"];

  std::vector<SignalPtr> responses;
  for (uint32_t s = 0; s < emitters.size(); ++s) {
    for (uint32_t m = 0; m < receivers.size(); ++m) {
      st_signal_t* h = nullptr;
      check(st_synthesize(scene.get(), set.get(), s, m, fs, opt.n_fft, duration, &h));
      responses.emplace_back(h);
      const std::string sid = emitters[s]["id"];
      const std::string mid = receivers[m]["id"];
      write_signal(h, fs::path(opt.out_dir) / ("ir_" + sid + "_" + mid),
                   {{"kind", "impulse_response"}, {"source", sid}, {"receiver", mid}, {"scene", scene_path},
                    {"seed", seed}, {"components", component_names(components)}});
    }
  }
  if (!emitted) return;
  std::vector<const st_signal_t*> views;
  for (const auto& r : responses) views.push_back(r.get());
  for (uint32_t m = 0; m < receivers.size(); ++m) {
    st_signal_t* rendered = nullptr;
    check(st_render(views.data(), views.size(), m, emitted.get(), &rendered));
    SignalPtr owner(rendered);
    const std::string mid = receivers[m]["id"];
    const fs::path stem = fs::path(opt.out_dir) / ("rx_" + mid);
    write_signal(rendered, stem,
                 {{"kind", "received_signal"}, {"receiver", mid}, {"signal", opt.signal}, {"scene", scene_path},
                  {"seed", seed}, {"components", component_names(components)}});
    if (opt.spectrogram_window > 0) {
      const fs::path csv = stem.string() + "_spectrogram.csv";
      const uint32_t hop = opt.spectrogram_hop > 0 ? opt.spectrogram_hop : opt.spectrogram_window / 4;
      check(st_signal_write_spectrogram(rendered, opt.spectrogram_window, std::max<uint32_t>(hop, 1), csv.c_str()));
      std::printf("%s\n", csv.c_str());
    }
  }
}

st_server_t* g_server = nullptr;

extern "C" void on_signal(int) {
  if (g_server) st_server_request_stop(g_server);
}

void cmd_serve(const std::string& scene_path, const std::string& bind, int port, unsigned workers, int idle_ms) {
  auto scene = load(scene_path, workers);
  const uint16_t chosen = port >= 0 ? static_cast<uint16_t>(port) : st_default_port(7343);
  st_server_t* server = nullptr;
  check(st_server_start(scene.get(), bind.c_str(), chosen, workers, idle_ms, &server));
  g_server = server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::printf("listening %s:%u\n", bind.c_str(), static_cast<unsigned>(st_server_port(server)));
  std::fflush(stdout);
  st_server_wait(server);
  g_server = nullptr;
  st_server_free(server);
}

unsigned workers_from(int flag) { return flag > 0 ? static_cast<unsigned>(flag) : 0u; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sonotrace: geometric-acoustics ultrasonic simulation"};
  app.require_subcommand(1);
  int workers = 0;
  app.add_option("--workers", workers, "Worker threads (default: SONOTRACE_WORKERS or all cores)");

  std::string scene_path;
  std::string out_dir = ".";
  uint64_t seed = kDefaultSeed;

  auto* info = app.add_subcommand("info", "Print triangle counts, cache footprint and materials");
  info->add_option("scene", scene_path, "Scene JSON")->required();

  auto* pre = app.add_subcommand("preprocess", "Write the curvature cache");
  pre->add_option("scene", scene_path, "Scene JSON")->required();
  pre->add_option("--out", out_dir, "Output directory");

  ComponentOptions sim_components;
  bool dump_hits = false;
  auto* sim = app.add_subcommand("simulate", "Write the contribution export");
  sim->add_option("scene", scene_path, "Scene JSON")->required();
  sim->add_option("--out", out_dir, "Output directory")->required();
  sim->add_option("--seed", seed, "Diffraction sampling seed");
  sim->add_flag("--dump-hits", dump_hits, "Also write specular hit records per emitter");
  sim_components.add_to(sim);

  ComponentOptions syn_components;
  SynthOptions synth;
  auto* syn = app.add_subcommand("synthesize", "Write impulse responses and received signals");
  syn->add_option("scene", scene_path, "Scene JSON")->required();
  syn->add_option("--out", synth.out_dir, "Output directory")->required();
  syn->add_option("--signal", synth.signal, "Emitted signal: WAV file or chirp:F0:F1:DURATION");
  syn->add_option("--fs", synth.fs, "Sample rate in Hz (default: signal rate or 4x highest bin)");
  syn->add_option("--n-fft", synth.n_fft, "Transform length (default: smallest that fits)");
  syn->add_option("--spectrogram", synth.spectrogram_window, "Write STFT CSV of received signals with this window");
  syn->add_option("--hop", synth.spectrogram_hop, "STFT hop (default: window / 4)");
  syn->add_option("--seed", seed, "Diffraction sampling seed");
  syn_components.add_to(syn);

  std::string bind = "127.0.0.1";
  int port = -1;
  int idle_ms = 0;
  auto* serve = app.add_subcommand("serve", "Run the TCP server");
  serve->add_option("scene", scene_path, "Scene JSON")->required();
  serve->add_option("--port", port, "TCP port (default: SONOTRACE_PORT or 7343)")->check(CLI::Range(0, 65535));
  serve->add_option("--bind", bind, "Bind address");
  serve->add_option("--idle-timeout-ms", idle_ms, "Drop a stalled partial frame after this long");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << e.what() << "\n" << app.help();
    return 2;
  }

  st_set_warning_callback([](const char* msg, void*) { std::fprintf(stderr, "warning: %s\n", msg); }, nullptr);
  try {
    const unsigned w = workers_from(workers);
    if (*info) cmd_info(scene_path);
    else if (*pre) cmd_preprocess(scene_path, out_dir, w);
    else if (*sim) cmd_simulate(scene_path, out_dir, sim_components.flags(), seed, w, dump_hits);
    else if (*syn) cmd_synthesize(scene_path, synth, syn_components.flags(), seed, w);
    else if (*serve) cmd_serve(scene_path, bind, port, w, idle_ms);
  } catch (const CliError& e) {
    std::fprintf(stderr, "error: %s: %s\n", e.kind.c_str(), e.message.c_str());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: InternalError: %s\n", e.what());
    return 1;
  }
  return 0;
}
