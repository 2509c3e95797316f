// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#include "sonotrace/sonotrace.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <mutex>
#include <new>
#include <string>

#include "acoustics/pipeline.hpp"
#include "common/binary_io.hpp"
#include "common/error.hpp"
#include "preproc/cache.hpp"
#include "preproc/curvature.hpp"
#include "scene/scene_config.hpp"
#include "server/server.hpp"
#include "synthesis/audio_io.hpp"
#include "synthesis/synthesis.hpp"
#include "tracer/tracer.hpp"

using namespace sonotrace;

struct st_scene {
  acoustics::Model model;
};

struct st_contributions {
  acoustics::ContributionSet set;
};

struct st_signal {
  std::uint32_t source = 0;
  std::uint32_t receiver = 0;
  double fs = 0.0;
  std::vector<double> samples;
};

struct st_server {
  std::unique_ptr<server::Server> impl;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
st_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return ST_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return static_cast<st_status>(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return ST_INTERNAL_ERROR;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ST_INTERNAL_ERROR;
  }
}

void require(bool ok, const char* what) {
  if (!ok) fail(ErrorCode::InvalidArgument, what);
}

char* copy_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

st_signal_t* make_signal(std::uint32_t source, std::uint32_t receiver, double fs, std::vector<double> samples) {
  return new st_signal{source, receiver, fs, std::move(samples)};
}

}  // namespace

extern "C" {

const char* st_version(void) { return "0.1.0"; }

const char* st_status_name(st_status status) {
  if (status == ST_OK) return "OK";
  if (status == ST_INTERNAL_ERROR) return "InternalError";
  return error_code_name(static_cast<ErrorCode>(status));
}

const char* st_last_error(void) { return g_last_error.c_str(); }

void st_set_warning_callback(st_warning_fn fn, void* user) {
  if (!fn) {
    set_warning_handler({});
    return;
  }
  set_warning_handler([fn, user](std::string_view msg) { fn(std::string(msg).c_str(), user); });
}

void st_free(void* p) { std::free(p); }

st_status st_footprint_bytes(uint64_t triangles, uint64_t bins, uint64_t* out) {
  return guarded([&] {
    require(out, "out is null");
    *out = preproc::estimate_footprint(triangles, bins);
  });
}

st_status st_scene_describe(const char* path, char** json_out) {
  return guarded([&] {
    require(path && json_out, "null argument");
    const auto counts = scene::describe_scene(path);
    nlohmann::json j;
    j["triangles"] = counts.triangles;
    j["instances"] = counts.instances;
    j["emitters"] = counts.emitters;
    j["receivers"] = counts.receivers;
    j["bins"] = counts.bins;
    j["footprint_bytes"] = preproc::estimate_footprint(counts.triangles, counts.bins);
    j["materials"] = counts.materials;
    *json_out = copy_string(j.dump());
  });
}

st_status st_scene_load(const char* path, unsigned workers, st_scene_t** out) {
  return guarded([&] {
    require(path && out, "null argument");
    auto handle = std::make_unique<st_scene>();
    handle->model = acoustics::Model::prepare(scene::load_scene(path), workers);
    *out = handle.release();
  });
}

void st_scene_free(st_scene_t* scene) { delete scene; }

st_status st_scene_counts_get(const st_scene_t* handle, st_scene_counts* out) {
  return guarded([&] {
    require(handle && out, "null argument");
    const auto& s = *handle->model.scene;
    *out = {s.triangle_count(), s.instances().size(), s.emitters().size(), s.receivers().size(), s.bin_count(),
            s.revision()};
  });
}

st_status st_scene_summary_json(const st_scene_t* handle, char** json_out) {
  return guarded([&] {
    require(handle && json_out, "null argument");
    *json_out = copy_string(scene::scene_summary(*handle->model.scene).dump());
  });
}

st_status st_scene_set_pose(st_scene_t* handle, const char* entity, const double position[3],
                            const double quaternion[4]) {
  return guarded([&] {
    require(handle && entity && position && quaternion, "null argument");
    Pose pose;
    pose.position = {position[0], position[1], position[2]};
    pose.orientation = {quaternion[0], quaternion[1], quaternion[2], quaternion[3]};
    handle->model = handle->model.with_pose(entity, pose);
  });
}

st_status st_preprocess_write_cache(const st_scene_t* handle, const char* path) {
  return guarded([&] {
    require(handle && path, "null argument");
    preproc::write_curvature_cache(path, *handle->model.curvature, *handle->model.scene);
  });
}

st_status st_write_hits(const st_scene_t* handle, uint32_t emitter, unsigned workers, const char* path) {
  return guarded([&] {
    require(handle && path, "null argument");
    tracer::write_hit_buffer(path, tracer::trace_specular(*handle->model.scene, emitter, workers));
  });
}

st_status st_simulate(const st_scene_t* handle, uint32_t components, uint64_t seed, unsigned workers,
                      st_contributions_t** out) {
  return guarded([&] {
    require(handle && out, "null argument");
    require((components & ~ST_ALL_COMPONENTS) == 0, "unknown component flag");
    auto result = std::make_unique<st_contributions>();
    result->set = acoustics::simulate(handle->model, {components, seed, workers});
    *out = result.release();
  });
}

void st_contributions_free(st_contributions_t* set) { delete set; }

uint64_t st_contributions_size(const st_contributions_t* set) { return set ? set->set.size() : 0; }

st_status st_contributions_export(const st_contributions_t* set, uint32_t components, uint64_t seed,
                                  uint8_t** bytes, size_t* size) {
  return guarded([&] {
    require(set && bytes && size, "null argument");
    const auto encoded = acoustics::encode_contributions(set->set, {components, seed});
    auto* buf = static_cast<uint8_t*>(std::malloc(std::max<std::size_t>(encoded.size(), 1)));
    if (!buf) throw std::bad_alloc();
    std::memcpy(buf, encoded.data(), encoded.size());
    *bytes = buf;
    *size = encoded.size();
  });
}

st_status st_contributions_write(const st_contributions_t* set, uint32_t components, uint64_t seed,
                                 const char* path) {
  return guarded([&] {
    require(set && path, "null argument");
    write_file_bytes(path, acoustics::encode_contributions(set->set, {components, seed}));
  });
}

st_status st_synthesize(const st_scene_t* handle, const st_contributions_t* set, uint32_t source,
                        uint32_t receiver, double fs, uint32_t n_fft, double signal_duration, st_signal_t** out) {
  return guarded([&] {
    require(handle && set && out, "null argument");
    const auto& scene = *handle->model.scene;
    if (source >= set->set.sources || receiver >= set->set.receivers) {
      fail(ErrorCode::UnknownEntity, "no pair (" + std::to_string(source) + ", " + std::to_string(receiver) + ")");
    }
    synthesis::SpectralGrid grid;
    if (n_fft == 0) {
      const double min_path = source < scene.emitters().size() ? 2.0 * scene.emitters()[source].max_distance : 0.0;
      grid = synthesis::grid_for_contributions(set->set, min_path, signal_duration, fs);
    } else {
      grid.fs = fs > 0.0 ? fs : synthesis::default_sample_rate(set->set.frequencies);
      grid.n_fft = n_fft;
    }
    const synthesis::SpectrumBuilder builder(grid, set->set.frequencies, set->set.speed_of_sound);
    auto h = synthesis::impulse_response(set->set, source, receiver, builder);
    *out = make_signal(source, receiver, h.fs, std::move(h.samples));
  });
}

st_status st_render(const st_signal_t* const* responses, size_t count, uint32_t receiver,
                    const st_signal_t* emitted, st_signal_t** out) {
  return guarded([&] {
    require((responses || count == 0) && emitted && out, "null argument");
    std::vector<synthesis::ImpulseResponse> hs;
    for (size_t i = 0; i < count; ++i) {
      require(responses[i], "null response");
      hs.push_back({responses[i]->source, responses[i]->receiver, responses[i]->fs, responses[i]->samples});
    }
    auto r = synthesis::render_receiver(hs, receiver, {emitted->fs, emitted->samples});
    *out = make_signal(0, receiver, r.fs, std::move(r.samples));
  });
}

st_status st_signal_create(double fs, const double* samples, size_t count, st_signal_t** out) {
  return guarded([&] {
    require(out && (samples || count == 0), "null argument");
    require(fs > 0.0, "sample rate must be positive");
    *out = make_signal(0, 0, fs, std::vector<double>(samples, samples + count));
  });
}

st_status st_signal_chirp(double f0, double f1, double duration, double fs, st_signal_t** out) {
  return guarded([&] {
    require(out, "null argument");
    auto s = synthesis::linear_chirp(f0, f1, duration, fs);
    *out = make_signal(0, 0, s.fs, std::move(s.samples));
  });
}

st_status st_read_wav(const char* path, st_signal_t** out) {
  return guarded([&] {
    require(path && out, "null argument");
    auto s = synthesis::read_wav(path);
    *out = make_signal(0, 0, s.fs, std::move(s.samples));
  });
}

void st_signal_free(st_signal_t* signal) { delete signal; }
double st_signal_rate(const st_signal_t* signal) { return signal ? signal->fs : 0.0; }
size_t st_signal_length(const st_signal_t* signal) { return signal ? signal->samples.size() : 0; }
const double* st_signal_data(const st_signal_t* signal) { return signal ? signal->samples.data() : nullptr; }

double st_signal_rms_spread(const st_signal_t* signal) {
  return signal ? synthesis::rms_delay_spread(signal->samples, signal->fs) : 0.0;
}

st_status st_signal_write_wav(const st_signal_t* signal, const char* path) {
  return guarded([&] {
    require(signal && path, "null argument");
    synthesis::write_wav(path, signal->samples, signal->fs);
  });
}

st_status st_signal_write_raw(const st_signal_t* signal, const char* path) {
  return guarded([&] {
    require(signal && path, "null argument");
    synthesis::write_raw_f64(path, signal->samples);
  });
}

st_status st_signal_write_spectrogram(const st_signal_t* signal, uint32_t window, uint32_t hop, const char* path) {
  return guarded([&] {
    require(signal && path, "null argument");
    synthesis::write_spectrogram_csv(path, synthesis::spectrogram(signal->samples, signal->fs, window, hop));
  });
}

st_status st_server_start(const st_scene_t* handle, const char* bind_address, uint16_t port, unsigned workers,
                          int idle_timeout_ms, st_server_t** out) {
  return guarded([&] {
    require(handle && out, "null argument");
    server::ServerOptions options;
    if (bind_address) options.bind_address = bind_address;
    options.port = port;
    options.workers = workers;
    if (idle_timeout_ms > 0) options.idle_timeout_ms = idle_timeout_ms;
    auto result = std::make_unique<st_server>();
    result->impl = std::make_unique<server::Server>(handle->model, options);
    result->impl->start();
    *out = result.release();
  });
}

uint16_t st_server_port(const st_server_t* server) { return server ? server->impl->port() : 0; }

void st_server_request_stop(st_server_t* server) {
  if (server) server->impl->request_stop();
}

void st_server_wait(st_server_t* server) {
  if (server) server->impl->wait();
}

void st_server_free(st_server_t* server) { delete server; }

uint16_t st_default_port(uint16_t fallback) { return server::port_from_environment(fallback); }

}  // extern "C"
