/*
 * Copyright 2026 The rocket-ipc Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Standalone server: serves until SIGINT or SIGTERM.

#include <csignal>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "rocket/common/error.hpp"
#include "rocket/common/kv_file.hpp"
#include "rocket/runtime/server.hpp"

int main(int argc, char** argv) {
  using namespace rocket;
  runtime::ServerConfig config;
  std::string device = "sim";
  std::string profile_path;
  std::string threshold = "65536";
  std::string payload = "32M";
  double jitter = 0.0;

  CLI::App app{"rocket-ipc server"};
  app.add_option("--name", config.name, "Server name (shared memory namespace)")->required();
  app.add_option("--device", device, "Copy engine: cpu or sim")->check(CLI::IsMember({"cpu", "sim"}));
  app.add_option("--profile", profile_path, "Calibrated profile (key=value file)");
  app.add_option("--threads", config.worker_threads, "Worker threads");
  app.add_option("--batch-max", config.batch_max, "Pipeline batch size");
  app.add_option("--batch-timeout-us", config.batch_timeout_us, "Flush a partial batch after this long");
  app.add_option("--offload-threshold", threshold, "AUTO routing threshold in bytes (K/M suffixes ok)");
  app.add_option("--max-clients", config.max_clients, "Client slots");
  app.add_option("--payload-bytes", payload, "Shared payload space per client");
  app.add_option("--jitter-pct", jitter, "Simulated engine jitter, percent");
  app.add_flag("--pin", config.pin, "mlock shared segments");
  CLI11_PARSE(app, argc, argv);

  // Block the signals before any thread starts so they all inherit the mask.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  try {
    config.device = engine::parse_device_kind(device);
    if (!profile_path.empty()) {
      config.profile = engine::EngineProfile::load(profile_path);
    }
    config.offload_threshold = parse_size(threshold);
    config.payload_bytes_per_client = parse_size(payload);
    auto sim = config.sim_config();
    sim.jitter_pct = jitter;
    config.sim = sim;

    runtime::Server server(config);
    server.start();
    std::printf("rocket-server '%s' ready: device=%s threads=%u l_fixed=%.3fus alpha=%.3fus/MB threshold=%llu\n",
                config.name.c_str(), device.c_str(), config.worker_threads, config.profile.l_fixed_us,
                config.profile.alpha_us_per_mb, static_cast<unsigned long long>(config.offload_threshold));
    std::fflush(stdout);

    int sig = 0;
    sigwait(&signals, &sig);
    const auto s = server.stats();
    server.stop();
    std::printf("stopped: requests=%llu done=%llu failed=%llu batches=%llu\n",
                static_cast<unsigned long long>(s.requests), static_cast<unsigned long long>(s.jobs_done),
                static_cast<unsigned long long>(s.jobs_failed), static_cast<unsigned long long>(s.batches));
  } catch (const Error& e) {
    std::fprintf(stderr, "rocket-server: %s (%s)\n", e.what(), std::string(to_string(e.code())).c_str());
    return 1;
  }
  return 0;
}
