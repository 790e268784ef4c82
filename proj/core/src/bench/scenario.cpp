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

#include "rocket/bench/scenario.hpp"

#include <charconv>

#include "rocket/common/error.hpp"

namespace rocket::bench {

namespace {

constexpr std::uint64_t kMaxPayload = 256ULL << 20;
constexpr std::uint32_t kMaxClients = 64;

Error invalid(const std::string& what) {
  return Error(Errc::ScenarioInvalid, what);
}

std::uint32_t to_u32(std::string_view key, std::string_view text) {
  text = trim(text);
  std::uint32_t v = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || end != text.data() + text.size()) {
    throw invalid(std::string(key) + ": '" + std::string(text) + "' is not an unsigned integer");
  }
  return v;
}

template <typename T, typename Parse>
std::vector<T> parse_axis(const KeyValueFile& kv, std::string_view key, T fallback, Parse parse) {
  std::vector<T> out;
  for (const auto& item : kv.get_list(key)) {
    const auto text = trim(item);
    if (text.empty()) {
      continue;
    }
    auto v = parse(text);
    if (!v) {
      throw invalid(std::string(key) + ": unrecognized value '" + std::string(text) + "'");
    }
    out.push_back(*v);
  }
  if (out.empty()) {
    out.push_back(fallback);
  }
  return out;
}

std::optional<engine::DeviceKind> device_or_null(std::string_view text) {
  if (text == "cpu") return engine::DeviceKind::Cpu;
  if (text == "sim") return engine::DeviceKind::Sim;
  return std::nullopt;
}

std::uint32_t get_u32(const KeyValueFile& kv, std::string_view key, std::uint32_t fallback) {
  auto raw = kv.get(key);
  return raw ? to_u32(key, *raw) : fallback;
}

}  // namespace

std::string_view to_string(Workload w) noexcept {
  switch (w) {
    case Workload::Echo: return "echo";
    case Workload::Checksum: return "checksum";
    case Workload::Synthetic: return "synthetic";
  }
  return "?";
}

std::optional<Workload> parse_workload(std::string_view text) noexcept {
  if (text == "echo") return Workload::Echo;
  if (text == "checksum") return Workload::Checksum;
  if (text == "synthetic") return Workload::Synthetic;
  return std::nullopt;
}

void Scenario::validate() const {
  if (iterations <= warmup) {
    throw invalid("iterations must exceed warmup");
  }
  if (payload_bytes > kMaxPayload) {
    throw invalid("payload_bytes above 256 MiB");
  }
  if (batch == 0) {
    throw invalid("batch must be at least 1");
  }
  if (clients == 0 || clients > kMaxClients) {
    throw invalid("clients must be in [1, 64]");
  }
  if (async_window == 0) {
    throw invalid("async_window must be at least 1");
  }
  if (worker_threads == 0) {
    throw invalid("worker_threads must be at least 1");
  }
  if (offload_threshold == 0) {
    throw invalid("offload_threshold must be positive");
  }
  if (!(jitter_pct >= 0.0 && jitter_pct <= 50.0)) {
    throw invalid("jitter_pct must be in [0, 50]");
  }
  if (!(profile.l_fixed_us > 0.0 && profile.alpha_us_per_mb > 0.0)) {
    throw invalid("profile coefficients must be positive");
  }
}

MatrixSpec parse_matrix(const KeyValueFile& kv, const std::filesystem::path& base_dir) {
  MatrixSpec spec;
  Scenario& s = spec.base;
  try {
    if (auto w = kv.get("workload")) {
      auto parsed = parse_workload(trim(*w));
      if (!parsed) {
        throw invalid("workload: unrecognized value '" + *w + "'");
      }
      s.workload = *parsed;
    }
    if (auto p = kv.get("payload_bytes")) {
      s.payload_bytes = parse_size(*p);
    }
    if (auto t = kv.get("offload_threshold")) {
      s.offload_threshold = parse_size(*t);
    }
    s.stages.pre_us = get_u32(kv, "pre_us", 0);
    s.stages.proc_us_per_mb = get_u32(kv, "proc_us_per_mb", 0);
    s.stages.post_us = get_u32(kv, "post_us", 0);
    s.iterations = get_u32(kv, "iterations", s.iterations);
    s.warmup = get_u32(kv, "warmup", s.warmup);
    s.worker_threads = get_u32(kv, "worker_threads", s.worker_threads);
    s.async_window = get_u32(kv, "async_window", s.async_window);
    if (auto j = kv.get_double("jitter_pct")) {
      s.jitter_pct = *j;
    }
    if (auto h = kv.get("device_hint")) {
      auto parsed = parse_device_hint(trim(*h));
      if (!parsed) {
        throw invalid("device_hint: unrecognized value '" + *h + "'");
      }
      s.device_hint = *parsed;
    }
    if (auto p = kv.get("profile")) {
      std::filesystem::path path(std::string(trim(*p)));
      if (path.is_relative() && !base_dir.empty()) {
        path = base_dir / path;
      }
      s.profile = engine::EngineProfile::load(path);
    }
  } catch (const Error& e) {
    if (e.code() == Errc::ScenarioInvalid) {
      throw;
    }
    throw invalid(e.what());
  }

  auto& a = spec.axes;
  a.modes = parse_axis(kv, "modes", s.mode, [](std::string_view t) { return parse_mode(t); });
  a.devices = parse_axis(kv, "devices", s.device, device_or_null);
  a.injections = parse_axis(kv, "injections", s.injection, [](std::string_view t) { return parse_injection_hint(t); });
  a.clients = parse_axis(kv, "clients", s.clients,
                         [](std::string_view t) { return std::optional<std::uint32_t>(to_u32("clients", t)); });
  a.batches = parse_axis(kv, "batches", s.batch,
                         [](std::string_view t) { return std::optional<std::uint32_t>(to_u32("batches", t)); });
  s.mode = a.modes.front();
  s.device = a.devices.front();
  s.injection = a.injections.front();
  s.clients = a.clients.front();
  s.batch = a.batches.front();
  for (const auto& cell : expand(spec)) {
    cell.validate();
  }
  return spec;
}

MatrixSpec load_matrix(const std::filesystem::path& path) {
  KeyValueFile kv;
  try {
    kv = KeyValueFile::load(path);
  } catch (const Error& e) {
    if (e.code() == Errc::IoError) {
      throw;
    }
    throw invalid(e.what());
  }
  return parse_matrix(kv, path.parent_path());
}

std::vector<Scenario> expand(const MatrixSpec& spec) {
  std::vector<Scenario> out;
  out.reserve(spec.axes.cells());
  for (auto mode : spec.axes.modes) {
    for (auto device : spec.axes.devices) {
      for (auto injection : spec.axes.injections) {
        for (auto n : spec.axes.clients) {
          for (auto batch : spec.axes.batches) {
            Scenario s = spec.base;
            s.mode = mode;
            s.device = device;
            s.injection = injection;
            s.clients = n;
            s.batch = batch;
            out.push_back(s);
          }
        }
      }
    }
  }
  return out;
}

}  // namespace rocket::bench
