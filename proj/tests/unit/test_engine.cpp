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

#include <doctest.h>

#include <unistd.h>

#include <cstring>
#include <filesystem>
#include <memory>
#include <numeric>
#include <random>
#include <vector>

#include "rocket/common/clock.hpp"
#include "rocket/common/error.hpp"
#include "rocket/engine/cpu_backend.hpp"
#include "rocket/engine/descriptor.hpp"
#include "rocket/engine/profile.hpp"
#include "rocket/engine/routing.hpp"
#include "rocket/engine/sim_backend.hpp"

using namespace rocket;
using namespace rocket::engine;

namespace {

struct Buffer {
  explicit Buffer(std::size_t n) : data(static_cast<std::byte*>(std::aligned_alloc(64, n == 0 ? 64 : (n + 63) / 64 * 64))), size(n) {
    std::memset(data, 0, (n + 63) / 64 * 64);
  }
  ~Buffer() { std::free(data); }
  std::span<std::byte> span() const { return {data, size}; }
  std::byte* data;
  std::size_t size;
};

void fill_random(std::span<std::byte> s, unsigned seed) {
  std::mt19937 rng(seed);
  for (auto& b : s) {
    b = static_cast<std::byte>(rng());
  }
}

Errc error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::SystemError;
}

void wait_done(const CompletionRecord& r) {
  const Nanos deadline = now_ns() + 5'000'000'000ULL;
  while (!r.done() && now_ns() < deadline) {
    precise_sleep_for(10'000);
  }
}

}  // namespace

TEST_SUITE("engine") {
  TEST_CASE("descriptor validation") {
    Buffer src(4096), dst(4096);
    CompletionRecord rec;
    CHECK(error_of([&] { validate(CopyDescriptor{src.span(), dst.span(), false, nullptr}); }) ==
          Errc::InvalidDescriptor);
    CHECK(error_of([&] { validate(CopyDescriptor{src.span().first(0), dst.span(), false, &rec}); }) ==
          Errc::InvalidDescriptor);
    CHECK(error_of([&] { validate(CopyDescriptor{src.span(), dst.span().first(100), false, &rec}); }) ==
          Errc::InvalidDescriptor);
    CHECK(error_of([&] { validate(CopyDescriptor{src.span().first(512), src.span().subspan(256), false, &rec}); }) ==
          Errc::OverlappingRanges);
    CHECK(error_of([&] { validate(CopyDescriptor{src.span().first(100), dst.span().subspan(8), false, &rec}); }) ==
          Errc::Misaligned);
    // Source alignment is not constrained.
    CHECK_NOTHROW(validate(CopyDescriptor{src.span().subspan(3, 100), dst.span(), false, &rec}));
    rec.publish(CompletionStatus::Complete, 1, now_ns());
    CHECK(error_of([&] { validate(CopyDescriptor{src.span(), dst.span(), false, &rec}); }) ==
          Errc::InvalidDescriptor);
  }

  TEST_CASE("completion record publishes exactly once") {
    CompletionRecord rec;
    CHECK_FALSE(rec.done());
    CHECK(rec.publish(CompletionStatus::Complete, 10, 5));
    CHECK_FALSE(rec.publish(CompletionStatus::Faulted, 20, 6));
    CHECK(rec.load() == CompletionStatus::Complete);
    CHECK(rec.transitions.load() == 1);
    CHECK(rec.bytes_done.load() == 10);
    rec.reset();
    CHECK(rec.load() == CompletionStatus::Pending);
  }

  TEST_CASE("cpu backend copies synchronously") {
    CpuBackend cpu;
    Buffer src(10000), dst(10000);
    fill_random(src.span(), 1);
    CompletionRecord rec;
    auto ticket = cpu.submit(CopyDescriptor{src.span(), dst.span(), true, &rec});
    CHECK(rec.load() == CompletionStatus::Complete);
    CHECK(std::memcmp(src.data, dst.data, src.size) == 0);
    CHECK(ticket.submit_ns > 0);
    CHECK(cpu.counters().submitted == 1);
    CHECK(cpu.counters().bytes == 10000);
    CHECK(cpu.counters().touched_lines == 0);
    cpu.reset_counters();
    CHECK(cpu.counters().submitted == 0);
  }

  TEST_CASE("sim backend completes near its model and copies the bytes") {
    SimEngineConfig cfg;
    cfg.l_fixed_us = 300.0;
    cfg.alpha_us_per_mb = 100.0;
    SimBackend sim(cfg);
    Buffer src(1'000'000), dst(1'000'000);
    fill_random(src.span(), 2);
    CompletionRecord rec;
    auto ticket = sim.submit(CopyDescriptor{src.span(), dst.span(), false, &rec});
    CHECK(ticket.expected_ns - ticket.submit_ns == us_to_ns(400.0));
    CHECK(sim.model_latency_us(1'000'000) == doctest::Approx(400.0));
    wait_done(rec);
    REQUIRE(rec.load() == CompletionStatus::Complete);
    const double took = ns_to_us(rec.complete_ns.load() - rec.submit_ns.load());
    CHECK(took >= 400.0);
    CHECK(took < 400.0 + 2000.0);
    CHECK(std::memcmp(src.data, dst.data, src.size) == 0);
    CHECK(sim.counters().completed == 1);
    CHECK(sim.in_flight() == 0);
  }

  TEST_CASE("sim backend touches every destination line when injecting") {
    SimBackend sim(SimEngineConfig{1.0, 1.0});
    Buffer src(6400 + 10), dst(6400 + 10);
    CompletionRecord on, off;
    sim.submit(CopyDescriptor{src.span(), dst.span(), true, &on});
    wait_done(on);
    CHECK(sim.counters().touched_lines == 101);  // ceil(6410 / 64)
    sim.submit(CopyDescriptor{src.span(), dst.span(), false, &off});
    wait_done(off);
    CHECK(sim.counters().touched_lines == 101);
  }

  TEST_CASE("sim backend reports a full queue") {
    SimEngineConfig cfg;
    cfg.l_fixed_us = 20'000.0;
    cfg.queue_depth = 2;
    SimBackend sim(cfg);
    Buffer src(4096), dst(3 * 4096);
    CompletionRecord r[3];
    CHECK(sim.try_submit(CopyDescriptor{src.span(), dst.span().subspan(0, 4096), false, &r[0]}));
    CHECK(sim.try_submit(CopyDescriptor{src.span(), dst.span().subspan(4096, 4096), false, &r[1]}));
    CHECK_FALSE(sim.try_submit(CopyDescriptor{src.span(), dst.span().subspan(8192, 4096), false, &r[2]}));
    CHECK(error_of([&] { sim.submit(CopyDescriptor{src.span(), dst.span().subspan(8192, 4096), false, &r[2]}); }) ==
          Errc::QueueFull);
    CHECK(sim.counters().queue_full == 2);
    CHECK(sim.in_flight() == 2);
    wait_done(r[0]);
    wait_done(r[1]);
  }

  TEST_CASE("sim channel serializes transfer time") {
    SimEngineConfig cfg;
    cfg.l_fixed_us = 100.0;
    cfg.alpha_us_per_mb = 1000.0;
    SimBackend sim(cfg);
    Buffer src(100'000), dst(4 * 100'032);
    CompletionRecord r[4];
    SubmitTicket t[4];
    for (int i = 0; i < 4; ++i) {
      t[i] = sim.submit(CopyDescriptor{src.span(), dst.span().subspan(i * 100'032, 100'000), false, &r[i]});
    }
    // Oracle: first = submit + 100 + 100; each later one at least 100 us
    // (0.1 MB at 1000 us/MB) after its predecessor.
    CHECK(t[0].expected_ns == t[0].submit_ns + us_to_ns(200.0));
    for (int i = 1; i < 4; ++i) {
      CHECK(t[i].expected_ns >= t[i - 1].expected_ns + us_to_ns(100.0));
    }
    for (auto& rec : r) {
      wait_done(rec);
      CHECK(rec.load() == CompletionStatus::Complete);
    }
  }

  TEST_CASE("sim jitter stays within its bound") {
    SimEngineConfig cfg;
    cfg.l_fixed_us = 1000.0;
    cfg.alpha_us_per_mb = 0.0;
    cfg.jitter_pct = 20.0;
    SimBackend sim(cfg);
    Buffer src(64), dst(64 * 16);
    CompletionRecord r[16];
    for (int i = 0; i < 16; ++i) {
      auto t = sim.submit(CopyDescriptor{src.span(), dst.span().subspan(i * 64, 64), false, &r[i]});
      const double us = ns_to_us(t.expected_ns - t.submit_ns);
      CHECK(us >= 800.0 - 0.01);
      CHECK(us <= 1200.0 + 0.01);
      wait_done(r[i]);
    }
    CHECK_THROWS_AS(SimBackend(SimEngineConfig{1, 1, 32, 1, 60.0}), Error);
  }

  TEST_CASE("routing") {
    CHECK(route_device(2048, 65536, DeviceHint::Auto) == Route::Cpu);
    CHECK(route_device(1 << 20, 65536, DeviceHint::Auto) == Route::Offload);
    CHECK(route_device(65535, 65536, DeviceHint::Auto) == Route::Cpu);
    CHECK(route_device(65536, 65536, DeviceHint::Auto) == Route::Offload);
    CHECK(route_device(1 << 20, 65536, DeviceHint::Cpu) == Route::Cpu);
    CHECK(route_device(16, 65536, DeviceHint::Offload) == Route::Offload);
    CHECK_THROWS_AS(route_device(16, 0, DeviceHint::Auto), Error);
  }

  TEST_CASE("profile text round trip") {
    EngineProfile p;
    p.l_fixed_us = 51.25;
    p.alpha_us_per_mb = 0.1 + 0.2;
    p.calibrated_at = "2026-01-02T03:04:05Z";
    p.sample_count = 40;
    auto back = EngineProfile::parse(p.format());
    CHECK(back.l_fixed_us == p.l_fixed_us);
    CHECK(back.alpha_us_per_mb == p.alpha_us_per_mb);
    CHECK(back.calibrated_at == p.calibrated_at);
    CHECK(back.sample_count == 40);

    const auto path = std::filesystem::temp_directory_path() / ("rocket_profile_" + std::to_string(::getpid()));
    p.save(path);
    CHECK(EngineProfile::load(path).alpha_us_per_mb == p.alpha_us_per_mb);
    std::filesystem::remove(path);

    CHECK_THROWS_AS(EngineProfile::parse("alpha_us_per_mb=3\n"), Error);
    CHECK_THROWS_AS(EngineProfile::parse("l_fixed_us=-1\nalpha_us_per_mb=3\n"), Error);
    CHECK(EngineProfile::parse("l_fixed_us=1\nalpha_us_per_mb=3\nextra=1\n").l_fixed_us == 1.0);
    CHECK(iso8601_now().size() == 20);
  }

  TEST_CASE("touch counts lines") {
    Buffer b(130);
    CHECK(inject_touch(b.span()) == 3);
    CHECK(inject_touch(b.span().first(0)) == 0);
  }
}
