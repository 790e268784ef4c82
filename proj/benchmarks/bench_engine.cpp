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

#include <benchmark/benchmark.h>

#include <cstdlib>
#include <cstring>

#include "rocket/completion/latency_model.hpp"
#include "rocket/completion/wait.hpp"
#include "rocket/engine/cpu_backend.hpp"
#include "rocket/engine/sim_backend.hpp"

namespace {

using namespace rocket;

struct Buffers {
  explicit Buffers(std::size_t n)
      : src(static_cast<std::byte*>(std::aligned_alloc(64, (n + 63) / 64 * 64))),
        dst(static_cast<std::byte*>(std::aligned_alloc(64, (n + 63) / 64 * 64))),
        size(n) {
    std::memset(src, 1, n);
    std::memset(dst, 0, n);
  }
  ~Buffers() {
    std::free(src);
    std::free(dst);
  }
  engine::CopyDescriptor desc(engine::CompletionRecord& r, bool inject) const {
    return {{src, size}, {dst, size}, inject, &r};
  }
  std::byte* src;
  std::byte* dst;
  std::size_t size;
};

void BM_EstimateLatency(benchmark::State& state) {
  double mb = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(completion::estimate_latency_us(73.6, 33.4, mb));
    mb += 1e-9;
  }
}
BENCHMARK(BM_EstimateLatency);

void BM_CpuCopy(benchmark::State& state) {
  Buffers b(static_cast<std::size_t>(state.range(0)));
  engine::CpuBackend cpu;
  for (auto _ : state) {
    engine::CompletionRecord r;
    cpu.submit(b.desc(r, false));
    benchmark::DoNotOptimize(r.load());
  }
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CpuCopy)->Arg(4 << 10)->Arg(64 << 10)->Arg(1'000'000);

// Submit plus HYBRID wait on the simulated engine; the wall time should sit
// near the modeled latency.
void BM_SimCopyHybrid(benchmark::State& state) {
  Buffers b(static_cast<std::size_t>(state.range(0)));
  engine::SimBackend sim;
  const engine::EngineProfile profile;
  completion::PollPolicy policy;
  std::uint64_t polls = 0;
  for (auto _ : state) {
    engine::CompletionRecord r;
    sim.submit(b.desc(r, state.range(1) != 0));
    polls += completion::wait(r, policy, profile, b.size).polls;
  }
  state.counters["polls"] = benchmark::Counter(static_cast<double>(polls), benchmark::Counter::kAvgIterations);
  state.counters["model_us"] = sim.model_latency_us(b.size);
}
BENCHMARK(BM_SimCopyHybrid)->Args({64 << 10, 0})->Args({1'000'000, 0})->Args({1'000'000, 1})->UseRealTime();

void BM_InjectTouch(benchmark::State& state) {
  Buffers b(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(engine::inject_touch({b.dst, b.size}));
  }
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_InjectTouch)->Arg(1'000'000);

}  // namespace
