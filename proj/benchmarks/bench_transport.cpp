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
#include <memory>
#include <vector>

#include "rocket/transport/message.hpp"
#include "rocket/transport/ring_queue.hpp"

namespace {

using namespace rocket;
using namespace rocket::transport;

MessageHeader sample_header() {
  MessageHeader h;
  h.job_id = 0x0001'0000'0000'002aULL;
  h.op_code = 1;
  h.payload_offset = 4096;
  h.payload_len = 1'000'000;
  h.result_offset = 8192;
  h.result_capacity = 1'000'000;
  return h;
}

void BM_Encode(benchmark::State& state) {
  const MessageHeader h = sample_header();
  for (auto _ : state) {
    benchmark::DoNotOptimize(encode(h));
  }
}
BENCHMARK(BM_Encode);

void BM_Decode(benchmark::State& state) {
  const Slot s = encode(sample_header());
  for (auto _ : state) {
    benchmark::DoNotOptimize(decode(s));
  }
}
BENCHMARK(BM_Decode);

// Push then pop on one thread: the uncontended cost of a round trip.
void BM_RingPushPop(benchmark::State& state) {
  const auto capacity = static_cast<std::uint32_t>(state.range(0));
  std::vector<std::byte> mem(RingQueue::bytes_required(capacity) + 64);
  auto* aligned = reinterpret_cast<std::byte*>((reinterpret_cast<std::uintptr_t>(mem.data()) + 63) & ~std::uintptr_t{63});
  auto ring = RingQueue::initialize({aligned, RingQueue::bytes_required(capacity)}, capacity);
  const Slot s = encode(sample_header());
  for (auto _ : state) {
    ring.try_push(s);
    benchmark::DoNotOptimize(ring.try_pop());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_RingPushPop)->Arg(64)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
