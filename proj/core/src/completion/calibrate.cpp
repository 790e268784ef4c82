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

#include "rocket/completion/calibrate.hpp"

#include <sched.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <set>
#include <string>

#include "rocket/common/error.hpp"
#include "rocket/completion/latency_model.hpp"
#include "rocket/completion/wait.hpp"

namespace rocket::completion {

LinearFit fit_latency_model(std::span<const CalibrationSample> samples) {
  std::set<double> distinct;
  for (const auto& s : samples) {
    distinct.insert(s.size_mb);
  }
  if (distinct.size() < 2) {
    throw Error(Errc::InsufficientSamples, "fit needs samples at two or more distinct sizes");
  }
  const double n = static_cast<double>(samples.size());
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (const auto& s : samples) {
    mean_x += s.size_mb;
    mean_y += s.latency_us;
  }
  mean_x /= n;
  mean_y /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& s : samples) {
    sxx += (s.size_mb - mean_x) * (s.size_mb - mean_x);
    sxy += (s.size_mb - mean_x) * (s.latency_us - mean_y);
  }
  LinearFit fit;
  fit.alpha_us_per_mb = sxy / sxx;
  fit.l_fixed_us = mean_y - fit.alpha_us_per_mb * mean_x;
  double sse = 0.0;
  for (const auto& s : samples) {
    const double r = s.latency_us - estimate_latency_us(fit.l_fixed_us, fit.alpha_us_per_mb, s.size_mb);
    sse += r * r;
  }
  fit.relative_residual = mean_y != 0.0 ? std::sqrt(sse / n) / std::abs(mean_y) : 0.0;
  return fit;
}

namespace {

struct FreeDeleter {
  void operator()(std::byte* p) const noexcept { std::free(p); }
};
using Buffer = std::unique_ptr<std::byte, FreeDeleter>;

Buffer make_buffer(std::size_t bytes, int fill) {
  const std::size_t rounded = (bytes + 4095) / 4096 * 4096;
  auto* p = static_cast<std::byte*>(std::aligned_alloc(4096, rounded));
  if (p == nullptr) {
    throw Error(Errc::OutOfMemory, "calibration buffer of " + std::to_string(bytes) + " bytes");
  }
  std::memset(p, fill, rounded);
  return Buffer(p);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double timed_copy(engine::CopyBackend& backend, std::span<const std::byte> src, std::span<std::byte> dst) {
  engine::CompletionRecord record;
  engine::CopyDescriptor desc{src, dst, false, &record};
  while (!backend.try_submit(desc)) {
    ::sched_yield();
  }
  PollPolicy policy;
  policy.kind = PollKind::Passive;
  const WaitStats stats = wait(record, policy, engine::EngineProfile::defaults(), src.size());
  if (stats.outcome != engine::CompletionStatus::Complete) {
    throw Error(Errc::SystemError, "calibration copy did not complete");
  }
  return ns_to_us(record.complete_ns.load(std::memory_order_relaxed) -
                  record.submit_ns.load(std::memory_order_relaxed));
}

}  // namespace

CalibrationResult calibrate(engine::CopyBackend& backend, std::span<const std::size_t> sizes, std::uint32_t reps) {
  const std::set<std::size_t> distinct(sizes.begin(), sizes.end());
  if (distinct.size() < 4 || distinct.count(0) != 0) {
    throw Error(Errc::InsufficientSamples, "calibration needs at least 4 distinct positive sizes");
  }
  if (reps < 3) {
    throw Error(Errc::InsufficientSamples, "calibration needs at least 3 repetitions per size");
  }
  const std::size_t largest = *distinct.rbegin();
  Buffer src = make_buffer(largest, 0x5a);
  Buffer dst = make_buffer(largest, 0);

  const std::vector<std::size_t> ordered(distinct.begin(), distinct.end());
  std::vector<std::vector<double>> per_size(ordered.size());
  CalibrationResult out;

  for (std::size_t bytes : ordered) {
    timed_copy(backend, {src.get(), bytes}, {dst.get(), bytes});  // warm-up, discarded
  }
  // Sizes are interleaved within each repetition so slow drift spreads
  // evenly across the fit.
  for (std::uint32_t r = 0; r < reps; ++r) {
    for (std::size_t i = 0; i < ordered.size(); ++i) {
      const std::size_t bytes = ordered[i];
      const double us = timed_copy(backend, {src.get(), bytes}, {dst.get(), bytes});
      per_size[i].push_back(us);
      out.raw.push_back({static_cast<double>(bytes) / kBytesPerMb, us});
    }
  }
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    out.medians.push_back({static_cast<double>(ordered[i]) / kBytesPerMb, median(per_size[i])});
  }
  const LinearFit fit = fit_latency_model(out.medians);
  if (!(fit.l_fixed_us > 0.0) || !(fit.alpha_us_per_mb > 0.0)) {
    throw Error(Errc::NegativeFit, "fit gave l_fixed_us=" + std::to_string(fit.l_fixed_us) +
                                       " alpha_us_per_mb=" + std::to_string(fit.alpha_us_per_mb) +
                                       "; widen the size range");
  }
  out.profile.l_fixed_us = fit.l_fixed_us;
  out.profile.alpha_us_per_mb = fit.alpha_us_per_mb;
  out.profile.calibrated_at = engine::iso8601_now();
  out.profile.sample_count = static_cast<std::uint64_t>(ordered.size()) * reps;
  out.relative_residual = fit.relative_residual;
  return out;
}

}  // namespace rocket::completion
