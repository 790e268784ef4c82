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

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rocket/bench/scenario.hpp"

namespace rocket::bench {

// Mean per measured request, in microseconds. `queue_us` is whatever part of
// the end-to-end latency the server stages do not account for.
struct StageBreakdown {
  double copy_in_us = 0.0;
  double wait_us = 0.0;
  double exec_us = 0.0;
  double copy_out_us = 0.0;
  double queue_us = 0.0;
};

struct RunReport {
  Scenario scenario;
  std::vector<double> latency_us;  // measured iterations only, all clients
  double latency_p50_us = 0.0;
  double latency_p99_us = 0.0;
  double throughput_rps = 0.0;
  StageBreakdown stages;
  std::uint64_t poll_count = 0;      // server and client polls
  std::uint64_t touch_count = 0;     // cache lines touched by injected copies
  std::uint64_t engine_submits = 0;  // offload-routed copies on the server
  std::uint64_t requests = 0;
  double elapsed_s = 0.0;
};

// Nearest-rank percentile, pct in (0, 100]. Empty input yields 0.
double percentile(std::vector<double> values, double pct);

// Starts a private server, drives `clients` client threads through warmup
// and measured iterations, and aggregates their numbers. Throws
// Error(ScenarioInvalid) or Error(ServerLaunchFailed).
RunReport run_scenario(const Scenario& s);

struct MatrixCell {
  Scenario scenario;
  std::optional<RunReport> report;
  std::string error;  // set when the cell failed
};

// Runs every cell of the matrix; a failing cell is recorded and the rest
// still run. `progress` is called after each cell.
std::vector<MatrixCell> run_matrix(const MatrixSpec& spec,
                                   const std::function<void(const MatrixCell&)>& progress = {});

}  // namespace rocket::bench
