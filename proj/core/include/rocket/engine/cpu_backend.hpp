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

#include "rocket/engine/backend.hpp"

namespace rocket::engine {

// Performs the copy inline on the submitting thread; the record is COMPLETE
// before try_submit returns. Never touches for injection.
class CpuBackend final : public CopyBackend {
 public:
  DeviceKind kind() const noexcept override { return DeviceKind::Cpu; }
  std::optional<SubmitTicket> try_submit(const CopyDescriptor& desc) override;

 private:
  std::atomic<std::uint64_t> sequence_{0};
};

}  // namespace rocket::engine
