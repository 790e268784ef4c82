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

#include "rocket/transport/shared_region.hpp"

#include <fcntl.h>
#include <sys/mman.h>
#include <sys/resource.h>
#include <sys/stat.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstring>
#include <utility>

#include "rocket/common/error.hpp"

namespace rocket::transport {

namespace {

std::atomic<std::uint64_t> g_map_calls{0};

std::string os_name(std::string_view name) {
  std::string out;
  out.reserve(name.size() + 1);
  out.push_back('/');
  out.append(name);
  return out;
}

void* map_fd(int fd, std::size_t length) {
  g_map_calls.fetch_add(1, std::memory_order_relaxed);
  void* addr = ::mmap(nullptr, length, PROT_READ | PROT_WRITE, MAP_SHARED | MAP_POPULATE, fd, 0);
  return addr == MAP_FAILED ? nullptr : addr;
}

}  // namespace

std::size_t page_size() noexcept {
  static const std::size_t size = static_cast<std::size_t>(::sysconf(_SC_PAGESIZE));
  return size;
}

std::size_t round_up_to_page(std::size_t length) noexcept {
  const std::size_t page = page_size();
  return (length + page - 1) / page * page;
}

std::uint64_t SharedRegion::map_calls() noexcept {
  return g_map_calls.load(std::memory_order_relaxed);
}

std::uint64_t thread_minor_faults() noexcept {
  rusage usage{};
  ::getrusage(RUSAGE_THREAD, &usage);
  return static_cast<std::uint64_t>(usage.ru_minflt);
}

SharedRegion SharedRegion::create(std::string name, std::size_t length, bool pin) {
  if (length == 0) {
    throw Error(Errc::InvalidArgument, "region length must be positive");
  }
  length = round_up_to_page(length);
  const std::string path = os_name(name);
  const int fd = ::shm_open(path.c_str(), O_CREAT | O_EXCL | O_RDWR, 0600);
  if (fd < 0) {
    if (errno == EEXIST) {
      throw Error(Errc::NameCollision, "shared region '" + name + "' already exists");
    }
    throw_errno("shm_open(" + name + ")");
  }
  if (::ftruncate(fd, static_cast<off_t>(length)) != 0) {
    const int err = errno;
    ::close(fd);
    ::shm_unlink(path.c_str());
    throw Error(Errc::OutOfMemory, "ftruncate(" + name + "): " + std::strerror(err));
  }
  void* addr = map_fd(fd, length);
  ::close(fd);
  if (addr == nullptr) {
    const int err = errno;
    ::shm_unlink(path.c_str());
    throw Error(Errc::OutOfMemory, "mmap(" + name + "): " + std::strerror(err));
  }

  SharedRegion region;
  region.name_ = std::move(name);
  region.base_ = static_cast<std::byte*>(addr);
  region.length_ = length;
  region.owner_ = true;

  // Write-touch every page. The object is fresh from ftruncate so this is
  // also the zero fill.
  const std::size_t page = page_size();
  auto* volatile_base = reinterpret_cast<volatile unsigned char*>(region.base_);
  for (std::size_t off = 0; off < length; off += page) {
    volatile_base[off] = 0;
    ++region.touched_pages_;
  }
  region.prefaulted_ = true;

  if (pin) {
    if (::mlock(region.base_, length) == 0) {
      region.pinned_ = true;
    } else {
      region.warning_ = std::string("PinDenied: mlock failed (") + std::strerror(errno) +
                        "); continuing with prefaulted pages only";
    }
  }
  return region;
}

SharedRegion SharedRegion::open(std::string name) {
  const std::string path = os_name(name);
  const int fd = ::shm_open(path.c_str(), O_RDWR, 0600);
  if (fd < 0) {
    if (errno == ENOENT) {
      throw Error(Errc::ServerUnavailable, "shared region '" + name + "' does not exist");
    }
    throw_errno("shm_open(" + name + ")");
  }
  struct stat st {};
  if (::fstat(fd, &st) != 0) {
    const int err = errno;
    ::close(fd);
    throw Error(Errc::SystemError, "fstat(" + name + "): " + std::strerror(err));
  }
  const auto length = static_cast<std::size_t>(st.st_size);
  if (length == 0) {
    ::close(fd);
    throw Error(Errc::ServerUnavailable, "shared region '" + name + "' is not initialized");
  }
  void* addr = map_fd(fd, length);
  ::close(fd);
  if (addr == nullptr) {
    throw Error(Errc::OutOfMemory, "mmap(" + name + "): " + std::strerror(errno));
  }

  SharedRegion region;
  region.name_ = std::move(name);
  region.base_ = static_cast<std::byte*>(addr);
  region.length_ = length;
  region.owner_ = false;

  // MAP_POPULATE already built the page tables; the read loop guarantees it
  // on kernels that treat the flag as advisory. Shared-memory pages mapped
  // by a read fault are writable, so no write pass is needed here.
  const std::size_t page = page_size();
  const auto* volatile_base = reinterpret_cast<const volatile unsigned char*>(region.base_);
  unsigned char sink = 0;
  for (std::size_t off = 0; off < length; off += page) {
    sink ^= volatile_base[off];
    ++region.touched_pages_;
  }
  (void)sink;
  region.prefaulted_ = true;
  return region;
}

bool SharedRegion::exists(std::string_view name) noexcept {
  const std::string path = os_name(name);
  const int fd = ::shm_open(path.c_str(), O_RDONLY, 0);
  if (fd < 0) {
    return false;
  }
  ::close(fd);
  return true;
}

bool SharedRegion::remove(std::string_view name) noexcept {
  const std::string path = os_name(name);
  return ::shm_unlink(path.c_str()) == 0;
}

SharedRegion::SharedRegion(SharedRegion&& other) noexcept
    : name_(std::move(other.name_)),
      base_(std::exchange(other.base_, nullptr)),
      length_(std::exchange(other.length_, 0)),
      pinned_(std::exchange(other.pinned_, false)),
      prefaulted_(std::exchange(other.prefaulted_, false)),
      owner_(std::exchange(other.owner_, false)),
      touched_pages_(std::exchange(other.touched_pages_, 0)),
      warning_(std::move(other.warning_)) {}

SharedRegion& SharedRegion::operator=(SharedRegion&& other) noexcept {
  if (this != &other) {
    reset();
    name_ = std::move(other.name_);
    base_ = std::exchange(other.base_, nullptr);
    length_ = std::exchange(other.length_, 0);
    pinned_ = std::exchange(other.pinned_, false);
    prefaulted_ = std::exchange(other.prefaulted_, false);
    owner_ = std::exchange(other.owner_, false);
    touched_pages_ = std::exchange(other.touched_pages_, 0);
    warning_ = std::move(other.warning_);
  }
  return *this;
}

SharedRegion::~SharedRegion() { reset(); }

void SharedRegion::reset() noexcept {
  if (base_ != nullptr) {
    if (pinned_) {
      ::munlock(base_, length_);
    }
    ::munmap(base_, length_);
    base_ = nullptr;
  }
  if (owner_ && !name_.empty()) {
    remove(name_);
  }
  owner_ = false;
  length_ = 0;
  pinned_ = false;
  prefaulted_ = false;
}

}  // namespace rocket::transport
