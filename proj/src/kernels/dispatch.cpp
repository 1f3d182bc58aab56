/*
 * Copyright 2026 The fedclust Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <atomic>
#include <cassert>
#include <cstdlib>
#include <string>

#include "fedclust/kernels.hpp"

namespace fedclust::simd {

#ifndef FEDCLUST_HAVE_AVX2
const KernelTable* avx2_kernels() { return nullptr; }
#endif

namespace {

bool cpu_has_avx2() {
#if defined(FEDCLUST_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend initial_backend() {
  if (const char* env = std::getenv("FEDCLUST_SIMD")) {
    const std::string v(env);
    if (v == "scalar") return Backend::Scalar;
  }
  return backend_available(Backend::Avx2) ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<const KernelTable*>& table_slot() {
  static std::atomic<const KernelTable*> slot{
      initial_backend() == Backend::Avx2 ? avx2_kernels() : &scalar_kernels()};
  return slot;
}

}  // namespace

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
  }
  return "unknown";
}

bool backend_available(Backend b) {
  if (b == Backend::Scalar) return true;
  static const bool avx2 = avx2_kernels() != nullptr && cpu_has_avx2();
  return avx2;
}

Backend active_backend() {
  return table_slot().load() == &scalar_kernels() ? Backend::Scalar : Backend::Avx2;
}

bool set_backend(Backend b) {
  if (!backend_available(b)) return false;
  table_slot().store(b == Backend::Scalar ? &scalar_kernels() : avx2_kernels());
  return true;
}

const KernelTable& active_kernels() { return *table_slot().load(std::memory_order_relaxed); }

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active_kernels().dot(a.data(), b.data(), a.size());
}

double sq_dist(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active_kernels().sq_dist(a.data(), b.data(), a.size());
}

double sq_norm(std::span<const double> a) { return dot(a, a); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  active_kernels().axpy(alpha, x.data(), y.data(), x.size());
}

void matvec(std::span<const double> a, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y) {
  assert(a.size() >= rows * cols && x.size() == cols && y.size() >= rows);
  active_kernels().matvec(a.data(), rows, cols, x.data(), y.data());
}

void matvec_t_acc(std::span<const double> a, std::size_t rows, std::size_t cols,
                  std::span<const double> r, std::span<double> y) {
  assert(a.size() >= rows * cols && r.size() >= rows && y.size() == cols);
  active_kernels().matvec_t_acc(a.data(), rows, cols, r.data(), y.data());
}

}  // namespace fedclust::simd
