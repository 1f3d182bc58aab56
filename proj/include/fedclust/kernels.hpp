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

#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Dense double-precision kernels used by every inner loop of the library.
//
// Each kernel has a portable scalar reference implementation and, on x86-64,
// an AVX2+FMA variant. The variant is picked once at startup from CPUID and
// can be overridden with set_backend() or the FEDCLUST_SIMD environment
// variable ("scalar" or "avx2"). Reductions in the vector variants use a
// different summation order, so results agree with the scalar reference to
// rounding, not bit-for-bit.
namespace fedclust::simd {

enum class Backend { Scalar, Avx2 };

std::string_view backend_name(Backend b);

/// True when the backend was compiled in and the CPU supports it.
bool backend_available(Backend b);

Backend active_backend();

/// Switches the process-wide backend. Not thread-safe with respect to
/// kernels running concurrently. Returns false if the backend is unavailable.
bool set_backend(Backend b);

/// Raw kernel table. Lengths are element counts; matrices are row-major.
struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sq_dist)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y[i] = <A_i, x> for each of `rows` rows of length `cols`
  void (*matvec)(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
  // y += A^T r
  void (*matvec_t_acc)(const double* a, std::size_t rows, std::size_t cols, const double* r, double* y);
};

const KernelTable& scalar_kernels();
const KernelTable* avx2_kernels();  // nullptr when not compiled in
const KernelTable& active_kernels();

// Span wrappers over the active table. Size mismatches are the caller's
// responsibility; the wrappers assert in debug builds.
double dot(std::span<const double> a, std::span<const double> b);
double sq_dist(std::span<const double> a, std::span<const double> b);
double sq_norm(std::span<const double> a);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void matvec(std::span<const double> a, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y);
void matvec_t_acc(std::span<const double> a, std::size_t rows, std::size_t cols,
                  std::span<const double> r, std::span<double> y);

}  // namespace fedclust::simd
