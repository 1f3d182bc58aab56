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
#include <stdexcept>
#include <string>

namespace fedclust {

/// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::string what, std::size_t expected, std::size_t got)
      : Error(what + ": expected dimension " + std::to_string(expected) + ", got " +
              std::to_string(got)) {}
};

class EmptyData : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

/// Training produced a non-finite or exploding loss.
class Divergence : public Error {
 public:
  using Error::Error;
};

/// The trim level removes every element of some coordinate.
class OverTrim : public Error {
 public:
  using Error::Error;
};

/// Minimum-size filtering dissolved every cluster.
class NoClusterOfMinSize : public Error {
 public:
  explicit NoClusterOfMinSize(std::size_t t)
      : Error("no cluster of size >= " + std::to_string(t)) {}
};

/// Malformed input file; the message names the file and line.
class FormatError : public Error {
 public:
  FormatError(const std::string& file, std::size_t line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what) {}
  FormatError(const std::string& file, const std::string& what) : Error(file + ": " + what) {}
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// An operation needs the generating distribution of a synthetic federation.
class NotSynthetic : public Error {
 public:
  using Error::Error;
};

}  // namespace fedclust
