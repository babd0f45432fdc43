/*
 * Copyright 2026 The distres Authors
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

#include <stdexcept>
#include <string>

namespace distres {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidWeight : public Error {
 public:
  using Error::Error;
};

class InvalidThreshold : public Error {
 public:
  using Error::Error;
};

/// Rank or index outside the valid range of a container.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// The requested global rank exceeds the number of candidates.
class InfeasibleRank : public Error {
 public:
  using Error::Error;
};

/// PEs of a group disagreed on the sequence of collective operations, or a
/// PE left the group while others were still communicating.
class ProtocolViolation : public Error {
 public:
  using Error::Error;
};

class SizeError : public Error {
 public:
  using Error::Error;
};

/// A sampler invariant checked in debug mode did not hold.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace distres
