// Copyright 2026 The ibvs_lander Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef IBVS_ERRORS_HPP_
#define IBVS_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace ibvs {

// Base class for every error raised by the library. Each condition gets its
// own type so callers can react to the specific failure, not a string.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Vector with norm below the safe-normalization floor.
class DegenerateVector : public Error {
 public:
  using Error::Error;
};

// Matrix fails the orthonormality tolerance for a rotation.
class NotARotation : public Error {
 public:
  using Error::Error;
};

// Two projective lines are (numerically) parallel; their meet is undefined.
class ParallelLines : public Error {
 public:
  using Error::Error;
};

// Observer lies in the window plane; the line-based frame is undefined.
class WindowPlaneSingularity : public Error {
 public:
  using Error::Error;
};

// A distance required to be positive collapsed to (or below) its floor.
class DegenerateDistance : public Error {
 public:
  using Error::Error;
};

// A sampled view ray does not intersect the observed plane.
class CapOutsidePlane : public Error {
 public:
  using Error::Error;
};

// Commanded force too small to define a thrust direction.
class ZeroForce : public Error {
 public:
  using Error::Error;
};

// Heading reference parallel to the thrust axis; yaw is undefined.
class YawSingularity : public Error {
 public:
  using Error::Error;
};

// Required features lost beyond the grace window; the mission cannot proceed.
class MissionAbort : public Error {
 public:
  using Error::Error;
};

// A log lacks the segment an analysis routine needs.
class SegmentMissing : public Error {
 public:
  using Error::Error;
};

// A scalar solve found no root in its bracket.
class NoRoot : public Error {
 public:
  using Error::Error;
};

// The trajectory never reached the feature safety region.
class NeverEntered : public Error {
 public:
  using Error::Error;
};

// The trajectory never crossed the window plane.
class NeverCrossed : public Error {
 public:
  using Error::Error;
};

// Malformed input file (JSON syntax, missing key, wrong shape).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Well-formed scenario violating a load-time invariant.
class ScenarioInvalid : public Error {
 public:
  using Error::Error;
};

}  // namespace ibvs

#endif  // IBVS_ERRORS_HPP_
