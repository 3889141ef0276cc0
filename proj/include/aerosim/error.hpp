// Copyright 2026 The Aerosim Authors
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

#ifndef AEROSIM_ERROR_HPP_
#define AEROSIM_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace aerosim {

// Base of every error the library throws on bad input or failed numerics.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input that fails a documented precondition. `field` is a JSON-pointer-like
// path ("/agents/3/schedule/0/start") when the error comes from a document,
// otherwise the name of the offending argument.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& message)
      : Error(field.empty() ? message : field + ": " + message),
        field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class MeshingError : public Error {
 public:
  using Error::Error;
};

class AssemblyError : public Error {
 public:
  using Error::Error;
};

// A query point that falls outside every triangle of the mesh.
class PointLocationError : public Error {
 public:
  using Error::Error;
};

class NoPathError : public Error {
 public:
  using Error::Error;
};

// Travel between two consecutive events does not fit in the available time.
class InfeasibleScheduleError : public Error {
 public:
  InfeasibleScheduleError(std::string agent, std::size_t from_event,
                          std::size_t to_event, const std::string& message)
      : Error(message),
        agent_(std::move(agent)),
        from_event_(from_event),
        to_event_(to_event) {}

  const std::string& agent() const noexcept { return agent_; }
  std::size_t from_event() const noexcept { return from_event_; }
  std::size_t to_event() const noexcept { return to_event_; }

 private:
  std::string agent_;
  std::size_t from_event_;
  std::size_t to_event_;
};

// Caller broke an API contract (e.g. asked a susceptible agent for emissions).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

}  // namespace aerosim

#endif  // AEROSIM_ERROR_HPP_
