// Copyright 2026 The ivdid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef IVDID_ERROR_HPP
#define IVDID_ERROR_HPP

#include <stdexcept>
#include <string>

namespace ivdid {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Endpoints out of order or not finite.
class InvalidInterval : public Error {
public:
    using Error::Error;
};

// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
public:
    using Error::Error;
};

// A simulation design whose attaining population does not exist.
class InfeasibleSpec : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

// An interval transport has a (numerically) zero-width source interval.
class TransportUndefined : public Error {
public:
    using Error::Error;
};

// Two routes that must agree by construction disagree.
class InternalConsistencyError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// Raised by the panel loader; kind() tells the failure modes apart.
class LoadError : public Error {
public:
    enum class Kind { missing_role, unknown_column, bad_numeric, empty_treated, empty_control, io };

    LoadError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

} // namespace ivdid

#endif // IVDID_ERROR_HPP
