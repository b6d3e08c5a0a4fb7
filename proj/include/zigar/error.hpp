/*
 * Copyright 2026 The zigar Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace zigar
{

enum class ErrorCode
{
    invalid_input = 1,
    degenerate_column,
    rank_deficient,
    convergence_failure,
    schema,
    io,
    config,
    internal,
};

/// Base class for every error raised by the library. The code maps 1:1
/// onto the status values of the C interface.
class Error : public std::runtime_error
{
  public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

class InvalidInput : public Error
{
  public:
    explicit InvalidInput(const std::string& what)
        : Error(ErrorCode::invalid_input, what)
    {
    }
};

class DegenerateColumn : public Error
{
  public:
    DegenerateColumn(const std::string& column, const std::string& why)
        : Error(ErrorCode::degenerate_column,
                "degenerate column '" + column + "': " + why),
          column_(column)
    {
    }

    const std::string& column() const noexcept { return column_; }

  private:
    std::string column_;
};

class RankDeficient : public Error
{
  public:
    explicit RankDeficient(const std::string& what)
        : Error(ErrorCode::rank_deficient, what)
    {
    }
};

class SchemaError : public Error
{
  public:
    explicit SchemaError(const std::string& what)
        : Error(ErrorCode::schema, what)
    {
    }
};

class IoError : public Error
{
  public:
    explicit IoError(const std::string& what) : Error(ErrorCode::io, what) {}
};

class ConfigError : public Error
{
  public:
    explicit ConfigError(const std::string& what)
        : Error(ErrorCode::config, what)
    {
    }
};

/// Coordinate descent ran out of sweeps. Carries the last iterate so callers
/// can inspect how far from optimal it was.
class ConvergenceFailure : public Error
{
  public:
    ConvergenceFailure(const std::string& what, Eigen::VectorXd last_iterate,
                       double kkt_residual)
        : Error(ErrorCode::convergence_failure, what),
          last_iterate_(std::move(last_iterate)),
          kkt_residual_(kkt_residual)
    {
    }

    const Eigen::VectorXd& last_iterate() const noexcept
    {
        return last_iterate_;
    }
    double kkt_residual() const noexcept { return kkt_residual_; }

  private:
    Eigen::VectorXd last_iterate_;
    double kkt_residual_;
};

}  // namespace zigar
