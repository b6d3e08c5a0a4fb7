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

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace zigar::io
{

/// A parsed CSV file: a header row plus string cells. Quoted fields with
/// embedded commas or doubled quotes are supported; embedded newlines are not.
struct CsvTable
{
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a header column, or throws SchemaError naming it.
    std::size_t column(std::string_view name) const;
};

CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(std::string_view text);

std::vector<std::string> split_csv_line(std::string_view line);

/// Shortest round-trip representation; NaN prints as "NA".
std::string format_double(double value);
std::string format_optional(const std::optional<double>& value);

/// Parses a finite or "NA" cell; `context` is used in the error message.
double parse_double(std::string_view cell, std::string_view context);

std::string quote_csv(std::string_view field);
std::string join_csv(const std::vector<std::string>& fields);

void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

/// Writes a matrix with a row-id column and the given column header.
void write_matrix_csv(const std::filesystem::path& path,
                      const Eigen::MatrixXd& values,
                      const std::vector<std::string>& row_ids,
                      const std::vector<std::string>& column_ids);

std::vector<std::string> split(std::string_view text, char sep);
std::string trim(std::string_view text);

}  // namespace zigar::io
