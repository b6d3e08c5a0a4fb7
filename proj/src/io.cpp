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

#include "zigar/io.hpp"

#include "zigar/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace zigar::io
{

std::size_t CsvTable::column(std::string_view name) const
{
    for (std::size_t i = 0; i < header.size(); ++i)
    {
        if (header[i] == name)
        {
            return i;
        }
    }
    throw SchemaError("missing column '" + std::string(name) + "'");
}

std::vector<std::string> split_csv_line(std::string_view line)
{
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i)
    {
        const char c = line[i];
        if (quoted)
        {
            if (c == '"')
            {
                if (i + 1 < line.size() && line[i + 1] == '"')
                {
                    current.push_back('"');
                    ++i;
                }
                else
                {
                    quoted = false;
                }
            }
            else
            {
                current.push_back(c);
            }
        }
        else if (c == '"')
        {
            quoted = true;
        }
        else if (c == ',')
        {
            fields.push_back(std::move(current));
            current.clear();
        }
        else
        {
            current.push_back(c);
        }
    }
    fields.push_back(std::move(current));
    return fields;
}

CsvTable parse_csv(std::string_view text)
{
    CsvTable table;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size())
    {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos)
        {
            end = text.size();
        }
        auto line = text.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r')
        {
            line.remove_suffix(1);
        }
        pos = end + 1;
        ++line_no;
        if (trim(line).empty())
        {
            if (end == text.size())
            {
                break;
            }
            continue;
        }
        auto fields = split_csv_line(line);
        for (auto& f : fields)
        {
            f = trim(f);
        }
        if (table.header.empty())
        {
            table.header = std::move(fields);
            continue;
        }
        if (fields.size() != table.header.size())
        {
            throw SchemaError("line " + std::to_string(line_no) + " has " +
                              std::to_string(fields.size()) +
                              " fields, header has " +
                              std::to_string(table.header.size()));
        }
        table.rows.push_back(std::move(fields));
        if (end == text.size())
        {
            break;
        }
    }
    if (table.header.empty())
    {
        throw SchemaError("CSV input has no header row");
    }
    return table;
}

CsvTable read_csv(const std::filesystem::path& path)
{
    return parse_csv(read_text(path));
}

std::string format_double(double value)
{
    if (std::isnan(value))
    {
        return "NA";
    }
    if (std::isinf(value))
    {
        return value > 0 ? "Inf" : "-Inf";
    }
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

std::string format_optional(const std::optional<double>& value)
{
    return value ? format_double(*value) : std::string("NA");
}

double parse_double(std::string_view cell, std::string_view context)
{
    const auto text = trim(cell);
    if (text == "NA" || text == "NaN" || text == "nan")
    {
        return std::numeric_limits<double>::quiet_NaN();
    }
    if (text == "Inf" || text == "inf")
    {
        return std::numeric_limits<double>::infinity();
    }
    if (text == "-Inf" || text == "-inf")
    {
        return -std::numeric_limits<double>::infinity();
    }
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (!text.empty() && *first == '+')
    {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (text.empty() || ec != std::errc() || ptr != last)
    {
        throw SchemaError("cannot parse '" + text + "' as a number (" +
                          std::string(context) + ")");
    }
    return value;
}

std::string quote_csv(std::string_view field)
{
    if (field.find_first_of(",\"\n") == std::string_view::npos)
    {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field)
    {
        if (c == '"')
        {
            out += "\"\"";
        }
        else
        {
            out.push_back(c);
        }
    }
    out.push_back('"');
    return out;
}

std::string join_csv(const std::vector<std::string>& fields)
{
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i)
    {
        if (i > 0)
        {
            out.push_back(',');
        }
        out += quote_csv(fields[i]);
    }
    return out;
}

void write_text(const std::filesystem::path& path, std::string_view text)
{
    if (path.has_parent_path())
    {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
    {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out)
    {
        throw IoError("write to '" + path.string() + "' failed");
    }
}

std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw IoError("cannot open '" + path.string() + "' for reading");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_matrix_csv(const std::filesystem::path& path,
                      const Eigen::MatrixXd& values,
                      const std::vector<std::string>& row_ids,
                      const std::vector<std::string>& column_ids)
{
    std::string text;
    std::vector<std::string> header{"id"};
    header.insert(header.end(), column_ids.begin(), column_ids.end());
    text += join_csv(header);
    text.push_back('\n');
    for (Eigen::Index i = 0; i < values.rows(); ++i)
    {
        text += quote_csv(row_ids.at(static_cast<std::size_t>(i)));
        for (Eigen::Index j = 0; j < values.cols(); ++j)
        {
            text.push_back(',');
            text += format_double(values(i, j));
        }
        text.push_back('\n');
    }
    write_text(path, text);
}

std::vector<std::string> split(std::string_view text, char sep)
{
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (true)
    {
        const auto end = text.find(sep, pos);
        auto part = trim(text.substr(pos, end == std::string_view::npos
                                              ? std::string_view::npos
                                              : end - pos));
        if (!part.empty())
        {
            parts.push_back(std::move(part));
        }
        if (end == std::string_view::npos)
        {
            break;
        }
        pos = end + 1;
    }
    return parts;
}

std::string trim(std::string_view text)
{
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos)
    {
        return {};
    }
    const auto last = text.find_last_not_of(" \t\r\n");
    return std::string(text.substr(first, last - first + 1));
}

}  // namespace zigar::io
