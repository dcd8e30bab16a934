// SPDX-License-Identifier: Apache-2.0
//
// quantid - optimal output quantizers for least-squares FIR identification
// Copyright (C) 2026 The quantid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Serialization: quantizers as JSON, tables as CSV, tabulated densities
// read from CSV. Numbers are written with %.17g so they round-trip exactly.

#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "quantid/density.hpp"
#include "quantid/error.hpp"
#include "quantid/quantizer.hpp"

namespace quantid
{

inline std::string format_number(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline nlohmann::ordered_json to_json(const Quantizer &q)
{
    return {{"breakpoints", q.positive_breakpoints()}, {"reps", q.positive_reps()}};
}

inline Quantizer quantizer_from_json(const nlohmann::json &j)
{
    if (!j.is_object() || !j.contains("breakpoints") || !j.contains("reps"))
        throw InvalidArgument("quantizer JSON: expected an object with \"breakpoints\" and \"reps\"");
    return Quantizer(j.at("breakpoints").get<std::vector<double>>(), j.at("reps").get<std::vector<double>>());
}

/// Minimal CSV builder: a header row and rows of numbers or strings.
class CsvTable
{
public:
    explicit CsvTable(std::vector<std::string> header) : columns_(header.size())
    {
        add_cells(header);
    }

    CsvTable &row(const std::vector<double> &values)
    {
        std::vector<std::string> cells;
        cells.reserve(values.size());
        for (double v : values)
            cells.push_back(format_number(v));
        return row(cells);
    }

    CsvTable &row(const std::vector<std::string> &cells)
    {
        if (cells.size() != columns_)
            throw InvalidArgument("CSV: row width does not match the header");
        add_cells(cells);
        return *this;
    }

    const std::string &str() const { return text_; }

    void write(const std::string &path) const
    {
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw Error("cannot open " + path + " for writing");
        out << text_;
    }

private:
    void add_cells(const std::vector<std::string> &cells)
    {
        for (std::size_t i = 0; i < cells.size(); ++i)
        {
            if (i > 0)
                text_ += ',';
            text_ += cells[i];
        }
        text_ += '\n';
    }

    std::size_t columns_;
    std::string text_;
};

/// Reads "value,density" rows. Blank lines, '#' comments and a non-numeric
/// header line are skipped.
inline MarginalDensity read_tabulated_density(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw InvalidArgument("tabulated density: cannot open " + path);
    std::vector<double> x, f;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line))
    {
        ++line_no;
        if (line.empty() || line[0] == '#')
            continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        double a, b;
        if (!(fields >> a >> b))
        {
            if (x.empty())
                continue; // header
            throw InvalidArgument(path + ":" + std::to_string(line_no) + ": expected two numbers");
        }
        x.push_back(a);
        f.push_back(b);
    }
    return MarginalDensity::tabulated(std::move(x), std::move(f));
}

} // namespace quantid
