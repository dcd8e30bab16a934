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

// JSON configuration reader. Every error carries the file name and the line
// of the offending key (or of the enclosing object when a key is missing).

#pragma once

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace quantid::cli
{

class ConfigError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// A JSON object inside the config together with its key path from the root.
struct Node
{
    const nlohmann::json *value;
    std::vector<std::string> path;
};

class ConfigReader
{
public:
    explicit ConfigReader(std::string path) : path_(std::move(path))
    {
        std::ifstream in(path_, std::ios::binary);
        if (!in)
            throw ConfigError(path_ + ": cannot open config file");
        std::ostringstream ss;
        ss << in.rdbuf();
        text_ = ss.str();
        try
        {
            root_ = nlohmann::json::parse(text_);
        }
        catch (const nlohmann::json::parse_error &e)
        {
            throw ConfigError(path_ + ":" + std::to_string(line_at(e.byte == 0 ? 0 : e.byte - 1)) +
                              ": invalid JSON (" + strip_prefix(e.what()) + ")");
        }
        if (!root_.is_object())
            throw ConfigError(path_ + ":1: top level must be a JSON object");
    }

    Node root() const { return {&root_, {}}; }

    bool has(const Node &node, const std::string &key) const { return node.value->contains(key); }

    [[noreturn]] void fail(const Node &node, const std::string &key, const std::string &message) const
    {
        auto path = node.path;
        if (!key.empty())
            path.push_back(key);
        const bool present = !key.empty() && node.value->contains(key);
        const int line = present ? line_of(path) : line_of(node.path);
        throw ConfigError(path_ + ":" + std::to_string(line) + ": " + dotted(path) + ": " + message);
    }

    /// Rejects keys outside `allowed` so that typos do not pass silently.
    void expect_keys(const Node &node, std::initializer_list<const char *> allowed) const
    {
        for (const auto &item : node.value->items())
        {
            bool known = false;
            for (const char *a : allowed)
                known = known || item.key() == a;
            if (!known)
                fail(node, item.key(), "unknown key");
        }
    }

    Node object(const Node &node, const std::string &key) const
    {
        const auto &v = at(node, key);
        if (!v.is_object())
            fail(node, key, "expected an object");
        auto path = node.path;
        path.push_back(key);
        return {&v, std::move(path)};
    }

    std::optional<Node> optional_object(const Node &node, const std::string &key) const
    {
        if (!has(node, key))
            return std::nullopt;
        return object(node, key);
    }

    double number(const Node &node, const std::string &key, std::optional<double> fallback = std::nullopt) const
    {
        if (!has(node, key) && fallback)
            return *fallback;
        const auto &v = at(node, key);
        if (!v.is_number())
            fail(node, key, "expected a number");
        return v.get<double>();
    }

    double positive(const Node &node, const std::string &key, std::optional<double> fallback = std::nullopt) const
    {
        const double x = number(node, key, fallback);
        if (!(x > 0.0))
            fail(node, key, "must be positive");
        return x;
    }

    long long integer(const Node &node, const std::string &key, std::optional<long long> fallback = std::nullopt,
                      long long min = 1) const
    {
        if (!has(node, key) && fallback)
            return *fallback;
        const auto &v = at(node, key);
        if (!v.is_number_integer())
            fail(node, key, "expected an integer");
        const auto x = v.get<long long>();
        if (x < min)
            fail(node, key, "must be at least " + std::to_string(min));
        return x;
    }

    std::uint64_t seed(const Node &node, const std::string &key, std::uint64_t fallback) const
    {
        if (!has(node, key))
            return fallback;
        const auto &v = at(node, key);
        if (!v.is_number_unsigned())
            fail(node, key, "expected a non-negative integer");
        return v.get<std::uint64_t>();
    }

    bool boolean(const Node &node, const std::string &key, bool fallback) const
    {
        if (!has(node, key))
            return fallback;
        const auto &v = at(node, key);
        if (!v.is_boolean())
            fail(node, key, "expected true or false");
        return v.get<bool>();
    }

    std::string string(const Node &node, const std::string &key,
                       std::optional<std::string> fallback = std::nullopt) const
    {
        if (!has(node, key) && fallback)
            return *fallback;
        const auto &v = at(node, key);
        if (!v.is_string())
            fail(node, key, "expected a string");
        return v.get<std::string>();
    }

    /// A string restricted to `choices`.
    std::string choice(const Node &node, const std::string &key, std::initializer_list<const char *> choices,
                       std::optional<std::string> fallback = std::nullopt) const
    {
        const auto s = string(node, key, fallback);
        std::string list;
        for (const char *c : choices)
        {
            if (s == c)
                return s;
            list += list.empty() ? c : std::string(", ") + c;
        }
        fail(node, key, "\"" + s + "\" is not one of " + list);
    }

    std::vector<double> numbers(const Node &node, const std::string &key) const
    {
        const auto &v = at(node, key);
        if (!v.is_array() || v.empty())
            fail(node, key, "expected a non-empty array of numbers");
        std::vector<double> out;
        for (const auto &x : v)
        {
            if (!x.is_number())
                fail(node, key, "expected a non-empty array of numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }

    std::vector<int> integers(const Node &node, const std::string &key, int min) const
    {
        const auto &v = at(node, key);
        if (!v.is_array() || v.empty())
            fail(node, key, "expected a non-empty array of integers");
        std::vector<int> out;
        for (const auto &x : v)
        {
            if (!x.is_number_integer() || x.get<long long>() < min)
                fail(node, key, "expected integers of at least " + std::to_string(min));
            out.push_back(x.get<int>());
        }
        return out;
    }

    const std::string &path() const { return path_; }

private:
    const nlohmann::json &at(const Node &node, const std::string &key) const
    {
        if (!node.value->contains(key))
            fail(node, key, "missing required key");
        return node.value->at(key);
    }

    int line_at(std::size_t offset) const
    {
        offset = std::min(offset, text_.size());
        int line = 1;
        for (std::size_t i = 0; i < offset; ++i)
            line += text_[i] == '\n';
        return line;
    }

    /// Line of the last key in `path`, found by locating each key in turn.
    int line_of(const std::vector<std::string> &path) const
    {
        std::size_t pos = 0;
        std::size_t found = std::string::npos;
        for (const auto &key : path)
        {
            const auto at = text_.find("\"" + key + "\"", pos);
            if (at == std::string::npos)
                break;
            found = at;
            pos = at + key.size() + 2;
        }
        return found == std::string::npos ? 1 : line_at(found);
    }

    static std::string dotted(const std::vector<std::string> &path)
    {
        std::string s;
        for (const auto &k : path)
            s += (s.empty() ? "" : ".") + k;
        return s.empty() ? "(root)" : s;
    }

    static std::string strip_prefix(const std::string &what)
    {
        // "[json.exception.parse_error.101] parse error at line 3, column 5: ..." -> text after the last ": ".
        const auto colon = what.rfind(": ");
        return colon == std::string::npos ? what : what.substr(colon + 2);
    }

    std::string path_;
    std::string text_;
    nlohmann::json root_;
};

} // namespace quantid::cli
