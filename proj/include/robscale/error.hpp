/*
 * Copyright 2026 The robscale Authors
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace robscale {

enum class ErrorKind {
    invalid_argument,  // caller supplied bad parameters or data
    parse,             // malformed input file
    io,                // file could not be opened or written
    numeric,           // an estimator failed on otherwise valid data
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ParseError : public Error {
public:
    // line is 1-based and counts the header; column is 1-based, 0 if unknown
    ParseError(const std::string& file, std::size_t line, std::size_t column,
               const std::string& what)
        : Error(ErrorKind::parse, file + ":" + std::to_string(line) +
                                      (column ? ":" + std::to_string(column) : "") +
                                      ": " + what),
          line_(line),
          column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

}  // namespace robscale
