// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the reswd project.

#include "points.hpp"

#include "error.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace reswd {

namespace {

bool is_separator(char c) {
    return c == ' ' || c == '\t' || c == ',' || c == '\r' || c == '\v' || c == '\f';
}

}  // namespace

SampleSet read_points(std::istream &in) {
    std::vector<double> data;
    std::size_t dim = 0, rows = 0, lineno = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#')
            continue;
        std::size_t count = 0;
        for (std::size_t i = 0; i < line.size();) {
            if (is_separator(line[i])) {
                ++i;
                continue;
            }
            std::size_t j = i;
            while (j < line.size() && !is_separator(line[j]))
                ++j;
            const char *b = line.data() + i;
            const char *e = line.data() + j;
            if (*b == '+')
                ++b;
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(b, e, v);
            if (ec != std::errc() || ptr != e || !std::isfinite(v))
                fail(ErrorKind::Input, fmt::format("line {}: '{}' is not a finite number", lineno,
                                                   line.substr(i, j - i)));
            data.push_back(v);
            ++count;
            i = j;
        }
        if (count == 0)
            fail(ErrorKind::Input, fmt::format("line {}: no values", lineno));
        if (dim == 0)
            dim = count;
        else if (count != dim)
            fail(ErrorKind::Input,
                 fmt::format("line {}: expected {} values, found {}", lineno, dim, count));
        ++rows;
    }
    if (rows == 0)
        fail(ErrorKind::Input, "point file contains no points");
    return SampleSet(rows, dim, std::move(data));
}

SampleSet read_points_file(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        fail(ErrorKind::Input, fmt::format("cannot open '{}'", path));
    try {
        return read_points(in);
    } catch (const Error &e) {
        fail(e.kind(), fmt::format("{}: {}", path, e.what()));
    }
}

void write_points(std::ostream &out, const SampleSet &points) {
    for (std::size_t i = 0; i < points.n_points(); ++i)
        out << fmt::format("{}\n", fmt::join(points.row(i), " "));
}

void write_points_file(const std::string &path, const SampleSet &points) {
    std::ofstream out(path);
    if (!out)
        fail(ErrorKind::Output, fmt::format("cannot write '{}'", path));
    write_points(out, points);
    out.flush();
    if (!out)
        fail(ErrorKind::Output, fmt::format("cannot write '{}'", path));
}

}  // namespace reswd
