// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the reswd project.

#pragma once

#include "numeric.hpp"

#include <iosfwd>
#include <string>

namespace reswd {

/// One point per line; values separated by whitespace and/or commas. Blank
/// lines and lines whose first non-blank character is '#' are skipped.
/// Throws Error(Input) naming the 1-based line on malformed input.
SampleSet read_points(std::istream &in);
SampleSet read_points_file(const std::string &path);

/// Space-separated, shortest round-trip decimals.
void write_points(std::ostream &out, const SampleSet &points);
void write_points_file(const std::string &path, const SampleSet &points);

}  // namespace reswd
