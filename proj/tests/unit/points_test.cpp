// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the reswd project.

#include "error.hpp"
#include "points.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace reswd {
namespace {

SampleSet parse(const std::string &text) {
    std::istringstream in(text);
    return read_points(in);
}

std::string parse_error(const std::string &text) {
    try {
        parse(text);
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::Input);
        return e.what();
    }
    ADD_FAILURE() << "no error";
    return {};
}

TEST(Points, SeparatorsCommentsAndBlankLines) {
    const SampleSet s = parse("# header\n1 2 3\n\n  4,5,6\n7, 8\t9\n   # note\n");
    ASSERT_EQ(s.n_points(), 3u);
    ASSERT_EQ(s.dim(), 3u);
    EXPECT_EQ(s.at(1, 0), 4.0);
    EXPECT_EQ(s.at(2, 2), 9.0);
}

TEST(Points, ErrorsNameTheLine) {
    EXPECT_NE(parse_error("1 2\n3 x\n").find("line 2: 'x'"), std::string::npos);
    EXPECT_NE(parse_error("1 2\n3 4 5\n").find("line 2: expected 2 values, found 3"),
              std::string::npos);
    EXPECT_NE(parse_error("1 nan\n").find("line 1"), std::string::npos);
    EXPECT_NE(parse_error("# only\n\n").find("no points"), std::string::npos);
}

TEST(Points, WriteReadRoundTripIsExact) {
    const SampleSet s(3, 2, {0.1, -1e-300, 1.0 / 3.0, 12345.678, -0.0, 2.5e17});
    std::ostringstream out;
    write_points(out, s);
    const SampleSet back = parse(out.str());
    EXPECT_EQ(back, s);
    EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "0.1 -1e-300");
}

TEST(Points, MissingFile) {
    try {
        read_points_file("/nonexistent/points.txt");
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::Input);
        EXPECT_NE(std::string(e.what()).find("/nonexistent/points.txt"), std::string::npos);
    }
    EXPECT_THROW(write_points_file("/nonexistent/dir/out.txt", SampleSet(1, 1)), Error);
}

}  // namespace
}  // namespace reswd
