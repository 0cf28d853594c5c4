// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the reswd project.

#include "color.hpp"

#include "error.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <optional>
#include <sstream>

namespace reswd {

namespace {

namespace pt = boost::property_tree;

// Six decimals with trailing zeros trimmed; never prints "-0".
std::string decimal(double v) {
    std::string s = fmt::format("{:.6f}", v);
    while (s.back() == '0')
        s.pop_back();
    if (s.back() == '.')
        s.pop_back();
    if (s == "-0")
        s = "0";
    return s;
}

std::string triple(const std::array<double, 3> &v) {
    return fmt::format("{} {} {}", decimal(v[0]), decimal(v[1]), decimal(v[2]));
}

std::vector<double> numbers(const std::string &text, const std::string &node) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) {
        double v = 0.0;
        const char *end = tok.data() + tok.size();
        const char *first = tok.data();
        if (*first == '+')
            ++first;
        auto [ptr, ec] = std::from_chars(first, end, v);
        if (ec != std::errc() || ptr != end || !std::isfinite(v))
            fail(ErrorKind::Input, fmt::format("{}: '{}' is not a number", node, tok));
        out.push_back(v);
    }
    return out;
}

const pt::ptree &child(const pt::ptree &parent, const std::string &name) {
    auto it = parent.find(name);
    if (it == parent.not_found())
        fail(ErrorKind::Input, fmt::format("{} missing", name));
    return it->second;
}

std::array<double, 3> read_triple(const pt::ptree &sop, const std::string &name) {
    const auto v = numbers(child(sop, name).data(), name);
    if (v.size() != 3)
        fail(ErrorKind::Input, fmt::format("{}: expected 3 numbers, found {}", name, v.size()));
    return {v[0], v[1], v[2]};
}

// First ColorCorrection element in document order, searching depth-first.
std::optional<pt::ptree> find_correction(const pt::ptree &node) {
    for (const auto &[name, sub] : node) {
        if (name == "ColorCorrection")
            return sub;
        if (name == "<xmlattr>" || name == "<xmlcomment>")
            continue;
        if (auto found = find_correction(sub))
            return found;
    }
    return std::nullopt;
}

}  // namespace

std::string cdl_xml_write(const CdlParams &cdl) {
    cdl.validate();
    return fmt::format("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
                       "<ColorCorrection>\n"
                       "  <SOPNode>\n"
                       "    <Slope>{}</Slope>\n"
                       "    <Offset>{}</Offset>\n"
                       "    <Power>{}</Power>\n"
                       "  </SOPNode>\n"
                       "  <SatNode>\n"
                       "    <Saturation>{}</Saturation>\n"
                       "  </SatNode>\n"
                       "</ColorCorrection>\n",
                       triple(cdl.slope), triple(cdl.offset), triple(cdl.power),
                       decimal(cdl.saturation));
}

CdlParams cdl_xml_read(const std::string &text) {
    pt::ptree doc;
    try {
        std::istringstream in(text);
        pt::read_xml(in, doc);
    } catch (const pt::xml_parser_error &e) {
        fail(ErrorKind::Input,
             fmt::format("malformed CDL XML: {} (line {})", e.message(), e.line()));
    }
    const auto cc = find_correction(doc);
    const pt::ptree &root = cc ? *cc : doc;

    CdlParams cdl;
    const pt::ptree &sop = child(root, "SOPNode");
    cdl.slope = read_triple(sop, "Slope");
    cdl.offset = read_triple(sop, "Offset");
    cdl.power = read_triple(sop, "Power");
    const auto sat = numbers(child(child(root, "SatNode"), "Saturation").data(), "Saturation");
    if (sat.size() != 1)
        fail(ErrorKind::Input, fmt::format("Saturation: expected 1 number, found {}", sat.size()));
    cdl.saturation = sat[0];

    for (int c = 0; c < 3; ++c) {
        if (!(cdl.slope[c] > 0.0))
            fail(ErrorKind::Input, "Slope: values must be positive");
        if (!(cdl.power[c] > 0.0))
            fail(ErrorKind::Input, "Power: values must be positive");
    }
    if (cdl.saturation < 0.0)
        fail(ErrorKind::Input, "Saturation: value must be >= 0");
    return cdl;
}

}  // namespace reswd
