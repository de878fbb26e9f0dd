#pragma once

/**
 * Plain-text curve files: one vertex per line, coordinates separated by
 * commas or whitespace or both, lines whose first non-blank character is
 * '#' ignored, blank lines skipped. The dimension is inferred from the
 * first data row and enforced on every later row. Coordinates are written
 * with 17 significant digits, so parsing an emitted file reproduces the
 * chain bit-exactly; consecutive duplicate rows collapse under the chain's
 * own constructor.
 */

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "frechet/geometry.hpp"

namespace frechet {

/** Malformed curve file; the message names the file and 1-based line. */
struct CurveFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Chain parse_curve(std::istream& in, const std::string& name = "<input>") {
    std::vector<Point> rows;
    std::size_t dim = 0;
    std::string line;
    std::size_t lineno = 0;
    auto fail = [&](const std::string& what) -> void {
        throw CurveFormatError(name + ": line " + std::to_string(lineno) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;
        std::string body = line.substr(start);
        for (char& ch : body)
            if (ch == ',') ch = ' ';
        std::istringstream ss(body);
        Point v;
        std::string tok;
        while (ss >> tok) {
            // strtod instead of stod: subnormals underflow to a representable
            // value and must round-trip, but stod turns ERANGE into a throw.
            const char* begin = tok.c_str();
            char* end = nullptr;
            const double x = std::strtod(begin, &end);
            if (end == begin) fail("not a number: '" + tok + "'");
            if (*end != '\0') fail("trailing characters in '" + tok + "'");
            if (!std::isfinite(x)) fail("non-finite coordinate '" + tok + "'");
            v.push_back(x);
        }
        if (v.empty()) fail("no coordinates");
        if (dim == 0)
            dim = v.size();
        else if (v.size() != dim)
            fail("expected " + std::to_string(dim) + " coordinates, found " +
                 std::to_string(v.size()));
        rows.push_back(std::move(v));
    }
    if (rows.empty()) throw CurveFormatError(name + ": no data rows");
    return Chain(std::move(rows));
}

inline Chain load_curve(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CurveFormatError(path + ": cannot open file");
    return parse_curve(in, path);
}

/** One coordinate rendered with 17 significant digits (round-trip exact). */
inline std::string format_coordinate(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void write_curve(std::ostream& out, const Chain& chain) {
    for (const auto& v : chain.vertices()) {
        for (std::size_t k = 0; k < v.size(); ++k) {
            if (k) out << ' ';
            out << format_coordinate(v[k]);
        }
        out << '\n';
    }
}

inline void save_curve(const std::string& path, const Chain& chain) {
    std::ofstream out(path);
    if (!out) throw CurveFormatError(path + ": cannot open file for writing");
    write_curve(out, chain);
    if (!out) throw CurveFormatError(path + ": write failed");
}

}  // namespace frechet
