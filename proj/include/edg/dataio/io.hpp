#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "edg/basis/sample_set.hpp"
#include "edg/geometry/geometry.hpp"

namespace edg {

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return false;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

inline bool parse_index(std::string_view s, long long& out) {
    s = trim(s);
    if (s.empty()) return false;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto q = s.find(sep, pos);
        out.push_back(s.substr(pos, q == std::string_view::npos ? std::string_view::npos : q - pos));
        if (q == std::string_view::npos) break;
        pos = q + 1;
    }
    return out;
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        const auto b = s.find_first_not_of(" \t\r", pos);
        if (b == std::string_view::npos) break;
        const auto e = s.find_first_of(" \t\r", b);
        out.push_back(s.substr(b, e == std::string_view::npos ? std::string_view::npos : e - b));
        if (e == std::string_view::npos) break;
        pos = e;
    }
    return out;
}

// Calls f(line_number, line) for every line; line numbers are 1-based.
template <class F>
void for_each_line(std::string_view text, F&& f) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto q = text.find('\n', pos);
        std::string_view line = text.substr(pos, q == std::string_view::npos ? std::string_view::npos : q - pos);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (q == std::string_view::npos) {
            if (!line.empty()) f(line_no, line);
            break;
        }
        f(line_no, line);
        pos = q + 1;
    }
}

inline std::string format17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("error while reading '" + path + "'");
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw IoError("error while writing '" + path + "'");
}

struct PdbOptions {
    bool include_hetatm = false;  ///< HETATM records are skipped unless set
};

/// (x, y, z) from columns 31-54 of the ATOM (and optionally HETATM) records, in
/// record order. Other record types are ignored.
inline PointCloud load_pdb_atoms(std::string_view text, const PdbOptions& opt = {}) {
    std::vector<double> xyz;
    detail::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        const auto record = detail::trim(line.substr(0, 6));
        const bool atom = record == "ATOM";
        const bool het = record == "HETATM";
        if (!atom && !(het && opt.include_hetatm)) return;
        if (line.size() < 54) throw ParseError("coordinate record shorter than 54 columns", line_no);
        for (int c = 0; c < 3; ++c) {
            double v = 0.0;
            if (!detail::parse_double(line.substr(30 + 8 * c, 8), v) || !std::isfinite(v))
                throw ParseError(std::string("bad ") + "xyz"[c] + " coordinate", line_no);
            xyz.push_back(v);
        }
    });
    if (xyz.empty()) throw EmptyCloud("load_pdb_atoms: no coordinate records");
    const Index n = static_cast<Index>(xyz.size() / 3);
    return PointCloud(Eigen::Map<const Mat>(xyz.data(), 3, n));
}

/// Longitude/latitude CSV as a planar 2 x n cloud (row 0 longitude, row 1 latitude).
///
/// A first line that does not start with a number is a header. With a header the
/// columns are located by name (lon/lng/long/longitude and lat/latitude,
/// case-insensitive); without one, the first two columns are longitude, latitude.
inline PointCloud load_latlong_csv(std::string_view text) {
    std::vector<double> coords;
    std::size_t lon_col = 0, lat_col = 1;
    bool first = true;
    detail::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        if (detail::trim(line).empty()) return;
        const auto fields = detail::split(line, ',');
        if (first) {
            first = false;
            double probe;
            if (!detail::parse_double(fields[0], probe)) {
                bool have_lon = false, have_lat = false;
                for (std::size_t c = 0; c < fields.size(); ++c) {
                    std::string name(detail::trim(fields[c]));
                    for (auto& ch : name) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
                    if (!name.empty() && name.front() == '"' && name.back() == '"' && name.size() >= 2)
                        name = name.substr(1, name.size() - 2);
                    if (!have_lon && (name == "lon" || name == "lng" || name == "long" || name == "longitude")) {
                        lon_col = c;
                        have_lon = true;
                    } else if (!have_lat && (name == "lat" || name == "latitude")) {
                        lat_col = c;
                        have_lat = true;
                    }
                }
                if (have_lon != have_lat) throw ParseError("header names only one of longitude/latitude", line_no);
                return;
            }
        }
        double lon = 0.0, lat = 0.0;
        if (fields.size() <= std::max(lon_col, lat_col)) throw ParseError("too few columns", line_no);
        if (!detail::parse_double(fields[lon_col], lon) || !detail::parse_double(fields[lat_col], lat) ||
            !std::isfinite(lon) || !std::isfinite(lat))
            throw ParseError("malformed longitude/latitude", line_no);
        coords.push_back(lon);
        coords.push_back(lat);
    });
    if (coords.empty()) throw EmptyCloud("load_latlong_csv: no rows");
    return PointCloud(Eigen::Map<const Mat>(coords.data(), 2, static_cast<Index>(coords.size() / 2)));
}

/// PointCloud CSV: header x1,...,xr and one row per point, 17 significant digits.
inline std::string write_point_cloud_csv(const PointCloud& p) {
    std::string out;
    for (Index d = 0; d < p.r(); ++d) out += (d ? ",x" : "x") + std::to_string(d + 1);
    out += '\n';
    for (Index i = 0; i < p.n(); ++i) {
        for (Index d = 0; d < p.r(); ++d) {
            if (d) out += ',';
            out += detail::format17(p.coords()(d, i));
        }
        out += '\n';
    }
    return out;
}

inline PointCloud read_point_cloud_csv(std::string_view text) {
    std::vector<double> vals;
    Index r = -1;
    bool header_seen = false;
    detail::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        if (detail::trim(line).empty()) return;
        const auto fields = detail::split(line, ',');
        if (!header_seen) {
            header_seen = true;
            r = static_cast<Index>(fields.size());
            for (std::size_t c = 0; c < fields.size(); ++c)
                if (detail::trim(fields[c]) != "x" + std::to_string(c + 1))
                    throw ParseError("expected header x1,...,xr", line_no);
            return;
        }
        if (static_cast<Index>(fields.size()) != r) throw ParseError("wrong number of columns", line_no);
        for (const auto& f : fields) {
            double v;
            if (!detail::parse_double(f, v) || !std::isfinite(v)) throw ParseError("malformed number", line_no);
            vals.push_back(v);
        }
    });
    if (!header_seen) throw ParseError("missing header", 0);
    if (vals.empty()) throw EmptyCloud("read_point_cloud_csv: no points");
    return PointCloud(Eigen::Map<const Mat>(vals.data(), r, static_cast<Index>(vals.size()) / r));
}

/// SampleSet v1: `edg-samples v1 n=<n> m=<m>` then m lines `i j d2` (1-based).
inline std::string write_sample_set(const SampleSet& s) {
    std::string out = "edg-samples v1 n=" + std::to_string(s.n()) + " m=" + std::to_string(s.m()) + '\n';
    for (Index l = 0; l < s.m(); ++l) {
        const auto& p = s.pair(l);
        out += std::to_string(p.i + 1) + ' ' + std::to_string(p.j + 1) + ' ' + detail::format17(s.d2()(l)) + '\n';
    }
    return out;
}

/// Reads SampleSet v1. Repeated pairs are accepted only with `with_replacement`.
inline SampleSet read_sample_set(std::string_view text, bool with_replacement = false) {
    long long n = -1, m = -1;
    std::vector<IndexPair> pairs;
    std::vector<double> d2;
    bool header_seen = false;
    detail::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        if (detail::trim(line).empty()) return;
        const auto tok = detail::split_ws(line);
        if (!header_seen) {
            if (tok.size() != 4 || tok[0] != "edg-samples" || tok[1] != "v1" || tok[2].substr(0, 2) != "n=" ||
                tok[3].substr(0, 2) != "m=" || !detail::parse_index(tok[2].substr(2), n) ||
                !detail::parse_index(tok[3].substr(2), m) || n < 2 || m < 0)
                throw ParseError("expected header 'edg-samples v1 n=<n> m=<m>'", line_no);
            header_seen = true;
            return;
        }
        long long i, j;
        double v;
        if (tok.size() != 3 || !detail::parse_index(tok[0], i) || !detail::parse_index(tok[1], j) ||
            !detail::parse_double(tok[2], v))
            throw ParseError("expected 'i j d2'", line_no);
        if (i < 1 || j < 1 || i > n || j > n || i == j) throw ParseError("pair index out of range", line_no);
        if (!std::isfinite(v) || v < 0.0) throw ParseError("d2 must be finite and >= 0", line_no);
        pairs.push_back(IndexPair::off_diagonal(static_cast<Index>(i - 1), static_cast<Index>(j - 1)));
        d2.push_back(v);
    });
    if (!header_seen) throw ParseError("missing header", 0);
    if (static_cast<long long>(pairs.size()) != m)
        throw ParseError("header announces m=" + std::to_string(m) + " but file has " + std::to_string(pairs.size()) +
                             " samples",
                         0);
    return SampleSet(static_cast<Index>(n), std::move(pairs),
                     Eigen::Map<const Vec>(d2.data(), static_cast<Index>(d2.size())), with_replacement);
}

} // namespace edg
