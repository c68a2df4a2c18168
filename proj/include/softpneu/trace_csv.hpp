#pragma once

#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "softpneu/error.hpp"
#include "softpneu/sysid.hpp"

namespace softpneu {

namespace detail {

inline double parse_csv_number(const std::string& field,
                               const std::string& origin, std::size_t line) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(field, &used);
    } catch (const std::exception&) {
        throw Error(ErrorKind::Parse, origin + ":" + std::to_string(line) +
                                          ": not a number: '" + field + "'");
    }
    if (used != field.size())
        throw Error(ErrorKind::Parse, origin + ":" + std::to_string(line) +
                                          ": trailing junk in '" + field + "'");
    return v;
}

inline std::vector<std::string> split_csv_row(const std::string& row) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : row) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace detail

// Reads one experiment trace. The header fixes the angle unit: theta_rad is
// stored as-is, theta_deg is converted on the way in. A trailing carriage
// return per line is tolerated so re-saved files keep parsing.
inline ExperimentTrace read_trace_csv(std::istream& in,
                                      const std::string& origin) {
    ExperimentTrace tr;
    std::string row;
    std::size_t line = 0;

    if (!std::getline(in, row))
        throw Error(ErrorKind::Parse, origin + ":1: empty file");
    ++line;
    if (!row.empty() && row.back() == '\r') row.pop_back();
    double angle_scale = 1.0;
    if (row == "t_s,input,theta_deg")
        angle_scale = std::numbers::pi / 180.0;
    else if (row != "t_s,input,theta_rad")
        throw Error(ErrorKind::Parse,
                    origin + ":1: header must be 't_s,input,theta_rad' or "
                             "'t_s,input,theta_deg', got '" + row + "'");

    while (std::getline(in, row)) {
        ++line;
        if (!row.empty() && row.back() == '\r') row.pop_back();
        if (row.empty()) {
            if (in.peek() == EOF) break;  // single trailing newline
            throw Error(ErrorKind::Parse,
                        origin + ":" + std::to_string(line) + ": blank row");
        }
        const auto fields = detail::split_csv_row(row);
        if (fields.size() != 3)
            throw Error(ErrorKind::Parse,
                        origin + ":" + std::to_string(line) + ": expected 3 "
                        "fields, got " + std::to_string(fields.size()));
        tr.timestamps_s.push_back(
            detail::parse_csv_number(fields[0], origin, line));
        tr.input.push_back(detail::parse_csv_number(fields[1], origin, line));
        tr.output_rad.push_back(
            angle_scale * detail::parse_csv_number(fields[2], origin, line));
    }
    tr.validate();
    return tr;
}

inline ExperimentTrace read_trace_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::Parse, path + ": cannot open file");
    return read_trace_csv(in, path);
}

inline void write_trace_csv(std::ostream& out, const ExperimentTrace& tr) {
    out << "t_s,input,theta_rad\n";
    char buf[96];
    for (std::size_t i = 0; i < tr.timestamps_s.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n",
                      tr.timestamps_s[i], tr.input[i], tr.output_rad[i]);
        out << buf;
    }
}

inline void write_trace_csv_file(const std::string& path,
                                 const ExperimentTrace& tr) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorKind::Parse, path + ": cannot open for writing");
    write_trace_csv(out, tr);
}

}  // namespace softpneu
