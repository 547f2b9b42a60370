#pragma once

#include <charconv>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace crackdyn {

// Shortest decimal string that round-trips to the same double.
inline std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline void write_csv_row(std::ostream& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out << ',';
        out << cells[i];
    }
    out << '\n';
}

} // namespace crackdyn
