#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace copyguard::csv {

// RFC-4180 reader: comma separated, double-quote quoting with "" escapes,
// quoted fields may span lines, LF or CRLF record terminators.
class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    // Reads the next record into `fields`. Returns false at end of input.
    // Throws Error(MalformedRow) on a quoting violation.
    bool next(std::vector<std::string>& fields);

    // Physical line on which the last returned record started (1-based).
    std::size_t line() const { return record_line_; }

private:
    std::istream& in_;
    std::size_t current_line_ = 1;
    std::size_t record_line_ = 0;
};

std::string escape(std::string_view field);
void write_row(std::ostream& out, std::span<const std::string> fields);
std::string join_header(std::span<const std::string_view> names);

// Splits a header line literal such as "a,b,c".
std::vector<std::string> split_header(std::string_view header);

}  // namespace copyguard::csv
