#include "copyguard/common/csv.hpp"

#include "copyguard/common/error.hpp"

namespace copyguard::csv {

bool Reader::next(std::vector<std::string>& fields) {
    fields.clear();
    int c = in_.get();
    if (c == std::char_traits<char>::eof()) return false;

    record_line_ = current_line_;
    std::string field;
    bool quoted = false;     // inside a quoted section
    bool was_quoted = false; // current field started with a quote

    auto fail = [&](const char* what) {
        throw Error(ErrorCode::MalformedRow,
                    "row " + std::to_string(record_line_) + ": " + what);
    };

    while (true) {
        if (c == std::char_traits<char>::eof()) {
            if (quoted) fail("unterminated quoted field");
            fields.push_back(std::move(field));
            return true;
        }
        const char ch = static_cast<char>(c);
        if (quoted) {
            if (ch == '"') {
                if (in_.peek() == '"') {
                    in_.get();
                    field.push_back('"');
                } else {
                    quoted = false;
                    const int nxt = in_.peek();
                    if (nxt != ',' && nxt != '\n' && nxt != '\r' &&
                        nxt != std::char_traits<char>::eof()) {
                        fail("unexpected character after closing quote");
                    }
                }
            } else {
                if (ch == '\n') ++current_line_;
                field.push_back(ch);
            }
        } else if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
            was_quoted = false;
        } else if (ch == '\r' || ch == '\n') {
            if (ch == '\r' && in_.peek() == '\n') in_.get();
            ++current_line_;
            fields.push_back(std::move(field));
            return true;
        } else if (ch == '"') {
            if (!field.empty() || was_quoted) fail("quote inside unquoted field");
            quoted = true;
            was_quoted = true;
        } else {
            if (was_quoted) fail("unexpected character after closing quote");
            field.push_back(ch);
        }
        c = in_.get();
    }
}

std::string escape(std::string_view field) {
    const bool needs_quotes = field.find_first_of(",\"\r\n") != std::string_view::npos;
    if (!needs_quotes) return std::string(field);
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out.push_back('"');
        out.push_back(ch);
    }
    out.push_back('"');
    return out;
}

void write_row(std::ostream& out, std::span<const std::string> fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        out << escape(fields[i]);
    }
    out << '\n';
}

std::string join_header(std::span<const std::string_view> names) {
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out.push_back(',');
        out.append(names[i]);
    }
    return out;
}

std::vector<std::string> split_header(std::string_view header) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = header.find(',', start);
        out.emplace_back(header.substr(start, comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace copyguard::csv
