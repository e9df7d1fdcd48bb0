#pragma once

#include <cstdio>
#include <string>
#include <vector>

namespace cfisac::csv {

// RFC-4180 field quoting: quote when the field holds a comma, quote, or newline.
inline std::string escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

class Writer {
public:
    explicit Writer(std::vector<std::string> header) {
        append_row(header);
    }
    void append_row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) text_ += ',';
            text_ += escape(fields[i]);
        }
        text_ += '\n';
    }
    const std::string& str() const { return text_; }

private:
    std::string text_;
};

}  // namespace cfisac::csv
