#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace osc {

/// Comma-separated writer with a header row and LF line endings. Doubles are
/// printed with %.17g so values round-trip.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header)
        : out_(path, std::ios::binary | std::ios::trunc), path_(path)
    {
        if (!out_)
            throw std::runtime_error("cannot write " + path);
        for (std::size_t i = 0; i < header.size(); ++i)
            out_ << (i ? "," : "") << header[i];
        out_ << '\n';
    }

    template <typename... Ts>
    void row(const Ts&... values)
    {
        bool first = true;
        ((out_ << (first ? "" : ",") << format(values), first = false), ...);
        out_ << '\n';
        if (!out_)
            throw std::runtime_error("write failed: " + path_);
    }

    static std::string format(double v)
    {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }
    static std::string format(float v) { return format(static_cast<double>(v)); }
    static std::string format(const std::string& s) { return s; }
    static std::string format(const char* s) { return s; }
    static std::string format(bool b) { return b ? "1" : "0"; }
    template <typename T>
        requires std::is_integral_v<T>
    static std::string format(T v)
    {
        return std::to_string(v);
    }

private:
    std::ofstream out_;
    std::string path_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const
    {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name)
                return i;
        }
        throw std::runtime_error("missing CSV column '" + name + "'");
    }
};

inline std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ','))
        fields.push_back(f);
    if (!line.empty() && line.back() == ',')
        fields.emplace_back();
    return fields;
}

inline CsvTable read_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    CsvTable t;
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("empty CSV " + path);
    t.header = split_csv_line(line);
    while (std::getline(in, line)) {
        if (!line.empty())
            t.rows.push_back(split_csv_line(line));
    }
    return t;
}

} // namespace osc
