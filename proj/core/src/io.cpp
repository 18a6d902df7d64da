#include "circlelab/io.hpp"

#include <cstdio>
#include <stdexcept>

namespace circlelab::io {

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex8(std::uint64_t h) {
    char buf[9];
    std::snprintf(buf, sizeof(buf), "%08x", static_cast<unsigned>(h & 0xffffffffu));
    return buf;
}

CsvWriter::CsvWriter(const std::string& path) : path_(path) {}
CsvWriter::CsvWriter() = default;

CsvWriter::~CsvWriter() {
    if (!path_.empty()) close();
}

void CsvWriter::start_row() { first_cell_ = true; }

void CsvWriter::end_row() { buf_ += "\r\n"; }

void CsvWriter::cell(const std::string& v) {
    if (!first_cell_) buf_ += ',';
    first_cell_ = false;
    const bool quote = v.find_first_of(",\"\r\n") != std::string::npos;
    if (!quote) {
        buf_ += v;
        return;
    }
    buf_ += '"';
    for (char c : v) {
        if (c == '"') buf_ += '"';
        buf_ += c;
    }
    buf_ += '"';
}

void CsvWriter::cell(const char* v) { cell(std::string(v)); }
void CsvWriter::cell(double v) { cell(format_real(v)); }
void CsvWriter::cell(std::uint64_t v) { cell(std::to_string(v)); }
void CsvWriter::cell(std::int64_t v) { cell(std::to_string(v)); }
void CsvWriter::cell(int v) { cell(std::to_string(v)); }
void CsvWriter::cell(unsigned v) { cell(std::to_string(v)); }

void CsvWriter::close() {
    if (path_.empty()) return;
    write_file(path_, buf_);
    path_.clear();
}

namespace {
std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out;
}
}  // namespace

void JsonObject::add(const std::string& key, const std::string& v) {
    fields_.emplace_back(key, "\"" + json_escape(v) + "\"");
}
void JsonObject::add(const std::string& key, const char* v) { add(key, std::string(v)); }
void JsonObject::add(const std::string& key, double v) { fields_.emplace_back(key, format_real(v)); }
void JsonObject::add(const std::string& key, std::uint64_t v) {
    fields_.emplace_back(key, std::to_string(v));
}
void JsonObject::add(const std::string& key, std::int64_t v) {
    fields_.emplace_back(key, std::to_string(v));
}
void JsonObject::add(const std::string& key, int v) { fields_.emplace_back(key, std::to_string(v)); }
void JsonObject::add(const std::string& key, bool v) {
    fields_.emplace_back(key, v ? "true" : "false");
}
void JsonObject::add(const std::string& key, std::complex<double> v) {
    fields_.emplace_back(key, "{\"re\":" + format_real(v.real()) + ",\"im\":" +
                                  format_real(v.imag()) + "}");
}
void JsonObject::add_raw(const std::string& key, const std::string& json) {
    fields_.emplace_back(key, json);
}
void JsonObject::add(const std::string& key, const std::vector<double>& v) {
    std::string arr = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) arr += ',';
        arr += format_real(v[i]);
    }
    arr += ']';
    fields_.emplace_back(key, arr);
}

std::string JsonObject::str() const {
    std::string out = "{";
    for (std::size_t i = 0; i < fields_.size(); ++i) {
        if (i) out += ',';
        out += "\"" + json_escape(fields_[i].first) + "\":" + fields_[i].second;
    }
    out += "}";
    return out;
}

void JsonObject::write(const std::string& path) const { write_file(path, str() + "\n"); }

void write_file(const std::string& path, const std::string& content) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    if (!content.empty() && std::fwrite(content.data(), 1, content.size(), f) != content.size()) {
        std::fclose(f);
        throw std::runtime_error("short write: " + path);
    }
    std::fclose(f);
}

}  // namespace circlelab::io
