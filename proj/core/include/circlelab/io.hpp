#pragma once
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace circlelab::io {

// Reals rendered with 17 significant digits, '.' decimal separator,
// locale-independent; enough to round-trip a double bit-exactly.
std::string format_real(double v);

std::uint64_t fnv1a(const std::string& s);
std::string hex8(std::uint64_t h);  // low bits, 8 hex digits

// RFC-4180 CSV with CRLF line ends and a header row written by the caller.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path);
    CsvWriter();  // buffer only, read back with str()
    ~CsvWriter();

    template <typename... Ts>
    void row(const Ts&... cells) {
        start_row();
        (cell(cells), ...);
        end_row();
    }

    void close();
    const std::string& str() const { return buf_; }

private:
    void start_row();
    void end_row();
    void cell(const std::string& v);
    void cell(const char* v);
    void cell(double v);
    void cell(std::uint64_t v);
    void cell(std::int64_t v);
    void cell(int v);
    void cell(unsigned v);

    std::string buf_;
    std::string path_;
    bool first_cell_ = true;
};

// Minimal ordered JSON object writer (keeps insertion order so reruns are
// byte-identical; nlohmann would reorder keys).
class JsonObject {
public:
    void add(const std::string& key, const std::string& v);
    void add(const std::string& key, const char* v);
    void add(const std::string& key, double v);
    void add(const std::string& key, std::uint64_t v);
    void add(const std::string& key, std::int64_t v);
    void add(const std::string& key, int v);
    void add(const std::string& key, bool v);
    void add(const std::string& key, std::complex<double> v);  // {"re":..,"im":..}
    void add_raw(const std::string& key, const std::string& json);
    void add(const std::string& key, const std::vector<double>& v);

    std::string str() const;
    void write(const std::string& path) const;

private:
    std::vector<std::pair<std::string, std::string>> fields_;
};

void write_file(const std::string& path, const std::string& content);

}  // namespace circlelab::io
