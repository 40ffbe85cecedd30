// report.hpp — Run reports (JSON) and deterministic CSV emission. Doubles are
// printed with %.17g so identical runs produce identical bytes; wall times
// and timestamps stay in the report header.

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace tcgs {

std::string format_double(double v);

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> columns);
    void append_row(const std::vector<std::string>& cells);
    void append_row_numeric(const std::vector<double>& cells);
    const std::string& text() const { return text_; }
    void write(const std::string& path) const;

private:
    std::size_t columns_{0};
    std::string text_;
};

struct RunReport {
    std::string command;
    nlohmann::json config_echo;
    std::uint64_t config_hash{0};
    std::uint64_t seed{0};
    std::string version{"tcgs 1.0"};
    double wall_time_s{0.0};
    nlohmann::json results;
    std::vector<std::pair<std::string, std::string>> artifacts;

    void write(const std::string& path) const;
};

void write_text_file(const std::string& path, const std::string& content);

} // namespace tcgs
