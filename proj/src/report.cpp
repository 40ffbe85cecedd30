#include "tcgs/report.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace tcgs {

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> columns) : columns_(columns.size())
{
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) text_ += ',';
        text_ += columns[i];
    }
    text_ += '\n';
}

void CsvWriter::append_row(const std::vector<std::string>& cells)
{
    if (cells.size() != columns_) throw std::invalid_argument("CsvWriter: column count mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) text_ += ',';
        text_ += cells[i];
    }
    text_ += '\n';
}

void CsvWriter::append_row_numeric(const std::vector<double>& cells)
{
    std::vector<std::string> formatted;
    formatted.reserve(cells.size());
    for (double v : cells) formatted.push_back(format_double(v));
    append_row(formatted);
}

void CsvWriter::write(const std::string& path) const
{
    write_text_file(path, text_);
}

void RunReport::write(const std::string& path) const
{
    nlohmann::json j;
    j["command"] = command;
    j["config"] = config_echo;
    j["config_hash"] = config_hash;
    j["seed"] = seed;
    j["version"] = version;
    const auto now = std::chrono::system_clock::now();
    j["timestamp_unix"] = std::chrono::duration_cast<std::chrono::seconds>(
                              now.time_since_epoch())
                              .count();
    j["wall_time_s"] = wall_time_s;
    j["results"] = results;
    nlohmann::json arts = nlohmann::json::object();
    for (const auto& [name, file] : artifacts) arts[name] = file;
    j["artifacts"] = arts;
    write_text_file(path, j.dump(2) + "\n");
}

void write_text_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace tcgs
