#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace obslab {

using Json = nlohmann::ordered_json;

/// 17 significant digits; nan and inf spelled out.
std::string csv_number(double v);

/// Comma-separated table with a mandatory header row and LF line endings.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);
    void add(std::vector<std::string> row);
    void add(const std::vector<double>& row);
    std::string str() const;
    const std::vector<std::string>& header() const { return header_; }
    std::size_t rows() const { return rows_.size(); }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

struct ParsedCsv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::size_t column(const std::string& name) const;  ///< throws InputError when missing
};
ParsedCsv read_csv(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);

/// Output directory of one run. Holds a lock file for its lifetime; files
/// written through it are removed again unless commit() is reached.
class RunDirectory {
public:
    explicit RunDirectory(std::filesystem::path dir);
    ~RunDirectory();
    RunDirectory(const RunDirectory&) = delete;
    RunDirectory& operator=(const RunDirectory&) = delete;

    void write(const std::string& name, const std::string& content);
    void write(const std::string& name, const CsvTable& table) { write(name, table.str()); }
    void write(const std::string& name, const Json& json) { write(name, json.dump(2) + "\n"); }

    /// Wall time of a named stage, recorded in the manifest.
    void time_stage(const std::string& stage, double seconds);

    /// Manifest object: config hash, version, stage timings, file inventory.
    Json manifest(const std::string& config_hash) const;
    /// Writes manifest.json and keeps every output.
    void commit(const std::string& config_hash);

    const std::filesystem::path& path() const { return dir_; }
    const std::vector<std::string>& outputs() const { return outputs_; }

private:
    std::filesystem::path dir_;
    std::filesystem::path lock_;
    std::vector<std::string> outputs_;
    std::vector<std::pair<std::string, double>> timings_;
    bool created_dir_ = false;
    bool committed_ = false;
};

/// Version string written into every manifest.
const char* artifact_version();

/// Hex FNV-1a of the text.
std::string text_hash(const std::string& text);

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

}  // namespace obslab
