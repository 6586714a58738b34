#include "obslab/cli/io.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "obslab/domain/rng.hpp"
#include "obslab/errors.hpp"

namespace fs = std::filesystem;

namespace obslab {

std::string csv_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
    require(!header_.empty(), "CSV header must not be empty");
}

void CsvTable::add(std::vector<std::string> row) {
    require(row.size() == header_.size(), "CSV row width differs from the header");
    rows_.push_back(std::move(row));
}

void CsvTable::add(const std::vector<double>& row) {
    std::vector<std::string> s;
    s.reserve(row.size());
    for (double v : row) s.push_back(csv_number(v));
    add(std::move(s));
}

std::string CsvTable::str() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (k) out += ',';
            const std::string& c = cells[k];
            if (c.find_first_of(",\"\n") == std::string::npos) {
                out += c;
                continue;
            }
            out += '"';
            for (char ch : c) {
                if (ch == '"') out += '"';
                out += ch;
            }
            out += '"';
        }
        out += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
}

std::size_t ParsedCsv::column(const std::string& name) const {
    for (std::size_t k = 0; k < header.size(); ++k) {
        if (header[k] == name) return k;
    }
    throw InputError("CSV has no column '" + name + "'");
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

ParsedCsv read_csv(const fs::path& path) {
    std::istringstream in(read_text(path));
    ParsedCsv out;
    std::string line;
    auto split = [](const std::string& l) {
        std::vector<std::string> cells(1);
        bool quoted = false;
        for (std::size_t k = 0; k < l.size(); ++k) {
            const char ch = l[k];
            if (quoted) {
                if (ch == '"' && k + 1 < l.size() && l[k + 1] == '"') {
                    cells.back() += '"';
                    ++k;
                } else if (ch == '"') {
                    quoted = false;
                } else {
                    cells.back() += ch;
                }
            } else if (ch == '"') {
                quoted = true;
            } else if (ch == ',') {
                cells.emplace_back();
            } else {
                cells.back() += ch;
            }
        }
        return cells;
    };
    if (!std::getline(in, line)) throw InputError(path.string() + ": missing CSV header");
    out.header = split(line);
    std::size_t n = 1;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        auto cells = split(line);
        if (cells.size() != out.header.size()) {
            throw InputError(path.string() + ": line " + std::to_string(n) + " has " +
                             std::to_string(cells.size()) + " cells, header has " +
                             std::to_string(out.header.size()));
        }
        out.rows.push_back(std::move(cells));
    }
    return out;
}

const char* artifact_version() { return "obslab 1.0.0"; }

std::string text_hash(const std::string& text) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a(text.data(), text.size())));
    return buf;
}

RunDirectory::RunDirectory(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    if (!fs::exists(dir_)) {
        fs::create_directories(dir_, ec);
        if (ec) throw InputError("cannot create output directory " + dir_.string() + ": " + ec.message());
        created_dir_ = true;
    }
    require(fs::is_directory(dir_), dir_.string() + " is not a directory");
    lock_ = dir_ / ".obslab.lock";
    const int fd = ::open(lock_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
        lock_.clear();
        throw InputError("output directory " + dir_.string() +
                         " is locked by another run (remove .obslab.lock if stale)");
    }
    const std::string pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] auto n = ::write(fd, pid.data(), pid.size());
    ::close(fd);
}

RunDirectory::~RunDirectory() {
    std::error_code ec;
    if (!committed_) {
        for (const auto& f : outputs_) fs::remove(dir_ / f, ec);
    }
    if (!lock_.empty()) fs::remove(lock_, ec);
    if (!committed_ && created_dir_ && fs::is_empty(dir_, ec)) fs::remove(dir_, ec);
}

void RunDirectory::write(const std::string& name, const std::string& content) {
    const fs::path p = dir_ / name;
    {
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError("cannot write " + p.string());
        out << content;
        if (!out) throw NumericalError("write failed for " + p.string());
    }
    if (std::find(outputs_.begin(), outputs_.end(), name) == outputs_.end()) outputs_.push_back(name);
}

void RunDirectory::time_stage(const std::string& stage, double seconds) {
    timings_.emplace_back(stage, seconds);
}

Json RunDirectory::manifest(const std::string& config_hash) const {
    Json m;
    m["config_hash"] = config_hash;
    m["version"] = artifact_version();
    Json t = Json::object();
    for (const auto& [k, v] : timings_) t[k] = v;
    m["timings"] = t;
    Json files = Json::array();
    for (const auto& f : outputs_) files.push_back(f);
    files.push_back("manifest.json");
    m["outputs"] = files;
    return m;
}

void RunDirectory::commit(const std::string& config_hash) {
    write("manifest.json", manifest(config_hash));
    for (const auto& f : outputs_) {
        if (!fs::exists(dir_ / f)) throw NumericalError("declared output " + f + " is missing");
    }
    committed_ = true;
}

}  // namespace obslab
