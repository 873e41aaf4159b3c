#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "wicklab/cli/config.hpp"

namespace wicklab::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Fixed float format shared by every CSV: 17 significant digits.
std::string format_real(double v);

/// CSV with a header row, comma separators and LF line endings. Fields that
/// contain a comma, quote or newline are quoted.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);

    CsvWriter& cell(const std::string& s);
    CsvWriter& cell(double v);
    CsvWriter& cell(long long v);
    CsvWriter& cell(int v) { return cell(static_cast<long long>(v)); }
    void end_row();

    const std::string& body() const { return body_; }
    std::size_t rows() const { return rows_; }

private:
    std::size_t columns_;
    std::size_t pending_ = 0;
    std::size_t rows_ = 0;
    std::string body_;
};

std::string sha256_hex(const std::string& data);

struct OutputFile {
    std::string path;
    std::string sha256;
};

/// Writes `contents` to `path` (binary, so LF stays LF).
OutputFile write_output(const std::string& path, const std::string& contents);

/// Sidecar manifest: config echo, version, timestamp and output checksums.
std::string manifest_json(const RunConfig& cfg, const std::vector<OutputFile>& outputs);

/// Writes the CSV to cfg.output() (or `console` when empty); with a file
/// output, also writes <out>.manifest.json. Extra files join the manifest.
void emit(const RunConfig& cfg, const CsvWriter& csv, std::ostream& console,
          const std::vector<OutputFile>& extra = {});

} // namespace wicklab::cli
