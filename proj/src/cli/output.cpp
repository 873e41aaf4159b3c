#include "wicklab/cli/output.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

#include <json.hpp>
#include <openssl/evp.h>

#include "wicklab/error.hpp"
#include "wicklab/parallel.hpp"

namespace wicklab::cli {

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
    for (const auto& h : header) cell(h);
    end_row();
    rows_ = 0;
}

CsvWriter& CsvWriter::cell(const std::string& s) {
    if (pending_ > 0) body_ += ',';
    if (s.find_first_of(",\"\n") != std::string::npos) {
        body_ += '"';
        for (char c : s) {
            if (c == '"') body_ += '"';
            body_ += c;
        }
        body_ += '"';
    } else {
        body_ += s;
    }
    ++pending_;
    return *this;
}

CsvWriter& CsvWriter::cell(double v) { return cell(format_real(v)); }

CsvWriter& CsvWriter::cell(long long v) { return cell(std::to_string(v)); }

void CsvWriter::end_row() {
    require(pending_ == columns_, ErrorCode::io,
            "CSV row has " + std::to_string(pending_) + " cells, header has " + std::to_string(columns_));
    body_ += '\n';
    pending_ = 0;
    ++rows_;
}

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    require(EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) == 1, ErrorCode::io,
            "SHA-256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

OutputFile write_output(const std::string& path, const std::string& contents) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(f), ErrorCode::io, "cannot open " + path + " for writing");
    f << contents;
    f.close();
    require(!f.fail(), ErrorCode::io, "failed writing " + path);
    return {path, sha256_hex(contents)};
}

std::string manifest_json(const RunConfig& cfg, const std::vector<OutputFile>& outputs) {
    nlohmann::ordered_json j;
    j["command"] = cfg.command;
    nlohmann::ordered_json c;
    for (const auto& [k, v] : cfg.values) c[k] = v;
    j["config"] = c;
    nlohmann::ordered_json src;
    for (const auto& [k, v] : cfg.sources) src[k] = v;
    j["config_sources"] = src;
    j["version"] = kVersion;
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char ts[32];
    std::strftime(ts, sizeof ts, "%Y-%m-%dT%H:%M:%SZ", &tm);
    j["timestamp"] = ts;
    j["threads"] = thread_count();
    auto outs = nlohmann::ordered_json::array();
    for (const auto& o : outputs) outs.push_back({{"path", o.path}, {"sha256", o.sha256}});
    j["outputs"] = outs;
    return j.dump(2) + "\n";
}

void emit(const RunConfig& cfg, const CsvWriter& csv, std::ostream& console, const std::vector<OutputFile>& extra) {
    const std::string path = cfg.output();
    if (path.empty()) {
        console << csv.body();
        return;
    }
    std::vector<OutputFile> outputs{write_output(path, csv.body())};
    outputs.insert(outputs.end(), extra.begin(), extra.end());
    write_output(path + ".manifest.json", manifest_json(cfg, outputs));
}

} // namespace wicklab::cli
