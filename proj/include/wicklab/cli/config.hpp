#pragma once

// Run configuration for the wicklab command-line tool.
//
// Every command declares a flat list of parameters. Values resolve as
// command-line flag > config file (key=value lines) > default; keys the command
// does not declare are rejected.

#include <map>
#include <string>
#include <vector>

namespace wicklab::cli {

enum class ParamKind { integer, real, text, int_list };

struct ParamSpec {
    std::string key;
    ParamKind kind;
    std::string default_value;
    std::string help;
};

struct CommandSpec {
    std::string name;
    std::string help;
    std::vector<ParamSpec> params;
};

/// All commands with their parameters, in display order.
const std::vector<CommandSpec>& command_specs();
const CommandSpec& command_spec(const std::string& name);

class RunConfig {
public:
    std::string command;
    std::map<std::string, std::string> values;   // resolved key -> text
    std::map<std::string, std::string> sources;  // key -> "default" | "file" | "flag"
    std::string help_text;                       // non-empty when --help was requested

    /// Output CSV path; empty means standard output.
    std::string output() const { return text("out"); }

    long long integer(const std::string& key) const;
    double real(const std::string& key) const;
    std::string text(const std::string& key) const;
    std::vector<int> int_list(const std::string& key) const;
    bool has(const std::string& key) const { return values.count(key) > 0; }
};

/// Reads a flat key=value file; '#' starts a comment, blank lines are skipped.
std::map<std::string, std::string> read_config_file(const std::string& path);

/// Parses command-line arguments (without the program name). Throws
/// wicklab::Error with ErrorCode::config on malformed input or unknown keys.
RunConfig parse_config(const std::vector<std::string>& args);

} // namespace wicklab::cli
