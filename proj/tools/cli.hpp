#pragma once

// Command layer of the resurgence tool: config ingestion, dispatch and
// deterministic result files.

#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace resurgence::cli {

using json = nlohmann::ordered_json;

/// Malformed input; the message names the offending field or line.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum ExitCode { kSuccess = 0, kCheckFailed = 1, kInputError = 2, kNumericAbort = 3 };

struct RunConfig {
    std::string command;
    std::filesystem::path input;
    std::filesystem::path out_dir = "out";
    std::optional<int> order;
    std::optional<int> kmax;
    std::optional<double> horizon;
    std::optional<double> delta;
    std::optional<double> arclen;
    std::optional<std::size_t> nodes;
    std::optional<double> tol;
    unsigned seed = 1;
    bool rational = false;
    json document;  // parsed input file

    /// Reads and parses `input`; throws InputError with a line number.
    void load();
    /// Rejects option values outside module preconditions.
    void validate() const;
    /// Effective options after merging the file's "options" with flags.
    json effective() const;
};

/// Runs one command; returns the exit code and reports errors on `log`.
int run(RunConfig config, std::ostream& log);

/// JSON text with floats at 17 significant digits and keys in insertion order.
std::string format_json(const json& j, int indent = 2);

/// Writes `content` to a temporary sibling and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace resurgence::cli
