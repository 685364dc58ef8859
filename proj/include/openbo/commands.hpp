// Subcommand drivers shared by the C API and the command-line tool.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "openbo/scan.hpp"

namespace openbo::cli {

// Flat key=value configuration. Unknown keys raise InvalidConfig.
class RunConfig {
public:
    void set(const std::string& key, const std::string& value);
    // Lines "key = value"; '#' starts a comment. Keys already set are kept,
    // so flags applied first take precedence over the file.
    void load_file(const std::string& path, bool keep_existing = true);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::map<std::string, std::string>& values() const noexcept { return values_; }

    double number(const std::string& key, double fallback) const;
    std::size_t count(const std::string& key, std::size_t fallback) const;
    std::string text(const std::string& key, const std::string& fallback) const;
    std::vector<double> list(const std::string& key, const std::vector<double>& fallback) const;

private:
    std::map<std::string, std::string> values_;
};

const std::vector<std::string>& known_keys();
const std::vector<std::string>& subcommands();

// Runs one subcommand. The table header carries "subcommand", "version",
// every resolved parameter and "observable" naming the summary column.
ScanTable run_command(const std::string& subcommand, const RunConfig& config);

} // namespace openbo::cli
