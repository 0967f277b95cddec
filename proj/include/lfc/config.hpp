#pragma once

// Scenario configuration files: INI-style sections with `key = value` lines.
// Errors carry the line number of the offending entry.

#include "lfc/network.hpp"
#include "lfc/simulation.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lfc {

class IniFile {
public:
    struct Entry {
        std::string value;
        int line = 0;
    };

    static IniFile parse(const std::string& text, const std::string& origin = "<string>");
    static IniFile load(const std::string& path);

    [[nodiscard]] bool has(const std::string& section, const std::string& key) const;
    [[nodiscard]] const Entry* find(const std::string& section, const std::string& key) const;
    [[nodiscard]] std::vector<std::string> sections() const;
    [[nodiscard]] std::vector<std::string> keys(const std::string& section) const;
    void set(const std::string& section, const std::string& key, const std::string& value);
    [[nodiscard]] const std::string& origin() const noexcept { return origin_; }

    // Typed getters; a malformed value throws ConfigError naming origin:line.
    [[nodiscard]] std::optional<double> get_double(const std::string& section, const std::string& key) const;
    [[nodiscard]] std::optional<long> get_int(const std::string& section, const std::string& key) const;
    [[nodiscard]] std::optional<bool> get_bool(const std::string& section, const std::string& key) const;
    [[nodiscard]] std::optional<std::string> get_string(const std::string& section, const std::string& key) const;
    [[nodiscard]] std::optional<Vec> get_vec(const std::string& section, const std::string& key) const;

    [[nodiscard]] std::string dump() const;

private:
    [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& why) const;
    std::string origin_;
    std::map<std::string, std::map<std::string, Entry>> data_;
    std::vector<std::string> order_;
};

struct ScenarioConfig {
    NetworkParams network = benchmark_params();
    SimConfig sim;
};

/// Missing sections and keys keep their benchmark defaults. Unknown
/// sections or keys are rejected.
ScenarioConfig load_config(const IniFile& ini);
ScenarioConfig load_config_file(const std::string& path);

/// Fills scenario-dependent defaults left open by the file (the horizon).
void finalize_config(ScenarioConfig& cfg);

/// The fully resolved configuration as INI text (round-trips through load_config).
std::string format_config(const ScenarioConfig& cfg);

/// "1-2:28.1, 1-4:22.8" with 1-based area numbers.
std::vector<Line> parse_lines(const std::string& text);
std::vector<std::pair<int, int>> parse_edges(const std::string& text);
/// "offset | A rate phase | A rate phase"
SinusoidBankParams parse_bank(const std::string& text);

}  // namespace lfc
