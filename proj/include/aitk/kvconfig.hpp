#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace aitk {

// Flat "key = value" text. '#' starts a comment. Keys may repeat; scalar
// lookups return the last occurrence so later lines override earlier ones.
class KvConfig {
public:
    KvConfig() = default;

    static KvConfig parse(std::string_view text);
    static KvConfig load(const std::string& path);

    void set(std::string key, std::string value);
    bool has(std::string_view key) const;

    std::optional<std::string> get(std::string_view key) const;
    std::vector<std::string> get_all(std::string_view key) const;

    std::string get_string(std::string_view key, std::string fallback) const;
    double get_double(std::string_view key, double fallback) const;
    long long get_int(std::string_view key, long long fallback) const;
    bool get_bool(std::string_view key, bool fallback) const;
    std::vector<double> get_doubles(std::string_view key, std::vector<double> fallback) const;

    // Errors on any key not in `known` (prefix match when an entry ends in '.').
    void require_known(const std::vector<std::string>& known) const;

    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
    std::string render() const;

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

std::vector<std::string> split(std::string_view text, char sep);
std::string trim(std::string_view text);
std::string format_double(double value);

}  // namespace aitk
