#include "aitk/kvconfig.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "aitk/error.hpp"

namespace aitk {

std::string trim(std::string_view text) {
    std::size_t b = 0;
    std::size_t e = text.size();
    while (b < e && (text[b] == ' ' || text[b] == '\t' || text[b] == '\r' || text[b] == '\n')) ++b;
    while (e > b && (text[e - 1] == ' ' || text[e - 1] == '\t' || text[e - 1] == '\r' || text[e - 1] == '\n')) --e;
    return std::string(text.substr(b, e - b));
}

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == sep) {
            out.push_back(trim(text.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

std::string format_double(double value) {
    // Shortest round-trip representation; stable across runs.
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

KvConfig KvConfig::parse(std::string_view text) {
    KvConfig cfg;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        ++line_no;
        std::string_view line = text.substr(start, end - start);
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        std::string cleaned = trim(line);
        if (!cleaned.empty()) {
            auto eq = cleaned.find('=');
            if (eq == std::string::npos) {
                throw config_error("line " + std::to_string(line_no) + ": expected 'key = value'");
            }
            std::string key = trim(std::string_view(cleaned).substr(0, eq));
            std::string value = trim(std::string_view(cleaned).substr(eq + 1));
            if (key.empty()) throw config_error("line " + std::to_string(line_no) + ": empty key");
            cfg.entries_.emplace_back(std::move(key), std::move(value));
        }
        if (end == text.size()) break;
        start = end + 1;
    }
    return cfg;
}

KvConfig KvConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io, "cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void KvConfig::set(std::string key, std::string value) {
    entries_.emplace_back(std::move(key), std::move(value));
}

bool KvConfig::has(std::string_view key) const { return get(key).has_value(); }

std::optional<std::string> KvConfig::get(std::string_view key) const {
    for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
        if (it->first == key) return it->second;
    }
    return std::nullopt;
}

std::vector<std::string> KvConfig::get_all(std::string_view key) const {
    std::vector<std::string> out;
    for (const auto& [k, v] : entries_) {
        if (k == key) out.push_back(v);
    }
    return out;
}

std::string KvConfig::get_string(std::string_view key, std::string fallback) const {
    auto v = get(key);
    return v ? *v : std::move(fallback);
}

namespace {

double to_double(std::string_view key, const std::string& v) {
    double out = 0.0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(out)) {
        throw config_error("key '" + std::string(key) + "': expected a finite number, got '" + v + "'");
    }
    return out;
}

}  // namespace

double KvConfig::get_double(std::string_view key, double fallback) const {
    auto v = get(key);
    return v ? to_double(key, *v) : fallback;
}

long long KvConfig::get_int(std::string_view key, long long fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    long long out = 0;
    auto res = std::from_chars(v->data(), v->data() + v->size(), out);
    if (res.ec != std::errc() || res.ptr != v->data() + v->size()) {
        throw config_error("key '" + std::string(key) + "': expected an integer, got '" + *v + "'");
    }
    return out;
}

bool KvConfig::get_bool(std::string_view key, bool fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
    if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
    throw config_error("key '" + std::string(key) + "': expected a boolean, got '" + *v + "'");
}

std::vector<double> KvConfig::get_doubles(std::string_view key, std::vector<double> fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    std::vector<double> out;
    for (const auto& item : split(*v, ',')) out.push_back(to_double(key, item));
    return out;
}

void KvConfig::require_known(const std::vector<std::string>& known) const {
    for (const auto& [k, v] : entries_) {
        bool ok = false;
        for (const auto& name : known) {
            if (name == k || (!name.empty() && name.back() == '.' && k.rfind(name, 0) == 0)) {
                ok = true;
                break;
            }
        }
        if (!ok) throw config_error("unknown key '" + k + "'");
    }
}

std::string KvConfig::render() const {
    std::string out;
    for (const auto& [k, v] : entries_) {
        out += k;
        out += " = ";
        out += v;
        out += '\n';
    }
    return out;
}

}  // namespace aitk
