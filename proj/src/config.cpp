#include "kinavg/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace kinavg {

namespace {
std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}
}  // namespace

Config Config::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_string(ss.str());
}

Config Config::from_string(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw std::runtime_error("config line " + std::to_string(lineno) + ": empty key");
        cfg.kv_[key] = val;
    }
    return cfg;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    return std::stod(it->second);
}

int Config::get_int(const std::string& key, int fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    return std::stoi(it->second);
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    const std::string& v = it->second;
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::runtime_error("config key '" + key + "': expected a boolean, got '" + v + "'");
}

std::vector<double> Config::get_list(const std::string& key,
                                     const std::vector<double>& fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    std::vector<double> out;
    std::istringstream ss(it->second);
    double v;
    while (ss >> v) out.push_back(v);
    return out;
}

std::uint64_t Config::hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    auto feed = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ULL;
        }
    };
    for (const auto& [k, v] : kv_) {
        feed(k);
        feed("=");
        feed(v);
        feed("\n");
    }
    return h;
}

Spectrum profile_from_coeffs(const std::vector<double>& coeffs, int n) {
    Spectrum g(1, n);
    if (!coeffs.empty()) g.at(0) = cplx(coeffs[0], 0.0);
    int k = 1;
    for (std::size_t i = 1; i < coeffs.size(); i += 2, ++k) {
        if (k >= n / 2) throw std::runtime_error("profile_from_coeffs: too many modes for n");
        const double a = coeffs[i];
        const double b = i + 1 < coeffs.size() ? coeffs[i + 1] : 0.0;
        // a cos + b sin = (a/2 - i b/2) e^{+} + (a/2 + i b/2) e^{-}
        g.at(k) = cplx(0.5 * a, -0.5 * b);
        g.at(-k) = cplx(0.5 * a, 0.5 * b);
    }
    return g;
}

}  // namespace kinavg
