#pragma once

// Plain declarative key/value configuration: one "key = value" per line,
// '#' starts a comment. Values are scalars, words, or whitespace-separated
// number lists. Spatial profiles are given as truncated Fourier coefficient
// lists "a0 a1 b1 a2 b2 ..." meaning
//
//     g(x) = a0 + sum_k ( a_k cos(2 pi k x) + b_k sin(2 pi k x) ).

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "kinavg/fourier.hpp"

namespace kinavg {

class Config {
public:
    Config() = default;

    static Config from_file(const std::string& path);
    static Config from_string(const std::string& text);

    bool has(const std::string& key) const { return kv_.count(key) != 0; }
    void set(const std::string& key, const std::string& value) { kv_[key] = value; }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_list(const std::string& key,
                                 const std::vector<double>& fallback) const;

    // FNV-1a hash over sorted normalized entries; stable across runs.
    std::uint64_t hash() const;
    const std::map<std::string, std::string>& entries() const { return kv_; }

private:
    std::map<std::string, std::string> kv_;
};

// Build an n-mode spectrum from a cosine/sine coefficient list (dim = 1).
Spectrum profile_from_coeffs(const std::vector<double>& coeffs, int n);

}  // namespace kinavg
