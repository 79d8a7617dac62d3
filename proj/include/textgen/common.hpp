#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace textgen {

// Base error for all engine failures. Subcommands map these to exit codes.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

class ResourceError : public Error {
public:
    explicit ResourceError(const std::string& msg) : Error(msg) {}
};

namespace utf8 {

// Decodes a UTF-8 string to unicode scalar values. Throws Error on invalid
// byte sequences, reporting the byte offset.
std::vector<char32_t> decode(const std::string& s);

// True if `s` is well-formed UTF-8.
bool valid(const std::string& s);

std::string encode(char32_t cp);
std::string encode(const std::vector<char32_t>& cps);

}  // namespace utf8

}  // namespace textgen
