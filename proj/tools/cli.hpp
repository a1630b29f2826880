#pragma once

#include <string>
#include <vector>

namespace oamfso::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;      // I/O, corrupt input, numerical fault
inline constexpr int kUsage = 2;        // bad flags or config values
inline constexpr int kFlagRaised = 3;   // cap hit or rank deficiency without --allow-flags

int run(int argc, char** argv);
int run(const std::vector<std::string>& args);  // args[0] is the program name

/// "a:b" (inclusive integer range) or "a,b,c".
std::vector<int> parse_int_list(const std::string& text);
/// "start:step:stop" (inclusive) or "a,b,c".
std::vector<double> parse_double_list(const std::string& text);

/// Reads flat key=value lines ('#' comments) and turns them into
/// "--key=value" arguments.
std::vector<std::string> config_arguments(const std::string& path);

std::string version();

}  // namespace oamfso::cli
