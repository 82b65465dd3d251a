// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace skyground::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Writes via a sibling temp file and rename, so readers never see a partial file.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::filesystem::path data_dir();

}  // namespace skyground::cli
