#pragma once

namespace fixrank {

inline constexpr const char* kVersion = "0.1.0";
/// Version of the manifest and record layouts written by the command-line tool.
inline constexpr int kSchemaVersion = 1;

}  // namespace fixrank
