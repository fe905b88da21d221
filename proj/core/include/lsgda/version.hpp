#pragma once

namespace lsgda {

inline constexpr const char* kVersion = "0.1.0";

// Bumped whenever the trace CSV column contract or the dataset file layout
// changes incompatibly.
inline constexpr int kTraceSchemaVersion = 1;
inline constexpr int kDatasetFormatVersion = 1;

}  // namespace lsgda
