#pragma once

namespace biaslens {

inline constexpr const char* kVersion = "1.0.0";

// Format versions of the bundled data files. Loaders reject mismatches.
inline constexpr int kTaggerModelVersion = 1;
inline constexpr const char* kAdjectiveLexiconVersion = "1";
inline constexpr const char* kPolarityLexiconVersion = "1";

}  // namespace biaslens
