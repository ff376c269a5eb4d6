#pragma once

// Pretrained word-embedding loader. Text format: one word per line followed
// by D space-separated components; D is inferred from the first line and
// enforced thereafter. Gzip-compressed files are accepted transparently.

#include <zlib.h>

#include <cmath>
#include <cstdlib>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "biaslens/types.hpp"

namespace biaslens {

struct EmbeddingStore {
  int dimension = 0;
  std::unordered_map<std::string, std::vector<double>> vectors;

  const std::vector<double>* find(const std::string& word) const {
    auto it = vectors.find(word);
    return it == vectors.end() ? nullptr : &it->second;
  }
};

namespace embdetail {

class GzLineReader {
 public:
  explicit GzLineReader(const std::string& path) : f_(gzopen(path.c_str(), "rb")) {
    if (!f_) throw Error("cannot open embedding file: " + path);
  }
  ~GzLineReader() {
    if (f_) gzclose(f_);
  }
  GzLineReader(const GzLineReader&) = delete;
  GzLineReader& operator=(const GzLineReader&) = delete;

  bool next_line(std::string& line) {
    line.clear();
    for (;;) {
      if (pos_ >= len_) {
        len_ = gzread(f_, buf_, sizeof(buf_));
        pos_ = 0;
        if (len_ <= 0) return !line.empty();
      }
      for (int i = pos_; i < len_; ++i) {
        if (buf_[i] == '\n') {
          line.append(buf_ + pos_, size_t(i - pos_));
          pos_ = i + 1;
          if (!line.empty() && line.back() == '\r') line.pop_back();
          return true;
        }
      }
      line.append(buf_ + pos_, size_t(len_ - pos_));
      pos_ = len_;
    }
  }

 private:
  gzFile f_ = nullptr;
  char buf_[1 << 16];
  int pos_ = 0;
  int len_ = 0;
};

}  // namespace embdetail

/// Loads vectors, optionally restricted to `vocabulary_filter` (lines outside
/// the filter are skipped without parsing, which keeps multi-gigabyte GloVe
/// files tractable).
inline EmbeddingStore load_embeddings(
    const std::string& path,
    const std::optional<std::set<std::string>>& vocabulary_filter = std::nullopt) {
  embdetail::GzLineReader reader(path);
  EmbeddingStore store;
  std::string line;
  size_t line_no = 0;
  std::vector<double> vec;
  while (reader.next_line(line)) {
    ++line_no;
    if (line.empty()) continue;
    size_t sp = line.find(' ');
    if (sp == std::string::npos || sp == 0)
      throw ParseError("embedding file " + path + " line " + std::to_string(line_no) +
                       ": expected 'word components...'");
    std::string word = line.substr(0, sp);
    bool wanted = !vocabulary_filter || vocabulary_filter->count(word) > 0;
    if (!wanted && store.dimension != 0) continue;

    vec.clear();
    const char* p = line.c_str() + sp;
    char* end = nullptr;
    while (*p) {
      double v = std::strtod(p, &end);
      if (end == p) break;
      if (!std::isfinite(v))
        throw ParseError("embedding file " + path + " line " + std::to_string(line_no) +
                         ": non-finite component");
      vec.push_back(v);
      p = end;
    }
    if (vec.empty())
      throw ParseError("embedding file " + path + " line " + std::to_string(line_no) +
                       ": no numeric components");
    if (store.dimension == 0)
      store.dimension = int(vec.size());
    else if (int(vec.size()) != store.dimension)
      throw ParseError("embedding file " + path + " line " + std::to_string(line_no) +
                       ": dimension " + std::to_string(vec.size()) + " != " +
                       std::to_string(store.dimension));
    if (wanted) store.vectors.emplace(std::move(word), vec);
  }
  if (store.dimension == 0) throw ParseError("embedding file " + path + " is empty");
  return store;
}

}  // namespace biaslens
