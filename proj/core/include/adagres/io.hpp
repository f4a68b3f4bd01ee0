// Copyright 2026 The AdaGReS Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adagres/core.hpp"
#include "adagres/evaluation.hpp"

// Line-delimited JSON ingestion and emission.
//
//   chunks:  {"id": str, "embedding": [num...], "tokens": int, "text": str?}
//   queries: {"id": str, "embedding": [num...], "text": str?}
//   gold:    {"query_id": str, "gold_ids": [str...]}
//
// Blank lines are ignored. Embeddings are normalized on read.
namespace adagres::io {

class ParseError : public Error {
 public:
  ParseError(std::string source, std::size_t line, const std::string& message);

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

// Whitespace-separated word count, the stand-in token length for chunk
// records that omit "tokens".
std::int64_t count_whitespace_tokens(std::string_view text);

// `warnings`, when given, receives one line per file that needed the
// whitespace token fallback.
CandidatePool read_chunks(std::istream& in, std::string_view source,
                          std::ostream* warnings = nullptr);
CandidatePool read_chunks(const std::filesystem::path& path,
                          std::ostream* warnings = nullptr);

std::vector<Query> read_queries(std::istream& in, std::string_view source);
std::vector<Query> read_queries(const std::filesystem::path& path);

std::vector<GoldReference> read_gold(std::istream& in, std::string_view source);
std::vector<GoldReference> read_gold(const std::filesystem::path& path);

void write_chunks(const CandidatePool& pool, std::ostream& out);
void write_queries(std::span<const Query> queries, std::ostream& out);
void write_gold(std::span<const GoldReference> gold, std::ostream& out);

}  // namespace adagres::io
