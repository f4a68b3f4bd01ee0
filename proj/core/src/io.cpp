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

#include "adagres/io.hpp"

#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace adagres::io {
namespace {

using json = nlohmann::json;

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return in;
}

// Calls `fn(object, line_number)` for every non-blank line.
template <typename Fn>
void for_each_record(std::istream& in, std::string_view source, Fn&& fn) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json object;
    try {
      object = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string(source), number,
                       std::string("malformed JSON: ") + e.what());
    }
    if (!object.is_object()) {
      throw ParseError(std::string(source), number, "expected a JSON object");
    }
    try {
      fn(object, number);
    } catch (const ParseError&) {
      throw;
    } catch (const json::exception& e) {
      throw ParseError(std::string(source), number, e.what());
    } catch (const Error& e) {
      throw ParseError(std::string(source), number, e.what());
    }
  }
}

std::string required_string(const json& object, const char* key) {
  auto it = object.find(key);
  if (it == object.end()) throw Error(std::string("missing \"") + key + "\"");
  if (!it->is_string()) throw Error(std::string("\"") + key + "\" must be a string");
  return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& object, const char* key) {
  auto it = object.find(key);
  if (it == object.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw Error(std::string("\"") + key + "\" must be a string");
  return it->get<std::string>();
}

Embedding read_embedding(const json& object, const std::string& label) {
  auto it = object.find("embedding");
  if (it == object.end()) throw Error("missing \"embedding\"");
  if (!it->is_array()) throw Error("\"embedding\" must be an array");
  std::vector<double> raw;
  raw.reserve(it->size());
  for (const auto& v : *it) {
    if (!v.is_number()) throw Error("\"embedding\" must hold only numbers");
    raw.push_back(v.get<double>());
  }
  return Embedding::normalize(std::span<const double>(raw), label);
}

json embedding_json(const Embedding& e) {
  json arr = json::array();
  for (double v : e.values()) arr.push_back(v);
  return arr;
}

}  // namespace

ParseError::ParseError(std::string source, std::size_t line,
                       const std::string& message)
    : Error(source + ":" + std::to_string(line) + ": " + message),
      source_(std::move(source)),
      line_(line) {}

std::int64_t count_whitespace_tokens(std::string_view text) {
  std::istringstream words{std::string(text)};
  std::int64_t count = 0;
  std::string word;
  while (words >> word) ++count;
  return count;
}

CandidatePool read_chunks(std::istream& in, std::string_view source,
                          std::ostream* warnings) {
  std::vector<Chunk> chunks;
  std::set<std::string> seen;
  bool fallback_used = false;
  for_each_record(in, source, [&](const json& object, std::size_t) {
    std::string id = required_string(object, "id");
    Embedding embedding = read_embedding(object, id);
    Chunk chunk{std::move(id), std::move(embedding), 1,
                optional_string(object, "text")};
    if (!chunks.empty() &&
        chunk.embedding.dimension() != chunks.front().embedding.dimension()) {
      throw Error("chunk '" + chunk.id + "' has dimension " +
                  std::to_string(chunk.embedding.dimension()) + ", expected " +
                  std::to_string(chunks.front().embedding.dimension()));
    }
    if (!seen.insert(chunk.id).second) {
      throw Error("duplicate chunk id '" + chunk.id + "'");
    }
    auto tokens = object.find("tokens");
    if (tokens != object.end()) {
      if (!tokens->is_number_integer()) throw Error("\"tokens\" must be an integer");
      chunk.token_length = tokens->get<std::int64_t>();
    } else {
      if (!chunk.text) throw Error("chunk '" + chunk.id + "' has neither \"tokens\" nor \"text\"");
      chunk.token_length = count_whitespace_tokens(*chunk.text);
      fallback_used = true;
    }
    if (chunk.token_length < 1) {
      throw Error("chunk '" + chunk.id + "' has token length " +
                  std::to_string(chunk.token_length) + " (must be >= 1)");
    }
    chunks.push_back(std::move(chunk));
  });
  if (fallback_used && warnings != nullptr) {
    *warnings << "warning: " << source
              << ": some chunks lack \"tokens\"; using whitespace word counts\n";
  }
  return CandidatePool(std::move(chunks));
}

CandidatePool read_chunks(const std::filesystem::path& path,
                          std::ostream* warnings) {
  auto in = open(path);
  return read_chunks(in, path.string(), warnings);
}

std::vector<Query> read_queries(std::istream& in, std::string_view source) {
  std::vector<Query> queries;
  for_each_record(in, source, [&](const json& object, std::size_t) {
    std::string id = required_string(object, "id");
    Embedding e = read_embedding(object, id);
    queries.push_back(Query{std::move(id), std::move(e), optional_string(object, "text")});
  });
  return queries;
}

std::vector<Query> read_queries(const std::filesystem::path& path) {
  auto in = open(path);
  return read_queries(in, path.string());
}

std::vector<GoldReference> read_gold(std::istream& in, std::string_view source) {
  std::vector<GoldReference> gold;
  for_each_record(in, source, [&](const json& object, std::size_t) {
    GoldReference ref;
    ref.query_id = required_string(object, "query_id");
    auto ids = object.find("gold_ids");
    if (ids == object.end() || !ids->is_array()) {
      throw Error("\"gold_ids\" must be an array of strings");
    }
    for (const auto& id : *ids) {
      if (!id.is_string()) throw Error("\"gold_ids\" must be an array of strings");
      ref.gold_chunk_ids.insert(id.get<std::string>());
    }
    gold.push_back(std::move(ref));
  });
  return gold;
}

std::vector<GoldReference> read_gold(const std::filesystem::path& path) {
  auto in = open(path);
  return read_gold(in, path.string());
}

void write_chunks(const CandidatePool& pool, std::ostream& out) {
  for (const Chunk& c : pool) {
    json object = {{"id", c.id},
                   {"embedding", embedding_json(c.embedding)},
                   {"tokens", c.token_length}};
    if (c.text) object["text"] = *c.text;
    out << object.dump() << '\n';
  }
}

void write_queries(std::span<const Query> queries, std::ostream& out) {
  for (const Query& q : queries) {
    json object = {{"id", q.id}, {"embedding", embedding_json(q.embedding)}};
    if (q.text) object["text"] = *q.text;
    out << object.dump() << '\n';
  }
}

void write_gold(std::span<const GoldReference> gold, std::ostream& out) {
  for (const GoldReference& g : gold) {
    json object = {{"query_id", g.query_id},
                   {"gold_ids", std::vector<std::string>(g.gold_chunk_ids.begin(),
                                                         g.gold_chunk_ids.end())}};
    out << object.dump() << '\n';
  }
}

}  // namespace adagres::io
