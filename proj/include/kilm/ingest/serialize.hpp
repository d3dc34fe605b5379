#pragma once

#include <filesystem>
#include <vector>

#include "kilm/ingest/article.hpp"
#include "kilm/ingest/corpus_stats.hpp"
#include "kilm/ingest/knowledge_table.hpp"
#include "kilm/ingest/slicing.hpp"
#include "kilm/util/jsonl.hpp"

namespace kilm::ingest {

// File names inside a corpus directory.
inline constexpr const char* kArticlesFile = "articles.jsonl";
inline constexpr const char* kKnowledgeFile = "knowledge_table.jsonl";
inline constexpr const char* kRedirectsFile = "redirects.jsonl";
inline constexpr const char* kSlicesFile = "slices.jsonl";
inline constexpr const char* kStatsFile = "stats.json";

Json to_json(const ParsedArticle& article);
ParsedArticle article_from_json(const Json& j);

Json to_json(const KnowledgeEntry& entry);

// `table`, when given, adds a per-mention "known" flag (entity has a description).
Json to_json(const DocumentSlice& slice, const KnowledgeTable* table = nullptr);
DocumentSlice slice_from_json(const Json& j);

Json to_json(const CorpusStats& stats);
CorpusStats stats_from_json(const Json& j);

std::vector<ParsedArticle> read_articles(const std::filesystem::path& path);
std::vector<DocumentSlice> read_slices(const std::filesystem::path& path);

// Reads knowledge_table.jsonl and, when present next to it, redirects.jsonl.
KnowledgeTable read_knowledge_table(const std::filesystem::path& corpus_dir);

void write_knowledge_table(const std::filesystem::path& corpus_dir, const KnowledgeTable& table);

}  // namespace kilm::ingest
