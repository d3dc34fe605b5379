#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kilm/ingest/article.hpp"

namespace kilm::ingest {

// Alias title -> canonical title. Canonical titles never appear as keys, so
// resolving a canonical title returns it unchanged.
class RedirectMap {
 public:
  // Titles are canonicalized. Self-redirects are ignored. Returns false when
  // the alias was already present (first one wins).
  bool add(std::string_view alias, std::string_view target);

  // Removes aliases that collide with real article titles.
  void drop_aliases(std::span<const std::string> article_titles);

  // Follows redirect chains (bounded; cycles resolve to the last title seen).
  std::string resolve(std::string_view title) const;

  std::size_t size() const { return order_.size(); }
  const std::vector<std::pair<std::string, std::string>>& entries() const { return order_; }

 private:
  std::unordered_map<std::string, std::string> map_;
  std::vector<std::pair<std::string, std::string>> order_;
};

struct KnowledgeEntry {
  std::string entity;
  std::string description;
  DescriptionSource source = DescriptionSource::Template;

  friend bool operator==(const KnowledgeEntry&, const KnowledgeEntry&) = default;
};

// Canonical entity title -> short description.
class KnowledgeTable {
 public:
  // Returns false (and counts a conflict) if the entity already exists.
  // Descriptions are collapsed to one line; empty ones are rejected.
  bool add(std::string_view entity, std::string_view description, DescriptionSource source);

  // Exact canonical key.
  const KnowledgeEntry* find(std::string_view entity) const;
  // Canonicalizes and follows redirects first.
  const KnowledgeEntry* lookup(std::string_view title) const;
  bool contains(std::string_view entity) const { return find(entity) != nullptr; }

  void set_redirects(RedirectMap redirects) { redirects_ = std::move(redirects); }
  const RedirectMap& redirects() const { return redirects_; }

  const std::vector<KnowledgeEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::size_t conflicts() const { return conflicts_; }
  std::size_t skipped() const { return skipped_; }
  void count_skipped() { ++skipped_; }

 private:
  std::vector<KnowledgeEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
  RedirectMap redirects_;
  std::size_t conflicts_ = 0;
  std::size_t skipped_ = 0;
};

// One entry per article with a description; articles without one are
// counted as skipped, duplicate titles keep the first occurrence.
KnowledgeTable build_knowledge_table(std::span<const ParsedArticle> articles, RedirectMap redirects);

// Rewrites every link target to its canonical title via the redirect map.
void resolve_link_targets(ParsedArticle& article, const RedirectMap& redirects);

}  // namespace kilm::ingest
