#include "kilm/ingest/knowledge_table.hpp"


#include "kilm/tokenizer.hpp"

namespace kilm::ingest {

bool RedirectMap::add(std::string_view alias, std::string_view target) {
  std::string a = canonical_title(alias);
  std::string t = canonical_title(target);
  if (auto hash = t.find('#'); hash != std::string::npos) t = collapse_whitespace(t.substr(0, hash));
  if (a.empty() || t.empty() || a == t) return false;
  auto [it, inserted] = map_.emplace(a, t);
  if (!inserted) return false;
  order_.emplace_back(std::move(a), std::move(t));
  return true;
}

void RedirectMap::drop_aliases(std::span<const std::string> article_titles) {
  bool changed = false;
  for (const auto& title : article_titles) {
    if (map_.erase(title) > 0) changed = true;
  }
  if (!changed) return;
  std::erase_if(order_, [&](const auto& e) { return !map_.contains(e.first); });
}

std::string RedirectMap::resolve(std::string_view title) const {
  std::string current = canonical_title(title);
  for (int hops = 0; hops < 8; ++hops) {
    auto it = map_.find(current);
    if (it == map_.end()) break;
    current = it->second;
  }
  return current;
}

bool KnowledgeTable::add(std::string_view entity, std::string_view description, DescriptionSource source) {
  std::string key(entity);
  std::string desc = collapse_whitespace(description);
  if (key.empty() || desc.empty()) {
    ++skipped_;
    return false;
  }
  if (index_.contains(key)) {
    ++conflicts_;
    return false;
  }
  index_.emplace(key, entries_.size());
  entries_.push_back({std::move(key), std::move(desc), source});
  return true;
}

const KnowledgeEntry* KnowledgeTable::find(std::string_view entity) const {
  auto it = index_.find(std::string(entity));
  return it == index_.end() ? nullptr : &entries_[it->second];
}

const KnowledgeEntry* KnowledgeTable::lookup(std::string_view title) const {
  return find(redirects_.resolve(title));
}

KnowledgeTable build_knowledge_table(std::span<const ParsedArticle> articles, RedirectMap redirects) {
  KnowledgeTable table;
  for (const auto& a : articles) {
    if (!a.short_description) {
      table.count_skipped();
      continue;
    }
    table.add(a.title, a.short_description->text, a.short_description->source);
  }
  table.set_redirects(std::move(redirects));
  return table;
}

void resolve_link_targets(ParsedArticle& article, const RedirectMap& redirects) {
  for (auto& link : article.links) link.target_title = redirects.resolve(link.target_title);
}

}  // namespace kilm::ingest
