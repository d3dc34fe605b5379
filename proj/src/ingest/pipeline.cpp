#include "kilm/ingest/pipeline.hpp"

#include <algorithm>
#include <regex>

#include "kilm/ingest/dump_reader.hpp"
#include "kilm/ingest/knowledge_table.hpp"
#include "kilm/ingest/serialize.hpp"
#include "kilm/util/parallel.hpp"

namespace kilm::ingest {

Json IngestReport::to_json() const {
  Json j;
  j["pages"] = pages;
  j["articles"] = articles;
  j["redirects"] = redirects;
  j["skipped_by_regex"] = skipped_by_regex;
  j["non_article_pages"] = non_article_pages;
  j["markup_warnings"] = markup_warnings;
  j["knowledge_entries"] = knowledge_entries;
  j["knowledge_conflicts"] = knowledge_conflicts;
  j["skipped_no_description"] = skipped_no_description;
  j["slices"] = slices;
  return j;
}

IngestReport run_ingest(const IngestOptions& options) {
  constexpr std::size_t kBatch = 1024;
  IngestReport report;
  std::optional<std::regex> skip;
  if (options.skip_title_regex) skip.emplace(*options.skip_title_regex);

  DumpReader reader(options.dump);
  RedirectMap redirects;
  std::vector<ParsedArticle> articles;
  std::vector<RawPage> batch;

  auto flush = [&] {
    std::vector<ArticleParse> parsed(batch.size());
    parallel_for(batch.size(), options.jobs, [&](std::size_t i) { parsed[i] = parse_article(batch[i]); });
    for (auto& p : parsed) {
      report.markup_warnings += p.warnings;
      articles.push_back(std::move(p.article));
    }
    batch.clear();
  };

  while (auto page = reader.next()) {
    ++report.pages;
    if (page->is_redirect) {
      if (redirects.add(page->title, page->redirect_target)) ++report.redirects;
      continue;
    }
    if (skip && std::regex_search(page->title, *skip)) {
      ++report.skipped_by_regex;
      continue;
    }
    batch.push_back(std::move(*page));
    if (batch.size() >= kBatch) flush();
  }
  flush();
  report.non_article_pages = reader.skipped_non_article_pages();

  std::stable_sort(articles.begin(), articles.end(),
                   [](const ParsedArticle& a, const ParsedArticle& b) { return a.page_id < b.page_id; });
  std::vector<std::string> titles;
  titles.reserve(articles.size());
  for (const auto& a : articles) titles.push_back(a.title);
  redirects.drop_aliases(titles);
  report.redirects = redirects.size();
  parallel_for(articles.size(), options.jobs,
               [&](std::size_t i) { resolve_link_targets(articles[i], redirects); });

  KnowledgeTable table = build_knowledge_table(articles, std::move(redirects));
  report.articles = articles.size();
  report.knowledge_entries = table.size();
  report.knowledge_conflicts = table.conflicts();
  report.skipped_no_description = table.skipped();

  std::filesystem::create_directories(options.out_dir);
  JsonlWriter article_out(options.out_dir / kArticlesFile);
  for (const auto& a : articles) article_out.write(to_json(a));
  article_out.close();
  write_knowledge_table(options.out_dir, table);

  std::vector<std::vector<DocumentSlice>> slices(articles.size());
  parallel_for(articles.size(), options.jobs, [&](std::size_t i) {
    slices[i] = slice_documents(articles[i], options.stride, options.mode);
  });
  CorpusStatsBuilder stats(table, options.stride);
  JsonlWriter slice_out(options.out_dir / kSlicesFile);
  for (const auto& per_article : slices) {
    for (const auto& s : per_article) {
      slice_out.write(to_json(s, &table));
      stats.add(s);
      ++report.slices;
    }
  }
  slice_out.close();
  write_json_file(options.out_dir / kStatsFile, to_json(stats.finish()));
  return report;
}

}  // namespace kilm::ingest
