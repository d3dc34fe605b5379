#include "kilm/ingest/serialize.hpp"

#include "kilm/error.hpp"

namespace kilm::ingest {

Json to_json(const ParsedArticle& a) {
  Json links = Json::array();
  for (const auto& l : a.links) {
    links.push_back({{"start", l.start}, {"end", l.end}, {"surface", l.surface}, {"target", l.target_title}});
  }
  Json j;
  j["page_id"] = a.page_id;
  j["title"] = a.title;
  j["clean_text"] = a.clean_text;
  j["summary_end"] = a.summary_end;
  j["links"] = std::move(links);
  if (a.short_description) {
    j["short_description"] = a.short_description->text;
    j["description_source"] = to_string(a.short_description->source);
  } else {
    j["short_description"] = nullptr;
    j["description_source"] = nullptr;
  }
  return j;
}

ParsedArticle article_from_json(const Json& j) {
  ParsedArticle a;
  a.page_id = j.at("page_id").get<std::int64_t>();
  a.title = j.at("title").get<std::string>();
  a.clean_text = j.at("clean_text").get<std::string>();
  a.summary_end = j.at("summary_end").get<std::size_t>();
  for (const auto& l : j.at("links")) {
    a.links.push_back({l.at("start").get<std::size_t>(), l.at("end").get<std::size_t>(),
                       l.at("surface").get<std::string>(), l.at("target").get<std::string>()});
  }
  if (j.contains("short_description") && !j["short_description"].is_null()) {
    a.short_description = ShortDescription{j["short_description"].get<std::string>(),
                                           description_source_from(j.at("description_source").get<std::string>())};
  }
  if (a.summary_end > a.clean_text.size()) throw FormatError("summary_end beyond clean_text");
  for (const auto& l : a.links) {
    if (l.end > a.clean_text.size() || l.start >= l.end ||
        a.clean_text.compare(l.start, l.end - l.start, l.surface) != 0) {
      throw FormatError("link span does not match clean_text in article '" + a.title + "'");
    }
  }
  return a;
}

Json to_json(const KnowledgeEntry& e) {
  Json j;
  j["entity"] = e.entity;
  j["description"] = e.description;
  j["source"] = to_string(e.source);
  return j;
}

Json to_json(const DocumentSlice& s, const KnowledgeTable* table) {
  Json mentions = Json::array();
  for (const auto& m : s.mentions) {
    Json jm;
    jm["token_start"] = m.token_start;
    jm["token_end"] = m.token_end;
    jm["surface"] = m.surface;
    jm["entity"] = m.entity;
    if (table) jm["known"] = table->contains(m.entity);
    mentions.push_back(std::move(jm));
  }
  Json j;
  j["doc_id"] = s.doc_id;
  j["title"] = s.title;
  j["slice_index"] = s.slice_index;
  j["text"] = render(s.tokens);
  j["tokens"] = token_texts(s.tokens);
  j["mentions"] = std::move(mentions);
  return j;
}

DocumentSlice slice_from_json(const Json& j) {
  DocumentSlice s;
  s.doc_id = j.at("doc_id").get<std::string>();
  s.title = j.value("title", std::string{});
  s.slice_index = j.at("slice_index").get<std::size_t>();
  auto texts = j.at("tokens").get<std::vector<std::string>>();
  s.tokens = align_tokens(j.at("text").get<std::string>(), texts);
  for (const auto& m : j.at("mentions")) {
    MentionSpan span{m.at("token_start").get<std::size_t>(), m.at("token_end").get<std::size_t>(),
                     m.at("surface").get<std::string>(), m.at("entity").get<std::string>()};
    if (span.token_end <= span.token_start || span.token_end > s.tokens.size()) {
      throw FormatError("mention outside slice " + s.doc_id + "/" + std::to_string(s.slice_index));
    }
    s.mentions.push_back(std::move(span));
  }
  return s;
}

Json to_json(const CorpusStats& st) {
  Json freq = Json::object();
  for (const auto& [entity, n] : st.entity_frequency) freq[entity] = n;
  Json j;
  j["stride"] = st.stride;
  j["slice_count"] = st.slice_count;
  j["mention_count"] = st.mention_count;
  j["knowledge_entries"] = st.knowledge_entries;
  j["distinct_entities"] = st.entity_frequency.size();
  j["mean_description_words"] = st.mean_description_words;
  j["description_overhead"] = st.description_overhead();
  j["description_overhead_percent"] = 100.0 * st.description_overhead();
  j["singleton_entity_fraction"] = st.singleton_entity_fraction();
  j["entities_over_1000"] = st.entities_with_frequency_above(1000);
  j["entity_frequency"] = std::move(freq);
  return j;
}

CorpusStats stats_from_json(const Json& j) {
  CorpusStats st;
  st.stride = j.at("stride").get<std::size_t>();
  st.slice_count = j.at("slice_count").get<std::size_t>();
  st.mention_count = j.value("mention_count", std::size_t{0});
  st.knowledge_entries = j.value("knowledge_entries", std::size_t{0});
  st.mean_description_words = j.at("mean_description_words").get<double>();
  for (const auto& [entity, n] : j.at("entity_frequency").items()) {
    st.entity_frequency[entity] = n.get<std::size_t>();
  }
  return st;
}

std::vector<ParsedArticle> read_articles(const std::filesystem::path& path) {
  std::vector<ParsedArticle> out;
  for_each_jsonl(path, [&](const Json& j, std::size_t) { out.push_back(article_from_json(j)); });
  return out;
}

std::vector<DocumentSlice> read_slices(const std::filesystem::path& path) {
  std::vector<DocumentSlice> out;
  for_each_jsonl(path, [&](const Json& j, std::size_t) { out.push_back(slice_from_json(j)); });
  return out;
}

KnowledgeTable read_knowledge_table(const std::filesystem::path& corpus_dir) {
  KnowledgeTable table;
  for_each_jsonl(corpus_dir / kKnowledgeFile, [&](const Json& j, std::size_t) {
    table.add(j.at("entity").get<std::string>(), j.at("description").get<std::string>(),
              description_source_from(j.value("source", std::string("template"))));
  });
  RedirectMap redirects;
  if (std::filesystem::exists(corpus_dir / kRedirectsFile)) {
    for_each_jsonl(corpus_dir / kRedirectsFile, [&](const Json& j, std::size_t) {
      redirects.add(j.at("alias").get<std::string>(), j.at("target").get<std::string>());
    });
  }
  table.set_redirects(std::move(redirects));
  return table;
}

void write_knowledge_table(const std::filesystem::path& corpus_dir, const KnowledgeTable& table) {
  JsonlWriter entries(corpus_dir / kKnowledgeFile);
  for (const auto& e : table.entries()) entries.write(to_json(e));
  entries.close();
  JsonlWriter redirects(corpus_dir / kRedirectsFile);
  for (const auto& [alias, target] : table.redirects().entries()) {
    Json j;
    j["alias"] = alias;
    j["target"] = target;
    redirects.write(j);
  }
  redirects.close();
}

}  // namespace kilm::ingest
