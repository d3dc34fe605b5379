#include "kilm/prompt/benchmark.hpp"

#include <string>

#include "kilm/error.hpp"
#include "kilm/ingest/wikitext.hpp"

namespace kilm::prompt {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  for (;;) {
    auto tab = line.find('\t', pos);
    out.push_back(line.substr(pos, tab == std::string::npos ? std::string::npos : tab - pos));
    if (tab == std::string::npos) break;
    pos = tab + 1;
  }
  return out;
}

// Title after the first `commas` commas.
std::string title_after(const std::string& field, int commas) {
  std::size_t pos = 0;
  for (int i = 0; i < commas; ++i) {
    pos = field.find(',', pos);
    if (pos == std::string::npos) return {};
    ++pos;
  }
  return field.substr(pos);
}

std::vector<std::string> answers_of(const Json& a) {
  if (a.is_string()) return {a.get<std::string>()};
  return a.get<std::vector<std::string>>();
}

}  // namespace

EDInstance ed_instance_from_json(const Json& j, const std::string& fallback_id) {
  try {
    EDInstance inst;
    inst.id = j.contains("id") ? j.at("id").get<std::string>() : fallback_id;
    inst.context = j.at("context").get<std::string>();
    const auto& m = j.at("mention");
    inst.mention.text = m.at("text").get<std::string>();
    if (m.contains("start") && m.contains("end")) {
      inst.mention.start = m.at("start").get<std::size_t>();
      inst.mention.end = m.at("end").get<std::size_t>();
    } else {
      auto at = inst.context.find(inst.mention.text);
      if (at == std::string::npos || inst.mention.text.empty()) {
        throw SpanError("mention '" + inst.mention.text + "' not found in context of " + inst.id);
      }
      inst.mention.start = at;
      inst.mention.end = at + inst.mention.text.size();
    }
    if (auto it = j.find("candidates"); it != j.end()) {
      for (const auto& c : *it) {
        inst.candidates.push_back({c.at("title").get<std::string>(), c.at("description").get<std::string>()});
      }
    }
    if (auto it = j.find("gold_title"); it != j.end() && !it->is_null()) {
      inst.gold_title = it->get<std::string>();
      for (std::size_t i = 0; i < inst.candidates.size(); ++i) {
        if (inst.candidates[i].title == *inst.gold_title) {
          inst.gold_index = i;
          break;
        }
      }
    }
    inst.in_kb = j.value("in_kb", inst.gold_title.has_value());
    return inst;
  } catch (const Json::exception& e) {
    throw FormatError("bad ED instance " + fallback_id + ": " + e.what());
  }
}

Json to_json(const EDInstance& inst) {
  Json j;
  j["id"] = inst.id;
  j["context"] = inst.context;
  j["mention"] = {{"text", inst.mention.text}, {"start", inst.mention.start}, {"end", inst.mention.end}};
  Json cands = Json::array();
  for (const auto& c : inst.candidates) cands.push_back({{"title", c.title}, {"description", c.description}});
  j["candidates"] = std::move(cands);
  if (inst.gold_title) j["gold_title"] = *inst.gold_title;
  j["in_kb"] = inst.in_kb;
  return j;
}

std::vector<EDInstance> read_ed_instances(const std::filesystem::path& path) {
  std::vector<EDInstance> out;
  for_each_jsonl(path, [&](const Json& j, std::size_t line) {
    out.push_back(ed_instance_from_json(j, "ed-" + std::to_string(line)));
  });
  return out;
}

std::vector<QAExemplar> read_qa_pool(const std::filesystem::path& path) {
  std::vector<QAExemplar> out;
  for_each_jsonl(path, [&](const Json& j, std::size_t line) {
    try {
      QAExemplar ex{j.at("question").get<std::string>(), answers_of(j.at("answer"))};
      if (trim(ex.question).empty() || ex.answers.empty() || trim(ex.answers.front()).empty()) {
        throw FormatError("empty question or answer");
      }
      out.push_back(std::move(ex));
    } catch (const std::exception& e) {
      throw FormatError(path.string() + ":" + std::to_string(line) + ": " + e.what());
    }
  });
  return out;
}

std::vector<ClozeInstance> read_cloze(const std::filesystem::path& path) {
  std::vector<ClozeInstance> out;
  for_each_jsonl(path, [&](const Json& j, std::size_t line) {
    try {
      ClozeInstance c;
      c.id = j.contains("id") ? j.at("id").get<std::string>() : "lama-" + std::to_string(line);
      if (j.contains("statement")) {
        c.statement = j.at("statement").get<std::string>();
      } else {
        const auto& s = j.at("masked_sentence");
        c.statement = s.is_array() ? s.at(0).get<std::string>() : s.get<std::string>();
      }
      c.answer = j.contains("answer") ? j.at("answer").get<std::string>() : j.at("obj_label").get<std::string>();
      if (j.contains("relation")) {
        c.relation = j.at("relation").get<std::string>();
      } else if (j.contains("predicate_id")) {
        c.relation = j.at("predicate_id").get<std::string>();
      }
      out.push_back(std::move(c));
    } catch (const Json::exception& e) {
      throw FormatError(path.string() + ":" + std::to_string(line) + ": " + e.what());
    }
  });
  return out;
}

Json ConvertReport::to_json() const {
  return {{"lines", lines},
          {"instances", instances},
          {"no_candidates", no_candidates},
          {"candidates_without_description", candidates_without_description}};
}

std::vector<EDInstance> convert_candidate_tsv(std::istream& in, const ingest::KnowledgeTable& table,
                                              ConvertReport& report) {
  std::vector<EDInstance> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    ++report.lines;
    auto f = split_tabs(line);
    if (f.size() < 7 || f[5] != "CANDIDATES") {
      throw FormatError("candidate file line " + std::to_string(report.lines) + ": expected CANDIDATES at field 6");
    }
    EDInstance inst;
    inst.id = f[0] + ":" + std::to_string(report.lines);
    const std::string mention = collapse_whitespace(f[2]);
    const std::string left = collapse_whitespace(f[3]);
    const std::string right = collapse_whitespace(f[4]);
    inst.context = left.empty() ? "" : left + " ";
    inst.mention = {mention, inst.context.size(), inst.context.size() + mention.size()};
    inst.context += mention;
    if (!right.empty()) inst.context += " " + right;

    std::size_t i = 6;
    std::vector<std::string> titles;
    for (; i < f.size() && f[i] != "GT:"; ++i) {
      if (f[i] == "EMPTYCAND" || f[i].empty()) continue;
      titles.push_back(ingest::canonical_title(title_after(f[i], 2)));
    }
    std::string gold;
    if (i + 1 < f.size()) {
      const std::string& g = f[i + 1];
      gold = title_after(g, 3);
      if (gold.empty()) gold = title_after(g, 2);
      gold = ingest::canonical_title(gold);
    }

    const auto* gold_entry = gold.empty() ? nullptr : table.lookup(gold);
    inst.in_kb = gold_entry != nullptr;
    if (gold_entry) inst.gold_title = gold_entry->entity;
    else if (!gold.empty()) inst.gold_title = gold;
    for (const auto& t : titles) {
      const auto* e = table.lookup(t);
      if (!e) {
        ++report.candidates_without_description;
        continue;
      }
      bool dup = false;
      for (const auto& c : inst.candidates) dup = dup || c.title == e->entity;
      if (dup) continue;
      if (gold_entry && e->entity == gold_entry->entity) inst.gold_index = inst.candidates.size();
      inst.candidates.push_back({e->entity, e->description});
    }
    if (inst.candidates.empty()) {
      ++report.no_candidates;
      continue;
    }
    ++report.instances;
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace kilm::prompt
