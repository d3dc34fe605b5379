#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <vector>

#include "kilm/ingest/knowledge_table.hpp"
#include "kilm/prompt/structured.hpp"
#include "kilm/util/jsonl.hpp"

namespace kilm::prompt {

// {id?, context, mention:{text,start,end}, candidates:[{title,description}], gold_title?, in_kb}
// Records without an id get `fallback_id`.
EDInstance ed_instance_from_json(const Json& j, const std::string& fallback_id);
Json to_json(const EDInstance& inst);
std::vector<EDInstance> read_ed_instances(const std::filesystem::path& path);

// {question, answer} where answer is a string or a list of strings.
std::vector<QAExemplar> read_qa_pool(const std::filesystem::path& path);

// {id?, statement|masked_sentence, answer|obj_label, relation|predicate_id?}
std::vector<ClozeInstance> read_cloze(const std::filesystem::path& path);

struct ConvertReport {
  std::size_t lines = 0;
  std::size_t instances = 0;
  std::size_t no_candidates = 0;
  std::size_t candidates_without_description = 0;

  Json to_json() const;
};

// Tab-separated candidate files of the common ED benchmarks:
// doc \t doc \t mention \t left \t right \t CANDIDATES \t id,prob,title ... \t GT: \t pos,id,prob,title
// Candidates are kept only when the table has a description for them;
// instances left without candidates are dropped and counted.
std::vector<EDInstance> convert_candidate_tsv(std::istream& in, const ingest::KnowledgeTable& table,
                                              ConvertReport& report);

}  // namespace kilm::prompt
