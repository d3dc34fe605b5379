#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kilm/util/jsonl.hpp"

namespace kilm::prompt {

// One scoring or generation instance. Scoring mode carries a continuation;
// generation mode carries a stop token and a token bound instead.
struct Prompt {
  std::string instance_id;
  std::string group_id;  // instances sharing a group are ranked together
  std::string task;      // ed | appositive | qa | probe | lama
  std::string encoder_text;
  std::string decoder_prefix;
  std::optional<std::string> continuation;
  std::optional<std::string> stop_token;
  std::optional<std::size_t> max_new_tokens;

  std::optional<std::size_t> candidate_index;
  std::optional<std::string> candidate_title;
  std::optional<std::string> gold_title;
  bool in_kb = true;
  std::vector<std::string> golds;

  bool is_scoring() const { return continuation.has_value(); }
  // Throws FormatError when the mode fields are inconsistent.
  void validate() const;

  friend bool operator==(const Prompt&, const Prompt&) = default;
};

Json to_json(const Prompt& p);
Prompt prompt_from_json(const Json& j);

std::vector<Prompt> read_prompts(const std::filesystem::path& path);
void write_prompts(const std::filesystem::path& path, const std::vector<Prompt>& prompts);

}  // namespace kilm::prompt
