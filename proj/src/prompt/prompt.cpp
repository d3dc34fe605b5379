#include "kilm/prompt/prompt.hpp"

#include "kilm/error.hpp"

namespace kilm::prompt {

void Prompt::validate() const {
  if (instance_id.empty()) throw FormatError("prompt without instance_id");
  if (continuation && stop_token) throw FormatError("prompt " + instance_id + " has both continuation and stop_token");
  if (!continuation && !stop_token && !max_new_tokens) {
    throw FormatError("generation prompt " + instance_id + " has no stop condition");
  }
}

Json to_json(const Prompt& p) {
  Json j;
  j["instance_id"] = p.instance_id;
  j["group_id"] = p.group_id;
  j["task"] = p.task;
  j["encoder_text"] = p.encoder_text;
  j["decoder_prefix"] = p.decoder_prefix;
  if (p.continuation) j["continuation"] = *p.continuation;
  if (p.stop_token) j["stop_token"] = *p.stop_token;
  if (p.max_new_tokens) j["max_new_tokens"] = *p.max_new_tokens;
  if (p.candidate_index) j["candidate_index"] = *p.candidate_index;
  if (p.candidate_title) j["candidate_title"] = *p.candidate_title;
  if (p.gold_title) j["gold_title"] = *p.gold_title;
  j["in_kb"] = p.in_kb;
  if (!p.golds.empty()) j["golds"] = p.golds;
  return j;
}

namespace {

template <typename T>
std::optional<T> opt(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

}  // namespace

Prompt prompt_from_json(const Json& j) {
  try {
    Prompt p;
    p.instance_id = j.at("instance_id").get<std::string>();
    p.group_id = j.value("group_id", p.instance_id);
    p.task = j.value("task", std::string());
    p.encoder_text = j.at("encoder_text").get<std::string>();
    p.decoder_prefix = j.at("decoder_prefix").get<std::string>();
    p.continuation = opt<std::string>(j, "continuation");
    p.stop_token = opt<std::string>(j, "stop_token");
    p.max_new_tokens = opt<std::size_t>(j, "max_new_tokens");
    p.candidate_index = opt<std::size_t>(j, "candidate_index");
    p.candidate_title = opt<std::string>(j, "candidate_title");
    p.gold_title = opt<std::string>(j, "gold_title");
    p.in_kb = j.value("in_kb", true);
    if (auto it = j.find("golds"); it != j.end()) p.golds = it->get<std::vector<std::string>>();
    p.validate();
    return p;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("bad prompt record: ") + e.what());
  }
}

std::vector<Prompt> read_prompts(const std::filesystem::path& path) {
  std::vector<Prompt> out;
  for_each_jsonl(path, [&](const Json& j, std::size_t) { out.push_back(prompt_from_json(j)); });
  return out;
}

void write_prompts(const std::filesystem::path& path, const std::vector<Prompt>& prompts) {
  JsonlWriter w(path);
  for (const auto& p : prompts) w.write(to_json(p));
  w.close();
}

}  // namespace kilm::prompt
