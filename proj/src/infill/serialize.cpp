#include "kilm/infill/serialize.hpp"

#include "kilm/error.hpp"
#include "kilm/infill/transforms.hpp"

namespace kilm::infill {

namespace {

Json ratio_json(const Ratio& r) { return Json::array({r.num, r.den}); }

Ratio ratio_from(const Json& j, const char* name) {
  if (!j.is_array() || j.size() != 2) throw FormatError(std::string(name) + " must be [num, den]");
  return {j[0].get<std::uint64_t>(), j[1].get<std::uint64_t>()};
}

SpanLabel label_from(char c) {
  switch (c) {
    case 'C': return SpanLabel::Copy;
    case 'K': return SpanLabel::Knowledge;
    case 'M': return SpanLabel::Marker;
    default: throw FormatError(std::string("unknown span label '") + c + "'");
  }
}

}  // namespace

std::string labels_string(const TrainingTarget& y) {
  std::string out;
  out.reserve(y.labels.size());
  for (auto l : y.labels) out.push_back(static_cast<char>(l));
  return out;
}

Json to_json(const TrainingSample& s) {
  Json j;
  j["doc_id"] = s.doc_id;
  j["slice_index"] = s.slice_index;
  j["epoch"] = s.epoch;
  j["entity"] = s.entity ? Json(*s.entity) : Json(nullptr);
  j["variant"] = std::string(to_string(s.variant));
  j["x_tokens"] = token_texts(s.x.tokens);
  j["y_tokens"] = token_texts(s.y.tokens);
  j["y_labels"] = labels_string(s.y);
  Json spans = Json::array();
  for (const auto& sp : s.x.infill_spans) spans.push_back({{"start", sp.y_start}, {"end", sp.y_end}, {"x", sp.x_index}});
  j["infill_spans"] = std::move(spans);
  j["alpha"] = ratio_json(s.weights.alpha);
  j["beta"] = ratio_json(s.weights.beta);
  j["seed_draw"] = s.seed_draw;
  j["x_text"] = render(s.x.tokens);
  j["y_text"] = render(s.y.tokens);
  return j;
}

TrainingSample sample_from_json(const Json& j) {
  try {
    TrainingSample s;
    s.doc_id = j.at("doc_id").get<std::string>();
    s.slice_index = j.at("slice_index").get<std::size_t>();
    s.epoch = j.at("epoch").get<std::size_t>();
    if (!j.at("entity").is_null()) s.entity = j.at("entity").get<std::string>();
    try {
      s.variant = variant_from(j.at("variant").get<std::string>());
    } catch (const ConfigError& e) {
      throw FormatError(e.what());
    }

    auto y_texts = j.at("y_tokens").get<std::vector<std::string>>();
    auto labels = j.at("y_labels").get<std::string>();
    if (labels.size() != y_texts.size()) throw FormatError("y_labels length differs from y_tokens");
    s.y.tokens = align_tokens(j.at("y_text").get<std::string>(), y_texts);
    for (char c : labels) s.y.labels.push_back(label_from(c));
    for (std::size_t i = 0; i + 1 < s.y.size(); ++i) {
      if (s.y.labels[i] == SpanLabel::Marker && s.y.tokens[i].text == surface(SpecialToken::EntOpen)) {
        s.y.mention_index = i + 1;
        break;
      }
    }

    auto x_texts = j.at("x_tokens").get<std::vector<std::string>>();
    s.x.tokens = align_tokens(j.at("x_text").get<std::string>(), x_texts);
    for (const auto& sp : j.at("infill_spans")) {
      s.x.infill_spans.push_back(
          {sp.at("start").get<std::size_t>(), sp.at("end").get<std::size_t>(), sp.at("x").get<std::size_t>()});
    }
    s.x.knowledge_masked = s.y.knowledge_block().has_value();
    s.x.slots = derive_slots(s.y, s.x.tokens, s.x.infill_spans, s.x.knowledge_masked);

    s.weights.alpha = ratio_from(j.at("alpha"), "alpha");
    s.weights.beta = ratio_from(j.at("beta"), "beta");
    s.seed_draw = j.at("seed_draw").get<std::uint64_t>();
    return s;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("bad training sample: ") + e.what());
  }
}

std::vector<TrainingSample> read_samples(const std::filesystem::path& path) {
  std::vector<TrainingSample> out;
  for_each_jsonl(path, [&](const Json& j, std::size_t) { out.push_back(sample_from_json(j)); });
  return out;
}

}  // namespace kilm::infill
