#include "kilm/infill/compile.hpp"

#include <cmath>

#include "kilm/error.hpp"
#include "kilm/infill/sampler.hpp"
#include "kilm/special_tokens.hpp"
#include "kilm/util/parallel.hpp"

namespace kilm::infill {

namespace {

constexpr std::uint64_t kMaskStream = 0;
constexpr std::uint64_t kEntityStream = 1;
constexpr std::uint64_t kMergeStream = 2;
constexpr std::size_t kChunk = 512;

void merge_into(CompileReport& into, const CompileReport& from) {
  into.samples += from.samples;
  into.knowledge_samples += from.knowledge_samples;
  into.plain_samples += from.plain_samples;
  into.merge_samples += from.merge_samples;
  into.no_mention += from.no_mention;
  into.skipped += from.skipped;
  for (const auto& [k, v] : from.skip_reasons) into.skip_reasons[k] += v;
}

void skip(CompileReport& report, const std::string& reason) {
  ++report.skipped;
  ++report.skip_reasons[reason];
}

TrainingSample finish(const ingest::DocumentSlice& slice, std::size_t epoch, std::optional<std::string> entity,
                      Variant variant, TrainingTarget y, std::uint64_t seed_draw, const CompileConfig& config) {
  TrainingSample s;
  s.doc_id = slice.doc_id;
  s.slice_index = slice.slice_index;
  s.epoch = epoch;
  s.entity = std::move(entity);
  s.variant = variant;
  s.x = corrupt(y, seed_draw, config.mask_prob, config.poisson_lambda);
  s.weights = compute_loss_weights(y, s.x);
  s.y = std::move(y);
  s.seed_draw = seed_draw;
  return s;
}

}  // namespace

void CompileConfig::validate() const {
  if (!(mask_prob >= 0.0 && mask_prob < 1.0)) throw ConfigError("mask_prob must be in [0, 1)");
  if (!(poisson_lambda > 0.0 && poisson_lambda <= 500.0)) throw ConfigError("poisson_lambda must be in (0, 500]");
  if (epochs == 0) throw ConfigError("epochs must be >= 1");
  if (stride < ingest::kMinStride) throw ConfigError("stride must be >= " + std::to_string(ingest::kMinStride));
  if (max_len_with_knowledge < 8) throw ConfigError("max_len_with_knowledge must be >= 8");
  if (jobs == 0) throw ConfigError("jobs must be >= 1");
}

Json CompileConfig::to_json() const {
  Json j;
  j["variant"] = std::string(infill::to_string(variant));
  j["seed"] = seed;
  j["epochs"] = epochs;
  j["mask_prob"] = mask_prob;
  j["poisson_lambda"] = poisson_lambda;
  j["stride"] = stride;
  j["max_len_with_knowledge"] = max_len_with_knowledge;
  j["mode"] = std::string(ingest::to_string(mode));
  return j;
}

Json CompileReport::to_json() const {
  Json j;
  j["slices"] = slices;
  j["samples"] = samples;
  j["knowledge_samples"] = knowledge_samples;
  j["plain_samples"] = plain_samples;
  j["merge_samples"] = merge_samples;
  j["no_mention"] = no_mention;
  j["skipped"] = skipped;
  j["skip_reasons"] = Json::object();
  for (const auto& [k, v] : skip_reasons) j["skip_reasons"][k] = v;
  return j;
}

std::vector<TrainingSample> compile_slice(const ingest::DocumentSlice& slice, std::size_t epoch,
                                          MentionCycle& cycle, const ingest::KnowledgeTable& table,
                                          const CompileConfig& config, CompileReport& report) {
  std::vector<TrainingSample> out;
  for (const auto& t : slice.tokens) {
    if (is_special_token(t.text)) {
      skip(report, "special_token_in_text");
      return out;
    }
  }
  const std::uint64_t seed_draw = derive_seed(config.seed, slice.doc_id, slice.slice_index, epoch, kMaskStream);
  auto emit = [&](TrainingSample s) {
    ++report.samples;
    switch (s.variant) {
      case Variant::Plain: ++report.plain_samples; break;
      case Variant::Merge: ++report.merge_samples; break;
      default: ++report.knowledge_samples; break;
    }
    out.push_back(std::move(s));
  };
  auto plain = [&] {
    if (slice.tokens.empty()) {
      skip(report, "empty_slice");
      return;
    }
    emit(finish(slice, epoch, std::nullopt, Variant::Plain, plain_target(slice.tokens), seed_draw, config));
  };

  if (config.variant == Variant::Plain) {
    plain();
    return out;
  }

  Rng entity_rng(derive_seed(config.seed, slice.doc_id, slice.slice_index, epoch, kEntityStream));
  auto mention = sample_entity(slice, cycle, table, entity_rng);
  if (!mention) {
    ++report.no_mention;
    plain();
    return out;
  }
  const auto* entry = table.lookup(mention->entity);
  const Knowledge knowledge{entry->entity, entry->description};

  if (config.variant == Variant::Merge) {
    plain();
    auto sentence = merge_transform(knowledge.title, knowledge.description);
    const std::uint64_t merge_seed = derive_seed(config.seed, slice.doc_id, slice.slice_index, epoch, kMergeStream);
    emit(finish(slice, epoch, knowledge.title, Variant::Merge, plain_target(std::move(sentence)), merge_seed, config));
    return out;
  }

  try {
    TrainingTarget y = config.variant == Variant::KilmEnd
                           ? kn_infill_end(slice, *mention, knowledge, config.max_len_with_knowledge)
                           : kn_infill(slice, *mention, knowledge, config.max_len_with_knowledge);
    emit(finish(slice, epoch, knowledge.title, config.variant, std::move(y), seed_draw, config));
  } catch (const KnowledgeTooLongError&) {
    skip(report, "knowledge_too_long");
  } catch (const SpanError&) {
    skip(report, "bad_mention_span");
  }
  return out;
}

CompileReport compile_corpus(std::span<const ingest::DocumentSlice> slices, const ingest::KnowledgeTable& table,
                             const CompileConfig& config, const SampleSink& sink) {
  config.validate();
  CompileReport report;
  report.slices = slices.size();
  std::vector<MentionCycle> cycles(slices.size());
  const std::size_t chunk = kChunk * std::max(1u, config.jobs);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t begin = 0; begin < slices.size(); begin += chunk) {
      const std::size_t n = std::min(chunk, slices.size() - begin);
      std::vector<std::vector<TrainingSample>> results(n);
      std::vector<CompileReport> reports(n);
      parallel_for(n, config.jobs, [&](std::size_t i) {
        results[i] = compile_slice(slices[begin + i], epoch, cycles[begin + i], table, config, reports[i]);
      });
      for (std::size_t i = 0; i < n; ++i) {
        merge_into(report, reports[i]);
        for (const auto& s : results[i]) sink(s);
      }
    }
  }
  return report;
}

}  // namespace kilm::infill
