#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>

#include "kilm/infill/sample.hpp"
#include "kilm/infill/sampler.hpp"
#include "kilm/infill/transforms.hpp"
#include "kilm/ingest/knowledge_table.hpp"
#include "kilm/ingest/slicing.hpp"
#include "kilm/util/jsonl.hpp"

namespace kilm::infill {

struct CompileConfig {
  Variant variant = Variant::Kilm;
  std::uint64_t seed = 0;
  std::size_t epochs = 1;
  double mask_prob = kDefaultMaskProb;
  double poisson_lambda = kDefaultPoissonLambda;
  std::size_t stride = ingest::kDefaultStride;
  std::size_t max_len_with_knowledge = kMaxLenWithKnowledge;
  ingest::SliceMode mode = ingest::SliceMode::Primary;
  unsigned jobs = 1;

  // Throws ConfigError.
  void validate() const;
  Json to_json() const;
};

struct CompileReport {
  std::size_t slices = 0;
  std::size_t samples = 0;
  std::size_t knowledge_samples = 0;
  std::size_t plain_samples = 0;
  std::size_t merge_samples = 0;
  std::size_t no_mention = 0;
  std::size_t skipped = 0;
  std::map<std::string, std::size_t> skip_reasons;

  Json to_json() const;
};

// Samples for one slice in one epoch, in emission order. `cycle` is the
// slice's draw memory and is advanced. Failed samples are counted in
// `report` (skipped) and not returned.
std::vector<TrainingSample> compile_slice(const ingest::DocumentSlice& slice, std::size_t epoch,
                                          MentionCycle& cycle, const ingest::KnowledgeTable& table,
                                          const CompileConfig& config, CompileReport& report);

using SampleSink = std::function<void(const TrainingSample&)>;

// Epoch-major, then input slice order. Output does not depend on config.jobs.
CompileReport compile_corpus(std::span<const ingest::DocumentSlice> slices, const ingest::KnowledgeTable& table,
                             const CompileConfig& config, const SampleSink& sink);

}  // namespace kilm::infill
