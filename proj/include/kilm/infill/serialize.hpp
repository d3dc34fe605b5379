#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "kilm/infill/sample.hpp"
#include "kilm/util/jsonl.hpp"

namespace kilm::infill {

inline constexpr const char* kTrainFile = "train.jsonl";

std::string labels_string(const TrainingTarget& y);

// Field order is fixed: doc_id, slice_index, epoch, entity, variant,
// x_tokens, y_tokens, y_labels, infill_spans, alpha, beta, seed_draw,
// then x_text and y_text (rendered forms carrying token spacing).
Json to_json(const TrainingSample& sample);

// Inverse of to_json. Throws FormatError when X is not derivable from Y.
TrainingSample sample_from_json(const Json& j);

std::vector<TrainingSample> read_samples(const std::filesystem::path& path);

}  // namespace kilm::infill
