#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kilm/cli/app.hpp"
#include "kilm/error.hpp"
#include "kilm/eval/metrics.hpp"
#include "kilm/infill/transforms.hpp"
#include "kilm/infill/serialize.hpp"
#include "kilm/ingest/pipeline.hpp"
#include "kilm/prompt/benchmark.hpp"
#include "kilm/prompt/structured.hpp"
#include "kilm/prompt/tfidf.hpp"
#include "kilm/scoring/ngram.hpp"
#include "kilm/scoring/protocol.hpp"
#include "kilm/scoring/ranking.hpp"
#include "kilm/tokenizer.hpp"

namespace py = pybind11;

namespace kilm::python {

namespace {

// JSON crosses the boundary as text; the package decodes it.
std::string dump(const Json& j) { return j.dump(); }

std::string kn_infill_json(const std::string& text, std::size_t start, std::size_t end, const std::string& title,
                           const std::string& description, std::uint64_t seed, double mask_prob, double lambda) {
  ingest::DocumentSlice slice;
  slice.doc_id = "py";
  slice.tokens = tokenize_tokens(text);
  if (end > slice.tokens.size() || start >= end) throw SpanError("mention outside the text");
  std::vector<Token> surface(slice.tokens.begin() + static_cast<std::ptrdiff_t>(start),
                             slice.tokens.begin() + static_cast<std::ptrdiff_t>(end));
  ingest::MentionSpan m{start, end, render(surface), title};
  const auto y = infill::kn_infill(slice, m, infill::Knowledge{title, description});
  const auto x = infill::corrupt(y, seed, mask_prob, lambda);
  const auto w = infill::compute_loss_weights(y, x);
  Json spans = Json::array();
  for (const auto& s : x.infill_spans) spans.push_back({{"start", s.y_start}, {"end", s.y_end}, {"x", s.x_index}});
  return dump({{"y_text", render(y.tokens)},
               {"x_text", render(x.tokens)},
               {"y_tokens", token_texts(y.tokens)},
               {"x_tokens", token_texts(x.tokens)},
               {"y_labels", infill::labels_string(y)},
               {"infill_spans", spans},
               {"alpha", {w.alpha.num, w.alpha.den}},
               {"beta", {w.beta.num, w.beta.den}}});
}

std::string ed_prompts_json(const std::string& instance, std::size_t window) {
  const auto inst = prompt::ed_instance_from_json(Json::parse(instance), "instance");
  Json out = Json::array();
  for (const auto& p : prompt::build_ed_prompts(inst, window)) out.push_back(prompt::to_json(p));
  return dump(out);
}

std::vector<prompt::Prompt> parse_prompts(const std::string& prompts) {
  std::vector<prompt::Prompt> out;
  for (const auto& j : Json::parse(prompts)) out.push_back(prompt::prompt_from_json(j));
  return out;
}

std::string rank_json(const std::string& prompts, const scoring::NGramModel& model, const std::string& mode) {
  scoring::NGramScorer scorer(model);
  scoring::RankReport report;
  auto records = scoring::rank_prompts(parse_prompts(prompts), scorer, scoring::rank_mode_from(mode), report);
  return dump({{"records", records}, {"report", report.to_json()}});
}

std::string evaluate_json(const std::string& records, const std::string& metric) {
  std::vector<Json> rs;
  for (const auto& j : Json::parse(records)) rs.push_back(j);
  return dump(eval::evaluate_records(rs, metric, nullptr, {}));
}

std::string ingest_json(const std::string& dump_path, const std::string& out_dir, std::size_t stride,
                        const std::string& mode, unsigned jobs) {
  ingest::IngestOptions o;
  o.dump = dump_path;
  o.out_dir = out_dir;
  o.stride = stride;
  o.mode = ingest::slice_mode_from(mode);
  o.jobs = jobs;
  return dump(ingest::run_ingest(o).to_json());
}

}  // namespace

}  // namespace kilm::python

PYBIND11_MODULE(_kilm, m) {
  using namespace kilm;
  m.doc() = "Knowledge-infilled corpus compiler and zero-shot probing toolkit";

  py::register_exception<Error>(m, "KilmError", PyExc_ValueError);

  m.def("tokenize", [](const std::string& text) { return token_texts(tokenize_tokens(text)); }, py::arg("text"));
  m.def("run_cli", [](const std::vector<std::string>& args) {
    py::gil_scoped_release release;
    return cli::run(args);
  }, py::arg("args"));
  m.def("_ingest", &python::ingest_json, py::arg("dump"), py::arg("out_dir"), py::arg("stride"), py::arg("mode"),
        py::arg("jobs"));
  m.def("_kn_infill", &python::kn_infill_json, py::arg("text"), py::arg("start"), py::arg("end"), py::arg("title"),
        py::arg("description"), py::arg("seed"), py::arg("mask_prob"), py::arg("poisson_lambda"));
  m.def("mask_budget", &infill::mask_budget, py::arg("mask_prob"), py::arg("copy_tokens"));
  m.def("_ed_prompts", &python::ed_prompts_json, py::arg("instance"), py::arg("window"));
  m.def("_rank", &python::rank_json, py::arg("prompts"), py::arg("model"), py::arg("mode"));
  m.def("_evaluate", &python::evaluate_json, py::arg("records"), py::arg("metric"));
  m.def("unigram_f1", py::overload_cast<const std::string&, const std::string&>(&eval::unigram_f1),
        py::arg("prediction"), py::arg("gold"));
  m.def("normalize_answer", &eval::normalize_answer, py::arg("text"));
  m.def("_validate_transcript", [](const std::string& requests, const std::string& responses) {
    return python::dump(scoring::validate_transcript_files(requests, responses).to_json());
  }, py::arg("requests"), py::arg("responses"));

  py::class_<scoring::NGramModel>(m, "NGramModel")
      .def(py::init([](const std::vector<std::vector<std::string>>& sequences, std::size_t order, double delta) {
             return scoring::NGramModel::train(sequences, order, delta);
           }),
           py::arg("sequences"), py::arg("order") = 3, py::arg("delta") = 0.1)
      .def_property_readonly("order", &scoring::NGramModel::order)
      .def_property_readonly("delta", &scoring::NGramModel::delta)
      .def_property_readonly("vocabulary", &scoring::NGramModel::vocabulary)
      .def("prob", [](const scoring::NGramModel& self, const std::vector<std::string>& history,
                      const std::string& word) { return self.prob(history, word); },
           py::arg("history"), py::arg("word"))
      .def("score", [](const scoring::NGramModel& self, const std::string& prefix, const std::string& continuation) {
             return self.score(split_whitespace(prefix), split_whitespace(continuation));
           }, py::arg("prefix"), py::arg("continuation"))
      .def("generate", [](const scoring::NGramModel& self, const std::string& prefix, const std::string& stop,
                          std::size_t max_new_tokens) {
             return self.generate(split_whitespace(prefix), stop, max_new_tokens);
           }, py::arg("prefix"), py::arg("stop_token") = "", py::arg("max_new_tokens") = 64);

  py::class_<prompt::TfidfIndex>(m, "TfidfIndex")
      .def(py::init<const std::vector<std::string>&>(), py::arg("documents"))
      .def("__len__", &prompt::TfidfIndex::size)
      .def("query", [](const prompt::TfidfIndex& self, const std::string& text, std::size_t k) {
             std::vector<std::pair<std::size_t, double>> out;
             for (const auto& r : self.query(text, k)) out.emplace_back(r.index, r.score);
             return out;
           }, py::arg("text"), py::arg("k") = 5);
}
