// Copyright 2026 The isnad Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// isnad command line. Exit codes: 0 ok, 2 config, 3 I/O, 4 stage,
// 5 validation, 1 anything else.

#include <csignal>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "isnad/economics.hpp"
#include "isnad/error.hpp"
#include "isnad/evaluate.hpp"
#include "isnad/ingest.hpp"
#include "isnad/pipeline.hpp"
#include "isnad/service.hpp"
#include "isnad/similarity.hpp"
#include "isnad/text.hpp"

namespace {

using namespace isnad;

enum Exit { kOk = 0, kOther = 1, kConfig = 2, kIo = 3, kStage = 4, kValidation = 5 };

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::config: return kConfig;
    case ErrorKind::io: return kIo;
    case ErrorKind::stage: return kStage;
    case ErrorKind::validation: return kValidation;
  }
  return kOther;
}

void print_report(const pipeline::StageReport& r, bool as_json) {
  pipeline::RunSummary s;
  s.stages.push_back(r);
  if (as_json) {
    std::cout << pipeline::to_json(r).dump(2) << '\n';
  } else {
    std::cout << pipeline::render_summary(s);
  }
}

service::Service* g_service = nullptr;

void on_signal(int) {
  if (g_service) g_service->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"isnad: narration corpus pipeline"};
  app.require_subcommand(1);
  std::string config_path;
  bool as_json = false;
  app.add_option("--config", config_path, "pipeline configuration (JSON)");
  app.add_flag("--json", as_json, "machine-readable stage summaries");

  // ingest
  auto* ingest_cmd = app.add_subcommand("ingest", "load and normalize the books of a manifest");
  std::string manifest_path, ingest_out;
  ingest_cmd->add_option("--manifest", manifest_path, "corpus manifest");
  ingest_cmd->add_option("--out", ingest_out, "book store");

  // segment
  auto* segment_cmd = app.add_subcommand("segment", "cut hadith books into narrations");
  std::string segment_in, segment_out, backend;
  std::optional<std::size_t> window_units, overlap_units, max_unit_chars;
  segment_cmd->add_option("--in", segment_in, "book store");
  segment_cmd->add_option("--out", segment_out, "narration store");
  segment_cmd->add_option("--backend", backend, "rule | remote")->check(CLI::IsMember({"rule", "remote"}));
  segment_cmd->add_option("--window-units", window_units);
  segment_cmd->add_option("--overlap-units", overlap_units);
  segment_cmd->add_option("--max-unit-chars", max_unit_chars);

  // align
  auto* align_cmd = app.add_subcommand("align", "validate narrations against their source pages");
  std::string align_narrations, align_books, align_out;
  std::optional<double> min_fidelity;
  align_cmd->add_option("--narrations", align_narrations, "narration store");
  align_cmd->add_option("--books", align_books, "book store");
  align_cmd->add_option("--out", align_out, "aligned narration store");
  align_cmd->add_option("--min-fidelity", min_fidelity);

  // enrich
  auto* enrich_cmd = app.add_subcommand("enrich", "add translations, diacritics, summaries, key points, tags");
  std::string enrich_in, enrich_out, layers, languages, client_kind, enrich_manifest;
  enrich_cmd->add_option("--in", enrich_in, "aligned narration store");
  enrich_cmd->add_option("--out", enrich_out, "bundle store");
  enrich_cmd->add_option("--layers", layers, "comma-separated layers");
  enrich_cmd->add_option("--languages", languages, "comma-separated language codes");
  enrich_cmd->add_option("--client", client_kind, "mock | remote")->check(CLI::IsMember({"mock", "remote"}));
  enrich_cmd->add_option("--manifest", enrich_manifest, "manifest supplying languages and tag vocabulary");

  // group
  auto* group_cmd = app.add_subcommand("group", "assign identical-narration groups");
  std::string group_in, group_out;
  std::optional<double> threshold;
  group_cmd->add_option("--in", group_in, "aligned narration store");
  group_cmd->add_option("--out", group_out, "corpus store");
  group_cmd->add_option("--threshold", threshold);

  // similar
  auto* similar_cmd = app.add_subcommand("similar", "rank the narrations most similar to one narration");
  std::string similar_id, similar_in, similar_bundles;
  std::size_t top = 10;
  similar_cmd->add_option("--id", similar_id, "narration id")->required();
  similar_cmd->add_option("--top", top);
  similar_cmd->add_option("--in", similar_in, "corpus store");
  similar_cmd->add_option("--bundles", similar_bundles, "bundle store (tags)");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "expert evaluation");
  eval_cmd->require_subcommand(1);
  auto* sample_cmd = eval_cmd->add_subcommand("sample", "draw the review sample");
  std::size_t sample_n = 1213;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string sample_in;
  sample_cmd->add_option("--n", sample_n);
  sample_cmd->add_option("--seed", seed)->each([&](const std::string&) { seed_given = true; });
  sample_cmd->add_option("--in", sample_in, "corpus store");
  auto* report_cmd = eval_cmd->add_subcommand("report", "aggregate evaluation records");
  std::string report_in, report_compare, format = "text", label, compare_label;
  report_cmd->add_option("--in", report_in, "evaluation records (JSONL)")->required();
  report_cmd->add_option("--compare", report_compare, "second record set");
  report_cmd->add_option("--format", format)->check(CLI::IsMember({"text", "csv", "json"}));
  report_cmd->add_option("--label", label, "name of the primary set");
  report_cmd->add_option("--compare-label", compare_label, "name of the comparison set");

  // value
  auto* value_cmd = app.add_subcommand("value", "human-effort valuation table");
  std::string tasks_path;
  economics::EffortModel model;
  value_cmd->add_option("--tasks", tasks_path, "task CSV")->required();
  value_cmd->add_option("--epsilon", model.epsilon);
  value_cmd->add_option("--q0", model.q0);

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "review service");
  std::string host = "127.0.0.1", corpus_store, bundles_store, eval_store, static_dir;
  int port = 8080;
  std::size_t serve_sample = 1213;
  serve_cmd->add_option("--host", host);
  serve_cmd->add_option("--port", port);
  serve_cmd->add_option("--corpus", corpus_store);
  serve_cmd->add_option("--bundles", bundles_store);
  serve_cmd->add_option("--evaluations", eval_store);
  serve_cmd->add_option("--sample-size", serve_sample);
  serve_cmd->add_option("--static", static_dir, "review UI directory");

  // run
  auto* run_cmd = app.add_subcommand("run", "run every enabled stage");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    pipeline::PipelineConfig cfg;
    if (!config_path.empty()) cfg = pipeline::load_config(config_path);
    pipeline::apply_env_overrides(cfg);
    auto or_default = [](const std::string& given, const std::filesystem::path& fallback) {
      return given.empty() ? fallback : std::filesystem::path(given);
    };

    if (*ingest_cmd) {
      if (!manifest_path.empty()) cfg.manifest = manifest_path;
      if (cfg.manifest.empty()) throw Error(ErrorKind::config, "ingest: --manifest required");
      const auto manifest = load_manifest(cfg.manifest);
      RecordStore out(or_default(ingest_out, cfg.books_store()));
      print_report(pipeline::run_ingest(manifest, out), as_json);
      return kOk;
    }
    if (*segment_cmd) {
      if (!backend.empty()) cfg.segment_backend = backend;
      if (window_units) cfg.segment.window_units = *window_units;
      if (overlap_units) cfg.segment.overlap_units = *overlap_units;
      if (max_unit_chars) cfg.segment.max_unit_chars = *max_unit_chars;
      cfg.segment.concurrency = cfg.concurrency;
      pipeline::validate(cfg);
      auto books = pipeline::open_input(or_default(segment_in, cfg.books_store()), "segment");
      RecordStore out(or_default(segment_out, cfg.segments_store()));
      pipeline::StageReport r;
      if (cfg.segment_backend == "remote") {
        auto client = pipeline::make_client("remote", cfg.annotator);
        segment::RemoteSegmenter b(*client);
        r = pipeline::run_segment(*books, out, b, cfg.segment);
      } else {
        segment::RuleSegmenter b;
        r = pipeline::run_segment(*books, out, b, cfg.segment);
      }
      print_report(r, as_json);
      return kOk;
    }
    if (*align_cmd) {
      if (min_fidelity) cfg.align.min_fidelity = *min_fidelity;
      pipeline::validate(cfg);
      auto books = pipeline::open_input(or_default(align_books, cfg.books_store()), "align");
      auto narrations = pipeline::open_input(or_default(align_narrations, cfg.segments_store()), "align");
      RecordStore out(or_default(align_out, cfg.aligned_store()));
      print_report(pipeline::run_align(*books, *narrations, out, cfg.align), as_json);
      return kOk;
    }
    if (*enrich_cmd) {
      enrich::EnrichOptions eo;
      eo.layers = layers.empty() ? cfg.layers : enrich::parse_layers(layers);
      eo.concurrency = cfg.concurrency;
      if (!enrich_manifest.empty()) cfg.manifest = enrich_manifest;
      if (!cfg.manifest.empty()) {
        const auto m = load_manifest(cfg.manifest);
        eo.languages = m.languages;
        eo.pivot_language = m.pivot_language;
        eo.tag_vocabulary = m.tag_vocabulary;
      }
      if (!cfg.languages.empty()) eo.languages = cfg.languages;
      if (!languages.empty()) {
        eo.languages.clear();
        for (const auto& l : CLI::detail::split(languages, ',')) {
          if (!l.empty()) eo.languages.push_back(l);
        }
      }
      if (!client_kind.empty()) cfg.client = client_kind;
      auto in = pipeline::open_input(or_default(enrich_in, cfg.aligned_store()), "enrich");
      RecordStore out(or_default(enrich_out, cfg.bundles_store()));
      auto client = pipeline::make_client(cfg.client, cfg.annotator);
      print_report(pipeline::run_enrich(*in, out, *client, eo), as_json);
      return kOk;
    }
    if (*group_cmd) {
      if (threshold) cfg.group_threshold = *threshold;
      pipeline::validate(cfg);
      auto in = pipeline::open_input(or_default(group_in, cfg.aligned_store()), "group");
      RecordStore out(or_default(group_out, cfg.corpus_store()));
      print_report(pipeline::run_group(*in, out, cfg.group_threshold), as_json);
      return kOk;
    }
    if (*similar_cmd) {
      auto in = pipeline::open_input(or_default(similar_in, cfg.corpus_store()), "similar");
      std::map<std::string, std::vector<std::string>> tags;
      const auto bundle_path = or_default(similar_bundles, cfg.bundles_store());
      if (std::filesystem::exists(bundle_path)) {
        RecordStore bundles(bundle_path, RecordStore::Options{false, false});
        for (const auto& b : bundles.load<EnrichmentBundle>().records) {
          if (b.tags) tags[b.narration_id] = *b.tags;
        }
      }
      std::optional<similarity::SimilarCandidate> query;
      std::vector<similarity::SimilarCandidate> candidates;
      for (const auto& n : pipeline::current_narrations(*in, "group:")) {
        similarity::SimilarCandidate c{n.narration_id, text::strip_diacritics(n.text), tags[n.narration_id]};
        if (n.narration_id == similar_id) {
          query = c;
        } else {
          candidates.push_back(std::move(c));
        }
      }
      if (!query) throw Error(ErrorKind::validation, "similar: unknown narration " + similar_id);
      similarity::HashingEmbedder embedder;
      const auto hits = similarity::most_similar(*query, candidates, embedder, top);
      if (as_json) {
        json out = json::array();
        for (const auto& h : hits) {
          out.push_back({{"narration_id", h.narration_id},
                         {"lexical", h.lexical},
                         {"semantic", h.semantic},
                         {"thematic", h.thematic}});
        }
        std::cout << out.dump(2) << '\n';
      } else {
        std::cout << fmt::format("{:<18} {:>8} {:>8} {:>8}\n", "narration", "lexical", "semantic", "thematic");
        for (const auto& h : hits) {
          std::cout << fmt::format("{:<18} {:>8.3f} {:>8.3f} {:>8.3f}\n", h.narration_id, h.lexical, h.semantic,
                                   h.thematic);
        }
      }
      return kOk;
    }
    if (*sample_cmd) {
      auto in = pipeline::open_input(or_default(sample_in, cfg.corpus_store()), "eval sample");
      std::vector<std::string> ids;
      for (const auto& n : pipeline::current_narrations(*in, "group:")) ids.push_back(n.narration_id);
      for (const auto& id : evaluate::draw_sample(ids, sample_n, seed_given ? seed : cfg.seed)) {
        std::cout << id << '\n';
      }
      return kOk;
    }
    if (*report_cmd) {
      const auto primary = evaluate::build_report(evaluate::read_records(report_in));
      std::optional<evaluate::AggregateReport> comparison;
      if (!report_compare.empty()) comparison = evaluate::build_report(evaluate::read_records(report_compare));
      evaluate::ReportLabels labels;
      labels.primary = label.empty() ? std::filesystem::path(report_in).stem().string() : label;
      if (!report_compare.empty()) {
        labels.comparison = compare_label.empty() ? std::filesystem::path(report_compare).stem().string() : compare_label;
      }
      const evaluate::AggregateReport* cmp = comparison ? &*comparison : nullptr;
      if (format == "csv") {
        std::cout << evaluate::render_csv(primary, cmp, labels);
      } else if (format == "json") {
        json out{{labels.primary, evaluate::to_json(primary)}};
        if (cmp) out[labels.comparison] = evaluate::to_json(*cmp);
        std::cout << out.dump(2) << '\n';
      } else {
        std::cout << evaluate::render_text(primary, cmp, labels);
      }
      return kOk;
    }
    if (*value_cmd) {
      economics::validate(model);
      const auto table = economics::build_valuation_table(economics::load_tasks_csv(tasks_path), model);
      std::cout << economics::render_table(table, model);
      return kOk;
    }
    if (*serve_cmd) {
      service::ServiceConfig sc;
      sc.corpus_store = or_default(corpus_store, cfg.corpus_store());
      sc.bundles_store = or_default(bundles_store, cfg.bundles_store());
      sc.evaluation_store = or_default(eval_store, cfg.evaluation_store());
      sc.sample_size = serve_sample;
      sc.seed = cfg.seed;
      sc.static_dir = static_dir;
      service::Service svc(sc);
      g_service = &svc;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << fmt::format("serving on http://{}:{} ({} sample items)\n", host, port, svc.sample().size());
      if (!svc.listen(host, port)) throw Error(ErrorKind::io, fmt::format("cannot bind {}:{}", host, port));
      g_service = nullptr;
      return kOk;
    }
    if (*run_cmd) {
      const auto summary = pipeline::run_pipeline(cfg);
      if (as_json) {
        std::cout << pipeline::to_json(summary).dump(2) << '\n';
      } else {
        std::cout << pipeline::render_summary(summary);
      }
      return summary.complete ? kOk : kStage;
    }
  } catch (const Error& e) {
    std::cerr << "isnad: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "isnad: " << e.what() << '\n';
    return kOther;
  }
  return kOk;
}
