// Copyright 2026 The nl2fix Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nl2fix/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <thread>

#include "nl2fix/codesim/codebleu.hpp"
#include "nl2fix/common/fs.hpp"
#include "nl2fix/common/parallel.hpp"
#include "nl2fix/prompt.hpp"

namespace nl2fix {

using nlohmann::json;
using validation::Status;

// ---- artifacts ----

json manifest_to_json(const Manifest& m) {
  json bugs = json::array();
  for (const auto& b : m.bugs) {
    json cands = json::array();
    for (const auto& c : b.candidates) {
      cands.push_back({{"index", c.index},
                       {"content_hash", c.content_hash},
                       {"empty", c.empty},
                       {"patch_text", c.patch_text}});
    }
    bugs.push_back({{"bug_id", b.bug_id},
                    {"prompt_digest", b.prompt_digest},
                    {"truncated", b.truncated},
                    {"candidates", cands}});
  }
  return {{"provider", m.provider},
          {"strategy", m.strategy},
          {"temperature", m.temperature},
          {"n_samples", m.n_samples},
          {"bugs", bugs}};
}

Manifest manifest_from_json(const json& j) {
  Manifest m;
  m.provider = j.at("provider");
  m.strategy = j.at("strategy");
  m.temperature = j.at("temperature");
  m.n_samples = j.at("n_samples");
  for (const auto& b : j.at("bugs")) {
    ManifestBug mb;
    mb.bug_id = b.at("bug_id");
    mb.prompt_digest = b.value("prompt_digest", "");
    mb.truncated = b.value("truncated", false);
    for (const auto& c : b.at("candidates")) {
      mb.candidates.push_back({c.at("index"), c.at("content_hash"), c.value("empty", false),
                               c.at("patch_text")});
    }
    m.bugs.push_back(std::move(mb));
  }
  return m;
}

json validation_to_json(const ValidationTable& t) {
  json bugs = json::array();
  for (const auto& b : t.bugs) {
    json cands = json::array();
    for (const auto& c : b.candidates) {
      cands.push_back({{"index", c.index},
                       {"content_hash", c.content_hash},
                       {"status", validation::to_string(c.status)},
                       {"compiled", c.compiled},
                       {"exact_match", c.exact_match}});
    }
    bugs.push_back({{"bug_id", b.bug_id}, {"project", b.project}, {"candidates", cands}});
  }
  return {{"bugs", bugs}};
}

ValidationTable validation_from_json(const json& j) {
  ValidationTable t;
  for (const auto& b : j.at("bugs")) {
    BugValidation bv;
    bv.bug_id = b.at("bug_id");
    bv.project = b.value("project", "");
    for (const auto& c : b.at("candidates")) {
      bv.candidates.push_back({c.at("index"), c.at("content_hash"),
                               validation::parse_status(c.at("status").get<std::string>()),
                               c.at("compiled"), c.value("exact_match", false)});
    }
    t.bugs.push_back(std::move(bv));
  }
  return t;
}

metrics::BugResult bug_result(const BugValidation& bug) {
  metrics::BugResult r;
  r.bug_id = bug.bug_id;
  r.project = bug.project;
  r.n = static_cast<int>(bug.candidates.size());
  std::set<std::string> unique;
  for (const auto& c : bug.candidates) {
    if (c.status == Status::Plausible) ++r.c;
    if (c.compiled) ++r.compile_count;
    if (c.exact_match) ++r.em_count;
    unique.insert(c.content_hash);
  }
  r.unique_count = static_cast<int>(unique.size());
  return r;
}

// ---- helpers ----

namespace {

std::string fixed(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

void write_json(const std::filesystem::path& path, const json& j) {
  atomic_write_file(path, j.dump(2) + "\n");
}

json read_json(const std::filesystem::path& path, const std::string& produced_by) {
  const auto text = try_read_file(path);
  if (!text) {
    throw MissingArtifact(path.string() + " not found; run `nl2fix " + produced_by + "` first");
  }
  try {
    return json::parse(*text);
  } catch (const json::exception& e) {
    throw MissingArtifact(path.string() + " is not valid JSON: " + e.what());
  }
}

// pass@k with k capped at the bug's sample count; a bug without samples
// scores 0.
double capped_pass_at_k(int n, int c, int k) {
  if (n == 0) return 0.0;
  return metrics::pass_at_k(n, c, std::min(k, n));
}

json summary_json(std::span<const double> samples) {
  json j{{"n", samples.size()}};
  try {
    const auto s = metrics::distribution_summary(samples);
    j["median"] = s.median;
    j["q1"] = s.q1;
    j["q3"] = s.q3;
    j["iqr"] = s.iqr;
    j["kurtosis"] = s.kurtosis ? json(*s.kurtosis) : json(nullptr);
  } catch (const Error& e) {
    j["error"] = e.code();
  }
  return j;
}

json wilcoxon_json(std::span<const double> x, std::span<const double> y) {
  json j{{"pairs_offered", x.size()}};
  try {
    const auto r = metrics::wilcoxon_signed_rank_one_sided(x, y);
    j["pairs"] = r.pairs;
    j["w_plus"] = r.w_plus;
    j["p_value"] = r.p_value;
    j["exact"] = r.exact;
  } catch (const Error& e) {
    j["error"] = e.code();
  }
  return j;
}

constexpr int kPassAtKGrid[] = {1, 2, 5, 10, 20, 50, 100};

}  // namespace

// ---- pipeline ----

Pipeline::Pipeline(RunConfig config, std::ostream& log, Components components)
    : config_(std::move(config)), log_(log), components_(components) {}

Pipeline::~Pipeline() = default;

const corpus::Corpus& Pipeline::corpus() {
  if (!corpus_) corpus_ = corpus::load_corpus(config_.corpus_path);
  return *corpus_;
}

std::vector<const corpus::BugRecord*> Pipeline::selected_bugs() {
  std::vector<const corpus::BugRecord*> out;
  if (!config_.bug_filter) {
    for (const auto& r : corpus().records) out.push_back(&r);
    return out;
  }
  std::set<std::string> wanted;
  for (const auto& id : *config_.bug_filter) {
    if (!corpus().find(id)) throw UnknownBugId(id);
    wanted.insert(id);
  }
  // Corpus order, whatever order the filter lists them in.
  for (const auto& r : corpus().records) {
    if (wanted.contains(r.bug_id)) out.push_back(&r);
  }
  return out;
}

sampling::GenerationProvider& Pipeline::provider() {
  if (components_.provider) return *components_.provider;
  if (!owned_provider_) {
    const auto& g = config_.generation;
    if (g.kind == "mock") {
      auto mock = std::make_unique<sampling::MockProvider>();
      mock->add_file(g.script);
      owned_provider_ = std::move(mock);
    } else if (g.kind == "http") {
      owned_provider_ = std::make_unique<sampling::HttpProvider>(
          sampling::HttpProviderConfig{g.base_url, g.model_id, g.api_key_env, g.timeout_s});
    } else {
      throw ConfigError("unknown generation provider kind: " + g.kind);
    }
  }
  return *owned_provider_;
}

validation::CommandRunner& Pipeline::runner() {
  if (components_.runner) return *components_.runner;
  if (!owned_runner_) {
    if (config_.runner == "stub") {
      auto stub = std::make_unique<validation::ScriptedRunner>();
      stub->add_file(config_.stub_outcomes);
      owned_runner_ = std::move(stub);
    } else if (config_.runner == "subprocess") {
      owned_runner_ = std::make_unique<validation::SubprocessRunner>();
    } else {
      throw ConfigError("unknown validation runner: " + config_.runner);
    }
  }
  return *owned_runner_;
}

ranking::Embedder& Pipeline::embedder() {
  if (components_.embedder) return *components_.embedder;
  if (!owned_embedder_) {
    const auto& e = config_.embedding;
    if (e.kind == "local") {
      owned_embedder_ = std::make_unique<ranking::LocalEmbedder>(e.dimension);
    } else if (e.kind == "http") {
      owned_embedder_ = std::make_unique<ranking::HttpEmbedder>(
          ranking::HttpEmbedderConfig{e.base_url, e.model_id, e.api_key_env, e.timeout_s});
    } else {
      throw ConfigError("unknown embedding provider kind: " + e.kind);
    }
  }
  return *owned_embedder_;
}

int Pipeline::workers() const {
  if (config_.workers > 0) return config_.workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

Manifest Pipeline::load_manifest() const {
  return manifest_from_json(read_json(config_.report_dir / "manifest.json", "generate"));
}

ValidationTable Pipeline::load_validation() const {
  return validation_from_json(read_json(config_.report_dir / "validation.json", "validate"));
}

Manifest Pipeline::generate() {
  const auto bugs = selected_bugs();
  sampling::SampleOptions options;
  options.params.temperature = config_.temperature;
  options.params.n_samples = config_.n_samples;
  options.params.max_gen_tokens = config_.max_gen_tokens;
  options.params.context_budget = config_.generation.context_budget;
  options.params.mode = config_.generation.mode;
  options.cache_root = config_.cache_dir;
  options.concurrency = config_.concurrency;

  auto& gen = provider();
  Manifest m;
  m.provider = gen.id();
  m.strategy = std::string(prompt::to_string(config_.strategy));
  m.temperature = config_.temperature;
  m.n_samples = config_.n_samples;
  for (const auto* record : bugs) {
    auto p = prompt::build_prompt(config_.strategy, *record, corpus());
    p = prompt::fit_to_budget(p, config_.generation.context_budget, config_.max_gen_tokens);
    const auto candidates = sampling::sample(gen, p, options);
    const auto stats = sampling::dedup_stats(candidates);

    auto digest_params = options.params;
    if (config_.strategy == prompt::Strategy::ReasoningExtraction) {
      digest_params.mode = sampling::GenMode::Chat;
    }
    ManifestBug mb{record->bug_id, sampling::prompt_digest(p, digest_params), p.truncated, {}};
    for (const auto& c : candidates) {
      mb.candidates.push_back({c.sample_index, c.content_hash, c.empty, c.patch_text});
    }
    m.bugs.push_back(std::move(mb));
    log_ << "generate " << record->bug_id << ": " << candidates.size() << " samples, "
         << stats.unique_count << " unique" << (p.truncated ? ", prompt truncated" : "") << "\n";
  }
  write_json(config_.report_dir / "manifest.json", manifest_to_json(m));
  return m;
}

ValidationTable Pipeline::validate() {
  const auto manifest = load_manifest();
  validation::ValidatorOptions options;
  options.cache_root = config_.cache_dir;
  options.work_root = config_.work_dir.empty()
                          ? std::filesystem::temp_directory_path() / "nl2fix-work"
                          : config_.work_dir;
  options.default_timeout_s = config_.stage_timeout_s;
  options.keep_workspaces = config_.keep_workspaces;
  validation::Validator validator(runner(), options);

  ValidationTable table;
  std::string csv = "bug_id,project,n,c,compile_count,unique_count,em_count\n";
  for (const auto& mb : manifest.bugs) {
    const auto* record = corpus().find(mb.bug_id);
    if (!record) throw UnknownBugId(mb.bug_id);
    std::vector<CandidatePatch> candidates;
    for (const auto& c : mb.candidates) {
      auto cand = make_candidate(mb.bug_id, c.index, "", c.patch_text);
      if (cand.content_hash != c.content_hash) {
        throw MissingArtifact("manifest entry " + mb.bug_id + "#" + std::to_string(c.index) +
                              " does not match its content hash");
      }
      candidates.push_back(std::move(cand));
    }
    const auto outcomes = validator.validate_all(*record, candidates, workers());
    const std::string fixed_canonical = metrics::canonical_form(record->fixed_function);

    BugValidation bv{record->bug_id, record->project, {}};
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      bv.candidates.push_back({candidates[i].sample_index, candidates[i].content_hash,
                               outcomes[i].status,
                               outcomes[i].compile == validation::StageResult::Pass,
                               candidates[i].canonical == fixed_canonical});
    }
    const auto r = bug_result(bv);
    csv += csv_field(r.bug_id) + "," + csv_field(r.project) + "," + std::to_string(r.n) + "," +
           std::to_string(r.c) + "," + std::to_string(r.compile_count) + "," +
           std::to_string(r.unique_count) + "," + std::to_string(r.em_count) + "\n";
    log_ << "validate " << r.bug_id << ": " << r.c << "/" << r.n << " plausible, "
         << r.compile_count << " compile\n";
    table.bugs.push_back(std::move(bv));
  }
  write_json(config_.report_dir / "validation.json", validation_to_json(table));
  atomic_write_file(config_.report_dir / "bug_results.csv", csv);
  return table;
}

void Pipeline::report() {
  const auto manifest = load_manifest();
  const auto table = load_validation();
  if (table.bugs.empty()) throw EmptyInput("validated bugs");
  std::vector<metrics::BugResult> results;
  for (const auto& b : table.bugs) results.push_back(bug_result(b));

  json warnings = json::array();
  std::int64_t n_min = results.front().n;
  for (const auto& r : results) n_min = std::min(n_min, r.n);
  std::vector<std::int64_t> ks;
  for (std::int64_t k : kPassAtKGrid) {
    if (k > n_min) {
      warnings.push_back("k=" + std::to_string(k) + " exceeds n=" + std::to_string(n_min) +
                         "; capped at " + std::to_string(n_min));
    }
    const std::int64_t kk = std::min(k, n_min);
    if (std::find(ks.begin(), ks.end(), kk) == ks.end()) ks.push_back(kk);
  }

  std::string passk = "k,pass_at_k_pct\n";
  json passk_json = json::array();
  for (std::int64_t k : ks) {
    const double v = 100.0 * metrics::aggregate_pass_at_k(results, k);
    passk += std::to_string(k) + "," + fixed(v, 4) + "\n";
    passk_json.push_back({{"k", k}, {"pass_at_k_pct", std::stod(fixed(v, 4))}});
  }
  atomic_write_file(config_.report_dir / "passk.csv", passk);

  // Summary.
  std::vector<metrics::BugCandidateCounts> counts;
  std::map<std::string, int> status_counts{{"Plausible", 0}, {"Wrong", 0}, {"Uncompilable", 0}};
  int em_total = 0, em_bugs = 0, fixed_bugs = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    counts.push_back({r.n, r.unique_count, r.compile_count, r.c});
    for (const auto& c : table.bugs[i].candidates) {
      ++status_counts[std::string(validation::to_string(c.status))];
    }
    em_total += r.em_count;
    if (r.em_count > 0) ++em_bugs;
    if (r.c > 0) ++fixed_bugs;
  }
  const auto stats = metrics::summary_stats(counts);
  const json summary{
      {"run",
       {{"provider", manifest.provider},
        {"strategy", manifest.strategy},
        {"temperature", manifest.temperature},
        {"n_samples", manifest.n_samples},
        {"bugs", results.size()}}},
      {"pass_at_k", passk_json},
      {"summary_stats",
       {{"duplicate_pct", stats.duplicate_pct},
        {"compile_pct", stats.compile_pct},
        {"plausible_pct", stats.plausible_pct}}},
      {"status_counts", status_counts},
      {"fixed_bugs", fixed_bugs},
      {"exact_match", {{"candidates", em_total}, {"bugs", em_bugs}}},
      {"warnings", warnings}};
  write_json(config_.report_dir / "summary.json", summary);

  // Per project, in name order.
  std::map<std::string, std::vector<std::size_t>> by_project;
  for (std::size_t i = 0; i < results.size(); ++i) by_project[results[i].project].push_back(i);
  std::string per_project =
      "project,bugs,fixed_bugs,em_bugs,duplicate_pct,compile_pct,plausible_pct,pass_at_1_pct\n";
  for (const auto& [project, idx] : by_project) {
    std::vector<metrics::BugResult> rs;
    std::vector<metrics::BugCandidateCounts> cs;
    int fixed_here = 0, em_here = 0;
    for (auto i : idx) {
      rs.push_back(results[i]);
      cs.push_back(counts[i]);
      if (results[i].c > 0) ++fixed_here;
      if (results[i].em_count > 0) ++em_here;
    }
    const auto ps = metrics::summary_stats(cs);
    per_project += csv_field(project) + "," + std::to_string(idx.size()) + "," +
                   std::to_string(fixed_here) + "," + std::to_string(em_here) + "," +
                   fixed(ps.duplicate_pct, 4) + "," + fixed(ps.compile_pct, 4) + "," +
                   fixed(ps.plausible_pct, 4) + "," +
                   fixed(100.0 * metrics::aggregate_pass_at_k(rs, 1), 4) + "\n";
  }
  atomic_write_file(config_.report_dir / "per_project.csv", per_project);

  // CodeBLEU of unique patches against the fix and the buggy code.
  std::map<std::string, const ManifestBug*> manifest_bugs;
  for (const auto& mb : manifest.bugs) manifest_bugs[mb.bug_id] = &mb;
  struct PatchSim {
    std::string hash;
    Status status;
    double to_fixed, to_buggy;
  };
  std::vector<std::vector<PatchSim>> per_bug(table.bugs.size());
  std::vector<std::string> bug_warnings(table.bugs.size());
  const auto& corp = corpus();
  parallel_for(table.bugs.size(), static_cast<std::size_t>(workers()), [&](std::size_t b) {
    const auto& bv = table.bugs[b];
    const auto* record = corp.find(bv.bug_id);
    const auto mit = manifest_bugs.find(bv.bug_id);
    if (!record || mit == manifest_bugs.end()) {
      bug_warnings[b] = bv.bug_id + ": missing from corpus or manifest";
      return;
    }
    std::set<std::string> seen;
    for (std::size_t i = 0; i < bv.candidates.size(); ++i) {
      const auto& c = bv.candidates[i];
      const auto& mc = mit->second->candidates.at(i);
      if (mc.empty || !seen.insert(c.content_hash).second) continue;
      try {
        per_bug[b].push_back({c.content_hash, c.status,
                              codesim::codebleu(mc.patch_text, record->fixed_function).codebleu,
                              codesim::codebleu(mc.patch_text, record->buggy_function).codebleu});
      } catch (const codesim::ReferenceUnparsable& e) {
        bug_warnings[b] = bv.bug_id + ": " + e.what();
        per_bug[b].clear();
        return;
      }
    }
  });
  json sim_warnings = json::array();
  json per_bug_json = json::array();
  std::vector<double> plausible_fixed, plausible_buggy, other_fixed;
  std::vector<double> median_plausible, median_other;
  for (std::size_t b = 0; b < per_bug.size(); ++b) {
    if (!bug_warnings[b].empty()) sim_warnings.push_back(bug_warnings[b]);
    json patches = json::array();
    std::vector<double> p_here, o_here;
    for (const auto& s : per_bug[b]) {
      patches.push_back({{"content_hash", s.hash},
                         {"status", validation::to_string(s.status)},
                         {"to_fixed", s.to_fixed},
                         {"to_buggy", s.to_buggy}});
      if (s.status == Status::Plausible) {
        plausible_fixed.push_back(s.to_fixed);
        plausible_buggy.push_back(s.to_buggy);
        p_here.push_back(s.to_fixed);
      } else {
        other_fixed.push_back(s.to_fixed);
        o_here.push_back(s.to_fixed);
      }
    }
    if (!p_here.empty() && !o_here.empty()) {
      median_plausible.push_back(metrics::median(p_here));
      median_other.push_back(metrics::median(o_here));
    }
    per_bug_json.push_back({{"bug_id", table.bugs[b].bug_id}, {"patches", patches}});
  }
  const json similarity{
      {"metric", "codebleu"},
      {"groups",
       {{"plausible_to_fixed", summary_json(plausible_fixed)},
        {"non_plausible_to_fixed", summary_json(other_fixed)},
        {"plausible_to_buggy", summary_json(plausible_buggy)}}},
      {"tests",
       {{"plausible_vs_non_plausible_to_fixed", wilcoxon_json(median_plausible, median_other)},
        {"plausible_to_buggy_vs_to_fixed", wilcoxon_json(plausible_buggy, plausible_fixed)}}},
      {"per_bug", per_bug_json},
      {"warnings", sim_warnings}};
  write_json(config_.report_dir / "similarity.json", similarity);

  // Overlap of fixed bugs with other runs.
  const auto overlap_path = config_.report_dir / "overlap.json";
  if (config_.overlap_runs.empty()) {
    std::error_code ec;
    std::filesystem::remove(overlap_path, ec);
  } else {
    std::vector<std::pair<std::string, std::set<std::string>>> sets;
    auto fixed_set = [](const ValidationTable& t) {
      std::set<std::string> s;
      for (const auto& b : t.bugs) {
        if (bug_result(b).c > 0) s.insert(b.bug_id);
      }
      return s;
    };
    sets.emplace_back(config_.run_label.empty() ? manifest.provider : config_.run_label,
                      fixed_set(table));
    for (const auto& [label, dir] : config_.overlap_runs) {
      sets.emplace_back(label,
                        fixed_set(validation_from_json(read_json(dir / "validation.json", "validate"))));
    }
    const auto o = metrics::overlap(sets);
    json models = json::array();
    for (const auto& [label, s] : sets) models.push_back(label);
    write_json(overlap_path, {{"models", models},
                              {"per_model", o.per_model},
                              {"regions", o.regions},
                              {"union", o.union_count}});
  }
  log_ << "report: " << results.size() << " bugs, pass@1 " << passk_json[0]["pass_at_k_pct"]
       << "%\n";
}

void Pipeline::rank() {
  const auto manifest = load_manifest();
  const auto table = load_validation();
  ranking::CachedEmbedder emb(embedder(), config_.cache_dir);
  const auto& corp = corpus();

  std::map<std::string, const ManifestBug*> manifest_bugs;
  for (const auto& mb : manifest.bugs) manifest_bugs[mb.bug_id] = &mb;

  std::vector<std::vector<ranking::ScoredPatch>> scored(table.bugs.size());
  parallel_for(table.bugs.size(), static_cast<std::size_t>(std::min(workers(), config_.concurrency)),
               [&](std::size_t b) {
                 const auto& bv = table.bugs[b];
                 const auto* record = corp.find(bv.bug_id);
                 const auto mit = manifest_bugs.find(bv.bug_id);
                 if (!record || mit == manifest_bugs.end()) throw UnknownBugId(bv.bug_id);
                 const auto buggy = emb.embed(record->buggy_function);
                 std::set<std::string> seen;
                 for (std::size_t i = 0; i < bv.candidates.size(); ++i) {
                   const auto& mc = mit->second->candidates.at(i);
                   if (mc.empty || !seen.insert(mc.content_hash).second) continue;
                   scored[b].push_back(
                       {mc.content_hash, ranking::cosine(buggy, emb.embed(mc.patch_text))});
                 }
               });

  double threshold = 0.0;
  if (config_.threshold) {
    threshold = *config_.threshold;
  } else {
    std::vector<double> all;
    for (const auto& s : scored) {
      for (const auto& p : s) all.push_back(p.similarity);
    }
    threshold = ranking::compute_threshold(all);
  }

  std::map<std::string, ranking::OutcomeMap> outcomes;
  std::vector<ranking::VariantPair> variants;
  for (std::size_t b = 0; b < table.bugs.size(); ++b) {
    const auto& bv = table.bugs[b];
    std::map<std::string, bool> compiled;
    for (const auto& c : bv.candidates) {
      compiled[c.content_hash] = c.compiled;
      outcomes[bv.bug_id][c.content_hash] = c.status;
    }
    variants.push_back(ranking::rank_variants(bv.bug_id, scored[b], compiled, threshold));
  }

  std::string csv = "variant,threshold,r.P@1,P@1,r.P@5,P@5\n";
  json variants_json = json::object();
  for (const auto variant : config_.variants) {
    std::vector<ranking::RankedSuggestions> ranked;
    double p1 = 0.0, p5 = 0.0;
    json bugs_json = json::array();
    for (std::size_t b = 0; b < table.bugs.size(); ++b) {
      const auto& r = variant == ranking::Variant::All ? variants[b].all
                                                       : variants[b].compile_pruned;
      ranked.push_back(r);
      const auto& bv = table.bugs[b];
      int n = 0, c = 0;
      for (const auto& cand : bv.candidates) {
        if (variant == ranking::Variant::CompilePruned && !cand.compiled) continue;
        ++n;
        if (cand.status == Status::Plausible) ++c;
      }
      p1 += capped_pass_at_k(n, c, 1);
      p5 += capped_pass_at_k(n, c, 5);
      json entries = json::array();
      for (const auto& e : r.entries) {
        entries.push_back({{"rank", e.rank},
                           {"content_hash", e.content_hash},
                           {"similarity", e.similarity},
                           {"status", validation::to_string(outcomes[bv.bug_id][e.content_hash])}});
      }
      json pruned = json::array();
      for (const auto& [hash, sim] : r.pruned) {
        pruned.push_back({{"content_hash", hash}, {"similarity", sim}});
      }
      bugs_json.push_back({{"bug_id", bv.bug_id}, {"entries", entries}, {"pruned", pruned}});
    }
    const double bugs = static_cast<double>(table.bugs.size());
    const double rp1 = ranking::r_pass_at_k(ranked, outcomes, 1);
    const double rp5 = ranking::r_pass_at_k(ranked, outcomes, 5);
    csv += std::string(ranking::to_string(variant)) + "," + fixed(threshold, 4) + "," +
           fixed(rp1, 2) + "," + fixed(100.0 * p1 / bugs, 2) + "," + fixed(rp5, 2) + "," +
           fixed(100.0 * p5 / bugs, 2) + "\n";
    variants_json[std::string(ranking::to_string(variant))] = bugs_json;
    log_ << "rank " << ranking::to_string(variant) << ": r.P@1 " << fixed(rp1, 2) << " ("
         << fixed(100.0 * p1 / bugs, 2) << "), r.P@5 " << fixed(rp5, 2) << " ("
         << fixed(100.0 * p5 / bugs, 2) << ")\n";
  }
  atomic_write_file(config_.report_dir / "ranking.csv", csv);
  write_json(config_.report_dir / "ranked_suggestions.json",
             {{"threshold", threshold},
              {"threshold_mode", config_.threshold ? "fixed" : "median"},
              {"embedder", emb.id()},
              {"variants", variants_json}});
}

void Pipeline::run() {
  generate();
  validate();
  report();
  rank();
}

}  // namespace nl2fix
