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

#pragma once

#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "nl2fix/config.hpp"
#include "nl2fix/corpus.hpp"
#include "nl2fix/metrics.hpp"
#include "nl2fix/ranking.hpp"
#include "nl2fix/sampling.hpp"
#include "nl2fix/validation.hpp"

namespace nl2fix {

class UnknownBugId : public Error {
 public:
  explicit UnknownBugId(const std::string& id)
      : Error("UnknownBugId", "bug filter names an unknown bug: " + id) {}
};

class MissingArtifact : public Error {
 public:
  explicit MissingArtifact(const std::string& what)
      : Error("MissingArtifact", what) {}
};

struct ManifestCandidate {
  int index = 0;
  std::string content_hash;
  bool empty = false;
  std::string patch_text;
};

struct ManifestBug {
  std::string bug_id;
  std::string prompt_digest;
  bool truncated = false;
  std::vector<ManifestCandidate> candidates;
};

// What generate produced: every (bug, index, hash) of the run.
struct Manifest {
  std::string provider;
  std::string strategy;
  double temperature = 0.0;
  int n_samples = 0;
  std::vector<ManifestBug> bugs;
};

struct CandidateStatus {
  int index = 0;
  std::string content_hash;
  validation::Status status = validation::Status::Uncompilable;
  bool compiled = false;
  bool exact_match = false;
};

struct BugValidation {
  std::string bug_id;
  std::string project;
  std::vector<CandidateStatus> candidates;
};

// Per-candidate validation results of a run.
struct ValidationTable {
  std::vector<BugValidation> bugs;
};

nlohmann::json manifest_to_json(const Manifest& m);
Manifest manifest_from_json(const nlohmann::json& j);
nlohmann::json validation_to_json(const ValidationTable& t);
ValidationTable validation_from_json(const nlohmann::json& j);

metrics::BugResult bug_result(const BugValidation& bug);

// Replacement collaborators; any left null is built from the config.
struct Components {
  sampling::GenerationProvider* provider = nullptr;
  validation::CommandRunner* runner = nullptr;
  ranking::Embedder* embedder = nullptr;
};

// generate -> validate -> report -> rank over one run configuration.
// Every phase reads its inputs from and writes its outputs to report_dir,
// and all expensive work goes through the caches under cache_dir.
class Pipeline {
 public:
  Pipeline(RunConfig config, std::ostream& log, Components components = {});
  ~Pipeline();

  Manifest generate();
  ValidationTable validate();
  void report();
  void rank();
  void run();

  const RunConfig& config() const { return config_; }

 private:
  const corpus::Corpus& corpus();
  std::vector<const corpus::BugRecord*> selected_bugs();
  Manifest load_manifest() const;
  ValidationTable load_validation() const;
  sampling::GenerationProvider& provider();
  validation::CommandRunner& runner();
  ranking::Embedder& embedder();
  int workers() const;

  RunConfig config_;
  std::ostream& log_;
  Components components_;
  std::optional<corpus::Corpus> corpus_;
  std::unique_ptr<sampling::GenerationProvider> owned_provider_;
  std::unique_ptr<validation::CommandRunner> owned_runner_;
  std::unique_ptr<ranking::Embedder> owned_embedder_;
};

}  // namespace nl2fix
