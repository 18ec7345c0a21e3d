// sreval/service.h

// Copyright 2026  The sreval Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef SREVAL_SERVICE_H_
#define SREVAL_SERVICE_H_

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "sreval/det.h"
#include "sreval/metrics.h"
#include "sreval/submission.h"
#include "sreval/trialset.h"

namespace sreval {

using TimePoint = std::chrono::system_clock::time_point;
using Clock = std::function<TimePoint()>;

struct ServiceConfig {
  std::string key_path;
  std::string models_path;  // optional
  std::string data_dir = "sreval-data";
  int quota_per_day = 3;
  std::string listen = "127.0.0.1:8080";
  std::string admin_token;
  std::string static_dir;  // served at / when set
  bool partial = false;    // tolerate empty condition cells when scoring
  double c_miss = 1.0, c_fa = 1.0, p_target = 0.05;
  /// Events between full state snapshots of the event log.
  std::size_t snapshot_every = 64;

  /// Reads a JSON object with the field names above. Throws ConfigError.
  static ServiceConfig Load(const std::string &path);
  /// Applies SREVAL_KEY_PATH, SREVAL_QUOTA, SREVAL_LISTEN,
  /// SREVAL_ADMIN_TOKEN and SREVAL_DATA_DIR when set.
  void ApplyEnvironment(
      const std::function<const char *(const char *)> &getenv = std::getenv);
  /// Throws ConfigError on missing or out-of-range values.
  void Check() const;
};

/// Error with a stable machine-readable code and an HTTP status.
class ServiceError : public Error {
 public:
  ServiceError(std::string code, int status, const std::string &message,
               std::string details_json = "")
      : Error(message), code_(std::move(code)), status_(status),
        details_(std::move(details_json)) {}
  const std::string &code() const { return code_; }
  int status() const { return status_; }
  const std::string &details_json() const { return details_; }

 private:
  std::string code_;
  int status_;
  std::string details_;
};

struct Team {
  std::string team_id;
  std::string name;
  std::string token;
  TimePoint registered_at;
};

struct SubsetScore {
  double actual = 0.0;
  double min = 0.0;
};

struct SubmissionRecord {
  std::string submission_id;
  std::string team_id;
  TimePoint received_at;
  std::uint64_t seq = 0;  // commit order
  SubsetScore progress;
  SubsetScore test;  // never exposed outside published snapshots
  std::array<std::optional<double>, kNumCells> progress_cells;  // actual c_norm
};

struct LeaderboardEntry {
  int rank = 0;
  std::string team_id;
  std::string team_name;
  double best_actual = 0.0;
  double best_min = 0.0;
  std::string best_submission_id;
  std::size_t submissions = 0;
};

struct TestSnapshot {
  std::string snapshot_id;
  TimePoint published_at;
  std::vector<LeaderboardEntry> entries;
};

struct QuotaStatus {
  int limit = 0;
  int used = 0;
  TimePoint resets_at;
};

/// Owner-visible DET data for the progress subset of one submission, one
/// curve per source, resampled onto a fixed false-alarm grid.
struct SubmissionDet {
  struct Curve {
    Source source;
    std::vector<ContourPoint> points;
    DetMarker actual, minimum;
  };
  std::vector<Curve> curves;
  double beta = 0.0;
};

/**
   The leaderboard platform. Every state change is appended to an event log
   in `data_dir` before it becomes visible; the in-memory state is a fold of
   that log, so a restart reproduces it exactly. A torn final log line (a
   crash mid-write) is discarded on recovery.

   Thread-safe. Parsing, validation and scoring run outside the state lock;
   the quota check reserves a slot atomically before scoring starts.
 */
class Platform {
 public:
  explicit Platform(ServiceConfig config,
                    Clock clock = [] { return std::chrono::system_clock::now(); });
  ~Platform();
  Platform(const Platform &) = delete;
  Platform &operator=(const Platform &) = delete;

  Team RegisterTeam(const std::string &name);

  /// Scores a score file for the team holding `token`. Throws ServiceError
  /// with UNAUTHORIZED, PARSE_FAILED, VALIDATION_FAILED or QUOTA_EXCEEDED.
  /// The returned record still carries test scores; use OwnerView before
  /// showing it to anyone.
  SubmissionRecord Submit(const std::string &token, const std::string &scores);

  std::vector<LeaderboardEntry> ProgressLeaderboard() const;
  /// Latest published snapshot, if any.
  std::optional<TestSnapshot> LatestTestSnapshot() const;
  TestSnapshot GetTestSnapshot(const std::string &snapshot_id) const;
  std::vector<std::string> SnapshotIds() const;
  /// Freezes the current best test scores. Throws UNAUTHORIZED.
  TestSnapshot PublishTestSnapshot(const std::string &admin_token);

  /// Owner-scoped access; other teams get NOT_FOUND.
  SubmissionRecord GetSubmission(const std::string &token,
                                 const std::string &submission_id) const;
  std::vector<SubmissionRecord> ListSubmissions(const std::string &token) const;
  SubmissionDet GetSubmissionDet(const std::string &token,
                                 const std::string &submission_id) const;
  QuotaStatus Quota(const std::string &token) const;

  /// Team for a token; throws UNAUTHORIZED.
  Team Authenticate(const std::string &token) const;
  const ServiceConfig &config() const { return config_; }
  const TrialList &trial_list() const { return list_; }
  const CostParams &params() const { return params_; }

  /// Test-subset leaderboard computed from the stored submissions, as a
  /// snapshot taken now would show it.
  std::vector<LeaderboardEntry> ComputeTestLeaderboard() const;

 private:
  struct State;
  struct Stored;

  void Recover();
  void Append(const std::string &event_json);
  void WriteStateSnapshot();
  void ApplyEvent(const std::string &line);
  std::vector<double> Llr(const std::string &submission_id) const;
  std::string NewToken();

  ServiceConfig config_;
  Clock clock_;
  CostParams params_;
  TrialSetManifest manifest_;
  TrialList list_;

  mutable std::shared_mutex mu_;
  std::unique_ptr<State> state_;
  std::FILE *log_ = nullptr;
};

/// Strips test-subset scores.
std::string OwnerViewJson(const SubmissionRecord &r);
std::string LeaderboardJson(const std::vector<LeaderboardEntry> &entries);
std::string SnapshotJson(const TestSnapshot &s);
std::string FormatUtc(TimePoint t);

/// Runs the HTTP API until Stop() is called from another thread.
class HttpServer {
 public:
  explicit HttpServer(Platform &platform);
  ~HttpServer();
  /// Binds host:port (port 0 picks a free one); returns the bound port.
  int Bind(const std::string &listen);
  void Serve();  // blocks
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace sreval

#endif  // SREVAL_SERVICE_H_
