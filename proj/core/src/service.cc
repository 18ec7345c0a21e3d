// core/src/service.cc

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

#include "sreval/service.h"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "sreval/tsv.h"

namespace sreval {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char *kLogName = "events.jsonl";
constexpr const char *kStateName = "state.json";
constexpr const char *kScoreDir = "scores";
constexpr std::size_t kDetGridPoints = 101;

std::int64_t ToMicros(TimePoint t) {
  return std::chrono::duration_cast<std::chrono::microseconds>(t.time_since_epoch())
      .count();
}

TimePoint FromMicros(std::int64_t us) {
  return TimePoint(std::chrono::duration_cast<TimePoint::duration>(
      std::chrono::microseconds(us)));
}

std::int64_t UtcDay(TimePoint t) {
  const std::int64_t s =
      std::chrono::duration_cast<std::chrono::seconds>(t.time_since_epoch()).count();
  return s >= 0 ? s / 86400 : (s - 86399) / 86400;
}

TimePoint DayStart(std::int64_t day) {
  return TimePoint(std::chrono::duration_cast<TimePoint::duration>(
      std::chrono::seconds(day * 86400)));
}

std::string NumberedId(const char *prefix, std::size_t n, int width) {
  std::string digits = std::to_string(n);
  if (static_cast<int>(digits.size()) < width)
    digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
  return prefix + digits;
}

ServiceError Unauthorized(const std::string &what) {
  return ServiceError("UNAUTHORIZED", 401, what);
}

ServiceError NotFound(const std::string &what) {
  return ServiceError("NOT_FOUND", 404, what);
}

json EntryToJson(const LeaderboardEntry &e) {
  return {{"rank", e.rank},
          {"team_id", e.team_id},
          {"team", e.team_name},
          {"best_actual", e.best_actual},
          {"best_min", e.best_min},
          {"best_submission_id", e.best_submission_id},
          {"submissions", e.submissions}};
}

LeaderboardEntry EntryFromJson(const json &j) {
  LeaderboardEntry e;
  e.rank = j.at("rank").get<int>();
  e.team_id = j.at("team_id").get<std::string>();
  e.team_name = j.at("team").get<std::string>();
  e.best_actual = j.at("best_actual").get<double>();
  e.best_min = j.at("best_min").get<double>();
  e.best_submission_id = j.at("best_submission_id").get<std::string>();
  e.submissions = j.at("submissions").get<std::size_t>();
  return e;
}

json SnapshotToJson(const TestSnapshot &s) {
  json entries = json::array();
  for (const auto &e : s.entries) entries.push_back(EntryToJson(e));
  return {{"snapshot_id", s.snapshot_id},
          {"published_at_us", ToMicros(s.published_at)},
          {"entries", std::move(entries)}};
}

TestSnapshot SnapshotFromJson(const json &j) {
  TestSnapshot s;
  s.snapshot_id = j.at("snapshot_id").get<std::string>();
  s.published_at = FromMicros(j.at("published_at_us").get<std::int64_t>());
  for (const auto &e : j.at("entries")) s.entries.push_back(EntryFromJson(e));
  return s;
}

json TeamToJson(const Team &t) {
  return {{"team_id", t.team_id},
          {"name", t.name},
          {"token", t.token},
          {"registered_at_us", ToMicros(t.registered_at)}};
}

Team TeamFromJson(const json &j) {
  return {j.at("team_id").get<std::string>(), j.at("name").get<std::string>(),
          j.at("token").get<std::string>(),
          FromMicros(j.at("registered_at_us").get<std::int64_t>())};
}

json RecordToJson(const SubmissionRecord &r) {
  json cells = json::array();
  for (const auto &c : r.progress_cells) cells.push_back(c ? json(*c) : json(nullptr));
  return {{"submission_id", r.submission_id},
          {"team_id", r.team_id},
          {"received_at_us", ToMicros(r.received_at)},
          {"seq", r.seq},
          {"progress", {{"actual", r.progress.actual}, {"min", r.progress.min}}},
          {"test", {{"actual", r.test.actual}, {"min", r.test.min}}},
          {"progress_cells", std::move(cells)}};
}

SubmissionRecord RecordFromJson(const json &j) {
  SubmissionRecord r;
  r.submission_id = j.at("submission_id").get<std::string>();
  r.team_id = j.at("team_id").get<std::string>();
  r.received_at = FromMicros(j.at("received_at_us").get<std::int64_t>());
  r.seq = j.at("seq").get<std::uint64_t>();
  r.progress = {j.at("progress").at("actual").get<double>(),
                j.at("progress").at("min").get<double>()};
  r.test = {j.at("test").at("actual").get<double>(), j.at("test").at("min").get<double>()};
  const auto &cells = j.at("progress_cells");
  if (cells.size() != kNumCells) throw Error("record has a malformed cell table");
  for (std::size_t c = 0; c < kNumCells; ++c)
    if (!cells[c].is_null()) r.progress_cells[c] = cells[c].get<double>();
  return r;
}

// Best-of ranking shared by both leaderboards. `score` picks the subset.
std::vector<LeaderboardEntry> Rank(
    const std::vector<SubmissionRecord> &subs, const std::vector<Team> &teams,
    const std::function<const SubsetScore &(const SubmissionRecord &)> &score) {
  struct Best {
    const SubmissionRecord *best = nullptr;
    double best_min = 0.0;
    std::size_t count = 0;
  };
  std::map<std::string, Best> by_team;
  for (const SubmissionRecord &r : subs) {  // commit order
    Best &b = by_team[r.team_id];
    const SubsetScore &s = score(r);
    if (b.best == nullptr || s.actual < score(*b.best).actual) b.best = &r;
    b.best_min = b.count == 0 ? s.min : std::min(b.best_min, s.min);
    ++b.count;
  }
  std::unordered_map<std::string, const Team *> team_by_id;
  for (const Team &t : teams) team_by_id[t.team_id] = &t;

  std::vector<std::pair<std::uint64_t, LeaderboardEntry>> rows;
  for (const auto &[team_id, b] : by_team) {
    LeaderboardEntry e;
    e.team_id = team_id;
    e.team_name = team_by_id.at(team_id)->name;
    e.best_actual = score(*b.best).actual;
    e.best_min = b.best_min;
    e.best_submission_id = b.best->submission_id;
    e.submissions = b.count;
    rows.push_back({b.best->seq, std::move(e)});
  }
  // Ascending best actual; ties by best min, then by the earlier best.
  std::sort(rows.begin(), rows.end(), [](const auto &a, const auto &b) {
    if (a.second.best_actual != b.second.best_actual)
      return a.second.best_actual < b.second.best_actual;
    if (a.second.best_min != b.second.best_min)
      return a.second.best_min < b.second.best_min;
    return a.first < b.first;
  });
  std::vector<LeaderboardEntry> out;
  for (auto &[seq, e] : rows) {
    e.rank = static_cast<int>(out.size()) + 1;
    out.push_back(std::move(e));
  }
  return out;
}

void WriteFileAtomically(const fs::path &path, const std::string &bytes) {
  const fs::path tmp = path.string() + ".tmp";
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0600);
  if (fd < 0) throw Error("cannot write " + tmp.string() + ": " + std::strerror(errno));
  std::size_t done = 0;
  while (done < bytes.size()) {
    const ssize_t n = ::write(fd, bytes.data() + done, bytes.size() - done);
    if (n < 0) {
      ::close(fd);
      throw Error("write failed for " + tmp.string());
    }
    done += static_cast<std::size_t>(n);
  }
  ::fsync(fd);
  ::close(fd);
  fs::rename(tmp, path);
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

ServiceConfig ServiceConfig::Load(const std::string &path) {
  json j;
  try {
    j = json::parse(ReadFile(path));
  } catch (const json::exception &e) {
    throw ConfigError(path + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError(path + ": expected a JSON object");
  ServiceConfig c;
  try {
    for (const auto &[k, v] : j.items()) {
      if (k == "key_path") c.key_path = v.get<std::string>();
      else if (k == "models_path") c.models_path = v.get<std::string>();
      else if (k == "data_dir") c.data_dir = v.get<std::string>();
      else if (k == "quota_per_day") c.quota_per_day = v.get<int>();
      else if (k == "listen") c.listen = v.get<std::string>();
      else if (k == "admin_token") c.admin_token = v.get<std::string>();
      else if (k == "static_dir") c.static_dir = v.get<std::string>();
      else if (k == "partial") c.partial = v.get<bool>();
      else if (k == "c_miss") c.c_miss = v.get<double>();
      else if (k == "c_fa") c.c_fa = v.get<double>();
      else if (k == "p_target") c.p_target = v.get<double>();
      else if (k == "snapshot_every") c.snapshot_every = v.get<std::size_t>();
      else throw ConfigError(path + ": unknown key '" + k + "'");
    }
  } catch (const json::exception &e) {
    throw ConfigError(path + ": " + e.what());
  }
  return c;
}

void ServiceConfig::ApplyEnvironment(
    const std::function<const char *(const char *)> &getenv) {
  if (const char *v = getenv("SREVAL_KEY_PATH")) key_path = v;
  if (const char *v = getenv("SREVAL_LISTEN")) listen = v;
  if (const char *v = getenv("SREVAL_ADMIN_TOKEN")) admin_token = v;
  if (const char *v = getenv("SREVAL_DATA_DIR")) data_dir = v;
  if (const char *v = getenv("SREVAL_QUOTA")) {
    unsigned long long q;
    if (!ParseUnsigned(v, &q) || q < 1 || q > 1000000)
      throw ConfigError("SREVAL_QUOTA must be an integer in [1, 1000000]");
    quota_per_day = static_cast<int>(q);
  }
}

void ServiceConfig::Check() const {
  if (key_path.empty()) throw ConfigError("no key path configured");
  if (data_dir.empty()) throw ConfigError("no data directory configured");
  if (quota_per_day < 1) throw ConfigError("quota_per_day must be positive");
  if (snapshot_every < 1) throw ConfigError("snapshot_every must be positive");
  CostParams(c_miss, c_fa, p_target);
}

// ---------------------------------------------------------------------------
// State

struct Platform::State {
  std::vector<Team> teams;
  std::unordered_map<std::string, std::size_t> team_by_token, team_by_name, team_by_id;
  std::vector<SubmissionRecord> submissions;
  std::unordered_map<std::string, std::size_t> sub_by_id;
  std::vector<TestSnapshot> snapshots;
  std::unordered_map<std::string, std::size_t> snap_by_id;
  std::map<std::pair<std::string, std::int64_t>, int> used, reserved;
  std::uint64_t seq = 0;
  std::size_t next_submission = 1;
  std::size_t events_since_state = 0;

  void AddTeam(Team t) {
    const std::size_t i = teams.size();
    team_by_token[t.token] = i;
    team_by_name[t.name] = i;
    team_by_id[t.team_id] = i;
    teams.push_back(std::move(t));
  }
  void AddSubmission(SubmissionRecord r) {
    ++used[{r.team_id, UtcDay(r.received_at)}];
    sub_by_id[r.submission_id] = submissions.size();
    // Ids may have gaps (reserved slots whose scoring failed).
    const std::size_t n = std::stoul(r.submission_id.substr(r.submission_id.find('-') + 1));
    next_submission = std::max(next_submission, n + 1);
    submissions.push_back(std::move(r));
  }
  void AddSnapshot(TestSnapshot s) {
    snap_by_id[s.snapshot_id] = snapshots.size();
    snapshots.push_back(std::move(s));
  }
};

Platform::Platform(ServiceConfig config, Clock clock)
    : config_(std::move(config)), clock_(std::move(clock)),
      params_(config_.c_miss, config_.c_fa, config_.p_target),
      state_(std::make_unique<State>()) {
  config_.Check();
  manifest_ = LoadTrials(config_.key_path, config_.models_path);
  list_ = manifest_.BlindList();
  // Scorability depends on the key alone, so check it before accepting files.
  const std::vector<double> zeros(manifest_.trials().size(), 0.0);
  for (Subset subset : kAllSubsets) {
    AggregateOptions opt;
    opt.partial = config_.partial;
    opt.subset = subset;
    try {
      AggregateFromTallies(TallyActual(zeros, manifest_, params_, subset), params_, opt);
    } catch (const MetricError &e) {
      throw ConfigError("key cannot be scored on the " + std::string(ToToken(subset)) +
                        " subset: " + e.what());
    }
  }
  fs::create_directories(fs::path(config_.data_dir) / kScoreDir);
  Recover();
}

Platform::~Platform() {
  if (log_) std::fclose(log_);
}

void Platform::ApplyEvent(const std::string &line) {
  const json e = json::parse(line);
  const auto seq = e.at("seq").get<std::uint64_t>();
  if (seq <= state_->seq) return;  // already folded into state.json
  if (seq != state_->seq + 1)
    throw Error("event log gap: expected seq " + std::to_string(state_->seq + 1) +
                ", found " + std::to_string(seq));
  const std::string type = e.at("type").get<std::string>();
  if (type == "team")
    state_->AddTeam(TeamFromJson(e.at("team")));
  else if (type == "submission")
    state_->AddSubmission(RecordFromJson(e.at("record")));
  else if (type == "snapshot")
    state_->AddSnapshot(SnapshotFromJson(e.at("snapshot")));
  else
    throw Error("unknown event type '" + type + "'");
  state_->seq = seq;
  ++state_->events_since_state;
}

void Platform::Recover() {
  const fs::path dir(config_.data_dir);
  const fs::path state_path = dir / kStateName;
  if (fs::exists(state_path)) {
    const json s = json::parse(ReadFile(state_path.string()));
    for (const auto &t : s.at("teams")) state_->AddTeam(TeamFromJson(t));
    for (const auto &r : s.at("submissions")) state_->AddSubmission(RecordFromJson(r));
    for (const auto &p : s.at("snapshots")) state_->AddSnapshot(SnapshotFromJson(p));
    state_->seq = s.at("seq").get<std::uint64_t>();
  }

  const fs::path log_path = dir / kLogName;
  if (fs::exists(log_path)) {
    const std::string bytes = ReadFile(log_path.string());
    std::size_t pos = 0, good_end = 0, line_no = 0;
    while (pos < bytes.size()) {
      const std::size_t nl = bytes.find('\n', pos);
      const bool complete = nl != std::string::npos;
      const std::string line =
          bytes.substr(pos, (complete ? nl : bytes.size()) - pos);
      ++line_no;
      try {
        if (!complete) throw Error("unterminated line");
        ApplyEvent(line);
      } catch (const std::exception &ex) {
        // Only the last line may be damaged; anything earlier is corruption.
        if (complete && nl + 1 < bytes.size())
          throw Error("corrupt event log at line " + std::to_string(line_no) +
                      ": " + ex.what());
        break;
      }
      pos = nl + 1;
      good_end = pos;
    }
    if (good_end < bytes.size()) fs::resize_file(log_path, good_end);
  }
  log_ = std::fopen(log_path.c_str(), "ab");
  if (log_ == nullptr) throw Error("cannot open " + log_path.string());
}

void Platform::Append(const std::string &event_json) {
  if (std::fwrite(event_json.data(), 1, event_json.size(), log_) != event_json.size() ||
      std::fputc('\n', log_) == EOF || std::fflush(log_) != 0)
    throw Error("failed to append to the event log");
  ::fsync(::fileno(log_));
}

void Platform::WriteStateSnapshot() {
  json s;
  s["format"] = "sreval-state";
  s["seq"] = state_->seq;
  s["teams"] = json::array();
  for (const auto &t : state_->teams) s["teams"].push_back(TeamToJson(t));
  s["submissions"] = json::array();
  for (const auto &r : state_->submissions) s["submissions"].push_back(RecordToJson(r));
  s["snapshots"] = json::array();
  for (const auto &p : state_->snapshots) s["snapshots"].push_back(SnapshotToJson(p));
  WriteFileAtomically(fs::path(config_.data_dir) / kStateName, s.dump());
  state_->events_since_state = 0;
}

std::string Platform::NewToken() {
  static thread_local std::random_device rd;
  std::string token;
  static const char *hex = "0123456789abcdef";
  for (int i = 0; i < 32; ++i) token.push_back(hex[rd() & 15]);
  return token;
}

// ---------------------------------------------------------------------------
// Operations

Team Platform::RegisterTeam(const std::string &name) {
  if (name.empty() || name.size() > 100)
    throw ServiceError("BAD_REQUEST", 400, "team name must have 1 to 100 characters");
  for (unsigned char c : name)
    if (c < 0x20) throw ServiceError("BAD_REQUEST", 400, "team name has control characters");
  Team t;
  t.name = name;
  t.token = NewToken();
  t.registered_at = clock_();
  std::unique_lock lock(mu_);
  if (state_->team_by_name.count(name))
    throw ServiceError("CONFLICT", 409, "team name '" + name + "' is taken");
  t.team_id = NumberedId("team-", state_->teams.size() + 1, 4);
  const json e = {{"seq", state_->seq + 1}, {"type", "team"}, {"team", TeamToJson(t)}};
  Append(e.dump());
  ApplyEvent(e.dump());
  if (state_->events_since_state >= config_.snapshot_every) WriteStateSnapshot();
  return t;
}

Team Platform::Authenticate(const std::string &token) const {
  std::shared_lock lock(mu_);
  auto it = state_->team_by_token.find(token);
  if (token.empty() || it == state_->team_by_token.end())
    throw Unauthorized("missing or unknown team token");
  return state_->teams[it->second];
}

SubmissionRecord Platform::Submit(const std::string &token, const std::string &text) {
  const Team team = Authenticate(token);

  // Parse and validate first: malformed files do not consume quota.
  RawScores raw;
  try {
    std::istringstream is(text);
    raw = ParseScores(is);
  } catch (const ParseError &e) {
    json details = {{"line", e.line()}};
    throw ServiceError("PARSE_FAILED", 400, e.what(), details.dump());
  }
  const TimePoint now = clock_();
  ValidationResult v = Validate(raw, list_, team.team_id, now);
  if (!v.report.accepted()) {
    json missing = json::array(), extra = json::array();
    for (const auto &k : v.report.missing)
      missing.push_back({{"modelid", k.model_id}, {"segmentid", k.segment_id}});
    for (const auto &k : v.report.extra)
      extra.push_back({{"modelid", k.model_id}, {"segmentid", k.segment_id}});
    json details = {{"n_missing", v.report.n_missing},
                    {"n_extra", v.report.n_extra},
                    {"missing", std::move(missing)},
                    {"extra", std::move(extra)}};
    throw ServiceError("VALIDATION_FAILED", 422, v.report.Summary(), details.dump());
  }

  // Reserve a quota slot.
  const auto slot = std::make_pair(team.team_id, UtcDay(now));
  std::string id;
  {
    std::unique_lock lock(mu_);
    const int used = state_->used[slot] + state_->reserved[slot];
    if (used >= config_.quota_per_day) {
      json details = {{"limit", config_.quota_per_day},
                      {"used", used},
                      {"resets_at", FormatUtc(DayStart(slot.second + 1))}};
      throw ServiceError("QUOTA_EXCEEDED", 429,
                         "daily submission limit of " +
                             std::to_string(config_.quota_per_day) + " reached",
                         details.dump());
    }
    ++state_->reserved[slot];
    id = NumberedId("sub-", state_->next_submission++, 6);
  }
  struct Release {
    Platform *p;
    std::pair<std::string, std::int64_t> slot;
    ~Release() {
      std::unique_lock lock(p->mu_);
      --p->state_->reserved[slot];
    }
  } release{this, slot};

  // Score both subsets outside the lock.
  const std::vector<double> &llr = v.submission->llr;
  SubmissionRecord r;
  r.submission_id = id;
  r.team_id = team.team_id;
  r.received_at = now;
  for (Subset subset : kAllSubsets) {
    AggregateOptions opt;
    opt.partial = config_.partial;
    opt.subset = subset;
    const AggregateCost actual = AggregateActual(llr, manifest_, params_, opt);
    const AggregateMinCost min = AggregateMin(llr, manifest_, params_, opt);
    SubsetScore &s = subset == Subset::kProgress ? r.progress : r.test;
    s = {actual.final, min.final};
    if (subset == Subset::kProgress)
      for (std::size_t c = 0; c < kNumCells; ++c)
        if (actual.per_cell[c]) r.progress_cells[c] = actual.per_cell[c]->c_norm;
  }
  {
    const fs::path p = fs::path(config_.data_dir) / kScoreDir / (id + ".bin");
    WriteFileAtomically(p, std::string(reinterpret_cast<const char *>(llr.data()),
                                       llr.size() * sizeof(double)));
  }

  std::unique_lock lock(mu_);
  r.seq = state_->seq + 1;
  const json e = {{"seq", r.seq}, {"type", "submission"}, {"record", RecordToJson(r)}};
  Append(e.dump());
  ApplyEvent(e.dump());
  if (state_->events_since_state >= config_.snapshot_every) WriteStateSnapshot();
  return state_->submissions.back();
}

std::vector<LeaderboardEntry> Platform::ProgressLeaderboard() const {
  std::shared_lock lock(mu_);
  return Rank(state_->submissions, state_->teams,
              [](const SubmissionRecord &r) -> const SubsetScore & { return r.progress; });
}

std::vector<LeaderboardEntry> Platform::ComputeTestLeaderboard() const {
  std::shared_lock lock(mu_);
  return Rank(state_->submissions, state_->teams,
              [](const SubmissionRecord &r) -> const SubsetScore & { return r.test; });
}

TestSnapshot Platform::PublishTestSnapshot(const std::string &admin_token) {
  if (config_.admin_token.empty() || admin_token != config_.admin_token)
    throw Unauthorized("admin credential required");
  std::unique_lock lock(mu_);
  TestSnapshot s;
  s.snapshot_id = NumberedId("snap-", state_->snapshots.size() + 1, 4);
  s.published_at = clock_();
  s.entries = Rank(state_->submissions, state_->teams,
                   [](const SubmissionRecord &r) -> const SubsetScore & { return r.test; });
  const json e = {{"seq", state_->seq + 1}, {"type", "snapshot"}, {"snapshot", SnapshotToJson(s)}};
  Append(e.dump());
  ApplyEvent(e.dump());
  if (state_->events_since_state >= config_.snapshot_every) WriteStateSnapshot();
  return state_->snapshots.back();
}

std::optional<TestSnapshot> Platform::LatestTestSnapshot() const {
  std::shared_lock lock(mu_);
  if (state_->snapshots.empty()) return std::nullopt;
  return state_->snapshots.back();
}

TestSnapshot Platform::GetTestSnapshot(const std::string &snapshot_id) const {
  std::shared_lock lock(mu_);
  auto it = state_->snap_by_id.find(snapshot_id);
  if (it == state_->snap_by_id.end()) throw NotFound("no snapshot " + snapshot_id);
  return state_->snapshots[it->second];
}

std::vector<std::string> Platform::SnapshotIds() const {
  std::shared_lock lock(mu_);
  std::vector<std::string> ids;
  for (const auto &s : state_->snapshots) ids.push_back(s.snapshot_id);
  return ids;
}

SubmissionRecord Platform::GetSubmission(const std::string &token,
                                         const std::string &submission_id) const {
  const Team team = Authenticate(token);
  std::shared_lock lock(mu_);
  auto it = state_->sub_by_id.find(submission_id);
  // Someone else's submission looks exactly like a missing one.
  if (it == state_->sub_by_id.end() ||
      state_->submissions[it->second].team_id != team.team_id)
    throw NotFound("no submission " + submission_id);
  return state_->submissions[it->second];
}

std::vector<SubmissionRecord> Platform::ListSubmissions(const std::string &token) const {
  const Team team = Authenticate(token);
  std::shared_lock lock(mu_);
  std::vector<SubmissionRecord> out;
  for (const auto &r : state_->submissions)
    if (r.team_id == team.team_id) out.push_back(r);
  return out;
}

QuotaStatus Platform::Quota(const std::string &token) const {
  const Team team = Authenticate(token);
  const std::int64_t day = UtcDay(clock_());
  std::shared_lock lock(mu_);
  QuotaStatus q;
  q.limit = config_.quota_per_day;
  auto it = state_->used.find({team.team_id, day});
  q.used = it == state_->used.end() ? 0 : it->second;
  q.resets_at = DayStart(day + 1);
  return q;
}

std::vector<double> Platform::Llr(const std::string &submission_id) const {
  const std::string bytes = ReadFile(
      (fs::path(config_.data_dir) / kScoreDir / (submission_id + ".bin")).string());
  if (bytes.size() != list_.size() * sizeof(double))
    throw Error("stored scores for " + submission_id + " are damaged");
  std::vector<double> llr(list_.size());
  std::memcpy(llr.data(), bytes.data(), bytes.size());
  return llr;
}

SubmissionDet Platform::GetSubmissionDet(const std::string &token,
                                         const std::string &submission_id) const {
  GetSubmission(token, submission_id);  // ownership check
  const std::vector<double> llr = Llr(submission_id);
  const auto cells = GroupByCell(llr, manifest_, Subset::kProgress);
  const CellWeights weights = CellWeights::Uniform();
  SubmissionDet out;
  out.beta = params_.beta();
  for (Source source : kAllSources) {
    std::vector<WeightedGroup> groups;
    for (std::size_t c = 0; c < kNumCells; ++c) {
      if (ConditionCell::FromIndex(c).source != source) continue;
      bool t = false, n = false;
      for (const auto &s : cells[c]) (s.is_target ? t : n) = true;
      if (t && n) groups.push_back({cells[c], weights[c], ""});
    }
    if (groups.empty()) continue;
    const DetCurve curve = DetPoints(groups, params_);
    out.curves.push_back({source, ResampleDet(curve, kDetGridPoints), curve.actual,
                          curve.minimum});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Payloads

std::string FormatUtc(TimePoint t) {
  const std::int64_t us = ToMicros(t);
  std::int64_t s = us >= 0 ? us / 1000000 : (us - 999999) / 1000000;
  const std::time_t tt = static_cast<std::time_t>(s);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[40];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%S", &tm);
  char frac[32];
  std::snprintf(frac, sizeof(frac), ".%06lldZ", static_cast<long long>(us - s * 1000000));
  return std::string(buf) + frac;
}

std::string OwnerViewJson(const SubmissionRecord &r) {
  json cells = json::object();
  for (std::size_t c = 0; c < kNumCells; ++c)
    cells[ConditionCell::FromIndex(c).Name()] =
        r.progress_cells[c] ? json(*r.progress_cells[c]) : json(nullptr);
  json j = {{"submission_id", r.submission_id},
            {"team_id", r.team_id},
            {"received_at", FormatUtc(r.received_at)},
            {"status", "scored"},
            {"progress", {{"actual", r.progress.actual}, {"min", r.progress.min},
                          {"cells", std::move(cells)}}},
            {"test", "withheld"}};
  return j.dump();
}

std::string LeaderboardJson(const std::vector<LeaderboardEntry> &entries) {
  json rows = json::array();
  for (const auto &e : entries) rows.push_back(EntryToJson(e));
  return json{{"subset", "progress"}, {"entries", std::move(rows)}}.dump();
}

std::string SnapshotJson(const TestSnapshot &s) {
  json rows = json::array();
  for (const auto &e : s.entries) rows.push_back(EntryToJson(e));
  return json{{"subset", "test"},
              {"snapshot_id", s.snapshot_id},
              {"published_at", FormatUtc(s.published_at)},
              {"entries", std::move(rows)}}
      .dump();
}

}  // namespace sreval
