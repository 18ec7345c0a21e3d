// core/src/service_http.cc

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

// HTTP+JSON front end for Platform.
//
//   POST /teams                      {"name": ...} -> team id and token
//   POST /submissions                multipart field "scores", or raw body
//   GET  /submissions                own history
//   GET  /submissions/{id}           own submission (test scores withheld)
//   GET  /submissions/{id}/det       own progress DET data
//   GET  /quota                      own daily quota
//   GET  /trials                     the blind trial list
//   GET  /leaderboard/progress
//   GET  /leaderboard/test           latest snapshot
//   GET  /leaderboard/test/{id}
//   POST /admin/snapshot             admin token required
//
// Team and admin tokens travel as "Authorization: Bearer <token>".
// Errors are {"error": {"code", "message", "details"}}.

#include <sstream>

#include "httplib.h"
#include "json.hpp"
#include "sreval/service.h"

namespace sreval {

namespace {

using nlohmann::json;

constexpr const char *kJson = "application/json";

std::string BearerToken(const httplib::Request &req) {
  const std::string h = req.get_header_value("Authorization");
  constexpr std::string_view kPrefix = "Bearer ";
  if (h.size() > kPrefix.size() && h.compare(0, kPrefix.size(), kPrefix) == 0)
    return h.substr(kPrefix.size());
  return "";
}

void SendError(httplib::Response &res, const std::string &code, int status,
               const std::string &message, const std::string &details = "") {
  json err = {{"code", code}, {"message", message}};
  err["details"] = details.empty() ? json::object() : json::parse(details);
  res.status = status;
  res.set_content(json{{"error", err}}.dump(), kJson);
}

json MarkerJson(const DetMarker &m) {
  return {{"theta", m.theta}, {"p_fa", m.p_fa}, {"p_miss", m.p_miss}, {"c_norm", m.c_norm}};
}

// Wraps a handler so every failure becomes a JSON error payload.
template <typename F>
httplib::Server::Handler Guard(F f) {
  return [f](const httplib::Request &req, httplib::Response &res) {
    try {
      f(req, res);
    } catch (const ServiceError &e) {
      SendError(res, e.code(), e.status(), e.what(), e.details_json());
    } catch (const json::exception &e) {
      SendError(res, "BAD_REQUEST", 400, std::string("malformed JSON: ") + e.what());
    } catch (const std::exception &e) {
      SendError(res, "INTERNAL", 500, e.what());
    }
  };
}

}  // namespace

struct HttpServer::Impl {
  Platform &platform;
  httplib::Server server;

  explicit Impl(Platform &p) : platform(p) {}
};

HttpServer::HttpServer(Platform &platform) : impl_(std::make_unique<Impl>(platform)) {
  Platform &p = platform;
  httplib::Server &s = impl_->server;
  s.set_payload_max_length(std::size_t{1} << 30);

  s.Post("/teams", Guard([&p](const httplib::Request &req, httplib::Response &res) {
    const json body = json::parse(req.body);
    if (!body.is_object() || !body.contains("name") || !body["name"].is_string())
      throw ServiceError("BAD_REQUEST", 400, "body must be {\"name\": string}");
    const Team t = p.RegisterTeam(body["name"].get<std::string>());
    res.status = 201;
    res.set_content(json{{"team_id", t.team_id},
                         {"name", t.name},
                         {"token", t.token},
                         {"registered_at", FormatUtc(t.registered_at)}}
                        .dump(),
                    kJson);
  }));

  s.Post("/submissions", Guard([&p](const httplib::Request &req, httplib::Response &res) {
    std::string scores;
    if (req.is_multipart_form_data()) {
      if (!req.has_file("scores"))
        throw ServiceError("BAD_REQUEST", 400, "multipart field 'scores' is missing");
      scores = req.get_file_value("scores").content;
    } else {
      scores = req.body;
    }
    const SubmissionRecord r = p.Submit(BearerToken(req), scores);
    res.status = 201;
    res.set_content(OwnerViewJson(r), kJson);
  }));

  s.Get("/submissions", Guard([&p](const httplib::Request &req, httplib::Response &res) {
    json rows = json::array();
    for (const auto &r : p.ListSubmissions(BearerToken(req)))
      rows.push_back(json::parse(OwnerViewJson(r)));
    res.set_content(json{{"submissions", std::move(rows)}}.dump(), kJson);
  }));

  s.Get(R"(/submissions/([A-Za-z0-9-]+))",
        Guard([&p](const httplib::Request &req, httplib::Response &res) {
          res.set_content(OwnerViewJson(p.GetSubmission(BearerToken(req), req.matches[1])),
                          kJson);
        }));

  s.Get(R"(/submissions/([A-Za-z0-9-]+)/det)",
        Guard([&p](const httplib::Request &req, httplib::Response &res) {
          const SubmissionDet det = p.GetSubmissionDet(BearerToken(req), req.matches[1]);
          json curves = json::array();
          for (const auto &c : det.curves) {
            json pts = json::array();
            for (const auto &pt : c.points) pts.push_back({pt.p_fa, pt.p_miss});
            curves.push_back({{"source", ToToken(c.source)},
                              {"points", std::move(pts)},
                              {"actual", MarkerJson(c.actual)},
                              {"minimum", MarkerJson(c.minimum)}});
          }
          res.set_content(json{{"subset", "progress"},
                               {"beta", det.beta},
                               {"point_format", {"p_fa", "p_miss"}},
                               {"curves", std::move(curves)}}
                              .dump(),
                          kJson);
        }));

  s.Get("/quota", Guard([&p](const httplib::Request &req, httplib::Response &res) {
    const QuotaStatus q = p.Quota(BearerToken(req));
    res.set_content(json{{"limit", q.limit},
                         {"used", q.used},
                         {"remaining", std::max(0, q.limit - q.used)},
                         {"resets_at", FormatUtc(q.resets_at)}}
                        .dump(),
                    kJson);
  }));

  s.Get("/trials", Guard([&p](const httplib::Request &, httplib::Response &res) {
    std::ostringstream os;
    WriteTrialList(p.trial_list(), os);
    res.set_content(os.str(), "text/tab-separated-values");
  }));

  s.Get("/leaderboard/progress", Guard([&p](const httplib::Request &, httplib::Response &res) {
    res.set_content(LeaderboardJson(p.ProgressLeaderboard()), kJson);
  }));

  s.Get("/leaderboard/test", Guard([&p](const httplib::Request &, httplib::Response &res) {
    const auto snap = p.LatestTestSnapshot();
    if (snap) {
      res.set_content(SnapshotJson(*snap), kJson);
    } else {
      res.set_content(json{{"subset", "test"},
                           {"snapshot_id", nullptr},
                           {"entries", json::array()}}
                          .dump(),
                      kJson);
    }
  }));

  s.Get(R"(/leaderboard/test/([A-Za-z0-9-]+))",
        Guard([&p](const httplib::Request &req, httplib::Response &res) {
          res.set_content(SnapshotJson(p.GetTestSnapshot(req.matches[1])), kJson);
        }));

  s.Get("/leaderboard/test-snapshots",
        Guard([&p](const httplib::Request &, httplib::Response &res) {
          res.set_content(json{{"snapshots", p.SnapshotIds()}}.dump(), kJson);
        }));

  s.Post("/admin/snapshot", Guard([&p](const httplib::Request &req, httplib::Response &res) {
    const TestSnapshot snap = p.PublishTestSnapshot(BearerToken(req));
    res.status = 201;
    res.set_content(SnapshotJson(snap), kJson);
  }));

  s.Get("/health", [](const httplib::Request &, httplib::Response &res) {
    res.set_content(R"({"status":"ok"})", kJson);
  });

  if (!p.config().static_dir.empty()) s.set_mount_point("/", p.config().static_dir);
}

HttpServer::~HttpServer() { Stop(); }

int HttpServer::Bind(const std::string &listen) {
  const auto colon = listen.rfind(':');
  if (colon == std::string::npos) throw ConfigError("listen address must be host:port");
  const std::string host = listen.substr(0, colon);
  int port = 0;
  try {
    port = std::stoi(listen.substr(colon + 1));
  } catch (const std::exception &) {
    throw ConfigError("bad port in listen address '" + listen + "'");
  }
  if (port < 0 || port > 65535) throw ConfigError("port out of range");
  if (port == 0) {
    port = impl_->server.bind_to_any_port(host);
    if (port < 0) throw Error("cannot bind " + host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    throw Error("cannot bind " + listen);
  }
  return port;
}

void HttpServer::Serve() { impl_->server.listen_after_bind(); }

void HttpServer::Stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace sreval
