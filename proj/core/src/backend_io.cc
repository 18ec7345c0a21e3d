// core/src/backend_io.cc

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

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sreval/backend.h"
#include "sreval/tsv.h"

namespace sreval {

namespace {

using nlohmann::json;

constexpr char kBinaryMagic[8] = {'S', 'R', 'E', 'V', 'M', 'A', 'T', '1'};
constexpr const char *kModelFormat = "sreval-backend";
constexpr int kModelVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "binary embedding files assume a little-endian host");

bool IsBinary(const std::string &bytes) {
  return bytes.size() >= sizeof(kBinaryMagic) &&
         std::memcmp(bytes.data(), kBinaryMagic, sizeof(kBinaryMagic)) == 0;
}

Matrix ReadBinaryMatrix(const std::string &bytes, const std::string &path) {
  std::uint64_t dims[2];
  const std::size_t header = sizeof(kBinaryMagic) + sizeof(dims);
  if (bytes.size() < header) throw ParseError(path + ": truncated matrix header");
  std::memcpy(dims, bytes.data() + sizeof(kBinaryMagic), sizeof(dims));
  if (dims[1] != 0 && dims[0] > (bytes.size() - header) / sizeof(double) / dims[1])
    throw ParseError(path + ": matrix payload shorter than its header says");
  if (bytes.size() != header + dims[0] * dims[1] * sizeof(double))
    throw ParseError(path + ": matrix payload size does not match its header");
  Matrix m(static_cast<Eigen::Index>(dims[0]), static_cast<Eigen::Index>(dims[1]));
  const char *p = bytes.data() + header;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j, p += sizeof(double)) {
      std::memcpy(&m(i, j), p, sizeof(double));
      if (!std::isfinite(m(i, j)))
        throw ParseError(path + ": non-finite value in row " + std::to_string(i + 1));
    }
  return m;
}

Matrix ReadTsvMatrix(const std::string &bytes, const std::string &path) {
  std::istringstream is(bytes);
  TsvReader reader(is);
  std::vector<std::string_view> fields;
  std::vector<double> values;
  Eigen::Index cols = -1, rows = 0;
  while (reader.Next(&fields)) {
    if (cols < 0) cols = static_cast<Eigen::Index>(fields.size());
    if (static_cast<Eigen::Index>(fields.size()) != cols)
      throw ParseError(path + ": expected " + std::to_string(cols) + " columns",
                       reader.line());
    for (auto f : fields) {
      double v;
      if (ParseDouble(f, &v) != NumberStatus::kOk || !std::isfinite(v))
        throw ParseError(path + ": bad value '" + std::string(f) + "'", reader.line());
      values.push_back(v);
    }
    ++rows;
  }
  Matrix m(rows, std::max<Eigen::Index>(cols, 0));
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = values[i * cols + j];
  return m;
}

json MatrixToJson(const Matrix &m) {
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Matrix MatrixFromJson(const json &j, const char *name) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto &data = j.at("data");
  if (rows < 0 || cols < 0 || data.size() != static_cast<std::size_t>(rows * cols))
    throw ParseError(std::string("model matrix '") + name + "' has inconsistent size");
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j2 = 0; j2 < cols; ++j2)
      m(i, j2) = data[static_cast<std::size_t>(i * cols + j2)].get<double>();
  return m;
}

json VectorToJson(const Vector &v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Vector VectorFromJson(const json &j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace

EmbeddingSet LoadEmbeddings(const std::string &matrix_path,
                            const std::string &manifest_path) {
  const std::string bytes = ReadFile(matrix_path);
  EmbeddingSet set;
  set.data = IsBinary(bytes) ? ReadBinaryMatrix(bytes, matrix_path)
                             : ReadTsvMatrix(bytes, matrix_path);

  std::ifstream is(manifest_path);
  if (!is) throw Error("cannot open " + manifest_path);
  TsvReader reader(is);
  std::vector<std::string_view> f;
  if (!reader.Next(&f) || f.size() != 3 || f[0] != "segmentid" ||
      f[1] != "speakerid" || f[2] != "condition")
    throw ParseError(manifest_path + ": expected header segmentid, speakerid, condition", 1);
  while (reader.Next(&f)) {
    if (f.size() != 3)
      throw ParseError(manifest_path + ": expected 3 columns", reader.line());
    if (f[2] != "original" && f[2] != "degraded")
      throw ParseError(manifest_path + ": condition must be original or degraded",
                       reader.line());
    if (f[0].empty())
      throw ParseError(manifest_path + ": empty segment id", reader.line());
    set.segment_ids.emplace_back(f[0]);
    set.speaker_ids.emplace_back(f[1] == "-" ? std::string_view() : f[1]);
    set.degraded.push_back(f[2] == "degraded");
  }
  if (static_cast<Eigen::Index>(set.size()) != set.data.rows())
    throw ParseError(manifest_path + " lists " + std::to_string(set.size()) +
                     " segments but " + matrix_path + " has " +
                     std::to_string(set.data.rows()) + " rows");
  return set;
}

void SaveEmbeddings(const EmbeddingSet &set, const std::string &matrix_path,
                    const std::string &manifest_path, bool binary) {
  if (static_cast<Eigen::Index>(set.size()) != set.data.rows())
    throw Error("embedding set is inconsistent");
  std::ofstream m(matrix_path, std::ios::binary);
  if (!m) throw Error("cannot write " + matrix_path);
  if (binary) {
    const std::uint64_t dims[2] = {static_cast<std::uint64_t>(set.data.rows()),
                                   static_cast<std::uint64_t>(set.data.cols())};
    m.write(kBinaryMagic, sizeof(kBinaryMagic));
    m.write(reinterpret_cast<const char *>(dims), sizeof(dims));
    for (Eigen::Index i = 0; i < set.data.rows(); ++i)
      for (Eigen::Index j = 0; j < set.data.cols(); ++j) {
        const double v = set.data(i, j);
        m.write(reinterpret_cast<const char *>(&v), sizeof(v));
      }
  } else {
    for (Eigen::Index i = 0; i < set.data.rows(); ++i) {
      for (Eigen::Index j = 0; j < set.data.cols(); ++j)
        m << (j ? "\t" : "") << FormatDouble(set.data(i, j));
      m << '\n';
    }
  }
  if (!m) throw Error("failed writing " + matrix_path);

  std::ofstream man(manifest_path, std::ios::binary);
  if (!man) throw Error("cannot write " + manifest_path);
  man << "segmentid\tspeakerid\tcondition\n";
  for (std::size_t i = 0; i < set.size(); ++i)
    man << set.segment_ids[i] << '\t'
        << (set.speaker_ids[i].empty() ? "-" : set.speaker_ids[i]) << '\t'
        << (set.degraded[i] ? "degraded" : "original") << '\n';
  if (!man) throw Error("failed writing " + manifest_path);
}

void SaveBackendModel(const BackendModel &model, const std::string &path) {
  json j;
  j["format"] = kModelFormat;
  j["version"] = kModelVersion;
  j["input_dim"] = model.pre.in_dim();
  j["output_dim"] = model.pre.out_dim();
  j["preprocessor"] = {{"mean", VectorToJson(model.pre.mean)},
                       {"whitener", MatrixToJson(model.pre.whitener)},
                       {"lda", MatrixToJson(model.pre.lda)}};
  j["plda"] = {{"mu", VectorToJson(model.plda.mu)},
               {"between", MatrixToJson(model.plda.between)},
               {"within", MatrixToJson(model.plda.within)}};
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path);
  // Shortest round-trip formatting keeps the file bit-exact on reload.
  os << j.dump(1) << '\n';
  if (!os) throw Error("failed writing " + path);
}

BackendModel LoadBackendModel(const std::string &path) {
  json j;
  try {
    j = json::parse(ReadFile(path));
  } catch (const json::parse_error &e) {
    throw ParseError(path + ": " + e.what());
  }
  try {
    if (j.at("format") != kModelFormat)
      throw ParseError(path + ": not a backend model file");
    if (j.at("version").get<int>() != kModelVersion)
      throw ParseError(path + ": unsupported model version " + j.at("version").dump());
    BackendModel model;
    const auto &pre = j.at("preprocessor");
    model.pre.mean = VectorFromJson(pre.at("mean"));
    model.pre.whitener = MatrixFromJson(pre.at("whitener"), "whitener");
    model.pre.lda = MatrixFromJson(pre.at("lda"), "lda");
    const auto &plda = j.at("plda");
    model.plda.mu = VectorFromJson(plda.at("mu"));
    model.plda.between = MatrixFromJson(plda.at("between"), "between");
    model.plda.within = MatrixFromJson(plda.at("within"), "within");

    const Eigen::Index d = model.pre.in_dim(), r = model.pre.out_dim();
    if (j.at("input_dim").get<Eigen::Index>() != d ||
        j.at("output_dim").get<Eigen::Index>() != r ||
        model.pre.whitener.rows() != d || model.pre.whitener.cols() != d ||
        (model.pre.lda.size() && model.pre.lda.rows() != d) ||
        model.plda.mu.size() != r || model.plda.between.rows() != r ||
        model.plda.between.cols() != r || model.plda.within.rows() != r ||
        model.plda.within.cols() != r)
      throw ParseError(path + ": model dimensions are inconsistent");
    return model;
  } catch (const json::exception &e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace sreval
