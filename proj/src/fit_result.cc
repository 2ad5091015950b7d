#include "sbm/fit_result.h"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "sbm/errors.h"

namespace sbm {

using nlohmann::json;

namespace {

json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double to_double(const json& v) {
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw DataError("expected a number, got '" + s + "'");
  }
  if (!v.is_number()) throw DataError("expected a number in fit file");
  return v.get<double>();
}

json vector_json(const std::vector<double>& xs) {
  json arr = json::array();
  for (double x : xs) arr.push_back(number(x));
  return arr;
}

std::vector<double> vector_from(const json& arr) {
  std::vector<double> xs;
  for (const auto& v : arr) xs.push_back(to_double(v));
  return xs;
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(number(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from(const json& rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.at(0).size();
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    if (rows.at(i).size() != c) throw DataError("ragged matrix in fit file");
    for (std::size_t j = 0; j < c; ++j) m(i, j) = to_double(rows[i][j]);
  }
  return m;
}

bool is_flat(const json& v) {
  for (const auto& e : v)
    if (e.is_structured()) return false;
  return true;
}

void write_value(std::ostream& out, const json& v, int indent) {
  const std::string pad(indent * 2, ' ');
  const std::string inner((indent + 1) * 2, ' ');
  switch (v.type()) {
    case json::value_t::object: {
      if (v.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out << ",\n";
        first = false;
        out << inner << json(it.key()).dump() << ": ";
        write_value(out, it.value(), indent + 1);
      }
      out << '\n' << pad << '}';
      return;
    }
    case json::value_t::array: {
      if (v.empty() || is_flat(v)) {
        out << '[';
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (i) out << ", ";
          write_value(out, v[i], indent + 1);
        }
        out << ']';
        return;
      }
      out << "[\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out << ",\n";
        out << inner;
        write_value(out, v[i], indent + 1);
      }
      out << '\n' << pad << ']';
      return;
    }
    case json::value_t::number_float: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
      out << buf;
      return;
    }
    default:
      out << v.dump();
  }
}

}  // namespace

std::string dump_json(const json& value) {
  std::ostringstream out;
  write_value(out, value, 0);
  out << '\n';
  return out.str();
}

std::string serialize_fit(const FitResult& fit) {
  json doc;
  doc["schema_version"] = kFitSchemaVersion;
  doc["engine"] = fit.engine;
  doc["model"] = to_string(fit.model);
  doc["K"] = fit.K;
  doc["directed"] = fit.directed;
  doc["n"] = fit.node_labels.size();
  doc["nodes"] = fit.node_labels;
  json labels = json::array();
  for (int z : fit.partition.labels()) labels.push_back(z + 1);
  doc["partition"] = std::move(labels);

  json params;
  params["kind"] = to_string(fit.params.kind);
  params["K"] = fit.params.K;
  params["pi"] = vector_json(fit.params.pi);
  params["block_matrix"] = matrix_json(fit.params.block_matrix);
  if (fit.params.gamma) params["gamma"] = vector_json(*fit.params.gamma);
  if (fit.graphon) params["tau"] = vector_json(fit.graphon->tau);
  doc["params"] = std::move(params);

  doc["objective"] = number(fit.objective);
  doc["loglik"] = number(fit.loglik);
  doc["objective_trace"] = vector_json(fit.objective_trace);
  if (fit.posterior) {
    doc["posterior"] = {{"freq", matrix_json(fit.posterior->freq)},
                        {"gini", vector_json(fit.posterior->gini)}};
  }
  doc["best_restart"] = fit.best_restart;
  doc["config"] = fit.config.is_null() ? json::object() : fit.config;
  return dump_json(doc);
}

FitResult parse_fit(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("fit file is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("schema_version").get<int>() != kFitSchemaVersion)
      throw DataError("unsupported fit schema version");
    FitResult fit;
    fit.engine = doc.at("engine").get<std::string>();
    fit.model = parse_model_kind(doc.at("model").get<std::string>());
    fit.K = doc.at("K").get<int>();
    fit.directed = doc.at("directed").get<bool>();
    fit.node_labels = doc.at("nodes").get<std::vector<std::string>>();
    std::vector<int> labels;
    for (const auto& z : doc.at("partition")) labels.push_back(z.get<int>() - 1);
    if (labels.size() != fit.node_labels.size()) throw DataError("partition length does not match node list");
    fit.partition = Partition(std::move(labels), fit.K);

    const json& params = doc.at("params");
    fit.params.kind = parse_model_kind(params.at("kind").get<std::string>());
    fit.params.K = params.at("K").get<int>();
    fit.params.pi = vector_from(params.at("pi"));
    fit.params.block_matrix = matrix_from(params.at("block_matrix"));
    if (params.contains("gamma")) fit.params.gamma = vector_from(params.at("gamma"));
    if (params.contains("tau")) fit.graphon = GraphonStep{vector_from(params.at("tau")), fit.params.block_matrix};

    fit.objective = to_double(doc.at("objective"));
    fit.loglik = to_double(doc.at("loglik"));
    fit.objective_trace = vector_from(doc.at("objective_trace"));
    if (doc.contains("posterior")) {
      PosteriorSummary summary;
      summary.freq = matrix_from(doc["posterior"].at("freq"));
      summary.gini = vector_from(doc["posterior"].at("gini"));
      if (summary.freq.rows() != fit.node_labels.size() || summary.gini.size() != fit.node_labels.size())
        throw DataError("posterior summary does not match node list");
      fit.posterior = std::move(summary);
    }
    fit.best_restart = doc.at("best_restart").get<std::size_t>();
    fit.config = doc.at("config");
    return fit;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed fit file: ") + e.what());
  }
}

}  // namespace sbm
