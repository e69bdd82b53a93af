#pragma once

// JSON forms of index sets, dyadic points, coefficient families, operators
// and compression traces. Parse failures raise SchemaError naming the field.

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "haarlab/combination.hpp"
#include "haarlab/normed_space.hpp"
#include "haarlab/transforms.hpp"

namespace haarlab {

using Json = nlohmann::json;

class SchemaError : public std::runtime_error {
public:
  SchemaError(const std::string& field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(field) {}
  const std::string& field() const { return field_; }

private:
  std::string field_;
};

namespace detail {

inline const Json& member(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw SchemaError(path + "." + key, "missing field");
  return *it;
}

inline std::int64_t as_int(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) throw SchemaError(path, "expected an integer");
  return j.get<std::int64_t>();
}

inline double as_number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError(path, "expected a number");
  return j.get<double>();
}

inline Vector as_vector(const Json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array of numbers");
  Vector v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
  return v;
}

inline HaarIndex as_index(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) throw SchemaError(path, "expected a pair [k, j]");
  const std::int64_t k = as_int(j[0], path + "[0]");
  const std::int64_t pos = as_int(j[1], path + "[1]");
  if (k < 1 || k > max_level()) throw SchemaError(path, "level out of range");
  const HaarIndex idx{static_cast<int>(k), pos};
  if (!is_valid(idx)) throw SchemaError(path, "not a tree index " + idx.str());
  return idx;
}

}  // namespace detail

inline Json to_json(const HaarIndex& idx) { return Json::array({idx.level, idx.pos}); }

inline Json to_json(const IndexSet& set) {
  Json out = Json::array();
  for (const auto& idx : set) out.push_back(to_json(idx));
  return out;
}

inline IndexSet index_set_from_json(const Json& j, const std::string& path = "$") {
  if (!j.is_array()) throw SchemaError(path, "expected an array of [k, j] pairs");
  IndexSet out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string at = path + "[" + std::to_string(i) + "]";
    if (!out.insert(detail::as_index(j[i], at))) throw SchemaError(at, "duplicate index");
  }
  return out;
}

inline Json to_json(const DyadicRational& t) { return {{"num", t.numerator()}, {"level", t.level()}}; }

inline DyadicRational dyadic_from_json(const Json& j, const std::string& path = "$") {
  const std::int64_t num = detail::as_int(detail::member(j, "num", path), path + ".num");
  const std::int64_t level = detail::as_int(detail::member(j, "level", path), path + ".level");
  if (level < 0 || level > max_level()) throw SchemaError(path + ".level", "out of range");
  if (num < 0 || num >= pow2(static_cast<int>(level))) throw SchemaError(path + ".num", "point outside [0,1)");
  return DyadicRational(num, static_cast<int>(level));
}

inline Json to_json(const HaarCombination& f) {
  Json entries = Json::array();
  for (const auto& [idx, x] : f) entries.push_back({{"k", idx.level}, {"j", idx.pos}, {"x", x}});
  return {{"dim", f.dim()}, {"entries", entries}};
}

inline HaarCombination combination_from_json(const Json& j, const std::string& path = "$") {
  const std::int64_t dim = detail::as_int(detail::member(j, "dim", path), path + ".dim");
  if (dim < 1) throw SchemaError(path + ".dim", "must be >= 1");
  const Json& entries = detail::member(j, "entries", path);
  if (!entries.is_array()) throw SchemaError(path + ".entries", "expected an array");
  HaarCombination f(static_cast<int>(dim));
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string at = path + ".entries[" + std::to_string(i) + "]";
    const Json& e = entries[i];
    const Json pair = Json::array({detail::member(e, "k", at), detail::member(e, "j", at)});
    const HaarIndex idx = detail::as_index(pair, at);
    Vector x = detail::as_vector(detail::member(e, "x", at), at + ".x");
    if (x.size() != static_cast<std::size_t>(dim)) throw SchemaError(at + ".x", "length differs from dim");
    if (f.find(idx) != nullptr) throw SchemaError(at, "duplicate index " + idx.str());
    f.set(idx, std::move(x));
  }
  return f;
}

inline NormKind norm_from_string(const std::string& s, const std::string& path) {
  if (s == "l1") return NormKind::L1;
  if (s == "l2") return NormKind::L2;
  if (s == "linf") return NormKind::Linf;
  throw SchemaError(path, "unknown norm '" + s + "' (l1, l2, linf)");
}

inline Json to_json(const OperatorSpec& op) {
  Json out{{"norm", to_string(op.domain().norm)}, {"dim", op.domain().dim}};
  if (const auto* d = std::get_if<DiagonalKind>(&op.kind())) {
    out["kind"] = "diagonal";
    out["entries"] = d->entries;
  } else if (const auto* m = std::get_if<DenseKind>(&op.kind())) {
    out["kind"] = "dense";
    out["rows"] = m->rows;
    out["codomain_norm"] = to_string(op.codomain().norm);
  } else {
    out["kind"] = "identity";
  }
  return out;
}

/// {"kind": "identity"|"diagonal"|"dense", "norm": "l1"|"l2"|"linf", "dim": d,
///  "entries": [...] (diagonal), "rows": [[...]...] (dense),
///  "codomain_norm": optional, defaults to "norm"}.
/// A dense operator may omit dim; it is then the row length.
inline OperatorSpec operator_from_json(const Json& j, const std::string& path = "$") {
  const Json& kind_j = detail::member(j, "kind", path);
  if (!kind_j.is_string()) throw SchemaError(path + ".kind", "expected a string");
  const std::string kind = kind_j.get<std::string>();
  NormKind norm = NormKind::L2;
  if (j.contains("norm")) {
    if (!j["norm"].is_string()) throw SchemaError(path + ".norm", "expected a string");
    norm = norm_from_string(j["norm"].get<std::string>(), path + ".norm");
  }
  NormKind codomain_norm = norm;
  if (j.contains("codomain_norm")) {
    if (!j["codomain_norm"].is_string()) throw SchemaError(path + ".codomain_norm", "expected a string");
    codomain_norm = norm_from_string(j["codomain_norm"].get<std::string>(), path + ".codomain_norm");
  }
  auto read_dim = [&]() {
    const std::int64_t d = detail::as_int(detail::member(j, "dim", path), path + ".dim");
    if (d < 1) throw SchemaError(path + ".dim", "must be >= 1");
    return static_cast<int>(d);
  };

  if (kind == "identity") return OperatorSpec::identity(NormedSpaceSpec::make(read_dim(), norm));
  if (kind == "diagonal") {
    Vector entries = detail::as_vector(detail::member(j, "entries", path), path + ".entries");
    const int dim = j.contains("dim") ? read_dim() : static_cast<int>(entries.size());
    if (entries.size() != static_cast<std::size_t>(dim)) throw SchemaError(path + ".entries", "length differs from dim");
    return OperatorSpec::diagonal(NormedSpaceSpec::make(dim, norm), std::move(entries));
  }
  if (kind == "dense") {
    const Json& rows_j = detail::member(j, "rows", path);
    if (!rows_j.is_array() || rows_j.empty()) throw SchemaError(path + ".rows", "expected a non-empty array of rows");
    std::vector<Vector> rows;
    for (std::size_t r = 0; r < rows_j.size(); ++r)
      rows.push_back(detail::as_vector(rows_j[r], path + ".rows[" + std::to_string(r) + "]"));
    const int cols = j.contains("dim") ? read_dim() : static_cast<int>(rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r)
      if (rows[r].size() != static_cast<std::size_t>(cols))
        throw SchemaError(path + ".rows[" + std::to_string(r) + "]", "row length differs from dim");
    const int row_count = static_cast<int>(rows.size());
    return OperatorSpec::dense(NormedSpaceSpec::make(cols, norm), NormedSpaceSpec::make(row_count, codomain_norm),
                               std::move(rows));
  }
  throw SchemaError(path + ".kind", "unknown operator kind '" + kind + "' (identity, diagonal, dense)");
}

inline Json to_json(const CompressionTrace& trace) {
  Json steps = Json::array();
  for (const auto& s : trace.steps) steps.push_back(to_json(s.root));
  return {{"m", trace.m}, {"initial", to_json(trace.initial)}, {"steps", steps}, {"final", to_json(trace.final_set)}};
}

inline CompressionTrace trace_from_json(const Json& j, const std::string& path = "$") {
  CompressionTrace t;
  t.m = static_cast<int>(detail::as_int(detail::member(j, "m", path), path + ".m"));
  t.initial = index_set_from_json(detail::member(j, "initial", path), path + ".initial");
  const Json& steps = detail::member(j, "steps", path);
  if (!steps.is_array()) throw SchemaError(path + ".steps", "expected an array");
  for (std::size_t i = 0; i < steps.size(); ++i)
    t.steps.push_back({detail::as_index(steps[i], path + ".steps[" + std::to_string(i) + "]")});
  t.final_set = index_set_from_json(detail::member(j, "final", path), path + ".final");
  return t;
}

/// Reads and parses a JSON file; I/O and syntax errors become SchemaError
/// with the file name as the field.
inline Json read_json_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw SchemaError(file, "cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return Json::parse(buf.str());
  } catch (const Json::parse_error& e) {
    throw SchemaError(file, std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace haarlab
