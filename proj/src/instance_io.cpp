#include "wzexp/instance_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace wzexp {

namespace {

using json = nlohmann::json;

std::string format_error(const std::string& source, std::size_t line, const std::string& field,
                         const std::string& what) {
  std::ostringstream os;
  os << source;
  if (line > 0) os << ":" << line;
  if (!field.empty()) os << ": field '" << field << "'";
  os << ": " << what;
  return os.str();
}

std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + offset, '\n'));
}

// Line of the first "key": occurrence; 0 when absent.
std::size_t line_of_key(const std::string& text, const std::string& key) {
  const auto pos = text.find("\"" + key + "\"");
  return pos == std::string::npos ? 0 : line_of_offset(text, pos);
}

class Reader {
 public:
  Reader(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    throw InstanceError(source_, line_of_key(text_, field), field, what);
  }

  double number(const json& doc, const std::string& key, bool required, double fallback) const {
    if (!doc.contains(key)) {
      if (required) throw InstanceError(source_, 0, key, "missing required field");
      return fallback;
    }
    const auto& v = doc.at(key);
    if (!v.is_number()) fail(key, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d) || d < 0.0) fail(key, "expected a finite non-negative number");
    return d;
  }

  std::size_t size(const json& doc, const std::string& key) const {
    if (!doc.contains(key)) return 0;
    const auto& v = doc.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 1) fail(key, "expected a positive integer");
    return static_cast<std::size_t>(v.get<long long>());
  }

  std::vector<std::vector<double>> matrix(const json& doc, const std::string& key) const {
    if (!doc.contains(key)) throw InstanceError(source_, 0, key, "missing required field");
    const auto& v = doc.at(key);
    if (!v.is_array() || v.empty()) fail(key, "expected a non-empty array of rows");
    std::vector<std::vector<double>> rows;
    for (const auto& row : v) {
      if (!row.is_array() || row.empty()) fail(key, "every row must be a non-empty array");
      std::vector<double> r;
      for (const auto& e : row) {
        if (!e.is_number()) fail(key, "entries must be numbers");
        r.push_back(e.get<double>());
      }
      if (!rows.empty() && r.size() != rows.front().size()) fail(key, "rows have different lengths");
      rows.push_back(std::move(r));
    }
    return rows;
  }

  std::vector<double> flat(const json& doc, const std::string& key) const {
    const auto& v = doc.at(key);
    if (!v.is_array()) fail(key, "expected a flat array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) fail(key, "entries must be numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  const std::string& text() const { return text_; }
  const std::string& source() const { return source_; }

 private:
  const std::string& text_;
  std::string source_;
};

const std::set<std::string> kKnownKeys{"name", "builtin", "x_size", "y_size", "z_size", "p_xy",
                                       "distortion", "rate", "level"};

}  // namespace

InstanceError::InstanceError(const std::string& source, std::size_t line, std::string field,
                             const std::string& what)
    : std::invalid_argument(format_error(source, line, field, what)), line_(line), field_(std::move(field)) {}

WZInstance parse_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InstanceError(path, 0, "", "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_instance_text(ss.str(), path);
}

WZInstance parse_instance_text(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InstanceError(source, line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0), "", "malformed JSON");
  }
  Reader rd(text, source);
  if (!doc.is_object()) throw InstanceError(source, 1, "", "top level must be an object");
  for (const auto& [k, v] : doc.items())
    if (!kKnownKeys.count(k)) rd.fail(k, "unknown field");

  std::string name;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) rd.fail("name", "expected a string");
    name = doc["name"].get<std::string>();
  }
  std::string builtin;
  if (doc.contains("builtin")) {
    if (!doc["builtin"].is_string()) rd.fail("builtin", "expected a string");
    builtin = doc["builtin"].get<std::string>();
  }
  const double rate = rd.number(doc, "rate", false, 0.0);
  if (!builtin.empty() && builtin != "and_dfc" && builtin != "slepian_wolf")
    rd.fail("builtin", "unknown builtin '" + builtin + "' (expected and_dfc or slepian_wolf)");

  if (builtin == "and_dfc") {
    for (const char* k : {"p_xy", "distortion", "level", "x_size", "y_size", "z_size"})
      if (doc.contains(k)) rd.fail(k, "not allowed with builtin 'and_dfc'");
    auto inst = and_instance(rate);
    if (!name.empty()) inst.name = name;
    return inst;
  }

  const auto rows = rd.matrix(doc, "p_xy");
  const std::size_t nx = rd.size(doc, "x_size"), ny = rd.size(doc, "y_size");
  if (nx != 0 && nx != rows.size()) rd.fail("x_size", "does not match the number of p_xy rows");
  if (ny != 0 && ny != rows.front().size()) rd.fail("y_size", "does not match the p_xy row length");
  JointTable p = JointTable::scalar();
  try {
    p = make_source(rows);
  } catch (const std::invalid_argument& e) {
    rd.fail("p_xy", e.what());
  }

  try {
    if (builtin == "slepian_wolf") {
      for (const char* k : {"distortion", "level", "z_size"})
        if (doc.contains(k)) rd.fail(k, "not allowed with builtin 'slepian_wolf'");
      auto inst = slepian_wolf_instance(p, rate);
      if (!name.empty()) inst.name = name;
      return inst;
    }

    const std::size_t nz = rd.size(doc, "z_size");
    if (nz == 0) throw InstanceError(source, 0, "z_size", "missing required field");
    if (!doc.contains("distortion")) throw InstanceError(source, 0, "distortion", "missing required field");
    const auto d = rd.flat(doc, "distortion");
    if (d.size() != rows.size() * rows.front().size() * nz)
      rd.fail("distortion", "expected |X||Y||Z| = " + std::to_string(rows.size() * rows.front().size() * nz) +
                                " entries, got " + std::to_string(d.size()));
    const double level = rd.number(doc, "level", true, 0.0);
    try {
      return WZInstance::make(p, nz, d, rate, level, name);
    } catch (const std::invalid_argument& e) {
      const std::string msg = e.what();
      rd.fail(msg.find("level") != std::string::npos ? "level" : "distortion", msg);
    }
  } catch (const InstanceError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw InstanceError(source, 0, "", e.what());
  }
}

std::string instance_to_json(const WZInstance& inst) {
  json doc;
  if (!inst.name.empty()) doc["name"] = inst.name;
  doc["x_size"] = inst.x_size();
  doc["y_size"] = inst.y_size();
  doc["z_size"] = inst.z_size;
  json rows = json::array();
  for (std::size_t x = 0; x < inst.x_size(); ++x) {
    json r = json::array();
    for (std::size_t y = 0; y < inst.y_size(); ++y) r.push_back(inst.p(x, y));
    rows.push_back(r);
  }
  doc["p_xy"] = rows;
  doc["distortion"] = inst.distortion;
  doc["rate"] = inst.rate;
  doc["level"] = inst.level;
  return doc.dump(2) + "\n";
}

}  // namespace wzexp
