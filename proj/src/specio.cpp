#include "lcsbp/specio.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace lcsbp {

namespace {

using json = nlohmann::ordered_json;

double number(const json& obj, const char* key, double fallback, bool required = false) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (required) throw SpecParseError(std::string("missing field '") + key + "'");
    return fallback;
  }
  if (!it->is_number()) throw SpecParseError(std::string("field '") + key + "' must be a number");
  return it->get<double>();
}

void only_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw SpecParseError(where + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) throw SpecParseError("unknown field '" + it.key() + "' in " + where);
}

std::vector<double> numbers(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_array()) throw SpecParseError(std::string("field '") + key + "' must be an array");
  std::vector<double> v;
  for (auto& x : *it) {
    if (!x.is_number()) throw SpecParseError(std::string("field '") + key + "' must hold numbers");
    v.push_back(x.get<double>());
  }
  return v;
}

std::vector<Atom> parse_atoms(const json& arr) {
  if (!arr.is_array()) throw SpecParseError("'atoms' must be an array");
  std::vector<Atom> out;
  for (auto& a : arr) {
    only_keys(a, {"size", "mass"}, "atom");
    out.push_back({number(a, "size", 0, true), number(a, "mass", 0, true)});
  }
  return out;
}

LevyMeasure parse_levy(const json& j) {
  only_keys(j, {"kind", "params"}, "levy");
  auto k = j.find("kind");
  if (k == j.end() || !k->is_string()) throw SpecParseError("levy.kind must be a string");
  const std::string kind = k->get<std::string>();
  json p = j.value("params", json::object());
  LevyMeasure m;
  if (kind == "null") {
    only_keys(p, {"cut"}, "levy.params");
  } else if (kind == "atoms") {
    only_keys(p, {"atoms", "cut"}, "levy.params");
  } else if (kind == "power_tail") {
    only_keys(p, {"alpha", "scale", "atoms", "cut"}, "levy.params");
    m = LevyMeasure::power_tail(number(p, "alpha", 0, true), number(p, "scale", 0, true));
  } else if (kind == "log_tail") {
    only_keys(p, {"alpha", "beta", "atoms", "cut"}, "levy.params");
    m = LevyMeasure::log_tail(number(p, "alpha", 0, true), number(p, "beta", 0, true));
  } else if (kind == "tabulated") {
    only_keys(p, {"grid", "density", "atoms", "cut"}, "levy.params");
    m = LevyMeasure::tabulated(numbers(p, "grid"), numbers(p, "density"));
  } else {
    throw SpecParseError("unknown levy kind '" + kind + "'");
  }
  if (p.contains("cut")) m = m.restricted(number(p, "cut", kInf));
  if (p.contains("atoms"))
    for (const Atom& a : parse_atoms(p["atoms"])) m = m.with_atom(a);
  else if (kind == "atoms")
    throw SpecParseError("levy kind 'atoms' needs params.atoms");
  return m;
}

json levy_json(const LevyMeasure& m) {
  json p = json::object();
  std::string kind;
  switch (m.kind()) {
    case LevyKind::none:
      kind = m.atom_list().empty() ? "null" : "atoms";
      break;
    case LevyKind::power_tail:
      kind = "power_tail";
      p["alpha"] = m.alpha();
      p["scale"] = m.scale();
      break;
    case LevyKind::log_tail:
      kind = "log_tail";
      p["alpha"] = m.alpha();
      p["beta"] = m.beta();
      break;
    case LevyKind::tabulated:
      kind = "tabulated";
      p["grid"] = m.grid();
      p["density"] = m.density();
      break;
    case LevyKind::user_tail:
      throw std::invalid_argument("user_tail measures cannot be written to a spec document");
  }
  if (!m.atom_list().empty()) {
    json arr = json::array();
    for (const Atom& a : m.atom_list()) arr.push_back(json{{"size", a.size}, {"mass", a.mass}});
    p["atoms"] = arr;
  }
  if (std::isfinite(m.cut())) p["cut"] = m.cut();
  return json{{"kind", kind}, {"params", p}};
}

}  // namespace

MechanismSpec parse_spec(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SpecParseError(std::string("invalid JSON: ") + e.what());
  }
  only_keys(j, {"lambda", "sigma", "gamma", "c", "levy"}, "spec");
  MechanismSpec s;
  try {
    s.lambda = number(j, "lambda", 0.0);
    s.sigma = number(j, "sigma", 0.0);
    s.gamma = number(j, "gamma", 0.0);
    s.c = number(j, "c", 0.0, true);
    if (j.contains("levy")) s.levy = parse_levy(j["levy"]);
    validate(s);
  } catch (const std::invalid_argument& e) {
    throw SpecParseError(std::string("invalid spec: ") + e.what());
  }
  return s;
}

MechanismSpec load_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecParseError("cannot read spec file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str());
}

std::string dump_spec(const MechanismSpec& spec, int indent) {
  json j;
  j["lambda"] = spec.lambda;
  j["sigma"] = spec.sigma;
  j["gamma"] = spec.gamma;
  j["c"] = spec.c;
  j["levy"] = levy_json(spec.levy);
  return j.dump(indent);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header) : out_(out), width_(header.size()) {
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != width_) throw std::invalid_argument("CSV row width does not match the header");
  for (std::size_t i = 0; i < fields.size(); ++i) out_ << (i ? "," : "") << csv_field(fields[i]);
  out_ << "\r\n";
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> f;
  f.reserve(values.size());
  for (double v : values) f.push_back(csv_number(v));
  row(f);
}

}  // namespace lcsbp
