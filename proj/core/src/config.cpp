#include "lagsync/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <variant>

#include "lagsync/error.hpp"

namespace lagsync {

namespace {

struct Value;
using Array = std::vector<Value>;
using Table = std::vector<std::pair<std::string, Value>>;

struct Value {
  std::variant<double, std::string, bool, Array, Table> data;
  std::string raw;  // source text of a number
  int line = 0;
  int col = 0;
};

struct Entry {
  std::string key;
  Value value;
  int line = 0;
  int col = 0;
};

struct Document {
  std::vector<std::string> order;
  std::map<std::string, std::vector<Entry>> sections;
  std::set<std::string> used;  // "section.key"
};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Document run() {
    Document doc;
    doc.order.push_back("");
    doc.sections[""];
    std::string section;
    std::set<std::string> seen;
    while (true) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        const int l = line_, c = col_;
        advance();
        std::string name;
        while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '.')) {
          name += advance();
        }
        if (name.empty()) fail("expected a section name");
        expect(']');
        end_of_line();
        if (doc.sections.count(name)) throw ParseError("section [" + name + "] appears twice", l, c);
        section = name;
        doc.order.push_back(name);
        doc.sections[name];
        continue;
      }
      Entry e;
      e.line = line_;
      e.col = col_;
      e.key = key();
      skip_ws();
      expect('=');
      skip_ws();
      e.value = value();
      end_of_line();
      const std::string full = section.empty() ? e.key : section + "." + e.key;
      if (e.key != "edge" && !seen.insert(full).second) {
        throw ParseError("duplicate key '" + full + "'", e.line, e.col);
      }
      doc.sections[section].push_back(std::move(e));
    }
    return doc;
  }

 private:
  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  char advance() {
    const char ch = text_[pos_++];
    if (ch == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return ch;
  }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_, col_); }
  void expect(char ch) {
    if (eof() || peek() != ch) fail(std::string("expected '") + ch + "'");
    advance();
  }
  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) advance();
  }
  void skip_comment() {
    if (!eof() && peek() == '#') {
      while (!eof() && peek() != '\n') advance();
    }
  }
  void skip_blank_lines() {
    while (true) {
      skip_ws();
      skip_comment();
      if (!eof() && peek() == '\n') {
        advance();
        continue;
      }
      return;
    }
  }
  // Whitespace, comments and newlines inside brackets.
  void skip_inner() {
    while (true) {
      skip_ws();
      skip_comment();
      if (!eof() && peek() == '\n') {
        advance();
        continue;
      }
      return;
    }
  }
  void end_of_line() {
    skip_ws();
    skip_comment();
    if (eof()) return;
    if (peek() != '\n') fail("unexpected text after value");
    advance();
  }
  std::string key() {
    std::string k;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) k += advance();
    if (k.empty()) fail("expected a key");
    return k;
  }

  Value value() {
    if (eof()) fail("expected a value");
    Value v;
    v.line = line_;
    v.col = col_;
    const char ch = peek();
    if (ch == '"') {
      advance();
      std::string s;
      while (true) {
        if (eof() || peek() == '\n') fail("unterminated string");
        char c = advance();
        if (c == '"') break;
        if (c == '\\') {
          if (eof()) fail("unterminated string");
          c = advance();
          if (c == 'n') c = '\n';
          else if (c == 't') c = '\t';
          else if (c != '"' && c != '\\') fail("unknown escape");
        }
        s += c;
      }
      v.data = std::move(s);
    } else if (ch == '[') {
      advance();
      Array items;
      skip_inner();
      while (!eof() && peek() != ']') {
        items.push_back(value());
        skip_inner();
        if (!eof() && peek() == ',') {
          advance();
          skip_inner();
        } else {
          break;
        }
      }
      skip_inner();
      expect(']');
      v.data = std::move(items);
    } else if (ch == '{') {
      advance();
      Table items;
      skip_inner();
      while (!eof() && peek() != '}') {
        const int l = line_, c = col_;
        std::string k = key();
        for (const auto& [existing, unused] : items) {
          if (existing == k) throw ParseError("duplicate key '" + k + "' in inline table", l, c);
        }
        skip_ws();
        expect('=');
        skip_inner();
        items.emplace_back(std::move(k), value());
        skip_inner();
        if (!eof() && peek() == ',') {
          advance();
          skip_inner();
        } else {
          break;
        }
      }
      skip_inner();
      expect('}');
      v.data = std::move(items);
    } else if (std::isalpha(static_cast<unsigned char>(ch))) {
      std::string word;
      while (!eof() && std::isalpha(static_cast<unsigned char>(peek()))) word += advance();
      if (word == "true") v.data = true;
      else if (word == "false") v.data = false;
      else throw ParseError("unknown literal '" + word + "' (strings need quotes)", v.line, v.col);
    } else {
      std::string num;
      while (!eof() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.' || peek() == 'e' ||
                        peek() == 'E' || peek() == '+' || peek() == '-')) {
        num += advance();
      }
      if (num.empty()) fail(std::string("unexpected character '") + ch + "'");
      const char* first = num.data() + (num[0] == '+' ? 1 : 0);
      double d = 0.0;
      auto [ptr, ec] = std::from_chars(first, num.data() + num.size(), d);
      if (ec != std::errc{} || ptr != num.data() + num.size()) {
        throw ParseError("malformed number '" + num + "'", v.line, v.col);
      }
      v.data = d;
      v.raw = num;
    }
    return v;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// Typed access with errors naming the full key.
class Reader {
 public:
  explicit Reader(Document doc) : doc_(std::move(doc)) {}

  const Value* find(const std::string& section, const std::string& key) {
    auto it = doc_.sections.find(section);
    if (it == doc_.sections.end()) return nullptr;
    for (const Entry& e : it->second) {
      if (e.key == key) {
        doc_.used.insert(full(section, key));
        return &e.value;
      }
    }
    return nullptr;
  }

  std::vector<const Value*> find_all(const std::string& section, const std::string& key) {
    std::vector<const Value*> out;
    auto it = doc_.sections.find(section);
    if (it == doc_.sections.end()) return out;
    for (const Entry& e : it->second) {
      if (e.key == key) out.push_back(&e.value);
    }
    if (!out.empty()) doc_.used.insert(full(section, key));
    return out;
  }

  std::vector<std::string> agent_sections() const {
    std::vector<std::string> out;
    for (const auto& name : doc_.order) {
      if (name.rfind("agent.", 0) == 0) out.push_back(name);
    }
    return out;
  }

  void reject_unknown() const {
    static const std::set<std::string> sections = {"",         "network",  "leader",     "agents",
                                                   "observer", "controller", "integrator", "initial"};
    for (const auto& name : doc_.order) {
      if (!sections.count(name) && name.rfind("agent.", 0) != 0) {
        throw ValidationError(name, "unknown section");
      }
      for (const Entry& e : doc_.sections.at(name)) {
        if (!doc_.used.count(full(name, e.key))) throw ValidationError(full(name, e.key), "unknown key");
      }
    }
  }

  static std::string full(const std::string& section, const std::string& key) {
    return section.empty() ? key : section + "." + key;
  }

 private:
  Document doc_;
};

double as_number(const Value& v, const std::string& key) {
  const double* d = std::get_if<double>(&v.data);
  if (!d) throw ValidationError(key, "must be a number");
  if (!std::isfinite(*d)) throw ValidationError(key, "must be finite");
  return *d;
}

std::int64_t as_integer(const Value& v, const std::string& key) {
  const double d = as_number(v, key);
  std::int64_t out = 0;
  const char* first = v.raw.data() + (!v.raw.empty() && v.raw[0] == '+' ? 1 : 0);
  auto [ptr, ec] = std::from_chars(first, v.raw.data() + v.raw.size(), out);
  if (ec != std::errc{} || ptr != v.raw.data() + v.raw.size()) {
    if (d != std::floor(d) || std::abs(d) > 9.0e15) throw ValidationError(key, "must be an integer");
    out = static_cast<std::int64_t>(d);
  }
  return out;
}

const Array& as_array(const Value& v, const std::string& key) {
  const Array* a = std::get_if<Array>(&v.data);
  if (!a) throw ValidationError(key, "must be an array");
  return *a;
}

Eigen::VectorXd as_vector(const Value& v, const std::string& key) {
  const Array& a = as_array(v, key);
  Eigen::VectorXd out(static_cast<Eigen::Index>(a.size()));
  for (std::size_t k = 0; k < a.size(); ++k) out[static_cast<Eigen::Index>(k)] = as_number(a[k], key);
  return out;
}

Eigen::MatrixXd as_matrix(const Value& v, const std::string& key) {
  const Array& rows = as_array(v, key);
  if (rows.empty()) throw ValidationError(key, "must be a non-empty array of rows");
  std::vector<Eigen::VectorXd> r;
  for (const Value& row : rows) r.push_back(as_vector(row, key));
  Eigen::MatrixXd out(static_cast<Eigen::Index>(r.size()), r[0].size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i].size() != out.cols() || out.cols() == 0) throw ValidationError(key, "rows must have equal, non-zero length");
    out.row(static_cast<Eigen::Index>(i)) = r[i].transpose();
  }
  return out;
}

OddRational as_exponent(const Value& v, const std::string& key) {
  std::string text;
  if (const std::string* s = std::get_if<std::string>(&v.data)) {
    text = *s;
  } else if (std::holds_alternative<double>(v.data) && v.raw.find_first_of(".eE") == std::string::npos) {
    text = v.raw;
  } else {
    throw ValidationError(key, "must be an exact ratio string such as \"7/9\"");
  }
  try {
    return OddRational::parse(text);
  } catch (const Error&) {
    throw ValidationError(key, "must be a ratio of two odd integers, got \"" + text + "\"");
  }
}

bool as_bool(const Value& v, const std::string& key) {
  const bool* b = std::get_if<bool>(&v.data);
  if (!b) throw ValidationError(key, "must be true or false");
  return *b;
}

std::string as_string(const Value& v, const std::string& key) {
  const std::string* s = std::get_if<std::string>(&v.data);
  if (!s) throw ValidationError(key, "must be a quoted string");
  return *s;
}

// Number, or a "p/q" string for convenience (epsilon = "11/19").
double as_real(const Value& v, const std::string& key) {
  if (const std::string* s = std::get_if<std::string>(&v.data)) {
    try {
      return Rational::parse(*s).value();
    } catch (const Error&) {
      throw ValidationError(key, "must be a number or a \"p/q\" string");
    }
  }
  return as_number(v, key);
}

std::array<double, 6> as_theta(const Value& v, const std::string& key) {
  const Eigen::VectorXd t = as_vector(v, key);
  if (t.size() != 6) throw ValidationError(key, "needs exactly 6 entries");
  std::array<double, 6> out{};
  for (int k = 0; k < 6; ++k) out[k] = t[k];
  return out;
}

Scenario build(Document doc) {
  Reader in(std::move(doc));
  Scenario s;
  std::vector<std::string> missing;
  auto req = [&](const std::string& section, const std::string& key) -> const Value* {
    const Value* v = in.find(section, key);
    if (!v) missing.push_back(Reader::full(section, key));
    return v;
  };

  if (const Value* v = in.find("", "name")) s.name = as_string(*v, "name");
  if (const Value* v = in.find("", "tolerance")) s.tolerance = as_number(*v, "tolerance");
  if (const Value* v = in.find("", "seed")) {
    const std::int64_t seed = as_integer(*v, "seed");
    if (seed < 0) throw ValidationError("seed", "must be >= 0");
    s.seed = static_cast<std::uint64_t>(seed);
  }

  // network
  const Value* followers = req("network", "followers");
  const auto edges = in.find_all("network", "edge");
  if (edges.empty()) missing.push_back("network.edge");
  const Value* S = req("leader", "S");
  const Value* E = req("leader", "E");
  const Value* eta0 = req("leader", "eta0");
  const Value* theta = req("agents", "theta");
  const Value* c1 = req("observer", "c1");
  const Value* c2 = req("observer", "c2");
  const Value* c3 = req("observer", "c3");
  const Value* a = req("observer", "a");
  const Value* alpha = req("controller", "alpha");
  const Value* beta = req("controller", "beta");
  const Value* gamma1 = req("controller", "gamma1");
  const Value* k1 = req("controller", "k1");
  if (!missing.empty()) {
    std::string list;
    for (const auto& k : missing) list += (list.empty() ? "" : ", ") + k;
    throw ValidationError(missing.front(), "required key missing (missing: " + list + ")");
  }

  const std::int64_t N = as_integer(*followers, "network.followers");
  if (N < 1 || N > 10000) throw ValidationError("network.followers", "must be in 1..10000");
  std::vector<Edge> edge_list;
  for (const Value* e : edges) {
    const Array& t = as_array(*e, "network.edge");
    if (t.size() != 3) throw ValidationError("network.edge", "must be [from, to, weight]");
    edge_list.push_back({static_cast<int>(as_integer(t[0], "network.edge")),
                         static_cast<int>(as_integer(t[1], "network.edge")), as_number(t[2], "network.edge")});
  }
  try {
    s.graph = Digraph(static_cast<int>(N), edge_list);
  } catch (const InvalidGraph& e) {
    throw ValidationError("network.edge", e.what());
  }
  if (const Value* v = in.find("network", "D_diag")) s.D_diag = as_vector(*v, "network.D_diag");

  s.leader.S = as_matrix(*S, "leader.S");
  s.leader.E = as_matrix(*E, "leader.E");
  s.leader.eta0 = as_vector(*eta0, "leader.eta0");

  ManipulatorParams common;
  common.theta = as_theta(*theta, "agents.theta");
  if (const Value* v = in.find("agents", "gravity")) common.gravity = as_number(*v, "agents.gravity");
  s.agents.assign(static_cast<std::size_t>(N), common);
  if (const Value* v = in.find("agents", "theta_ranges")) {
    const Array& r = as_array(*v, "agents.theta_ranges");
    if (r.size() != 6) throw ValidationError("agents.theta_ranges", "needs 6 [lo, hi] pairs");
    for (int k = 0; k < 6; ++k) {
      const Eigen::VectorXd p = as_vector(r[k], "agents.theta_ranges");
      if (p.size() != 2) throw ValidationError("agents.theta_ranges", "each entry must be [lo, hi]");
      s.theta_ranges[k] = {p[0], p[1]};
    }
  }
  if (const Value* v = in.find("agents", "bounds")) {
    const Table* t = std::get_if<Table>(&v->data);
    if (!t) throw ValidationError("agents.bounds", "must be an inline table {km_inv, kM_inv, kc, kg}");
    for (const auto& [k, val] : *t) {
      const std::string key = "agents.bounds." + k;
      if (k == "km_inv") s.bounds.km_inv = as_number(val, key);
      else if (k == "kM_inv") s.bounds.kM_inv = as_number(val, key);
      else if (k == "kc") s.bounds.kc = as_number(val, key);
      else if (k == "kg") s.bounds.kg = as_number(val, key);
      else throw ValidationError(key, "unknown key");
    }
  }
  for (const std::string& sec : in.agent_sections()) {
    const std::string id = sec.substr(6);
    int k = 0;
    auto [ptr, ec] = std::from_chars(id.data(), id.data() + id.size(), k);
    if (ec != std::errc{} || ptr != id.data() + id.size() || k < 1 || k > N) {
      throw ValidationError(sec, "follower id must be in 1.." + std::to_string(N));
    }
    if (const Value* v = in.find(sec, "theta")) s.agents[k - 1].theta = as_theta(*v, sec + ".theta");
    if (const Value* v = in.find(sec, "gravity")) s.agents[k - 1].gravity = as_number(*v, sec + ".gravity");
  }

  s.observer.c1 = as_number(*c1, "observer.c1");
  s.observer.c2 = as_number(*c2, "observer.c2");
  s.observer.c3 = as_number(*c3, "observer.c3");
  s.observer.a = as_exponent(*a, "observer.a");
  if (const Value* v = in.find("observer", "b")) s.observer.b = as_exponent(*v, "observer.b");

  ControllerConfig& c = s.controller;
  c.gains.alpha = as_exponent(*alpha, "controller.alpha");
  c.gains.beta = as_exponent(*beta, "controller.beta");
  c.gains.gamma1 = as_number(*gamma1, "controller.gamma1");
  c.gains.k1 = as_number(*k1, "controller.k1");
  c.gains.gamma2 = 0.0;
  c.gains.k2 = 0.0;
  if (const Value* v = in.find("controller", "gamma2")) c.gains.gamma2 = as_number(*v, "controller.gamma2");
  if (const Value* v = in.find("controller", "k2")) c.gains.k2 = as_number(*v, "controller.k2");
  if (const Value* v = in.find("controller", "kappa")) c.kappa = as_number(*v, "controller.kappa");
  if (const Value* v = in.find("controller", "epsilon")) c.epsilon = as_real(*v, "controller.epsilon");
  if (const Value* v = in.find("controller", "mode")) {
    try {
      c.mode = parse_control_mode(as_string(*v, "controller.mode"));
    } catch (const Error&) {
      throw ValidationError("controller.mode", "must be \"fixed\" or \"finite\"");
    }
  }
  if (const Value* v = in.find("controller", "allow_uncertified")) {
    c.allow_uncertified = as_bool(*v, "controller.allow_uncertified");
  }
  if (const Value* v = in.find("controller", "u1_smooth_radius")) {
    c.u1_smooth_radius = as_number(*v, "controller.u1_smooth_radius");
  }

  if (const Value* v = in.find("integrator", "step")) s.integrator.step = as_number(*v, "integrator.step");
  if (const Value* v = in.find("integrator", "horizon")) s.integrator.horizon = as_number(*v, "integrator.horizon");
  if (const Value* v = in.find("integrator", "record_every")) {
    s.integrator.record_every = static_cast<int>(as_integer(*v, "integrator.record_every"));
  }
  if (const Value* v = in.find("initial", "eta_scale")) s.initial.eta_scale = as_number(*v, "initial.eta_scale");
  if (const Value* v = in.find("initial", "q_scale")) s.initial.q_scale = as_number(*v, "initial.q_scale");
  if (const Value* v = in.find("initial", "v_scale")) s.initial.v_scale = as_number(*v, "initial.v_scale");

  in.reject_unknown();
  if (c.mode == ControlMode::finite) {
    if (s.observer.c3 != 0.0) throw ValidationError("observer.c3", "must be 0 in finite mode");
    if (c.gains.gamma2 != 0.0) throw ValidationError("controller.gamma2", "must be 0 in finite mode");
    if (c.gains.k2 != 0.0) throw ValidationError("controller.k2", "must be 0 in finite mode");
  } else if (s.observer.c3 == 0.0) {
    throw ValidationError("observer.c3", "must be > 0 in fixed mode");
  }
  s.validate();
  return s;
}

void num(std::ostream& os, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  os.write(buf, ptr - buf);
}

void vec(std::ostream& os, const Eigen::VectorXd& v) {
  os << '[';
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (k) os << ", ";
    num(os, v[k]);
  }
  os << ']';
}

void mat(std::ostream& os, const Eigen::MatrixXd& m) {
  os << '[';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (r) os << ", ";
    vec(os, m.row(r).transpose());
  }
  os << ']';
}

void theta_line(std::ostream& os, const std::array<double, 6>& t) {
  os << "theta = [";
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (k) os << ", ";
    num(os, t[k]);
  }
  os << "]\n";
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + '"';
}

}  // namespace

Scenario parse_config_text(std::string_view text) { return build(Parser(text).run()); }

Scenario parse_config(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("scenario", "cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_config_text(buf.str());
}

Scenario load_scenario(const std::string& name_or_path) {
  const std::string_view bundled = bundled_scenario_text(name_or_path);
  if (!bundled.empty()) return parse_config_text(bundled);
  return parse_config(name_or_path);
}

std::string emit_config(const Scenario& s) {
  std::ostringstream os;
  os << "name = " << quoted(s.name) << "\ntolerance = ";
  num(os, s.tolerance);
  os << "\nseed = " << s.seed << "\n\n[network]\nfollowers = " << s.graph.n_followers() << '\n';
  for (const Edge& e : s.graph.edges()) {
    os << "edge = [" << e.from << ", " << e.to << ", ";
    num(os, e.weight);
    os << "]\n";
  }
  if (s.D_diag) {
    os << "D_diag = ";
    vec(os, *s.D_diag);
    os << '\n';
  }
  os << "\n[leader]\nS = ";
  mat(os, s.leader.S);
  os << "\nE = ";
  mat(os, s.leader.E);
  os << "\neta0 = ";
  vec(os, s.leader.eta0);

  const ManipulatorParams common = s.agents.empty() ? ManipulatorParams{} : s.agents.front();
  os << "\n\n[agents]\n";
  theta_line(os, common.theta);
  os << "gravity = ";
  num(os, common.gravity);
  os << "\ntheta_ranges = [";
  for (std::size_t k = 0; k < s.theta_ranges.size(); ++k) {
    os << (k ? ", [" : "[");
    num(os, s.theta_ranges[k].first);
    os << ", ";
    num(os, s.theta_ranges[k].second);
    os << ']';
  }
  os << "]\nbounds = {km_inv = ";
  num(os, s.bounds.km_inv);
  os << ", kM_inv = ";
  num(os, s.bounds.kM_inv);
  os << ", kc = ";
  num(os, s.bounds.kc);
  os << ", kg = ";
  num(os, s.bounds.kg);
  os << "}\n";
  for (std::size_t i = 1; i < s.agents.size(); ++i) {
    const ManipulatorParams& p = s.agents[i];
    if (p == common) continue;
    os << "\n[agent." << i + 1 << "]\n";
    if (p.theta != common.theta) theta_line(os, p.theta);
    if (p.gravity != common.gravity) {
      os << "gravity = ";
      num(os, p.gravity);
      os << '\n';
    }
  }

  os << "\n[observer]\nc1 = ";
  num(os, s.observer.c1);
  os << "\nc2 = ";
  num(os, s.observer.c2);
  os << "\nc3 = ";
  num(os, s.observer.c3);
  os << "\na = \"" << s.observer.a.to_string() << "\"\nb = \"" << s.observer.b.to_string() << "\"\n";

  const ControllerConfig& c = s.controller;
  os << "\n[controller]\nmode = \"" << to_string(c.mode) << "\"\nalpha = \"" << c.gains.alpha.to_string()
     << "\"\nbeta = \"" << c.gains.beta.to_string() << "\"\ngamma1 = ";
  num(os, c.gains.gamma1);
  os << "\ngamma2 = ";
  num(os, c.gains.gamma2);
  os << "\nk1 = ";
  num(os, c.gains.k1);
  os << "\nk2 = ";
  num(os, c.gains.k2);
  os << "\nkappa = ";
  num(os, c.kappa);
  if (c.epsilon) {
    os << "\nepsilon = ";
    num(os, *c.epsilon);
  }
  os << "\nallow_uncertified = " << (c.allow_uncertified ? "true" : "false") << "\nu1_smooth_radius = ";
  num(os, c.u1_smooth_radius);

  os << "\n\n[integrator]\nstep = ";
  num(os, s.integrator.step);
  os << "\nhorizon = ";
  num(os, s.integrator.horizon);
  os << "\nrecord_every = " << s.integrator.record_every << "\n\n[initial]\neta_scale = ";
  num(os, s.initial.eta_scale);
  os << "\nq_scale = ";
  num(os, s.initial.q_scale);
  os << "\nv_scale = ";
  num(os, s.initial.v_scale);
  os << '\n';
  return os.str();
}

}  // namespace lagsync
