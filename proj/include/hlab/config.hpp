#pragma once
// Flat key-value configuration text:
//
//   # comment
//   [weight]
//   kind = power
//   beta=0.5 center=(0) n=1
//
// Several key=value tokens may share a line; whitespace inside parentheses
// does not split tokens. Keys are unique within a section. Keys before the
// first header belong to the unnamed section "".

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string_view>

#include "hlab/coefficients.hpp"
#include "hlab/solver.hpp"

namespace hlab {

class Config {
 public:
  static Config parse(std::string_view text, const std::string& source = "<config>") {
    Config c;
    c.source_ = source;
    std::string section;
    c.order_.push_back(section);
    int lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t end = std::min(text.find('\n', pos), text.size());
      std::string line(text.substr(pos, end - pos));
      pos = end + 1;
      ++lineno;
      if (const auto h = line.find('#'); h != std::string::npos) line.resize(h);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') c.fail(lineno, "unterminated section header");
        section = trim(line.substr(1, line.size() - 2));
        if (section.empty()) c.fail(lineno, "empty section name");
        if (c.data_.count(section)) c.fail(lineno, "duplicate section [" + section + "]");
        c.data_[section];
        c.order_.push_back(section);
        continue;
      }
      for (const auto& tok : tokens(line, [&](const std::string& m) { c.fail(lineno, m); })) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos || eq == 0) c.fail(lineno, "expected key=value, got '" + tok + "'");
        const std::string key = tok.substr(0, eq), value = tok.substr(eq + 1);
        auto& sec = c.data_[section];
        if (sec.count(key)) c.fail(lineno, "duplicate key '" + key + "'");
        sec[key] = value;
        c.keys_[section].push_back(key);
      }
    }
    return c;
  }

  static Config load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ParseError("cannot read config file " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse(ss.str(), path);
  }

  bool has_section(const std::string& s) const { return data_.count(s) > 0; }
  bool has(const std::string& s, const std::string& k) const {
    const auto it = data_.find(s);
    return it != data_.end() && it->second.count(k);
  }

  std::string get(const std::string& s, const std::string& k) const {
    if (!has(s, k)) throw ParseError(source_ + ": missing key '" + k + "' in [" + s + "]");
    return data_.at(s).at(k);
  }
  std::string get(const std::string& s, const std::string& k, const std::string& def) const {
    return has(s, k) ? data_.at(s).at(k) : def;
  }

  double number(const std::string& s, const std::string& k) const {
    return to_number(get(s, k), where(s, k));
  }
  double number(const std::string& s, const std::string& k, double def) const {
    return has(s, k) ? number(s, k) : def;
  }
  long long integer(const std::string& s, const std::string& k) const {
    return to_integer(get(s, k), where(s, k));
  }
  long long integer(const std::string& s, const std::string& k, long long def) const {
    return has(s, k) ? integer(s, k) : def;
  }
  bool boolean(const std::string& s, const std::string& k, bool def) const {
    if (!has(s, k)) return def;
    const std::string v = get(s, k);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ParseError(where(s, k) + ": expected a boolean, got '" + v + "'");
  }
  /// "(a, b)", "a,b" or a bare number.
  std::vector<double> list(const std::string& s, const std::string& k) const {
    return to_list(get(s, k), where(s, k));
  }
  std::vector<double> list(const std::string& s, const std::string& k,
                           std::vector<double> def) const {
    return has(s, k) ? list(s, k) : def;
  }

  void set(const std::string& s, const std::string& k, const std::string& v) {
    if (!data_.count(s)) order_.push_back(s);
    auto& sec = data_[s];
    if (!sec.count(k)) keys_[s].push_back(k);
    sec[k] = v;
  }

  /// Keys of a section in file order.
  std::vector<std::string> keys(const std::string& s) const {
    const auto it = keys_.find(s);
    return it == keys_.end() ? std::vector<std::string>{} : it->second;
  }

  /// Rejects keys outside `allowed` (exact names, or prefixes ending in '.').
  void check_keys(const std::string& s, const std::vector<std::string>& allowed) const {
    for (const auto& k : keys(s)) {
      bool ok = false;
      for (const auto& a : allowed)
        if (k == a || (!a.empty() && a.back() == '.' && k.rfind(a, 0) == 0)) ok = true;
      if (!ok) throw ParseError(where(s, k) + ": unknown key");
    }
  }

  std::string serialize() const {
    std::string out;
    for (const auto& s : order_) {
      const auto ks = keys(s);
      if (ks.empty()) continue;
      if (!s.empty()) out += (out.empty() ? "" : "\n") + std::string("[") + s + "]\n";
      for (const auto& k : ks) out += k + " = " + data_.at(s).at(k) + "\n";
    }
    return out;
  }

  const std::string& source() const { return source_; }

  static double to_number(const std::string& v, const std::string& where) {
    const std::string t = trim(v);
    if (t == "inf") return kInf;
    if (t == "-inf") return -kInf;
    double out = 0.0;
    const auto r = std::from_chars(t.data(), t.data() + t.size(), out);
    if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size())
      throw ParseError(where + ": expected a number, got '" + v + "'");
    return out;
  }

  static long long to_integer(const std::string& v, const std::string& where) {
    const std::string t = trim(v);
    long long out = 0;
    const auto r = std::from_chars(t.data(), t.data() + t.size(), out);
    if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size())
      throw ParseError(where + ": expected an integer, got '" + v + "'");
    return out;
  }

  static std::vector<double> to_list(const std::string& v, const std::string& where) {
    std::string t = trim(v);
    if (!t.empty() && t.front() == '(') {
      if (t.back() != ')') throw ParseError(where + ": unbalanced parentheses in '" + v + "'");
      t = t.substr(1, t.size() - 2);
    }
    std::vector<double> out;
    if (trim(t).empty()) return out;
    std::size_t pos = 0;
    while (true) {
      const auto c = t.find(',', pos);
      out.push_back(to_number(t.substr(pos, c - pos), where));
      if (c == std::string::npos) break;
      pos = c + 1;
    }
    return out;
  }

  static std::string format_list(const std::vector<double>& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt17(v[i]);
    return s + ")";
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  /// Splits on whitespace outside parentheses after gluing "k = v" into "k=v".
  template <class Fail>
  static std::vector<std::string> tokens(const std::string& line, Fail fail) {
    std::string glued;
    int depth = 0;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char ch = line[i];
      if (ch == '(') ++depth;
      if (ch == ')' && --depth < 0) fail("unbalanced ')'");
      if (depth == 0 && (ch == ' ' || ch == '\t')) {
        // Drop blanks adjacent to '='.
        std::size_t j = i;
        while (j < line.size() && (line[j] == ' ' || line[j] == '\t')) ++j;
        const bool before_eq = j < line.size() && line[j] == '=';
        const bool after_eq = !glued.empty() && glued.back() == '=';
        if (before_eq || after_eq) {
          i = j - 1;
          continue;
        }
      }
      glued += (depth > 0 && (ch == ' ' || ch == '\t')) ? std::string() : std::string(1, ch);
    }
    if (depth != 0) fail("unbalanced '('");
    std::vector<std::string> out;
    std::string cur;
    for (char ch : glued) {
      if (ch == ' ' || ch == '\t') {
        if (!cur.empty()) out.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
  }

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw ParseError(source_ + ":" + std::to_string(line) + ": " + msg);
  }

  std::string where(const std::string& s, const std::string& k) const {
    return source_ + ": [" + s + "] " + k;
  }

  std::string source_;
  std::map<std::string, std::map<std::string, std::string>> data_;
  std::map<std::string, std::vector<std::string>> keys_;
  std::vector<std::string> order_;
};

// ---------------------------------------------------------------------------
// Weights. Product factors use prefixed keys: factors=2 f1.kind=power f1.beta=...
// ---------------------------------------------------------------------------

/// Two numeric columns x,w; a non-numeric first line is a header.
inline WeightSpec read_tabulated_csv(const std::string& path, double floor) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot read tabulated weight file " + path);
  std::vector<double> xs, ws;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto c = line.find(',');
    if (c == std::string::npos) throw ParseError(path + ":" + std::to_string(lineno) + ": expected x,w");
    try {
      xs.push_back(Config::to_number(line.substr(0, c), path));
      ws.push_back(Config::to_number(line.substr(c + 1), path));
    } catch (const ParseError&) {
      if (lineno == 1) continue;
      throw;
    }
  }
  return WeightSpec::tabulated(xs, ws, floor);
}

inline WeightSpec parse_weight(const Config& c, const std::string& s = "weight",
                               const std::string& prefix = "") {
  auto key = [&](const char* k) { return prefix + k; };
  const std::string kind = c.get(s, key("kind"));
  const int n = static_cast<int>(c.integer(s, key("n"), 1));
  if (kind == "constant") return WeightSpec::constant(c.number(s, key("c"), 1.0), n);
  if (kind == "power") {
    Point center = c.list(s, key("center"), Point(n, 0.0));
    return WeightSpec::power(c.number(s, key("beta")), center, n);
  }
  if (kind == "tabulated") {
    const double floor = c.number(s, key("floor"), 0.0);
    if (c.has(s, key("file"))) return read_tabulated_csv(c.get(s, key("file")), floor);
    return WeightSpec::tabulated(c.list(s, key("x")), c.list(s, key("w")), floor);
  }
  if (kind == "product") {
    const int count = static_cast<int>(c.integer(s, key("factors")));
    if (count < 1) throw ParseError(c.source() + ": product weight needs factors >= 1");
    std::vector<WeightSpec> fs;
    for (int i = 1; i <= count; ++i)
      fs.push_back(parse_weight(c, s, prefix + "f" + std::to_string(i) + "."));
    return WeightSpec::product(std::move(fs));
  }
  throw ParseError(c.source() + ": unknown weight kind '" + kind + "'");
}

inline void serialize_weight(const WeightSpec& w, Config& c, const std::string& s = "weight",
                             const std::string& prefix = "") {
  auto put = [&](const char* k, const std::string& v) { c.set(s, prefix + k, v); };
  put("kind", w.kind_name());
  const auto& k = w.kind();
  if (auto* p = std::get_if<ConstantWeight>(&k)) {
    put("c", fmt17(p->c));
    put("n", std::to_string(w.dim()));
  } else if (auto* p = std::get_if<PowerWeight>(&k)) {
    put("beta", fmt17(p->beta));
    put("center", Config::format_list(p->center));
    put("n", std::to_string(w.dim()));
  } else if (auto* p = std::get_if<TabulatedWeight>(&k)) {
    put("x", Config::format_list(p->x));
    put("w", Config::format_list(p->w));
    put("floor", fmt17(w.singular_floor()));
  } else if (auto* p = std::get_if<ProductWeight>(&k)) {
    put("factors", std::to_string(p->factors.size()));
    for (std::size_t i = 0; i < p->factors.size(); ++i)
      serialize_weight(p->factors[i], c, s, prefix + "f" + std::to_string(i + 1) + ".");
  }
}

// ---------------------------------------------------------------------------
// Coefficients: kind = identity | constant | checkerboard | rotating.
// ---------------------------------------------------------------------------

inline CoefficientField parse_coefficients(const Config& c, int n,
                                           const std::string& s = "coefficients") {
  if (!c.has_section(s)) return CoefficientField::identity(n);
  c.check_keys(s, {"kind", "nu", "a11", "a12", "a22", "seed", "cell_x", "cell_t", "origin",
                   "t_origin", "time_dependent", "theta0", "kx", "kt"});
  const std::string kind = c.get(s, "kind", "identity");
  const double nu = c.number(s, "nu", 0.5);
  if (kind == "identity") return CoefficientField::identity(n, nu);
  if (kind == "constant")
    return CoefficientField::constant(
        Sym2{c.number(s, "a11", 1.0), c.number(s, "a12", 0.0), c.number(s, "a22", 1.0)}, n, nu);
  if (kind == "checkerboard")
    return CoefficientField::checkerboard(
        n, nu, static_cast<std::uint64_t>(c.integer(s, "seed", 1)), c.number(s, "cell_x", 0.25),
        c.number(s, "cell_t", 0.25), c.list(s, "origin", Point(n, 0.0)),
        c.number(s, "t_origin", 0.0), c.boolean(s, "time_dependent", true));
  if (kind == "rotating")
    return CoefficientField::rotating(n, nu, c.number(s, "theta0", 0.0), c.number(s, "kx", 1.0),
                                      c.number(s, "kt", 0.0));
  throw ParseError(c.source() + ": unknown coefficient kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Data presets for solve runs.
//   initial  = zero | constant | sine | gaussian | quadratic
//   boundary = initial | zero | constant
//   f        = zero | constant | steady_quadratic
// with parameters initial.value, initial.k, initial.center, initial.width,
// initial.amplitude, boundary.value, f.value.
// ---------------------------------------------------------------------------

inline SpaceFn initial_preset(const Config& c, int n, const std::string& s = "data") {
  const std::string kind = c.get(s, "initial", "zero");
  const double value = c.number(s, "initial.value", 1.0);
  const double k = c.number(s, "initial.k", 1.0);
  const double width = c.number(s, "initial.width", 0.25);
  const double amp = c.number(s, "initial.amplitude", 1.0);
  const Point center = c.list(s, "initial.center", Point(n, 0.0));
  if (static_cast<int>(center.size()) != n)
    throw ParseError(c.source() + ": initial.center has the wrong dimension");
  if (kind == "zero") return [](const Point&) { return 0.0; };
  if (kind == "constant") return [value](const Point&) { return value; };
  if (kind == "sine")
    return [k, amp](const Point& x) {
      double v = amp;
      for (double xi : x) v *= std::sin(k * xi);
      return v;
    };
  if (kind == "gaussian")
    return [center, width, amp](const Point& x) {
      return amp * std::exp(-dist2(x, center) / (2 * width * width));
    };
  if (kind == "quadratic") return [center](const Point& x) { return dist2(x, center); };
  throw ParseError(c.source() + ": unknown initial preset '" + kind + "'");
}

inline Problem parse_problem(const Config& c, const std::string& s = "data") {
  Problem p;
  p.w = parse_weight(c);
  const int n = p.w.dim();
  p.a = parse_coefficients(c, n);
  if (c.has_section(s))
    c.check_keys(s, {"initial", "initial.", "boundary", "boundary.", "f", "f."});
  p.initial = initial_preset(c, n, s);
  const std::string b = c.get(s, "boundary", "initial");
  if (b == "zero") {
    p.boundary = [](const Point&, double) { return 0.0; };
  } else if (b == "constant") {
    const double v = c.number(s, "boundary.value", 0.0);
    p.boundary = [v](const Point&, double) { return v; };
  } else if (b != "initial") {
    throw ParseError(c.source() + ": unknown boundary preset '" + b + "'");
  }
  const std::string f = c.get(s, "f", "zero");
  if (f == "constant") {
    const double v = c.number(s, "f.value", 1.0);
    p.f = [v](const Point&, double) { return v; };
  } else if (f == "steady_quadratic") {
    // Keeps |x - center|^2 stationary: f = -2 omega tr(a).
    const auto w = p.w;
    const auto a = p.a;
    p.f = [w, a, n](const Point& x, double t) { return -2 * w.omega(x) * a(x, t).trace(n); };
  } else if (f != "zero") {
    throw ParseError(c.source() + ": unknown right-hand side preset '" + f + "'");
  }
  return p;
}

/// [grid]: lo, hi, nodes (per axis or one value), t0, t1, steps (integer or
/// "auto"), scheme (explicit | implicit), stretch (implicit step multiple).
inline GridSpec parse_grid(const Config& c, const Problem& p, const std::string& s = "grid") {
  c.check_keys(s, {"lo", "hi", "nodes", "t0", "t1", "steps", "scheme", "stretch"});
  const int n = p.w.dim();
  const Point lo = c.list(s, "lo", Point(n, -1.0)), hi = c.list(s, "hi", Point(n, 1.0));
  std::vector<double> nd = c.list(s, "nodes", {41.0});
  if (nd.size() == 1) nd.assign(n, nd[0]);
  if (static_cast<int>(lo.size()) != n || static_cast<int>(hi.size()) != n ||
      static_cast<int>(nd.size()) != n)
    throw ParseError(c.source() + ": grid lo/hi/nodes must match the weight dimension");
  std::vector<int> nodes;
  for (double v : nd) nodes.push_back(static_cast<int>(v));
  const std::string scheme_name = c.get(s, "scheme", "explicit");
  Scheme scheme;
  if (scheme_name == "explicit") {
    scheme = Scheme::explicit_euler;
  } else if (scheme_name == "implicit") {
    scheme = Scheme::implicit_euler;
  } else {
    throw ParseError(c.source() + ": scheme must be explicit or implicit");
  }
  GridSpec g = box_grid(p, lo, hi, nodes, c.number(s, "t0", 0.0), c.number(s, "t1", 0.1), scheme,
                        c.number(s, "stretch", 1.0));
  const std::string steps = c.get(s, "steps", "auto");
  if (steps != "auto") g.steps = static_cast<int>(c.integer(s, "steps"));
  return g;
}

}  // namespace hlab
