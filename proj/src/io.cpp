#include "haarlab/io.hpp"

#include <fstream>
#include <sstream>

namespace haarlab::io {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json padic_scalar_json(const padic::Scalar& s) {
  return json{{"p", s.p()}, {"K", s.K()}, {"value", s.str()}};
}

padic::Scalar padic_scalar_from_json(const json& j) {
  std::uint64_t p = j.at("p").get<std::uint64_t>();
  int K = j.at("K").get<int>();
  padic::u128 v = 0;
  for (char c : j.at("value").get<std::string>()) {
    require(c >= '0' && c <= '9', "padic scalar json: bad digit");
    v = v * 10 + (c - '0');
  }
  return padic::Scalar(p, K, v);
}

json padic_matrix_json(const padic::Matrix& m) {
  json entries = json::array();
  for (int i = 0; i < m.n(); ++i)
    for (int j = 0; j < m.n(); ++j) entries.push_back(padic::u128_to_string(m.at(i, j)));
  return json{{"p", m.p()}, {"K", m.K()}, {"n", m.n()}, {"entries", entries}};
}

padic::Matrix padic_matrix_from_json(const json& j) {
  padic::Matrix m(j.at("p").get<std::uint64_t>(), j.at("K").get<int>(), j.at("n").get<int>());
  auto entries = j.at("entries");
  require(int(entries.size()) == m.n() * m.n(), "padic matrix json: wrong entry count");
  int t = 0;
  for (int r = 0; r < m.n(); ++r)
    for (int c = 0; c < m.n(); ++c) {
      padic::u128 v = 0;
      for (char ch : entries[t++].get<std::string>()) {
        require(ch >= '0' && ch <= '9', "padic matrix json: bad digit");
        v = v * 10 + (ch - '0');
      }
      m.at(r, c) = v % m.modulus();
    }
  return m;
}

std::string rat_str(const transport::Rat& r) {
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

transport::Rat rat_from_str(const std::string& s) {
  auto slash = s.find('/');
  require(slash != std::string::npos, "rational string must be num/den");
  transport::Rat r(mpz_class(s.substr(0, slash)), mpz_class(s.substr(slash + 1)));
  r.canonicalize();
  return r;
}

json decomposition_json(const transport::Decomposition& d) {
  json terms = json::array();
  for (int t = 0; t < d.terms(); ++t) {
    json edges = json::array();
    for (auto& [i, j] : d.trees[t].edges) edges.push_back(json::array({i, j}));
    terms.push_back(json{{"weight", rat_str(d.weights[t])}, {"tree_edges", edges}});
  }
  return json{{"terms", terms}};
}

json coupling_json(const transport::CouplingMatrix& c) {
  json rows = json::array();
  for (int i = 0; i < c.n1; ++i) {
    json row = json::array();
    for (int j = 0; j < c.n2; ++j) row.push_back(rat_str(c.at(i, j)));
    rows.push_back(row);
  }
  return json{{"n1", c.n1}, {"n2", c.n2}, {"entries", rows}};
}

void write_coupling_csv(const std::string& path, const transport::CouplingMatrix& c) {
  std::ofstream out(path);
  require(bool(out), "cannot open " + path);
  for (int i = 0; i < c.n1; ++i) {
    for (int j = 0; j < c.n2; ++j) {
      if (j) out << ",";
      out << rat_str(c.at(i, j));
    }
    out << "\n";
  }
}

json spectral_json(const walks::SpectralReport& r) {
  return json{{"lambda", r.lambda}, {"lyapunov", r.lyapunov}, {"method", r.method}, {"dim", r.dim}};
}

json displacement_json(const walks::DisplacementReport& r) {
  json j{{"per_generator", r.per_generator},
         {"delta_f", r.delta_f},
         {"delta_min_candidates", r.delta_min_candidates}};
  if (r.has_sandwich) {
    j["sandwich_c_low"] = r.c_low;
    j["sandwich_c_up"] = r.c_up;
  }
  return j;
}

json decay_json(const cx::DecayReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back(json{{"j", row.j},
                        {"max_dev", row.max_dev},
                        {"bound", row.bound},
                        {"mu_hat_abs", row.mu_hat_abs},
                        {"mu_hat_re", row.mu_hat_re},
                        {"mu_hat_im", row.mu_hat_im}});
  return json{{"p", r.p}, {"M", r.M}, {"N", r.N}, {"C", r.C},
              {"all_within_bound", r.all_within_bound}, {"rows", rows}};
}

void write_decay_csv(const std::string& path, const cx::DecayReport& r) {
  std::ofstream out(path);
  require(bool(out), "cannot open " + path);
  out << "j,max_gamma_dev,bound,mu_hat_abs\n";
  for (const auto& row : r.rows)
    out << row.j << "," << fmt17(row.max_dev) << "," << fmt17(row.bound) << ","
        << fmt17(row.mu_hat_abs) << "\n";
}

namespace {

// RFC-4180-style quoting for fields that need it
std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

}  // namespace

void write_sample_cloud(const std::string& csv_path, const std::string& sidecar_path,
                        const groups::Spec& spec, const std::vector<groups::Point>& pts,
                        std::uint64_t seed) {
  std::ofstream out(csv_path);
  require(bool(out), "cannot open " + csv_path);
  out << "point\n";
  for (const auto& g : pts) out << csv_quote(groups::point_key(spec, g)) << "\n";
  json side{{"spec", spec.describe()}, {"seed", seed}, {"count", pts.size()}};
  write_text(sidecar_path, side.dump(2) + "\n");
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  require(bool(out), "cannot open " + path);
  out << content;
}

// ---------------- config ----------------

Config Config::parse_string(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line, section = "global";
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto strip = [](std::string s) {
      size_t a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      size_t b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    line = strip(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      require(line.back() == ']', "config line " + std::to_string(lineno) + ": unterminated section");
      section = strip(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    require(eq != std::string::npos, "config line " + std::to_string(lineno) + ": expected key = value");
    cfg.sections_[section][strip(line.substr(0, eq))] = strip(line.substr(eq + 1));
  }
  return cfg;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  require(bool(in), "cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

bool Config::has(const std::string& s, const std::string& k) const {
  auto it = sections_.find(s);
  return it != sections_.end() && it->second.count(k) > 0;
}

std::string Config::get(const std::string& s, const std::string& k) const {
  require(has(s, k), "config: missing required key [" + s + "] " + k);
  return sections_.at(s).at(k);
}

std::string Config::get_or(const std::string& s, const std::string& k, const std::string& d) const {
  return has(s, k) ? sections_.at(s).at(k) : d;
}

long Config::get_long(const std::string& s, const std::string& k) const {
  return std::stol(get(s, k));
}

long Config::get_long_or(const std::string& s, const std::string& k, long d) const {
  return has(s, k) ? std::stol(sections_.at(s).at(k)) : d;
}

double Config::get_double_or(const std::string& s, const std::string& k, double d) const {
  return has(s, k) ? std::stod(sections_.at(s).at(k)) : d;
}

void Config::set(const std::string& s, const std::string& k, const std::string& v) {
  sections_[s][k] = v;
}

json Config::dump() const {
  json out;
  for (auto& [s, kv] : sections_)
    for (auto& [k, v] : kv) out[s][k] = v;
  return out;
}

}  // namespace haarlab::io
