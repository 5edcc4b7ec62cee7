#include "veritest/document.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace veritest {

namespace {

std::vector<std::string> tokenize(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

double parse_number(const std::string& tok, int line) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    throw DocumentError(line, "expected a number, got '" + tok + "'");
  }
  if (pos != tok.size()) throw DocumentError(line, "trailing characters in number '" + tok + "'");
  return v;
}

}  // namespace

Document Document::parse(const std::string& text) {
  Document doc;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::vector<std::pair<std::string, std::vector<Entry>>>* sections = &doc.sections_;
  std::vector<Entry>* current = nullptr;
  std::string current_name;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto tokens = tokenize(line);
    if (tokens.empty()) continue;
    if (tokens.size() == 1 && tokens[0].size() >= 2 && tokens[0].front() == '[' &&
        tokens[0].back() == ']') {
      current_name = tokens[0].substr(1, tokens[0].size() - 2);
      sections->emplace_back(current_name, std::vector<Entry>());
      current = &sections->back().second;
      continue;
    }
    const auto eq = std::find(tokens.begin(), tokens.end(), "=");
    if (eq == tokens.end()) {
      throw DocumentError(lineno, "expected 'key = value' or '[section]'");
    }
    if (current == nullptr) throw DocumentError(lineno, "entry outside any [section]");
    Entry e;
    e.key = join(std::vector<std::string>(tokens.begin(), eq));
    e.values.assign(eq + 1, tokens.end());
    e.line = lineno;
    if (e.key.empty()) throw DocumentError(lineno, "empty key");
    current->push_back(std::move(e));
  }
  return doc;
}

Document Document::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open document: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

bool Document::has_section(const std::string& name) const {
  for (const auto& [n, _] : sections_) {
    if (n == name) return true;
  }
  return false;
}

const std::vector<Document::Entry>& Document::section(const std::string& name) const {
  for (const auto& [n, entries] : sections_) {
    if (n == name) return entries;
  }
  throw std::runtime_error("missing [" + name + "] section");
}

const Document::Entry* Document::find(const std::string& section_name,
                                      const std::string& key) const {
  if (!has_section(section_name)) return nullptr;
  for (const auto& e : section(section_name)) {
    if (e.key == key) return &e;
  }
  return nullptr;
}

const Document::Entry& Document::require(const std::string& section_name,
                                         const std::string& key) const {
  const Entry* e = find(section_name, key);
  if (e == nullptr) {
    throw std::runtime_error("missing '" + key + "' in [" + section_name + "]");
  }
  return *e;
}

std::vector<double> Document::numbers(const std::string& section_name,
                                      const std::string& key) const {
  const Entry& e = require(section_name, key);
  std::vector<double> out;
  out.reserve(e.values.size());
  for (const auto& v : e.values) out.push_back(parse_number(v, e.line));
  return out;
}

double Document::number(const std::string& section_name, const std::string& key) const {
  const auto v = numbers(section_name, key);
  if (v.size() != 1) {
    throw std::runtime_error("expected a single number for '" + key + "'");
  }
  return v[0];
}

std::string Document::word(const std::string& section_name, const std::string& key) const {
  const Entry& e = require(section_name, key);
  if (e.values.size() != 1) {
    throw std::runtime_error("expected a single value for '" + key + "'");
  }
  return e.values[0];
}

PassageMatrix parse_passage_matrix(const Document& doc) {
  const auto& labels_entry = doc.require("types", "labels");
  std::vector<std::string> types = labels_entry.values;
  if (types.empty()) throw DocumentError(labels_entry.line, "no type labels");

  ScoreSet scores = ScoreSet::binary();
  if (const auto* e = doc.find("tests", "scores")) {
    std::vector<double> vals;
    for (const auto& v : e->values) vals.push_back(parse_number(v, e->line));
    scores = ScoreSet(vals);
  }

  std::vector<std::string> tests;
  std::vector<std::vector<Measure>> dist;
  const bool binary = scores == ScoreSet::binary();
  for (const auto& e : doc.section("tests")) {
    auto key_tokens = tokenize(e.key);
    if (key_tokens[0] == "scores") continue;
    if (key_tokens[0] == "rate" && key_tokens.size() == 2) {
      if (!binary) throw DocumentError(e.line, "'rate' rows require binary scores");
      if (e.values.size() != types.size()) {
        throw DocumentError(e.line, "expected one pass rate per type");
      }
      std::vector<Measure> row;
      for (const auto& v : e.values) row.push_back(Measure::bernoulli(parse_number(v, e.line)));
      tests.push_back(key_tokens[1]);
      dist.push_back(std::move(row));
    } else if (key_tokens[0] == "dist" && key_tokens.size() == 3) {
      const std::string& test = key_tokens[1];
      const std::string& type = key_tokens[2];
      auto ti = std::find(tests.begin(), tests.end(), test);
      if (ti == tests.end()) {
        tests.push_back(test);
        dist.emplace_back();
        ti = tests.end() - 1;
      }
      auto& row = dist[static_cast<std::size_t>(ti - tests.begin())];
      const auto want = std::find(types.begin(), types.end(), type);
      if (want == types.end()) throw DocumentError(e.line, "unknown type '" + type + "'");
      if (row.size() != static_cast<std::size_t>(want - types.begin())) {
        throw DocumentError(e.line, "dist rows must appear in type order");
      }
      if (e.values.size() != scores.size()) {
        throw DocumentError(e.line, "expected one weight per score");
      }
      Vec w(static_cast<Eigen::Index>(e.values.size()));
      for (std::size_t i = 0; i < e.values.size(); ++i) {
        w[static_cast<Eigen::Index>(i)] = parse_number(e.values[i], e.line);
      }
      row.emplace_back(scores, w);
    } else {
      throw DocumentError(e.line, "expected 'rate <test>' or 'dist <test> <type>'");
    }
  }
  return PassageMatrix(std::move(types), std::move(tests), scores, std::move(dist));
}

FiniteAuthRate parse_finite_alpha(const Document& doc) {
  std::vector<std::string> types = doc.require("types", "labels").values;
  const auto n = static_cast<Eigen::Index>(types.size());
  Mat alpha(n, n);
  Eigen::Index filled = 0;
  for (const auto& e : doc.section("alpha")) {
    auto key_tokens = tokenize(e.key);
    if (key_tokens[0] != "row" || key_tokens.size() != 2) {
      throw DocumentError(e.line, "expected 'row <type> = ...'");
    }
    const auto it = std::find(types.begin(), types.end(), key_tokens[1]);
    if (it == types.end()) throw DocumentError(e.line, "unknown type '" + key_tokens[1] + "'");
    if (e.values.size() != types.size()) {
      throw DocumentError(e.line, "expected one entry per type");
    }
    const auto r = static_cast<Eigen::Index>(it - types.begin());
    for (std::size_t j = 0; j < e.values.size(); ++j) {
      alpha(r, static_cast<Eigen::Index>(j)) = parse_number(e.values[j], e.line);
    }
    ++filled;
  }
  if (filled != n) throw std::runtime_error("[alpha] must contain one row per type");
  return make_auth_rate(std::move(types), std::move(alpha));
}

namespace {

TypeDistribution parse_distribution(const Document& doc) {
  const auto interval = doc.numbers("types", "interval");
  if (interval.size() != 2 || !(interval[0] < interval[1])) {
    throw std::runtime_error("[types] interval must be 'lo hi' with lo < hi");
  }
  const auto& e = doc.require("types", "distribution");
  if (e.values.empty()) throw DocumentError(e.line, "missing distribution name");
  const std::string& name = e.values[0];
  if (name == "uniform") {
    return TypeDistribution::uniform(interval[0], interval[1]);
  }
  if (name == "truncated-exponential") {
    if (e.values.size() != 2) throw DocumentError(e.line, "expected a rate parameter");
    return TypeDistribution::truncated_exponential(parse_number(e.values[1], e.line),
                                                   interval[0], interval[1]);
  }
  if (name == "tabulated") {
    std::vector<double> density;
    for (std::size_t i = 1; i < e.values.size(); ++i) {
      density.push_back(parse_number(e.values[i], e.line));
    }
    return TypeDistribution::tabulated(interval[0], interval[1], std::move(density));
  }
  throw DocumentError(e.line, "unknown distribution '" + name + "'");
}

ContinuousAuthRate parse_alpha_preset(const Document& doc, double lo, double hi) {
  const std::string preset = doc.word("alpha", "preset");
  if (preset == "exponential") {
    return ContinuousAuthRate::exponential_constant(doc.number("alpha", "lambda"), lo, hi);
  }
  if (preset == "power") {
    return ContinuousAuthRate::power_kink(doc.number("alpha", "sigma"), lo, hi);
  }
  if (preset == "tabulated") {
    const auto& rows = doc.section("alpha");
    std::vector<std::vector<double>> values;
    for (const auto& e : rows) {
      if (e.key == "preset") continue;
      if (e.key != "row") throw DocumentError(e.line, "expected 'row = ...'");
      std::vector<double> row;
      for (const auto& v : e.values) row.push_back(parse_number(v, e.line));
      values.push_back(std::move(row));
    }
    const auto n = static_cast<Eigen::Index>(values.size());
    Mat grid(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (static_cast<Eigen::Index>(values[static_cast<std::size_t>(i)].size()) != n) {
        throw std::runtime_error("tabulated alpha rows must form a square grid");
      }
      for (Eigen::Index j = 0; j < n; ++j) {
        grid(i, j) = values[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      }
    }
    return ContinuousAuthRate::tabulated(lo, hi, std::move(grid));
  }
  throw std::runtime_error("unknown alpha preset '" + preset + "'");
}

CostFunction parse_cost(const Document& doc) {
  const std::string type = doc.word("cost", "type");
  if (type != "power") throw std::runtime_error("unknown cost type '" + type + "'");
  return CostFunction::power(doc.number("cost", "a"), doc.number("cost", "b"));
}

}  // namespace

ContinuousEnvironment parse_continuous_environment(const Document& doc) {
  TypeDistribution dist = parse_distribution(doc);
  ContinuousAuthRate alpha = parse_alpha_preset(doc, dist.lo, dist.hi);
  PrecisionKernel kernel = precision_from_alpha(alpha);
  std::optional<CostFunction> cost;
  if (doc.has_section("cost")) cost = parse_cost(doc);
  return ContinuousEnvironment{std::move(dist), std::move(alpha), std::move(kernel),
                               std::move(cost)};
}

AuctionEnvironment parse_auction_environment(const Document& doc) {
  TypeDistribution base = parse_distribution(doc);
  const auto lambdas = doc.numbers("agents", "lambdas");
  if (lambdas.empty()) throw std::runtime_error("[agents] lambdas must list one value per agent");
  AuctionEnvironment out;
  for (double lam : lambdas) {
    out.dists.push_back(base);
    out.kernels.push_back(PrecisionKernel::constant(lam, base.lo, base.hi));
    out.alphas.push_back(ContinuousAuthRate::exponential_constant(lam, base.lo, base.hi));
  }
  return out;
}

FiniteProfile parse_profile(const Document& doc) {
  PassageMatrix env = parse_passage_matrix(doc);
  const auto ntypes = env.num_types();
  const auto ntests = env.num_tests();
  const auto nmsg = static_cast<std::size_t>(doc.number("profile", "messages"));
  const auto ndec = static_cast<std::size_t>(doc.number("profile", "decisions"));

  FiniteProfile p{env, nmsg, ndec, Mat(), Mat(), {}, {}, Mat()};

  auto read_rows = [&](const char* section, std::size_t rows, std::size_t cols) {
    Mat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    std::size_t idx = 0;
    for (const auto& e : doc.section(section)) {
      auto key_tokens = tokenize(e.key);
      if (key_tokens[0] != "row") throw DocumentError(e.line, "expected 'row ... = ...'");
      if (idx >= rows) throw DocumentError(e.line, "too many rows");
      if (e.values.size() != cols) throw DocumentError(e.line, "wrong row length");
      for (std::size_t j = 0; j < cols; ++j) {
        m(static_cast<Eigen::Index>(idx), static_cast<Eigen::Index>(j)) =
            parse_number(e.values[j], e.line);
      }
      ++idx;
    }
    if (idx != rows) throw std::runtime_error(std::string("missing rows in [") + section + "]");
    return m;
  };
  p.r = read_rows("report", ntypes, nmsg);
  p.testing = read_rows("testing", nmsg, ntests);
  p.u = read_rows("utility", ndec, ntypes);

  // Performance defaults to full effort; [performance] entries override.
  p.p.assign(ntypes, std::vector<std::vector<Measure>>(nmsg, std::vector<Measure>()));
  for (std::size_t theta = 0; theta < ntypes; ++theta) {
    for (std::size_t m = 0; m < nmsg; ++m) {
      for (std::size_t tau = 0; tau < ntests; ++tau) {
        p.p[theta][m].push_back(env.dist(tau, theta));
      }
    }
  }
  if (doc.has_section("performance")) {
    for (const auto& e : doc.section("performance")) {
      auto key_tokens = tokenize(e.key);
      if (key_tokens.size() != 4 || key_tokens[0] != "p") {
        throw DocumentError(e.line, "expected 'p <type> <message-index> <test> = weights'");
      }
      const auto theta = env.type_index(key_tokens[1]);
      const auto m = static_cast<std::size_t>(parse_number(key_tokens[2], e.line));
      const auto tau = env.test_index(key_tokens[3]);
      if (m >= nmsg) throw DocumentError(e.line, "message index out of range");
      if (e.values.size() != env.scoreset().size()) {
        throw DocumentError(e.line, "expected one weight per score");
      }
      Vec w(static_cast<Eigen::Index>(e.values.size()));
      for (std::size_t j = 0; j < e.values.size(); ++j) {
        w[static_cast<Eigen::Index>(j)] = parse_number(e.values[j], e.line);
      }
      p.p[theta][m][tau] = Measure(env.scoreset(), w);
    }
  }

  // Decision rule: 'g <message-index> <test> <score-index> = distribution'.
  p.g.assign(nmsg, std::vector<std::vector<Vec>>(
                       ntests, std::vector<Vec>(env.scoreset().size(),
                                                Vec::Zero(static_cast<Eigen::Index>(ndec)))));
  std::vector<std::vector<std::vector<bool>>> seen(
      nmsg, std::vector<std::vector<bool>>(ntests,
                                           std::vector<bool>(env.scoreset().size(), false)));
  for (const auto& e : doc.section("decision")) {
    auto key_tokens = tokenize(e.key);
    if (key_tokens.size() != 4 || key_tokens[0] != "g") {
      throw DocumentError(e.line, "expected 'g <message-index> <test> <score-index> = ...'");
    }
    const auto m = static_cast<std::size_t>(parse_number(key_tokens[1], e.line));
    const auto tau = env.test_index(key_tokens[2]);
    const auto s = static_cast<std::size_t>(parse_number(key_tokens[3], e.line));
    if (m >= nmsg || s >= env.scoreset().size()) {
      throw DocumentError(e.line, "message or score index out of range");
    }
    if (e.values.size() != ndec) throw DocumentError(e.line, "expected one weight per decision");
    for (std::size_t j = 0; j < ndec; ++j) {
      p.g[m][tau][s][static_cast<Eigen::Index>(j)] = parse_number(e.values[j], e.line);
    }
    seen[m][tau][s] = true;
  }
  for (std::size_t m = 0; m < nmsg; ++m) {
    for (std::size_t tau = 0; tau < ntests; ++tau) {
      for (std::size_t s = 0; s < env.scoreset().size(); ++s) {
        if (!seen[m][tau][s]) {
          throw std::runtime_error("[decision] is missing an entry for message " +
                                   std::to_string(m));
        }
      }
    }
  }
  p.validate();
  return p;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string mechanism_to_csv(const SolvedMechanism& m) {
  std::string out = "theta,q,t,U,phi,phi_myerson\n";
  for (Eigen::Index i = 0; i < m.grid.size(); ++i) {
    out += format_double(m.grid[i]) + "," + format_double(m.q[i]) + "," +
           format_double(m.t[i]) + "," + format_double(m.U[i]) + "," +
           format_double(m.phi[i]) + "," + format_double(m.phi_myerson[i]) + "\n";
  }
  return out;
}

SolvedMechanism mechanism_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "theta,q,t,U,phi,phi_myerson") {
    throw std::runtime_error("mechanism CSV: bad header");
  }
  std::vector<std::array<double, 6>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::array<double, 6> row{};
    std::istringstream ls(line);
    std::string cell;
    for (int j = 0; j < 6; ++j) {
      if (!std::getline(ls, cell, ',')) {
        throw DocumentError(lineno, "mechanism CSV: expected 6 columns");
      }
      row[static_cast<std::size_t>(j)] = parse_number(cell, lineno);
    }
    rows.push_back(row);
  }
  SolvedMechanism m;
  const auto n = static_cast<Eigen::Index>(rows.size());
  m.grid.resize(n);
  m.q.resize(n);
  m.t.resize(n);
  m.U.resize(n);
  m.phi.resize(n);
  m.phi_myerson.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    m.grid[i] = r[0];
    m.q[i] = r[1];
    m.t[i] = r[2];
    m.U[i] = r[3];
    m.phi[i] = r[4];
    m.phi_myerson[i] = r[5];
  }
  return m;
}

}  // namespace veritest
