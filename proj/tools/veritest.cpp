// veritest: command-line front end. Parses declarative environment documents,
// dispatches to the library, and emits CSV/JSON artifacts.
//
// Exit codes: 0 = success / property holds, 1 = property fails, 2 = input or
// usage error.
#include "veritest/authentication.hpp"
#include "veritest/continuous_model.hpp"
#include "veritest/discernment.hpp"
#include "veritest/document.hpp"
#include "veritest/ic_harness.hpp"
#include "veritest/mechanisms.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using json = nlohmann::ordered_json;
using namespace veritest;

int log_level() {
  const char* v = std::getenv("VERITEST_LOG");
  return v == nullptr ? 0 : std::atoi(v);
}

void log_info(const std::string& msg) {
  if (log_level() > 0) std::cerr << "veritest: " << msg << "\n";
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  log_info("wrote " + path);
}

int doc_grid(const Document& doc, int fallback) {
  if (doc.has_section("grid")) {
    if (const auto* e = doc.find("grid", "points")) {
      return static_cast<int>(doc.number("grid", "points"));
    }
  }
  return fallback;
}

std::vector<double> parse_lambda_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stod(tok));
  }
  if (out.empty()) throw std::runtime_error("--lambdas: empty list");
  return out;
}

json witness_json(const DiscernmentWitness& w) {
  json j;
  j["holds"] = w.holds;
  if (w.lambda_interval) {
    j["lambda_interval"] = {w.lambda_interval->lo, w.lambda_interval->hi};
  }
  if (w.conversion) {
    json rows = json::array();
    const Mat& m = w.conversion->matrix();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index jcol = 0; jcol < m.cols(); ++jcol) row.push_back(m(i, jcol));
      rows.push_back(row);
    }
    j["conversion"] = rows;
  }
  j["degenerate"] = w.degenerate;
  return j;
}

// Relation of tau vs psi at theta: ">", "<", "~" (equivalent), ">=", "<=",
// or "incomparable".
std::string relation(const PassageMatrix& env, std::size_t theta, std::size_t tau,
                     std::size_t psi) {
  const bool fwd = check_discerning(env, theta, tau, psi).holds;
  const bool bwd = check_discerning(env, theta, psi, tau).holds;
  const bool equiv = check_equivalent(env, theta, tau, psi);
  if (equiv) return "~";
  if (fwd && bwd) return "~";
  if (fwd) return ">";
  if (bwd) return "<";
  return "incomparable";
}

int cmd_check_discernment(const std::string& doc_path, const std::string& type_label,
                          const std::string& tau_label, const std::string& psi_label) {
  const Document doc = Document::parse_file(doc_path);
  const PassageMatrix env = parse_passage_matrix(doc);
  if (!tau_label.empty() && !psi_label.empty() && !type_label.empty()) {
    const auto theta = env.type_index(type_label);
    const auto tau = env.test_index(tau_label);
    const auto psi = env.test_index(psi_label);
    const DiscernmentWitness w = check_discerning(env, theta, tau, psi);
    std::cout << witness_json(w).dump(2) << "\n";
    return w.holds ? 0 : 1;
  }
  if (!tau_label.empty() || !psi_label.empty()) {
    throw std::runtime_error("--tau and --psi must be given together with --type");
  }
  // Full relation table.
  std::ostringstream out;
  for (std::size_t theta = 0; theta < env.num_types(); ++theta) {
    for (std::size_t a = 0; a < env.num_tests(); ++a) {
      for (std::size_t b = a + 1; b < env.num_tests(); ++b) {
        out << env.types()[theta] << ": " << env.tests()[a] << " "
            << relation(env, theta, a, b) << " " << env.tests()[b] << "\n";
      }
    }
    const auto best = most_discerning_tests(env, theta);
    out << env.types()[theta] << ": most-discerning =";
    if (best.empty()) out << " (none)";
    for (auto t : best) out << " " << env.tests()[t];
    out << "\n";
  }
  std::cout << out.str();
  return 0;
}

int cmd_virtual_value(const std::string& doc_path, const std::string& lambdas_arg,
                      int grid_n, const std::string& output) {
  const Document doc = Document::parse_file(doc_path);
  const Document::Entry* interval = doc.find("types", "interval");
  (void)interval;
  const ContinuousEnvironment env = parse_continuous_environment(doc);
  const auto lambdas = parse_lambda_list(lambdas_arg);

  std::string csv = "theta,phi_myerson";
  for (double lam : lambdas) {
    std::ostringstream name;
    name << "phi_lambda_" << lam;
    csv += "," + name.str();
  }
  csv += "\n";
  const double lo = env.dist.lo, hi = env.dist.hi;
  std::vector<PrecisionKernel> kernels;
  kernels.reserve(lambdas.size());
  for (double lam : lambdas) kernels.push_back(PrecisionKernel::constant(lam, lo, hi));
  for (int i = 0; i < grid_n; ++i) {
    const double theta = lo + (hi - lo) * i / (grid_n - 1);
    csv += format_double(theta) + "," + format_double(myerson_virtual_value(env.dist, theta));
    for (const auto& k : kernels) {
      csv += "," + format_double(virtual_value(env.dist, k, theta));
    }
    csv += "\n";
  }
  write_output(output, csv);
  return 0;
}

json mechanism_summary(const SolvedMechanism& m) {
  json j;
  j["revenue"] = m.revenue;
  j["theta_star"] = m.theta_star;
  j["phi_monotone"] = m.phi_monotone;
  j["upper_bound_margin"] = m.upper_bound_margin;
  j["warning"] = m.warning;
  return j;
}

int cmd_solve(const std::string& kind, const std::string& doc_path, int grid_n,
              const std::string& output) {
  const Document doc = Document::parse_file(doc_path);
  if (kind == "auction") {
    const AuctionEnvironment env = parse_auction_environment(doc);
    const int n = doc_grid(doc, grid_n);
    const AuctionSolution sol = solve_auction(env.dists, env.kernels, n);
    std::string csv = "agent,theta,phi,Q,price\n";
    for (std::size_t i = 0; i < sol.grids.size(); ++i) {
      for (Eigen::Index k = 0; k < sol.grids[i].size(); ++k) {
        csv += std::to_string(i) + "," + format_double(sol.grids[i][k]) + "," +
               format_double(sol.phi[i][k]) + "," + format_double(sol.Q[i][k]) + "," +
               format_double(sol.price[i][k]) + "\n";
      }
    }
    if (!output.empty()) write_output(output, csv);
    json j;
    j["revenue"] = sol.revenue;
    j["reserve"] = sol.reserve;
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  const ContinuousEnvironment env = parse_continuous_environment(doc);
  const int n = doc_grid(doc, grid_n);
  SolvedMechanism m;
  if (kind == "pricing") {
    if (!env.cost) throw std::runtime_error("pricing requires a [cost] section");
    m = solve_nonlinear_pricing(env.dist, env.kernel, *env.cost, n);
  } else if (kind == "sale") {
    m = solve_single_good(env.dist, env.kernel, n);
  } else {
    throw std::runtime_error("unknown solve kind '" + kind + "'");
  }
  if (!output.empty()) write_output(output, mechanism_to_csv(m));
  std::cout << mechanism_summary(m).dump(2) << "\n";
  return m.warning ? 1 : 0;
}

json ic_json(const ICReport& r, double tol) {
  json j;
  j["max_ic_violation"] = r.max_ic_violation;
  j["max_ir_violation"] = r.max_ir_violation;
  j["max_shirk_violation"] = r.max_shirk_violation;
  j["worst_pair"] = {r.worst_pair.first, r.worst_pair.second};
  json binding = json::array();
  for (const auto& [a, b] : r.binding) binding.push_back({a, b});
  j["binding"] = binding;
  j["passes"] = r.passes(tol);
  return j;
}

int cmd_verify(const std::string& doc_path, const std::string& csv_path, double tol) {
  const Document doc = Document::parse_file(doc_path);
  const ContinuousEnvironment env = parse_continuous_environment(doc);
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open mechanism CSV: " + csv_path);
  std::ostringstream ss;
  ss << in.rdbuf();
  const SolvedMechanism m = mechanism_from_csv(ss.str());
  const ICReport r = check_ic(m, env.alpha.alpha);
  std::cout << ic_json(r, tol).dump(2) << "\n";
  return r.passes(tol) ? 0 : 1;
}

int cmd_validate_alpha(const std::string& doc_path) {
  const Document doc = Document::parse_file(doc_path);
  const FiniteAuthRate a = parse_finite_alpha(doc);
  const AlphaValidation v = is_most_discerning_alpha(a);
  json j;
  j["most_discerning"] = v.most_discerning;
  j["used_fast_path"] = v.used_fast_path;
  if (v.violation) {
    j["violation"] = {{"theta1", a.types[v.violation->theta1]},
                      {"theta2", a.types[v.violation->theta2]},
                      {"theta3", a.types[v.violation->theta3]},
                      {"slack", v.violation->slack}};
  }
  std::cout << j.dump(2) << "\n";
  return v.most_discerning ? 0 : 1;
}

std::string profile_to_document(const FiniteProfile& p) {
  std::ostringstream out;
  const PassageMatrix& env = p.env;
  out << "[types]\nlabels =";
  for (const auto& t : env.types()) out << " " << t;
  out << "\n\n[tests]\n";
  if (env.scoreset() != ScoreSet::binary()) {
    out << "scores =";
    for (double s : env.scoreset().scores()) out << " " << format_double(s);
    out << "\n";
  }
  for (std::size_t tau = 0; tau < env.num_tests(); ++tau) {
    for (std::size_t theta = 0; theta < env.num_types(); ++theta) {
      out << "dist " << env.tests()[tau] << " " << env.types()[theta] << " =";
      const Vec& w = env.dist(tau, theta).weights();
      for (Eigen::Index i = 0; i < w.size(); ++i) out << " " << format_double(w[i]);
      out << "\n";
    }
  }
  out << "\n[profile]\nmessages = " << p.num_messages
      << "\ndecisions = " << p.num_decisions << "\n";
  auto emit_rows = [&out](const char* name, const Mat& m) {
    out << "\n[" << name << "]\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      out << "row =";
      for (Eigen::Index j = 0; j < m.cols(); ++j) out << " " << format_double(m(i, j));
      out << "\n";
    }
  };
  emit_rows("report", p.r);
  emit_rows("testing", p.testing);
  out << "\n[performance]\n";
  for (std::size_t theta = 0; theta < env.num_types(); ++theta) {
    for (std::size_t m = 0; m < p.num_messages; ++m) {
      for (std::size_t tau = 0; tau < env.num_tests(); ++tau) {
        out << "p " << env.types()[theta] << " " << m << " " << env.tests()[tau] << " =";
        const Vec& w = p.p[theta][m][tau].weights();
        for (Eigen::Index i = 0; i < w.size(); ++i) out << " " << format_double(w[i]);
        out << "\n";
      }
    }
  }
  out << "\n[decision]\n";
  for (std::size_t m = 0; m < p.num_messages; ++m) {
    for (std::size_t tau = 0; tau < env.num_tests(); ++tau) {
      for (std::size_t s = 0; s < env.scoreset().size(); ++s) {
        out << "g " << m << " " << env.tests()[tau] << " " << s << " =";
        const Vec& w = p.g[m][tau][s];
        for (Eigen::Index i = 0; i < w.size(); ++i) out << " " << format_double(w[i]);
        out << "\n";
      }
    }
  }
  emit_rows("utility", p.u);
  return out.str();
}

int cmd_canonicalize(const std::string& doc_path, const std::string& output, double tol) {
  const Document doc = Document::parse_file(doc_path);
  const FiniteProfile profile = parse_profile(doc);
  const Canonicalization c = canonicalize(profile, tol);
  write_output(output, profile_to_document(c.canonical));
  json j;
  j["scf_max_diff"] = c.report.scf_max_diff;
  j["original_ic"] = c.report.original_ic;
  j["canonical_ic"] = c.report.canonical_ic;
  j["original_slack"] = c.report.original_slack;
  j["canonical_slack"] = c.report.canonical_slack;
  std::cerr << j.dump(2) << "\n";
  return c.report.canonical_ic ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mechanism-design toolkit with probabilistic verification"};
  app.require_subcommand(1);

  std::string doc_path, output, type_label, tau_label, psi_label;
  std::string lambdas_arg = "0,1,2,3";
  std::string csv_path, solve_kind;
  int grid_n = 101;
  double tol = 1e-6;
  long seed = 0;
  int threads = 1;
  app.add_option("--seed", seed, "random seed (reserved; outputs are deterministic)");
  app.add_option("--threads", threads, "worker threads for module-level parallelism");

  auto* chk = app.add_subcommand("check-discernment",
                                 "relation table, or a single tau vs psi query");
  chk->add_option("doc", doc_path, "environment document")->required();
  chk->add_option("--type", type_label, "type label");
  chk->add_option("--tau", tau_label, "candidate dominating test");
  chk->add_option("--psi", psi_label, "candidate dominated test");

  auto* vv = app.add_subcommand("virtual-value", "virtual-value curves as CSV");
  vv->add_option("doc", doc_path, "environment document")->required();
  vv->add_option("--lambdas", lambdas_arg, "comma-separated precision levels");
  vv->add_option("--grid", grid_n, "grid points");
  vv->add_option("--output", output, "CSV path (default: stdout)");

  auto* sv = app.add_subcommand("solve", "solve pricing | sale | auction");
  sv->add_option("kind", solve_kind, "pricing, sale, or auction")->required();
  sv->add_option("doc", doc_path, "environment document")->required();
  sv->add_option("--grid", grid_n, "grid points");
  sv->add_option("--output", output, "CSV path");

  auto* vf = app.add_subcommand("verify", "incentive check of a mechanism CSV");
  vf->add_option("doc", doc_path, "environment document")->required();
  vf->add_option("csv", csv_path, "mechanism CSV")->required();
  vf->add_option("--tol", tol, "violation tolerance");

  auto* va = app.add_subcommand("validate-alpha", "most-discerning certificate");
  va->add_option("doc", doc_path, "authentication-rate document")->required();

  auto* cz = app.add_subcommand("canonicalize", "direct truthful normal form");
  cz->add_option("doc", doc_path, "profile document")->required();
  cz->add_option("--output", output, "canonical profile path (default: stdout)");
  cz->add_option("--tol", tol, "incentive tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (chk->parsed()) return cmd_check_discernment(doc_path, type_label, tau_label, psi_label);
    if (vv->parsed()) return cmd_virtual_value(doc_path, lambdas_arg, grid_n, output);
    if (sv->parsed()) return cmd_solve(solve_kind, doc_path, grid_n, output);
    if (vf->parsed()) return cmd_verify(doc_path, csv_path, tol);
    if (va->parsed()) return cmd_validate_alpha(doc_path);
    if (cz->parsed()) return cmd_canonicalize(doc_path, output, tol);
  } catch (const std::exception& e) {
    std::cerr << "veritest: error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
