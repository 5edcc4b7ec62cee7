// Declarative environment documents: a line-oriented key-value format with
// [section] headers, used by the CLI for reviewable fixtures.
//
//   # comment
//   [types]
//   labels = theta1 theta2 theta3
//   [tests]
//   rate tau1 = 1 1 0
//
// Keys may contain several tokens; values are whitespace-separated tokens.
#pragma once

#include "veritest/authentication.hpp"
#include "veritest/continuous_model.hpp"
#include "veritest/discernment.hpp"
#include "veritest/ic_harness.hpp"
#include "veritest/mechanisms.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace veritest {

struct DocumentError : std::runtime_error {
  int line;
  DocumentError(int line_, const std::string& what)
      : std::runtime_error("line " + std::to_string(line_) + ": " + what), line(line_) {}
};

class Document {
 public:
  struct Entry {
    std::string key;                  // normalized: single spaces between tokens
    std::vector<std::string> values;  // raw value tokens
    int line;
  };

  static Document parse(const std::string& text);
  static Document parse_file(const std::string& path);

  bool has_section(const std::string& name) const;
  const std::vector<Entry>& section(const std::string& name) const;

  const Entry* find(const std::string& section, const std::string& key) const;
  const Entry& require(const std::string& section, const std::string& key) const;

  std::vector<double> numbers(const std::string& section, const std::string& key) const;
  double number(const std::string& section, const std::string& key) const;
  std::string word(const std::string& section, const std::string& key) const;

 private:
  std::vector<std::pair<std::string, std::vector<Entry>>> sections_;
};

// Environment document readers. Each throws DocumentError with the offending
// line on malformed input.
PassageMatrix parse_passage_matrix(const Document& doc);
FiniteAuthRate parse_finite_alpha(const Document& doc);

struct ContinuousEnvironment {
  TypeDistribution dist;
  ContinuousAuthRate alpha;
  PrecisionKernel kernel;
  std::optional<CostFunction> cost;
};

ContinuousEnvironment parse_continuous_environment(const Document& doc);

struct AuctionEnvironment {
  std::vector<TypeDistribution> dists;
  std::vector<PrecisionKernel> kernels;
  std::vector<ContinuousAuthRate> alphas;
};

AuctionEnvironment parse_auction_environment(const Document& doc);

FiniteProfile parse_profile(const Document& doc);

// Mechanism CSV round trip (columns: theta,q,t,U,phi,phi_myerson; 17
// significant digits, '.' decimal separator, '\n' line endings).
std::string mechanism_to_csv(const SolvedMechanism& m);
SolvedMechanism mechanism_from_csv(const std::string& text);

std::string format_double(double v);  // %.17g

}  // namespace veritest
