#pragma once

// Named verification checks with exact-witness reports, and the suite runner
// behind the command-line tool. Reports serialize to one JSON object per
// line; scalars are exact strings in the TowerScalar grammar, matrices are
// row-major arrays of rows, dimensions are integers.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace weilks {

using Json = nlohmann::ordered_json;

enum class Status { pass, fail, error, inconclusive };

std::string to_string(Status s);
// 0 pass, 1 fail, 2 error, 3 inconclusive.
int exit_code(Status s);
// error > fail > inconclusive > pass.
Status combine(Status a, Status b);

struct CheckRequest {
  std::string check_id;
  std::vector<std::pair<std::string, std::string>> params;  // in declared order
  std::optional<std::string> find(const std::string& key) const;
};

struct Assertion {
  std::string name;
  bool passed = false;
  Json witness;
};

struct VerificationReport {
  std::string check_id;
  std::vector<std::pair<std::string, std::string>> params;
  Status status = Status::error;
  Json conventions = Json::object();
  Json witnesses = Json::object();  // numeric only: exact strings, matrices, dimensions
  Json elements = Json::object();   // Clifford elements and labels
  std::vector<Assertion> assertions;
  std::optional<Json> counterexample;  // first failing assertion
  std::string message;                 // error or inconclusive reason
  std::int64_t elapsed_ms = 0;

  Json to_json(bool timing = false) const;
};

const std::vector<std::string>& known_checks();

// Never throws for bad input: unknown ids and malformed parameters give an
// error report.
VerificationReport run_check(const CheckRequest& req);

struct SuiteConfig {
  std::vector<CheckRequest> checks;
};

// Sections "[[id]]" (or "[id]") followed by "key = value" lines; values may
// be quoted; '#' starts a comment. Throws DomainError with the line number.
SuiteConfig parse_config(std::istream& in);
SuiteConfig load_config(const std::string& path);

struct SuiteResult {
  std::vector<VerificationReport> reports;
  std::vector<std::string> warnings;
  Status status = Status::pass;
  std::string message;  // set when the config itself could not be used

  // The check reports followed by one summary object.
  std::vector<Json> lines(bool timing = false) const;
};

// Runs every configured check in order; a failing or erroring check does not
// stop the run.
SuiteResult run_suite(const SuiteConfig& config);
SuiteResult run_suite(const std::string& config_path);

}  // namespace weilks
