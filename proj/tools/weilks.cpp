// weilks: run verification checks and print newline-delimited JSON reports.
//
//   weilks --check fourfold --param l=-1 --param m=-3
//   weilks --config config/default.toml --out report.ndjson

#include <fstream>
#include <iostream>
#include <vector>

#include <CLI11.hpp>

#include "weilks/report.hpp"

namespace {

void emit(const std::vector<weilks::Json>& lines, std::ostream& os) {
  for (const auto& j : lines) os << j.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact verification checks for Kuga-Satake and Weil-type Hodge structures"};
  std::string check;
  std::vector<std::string> params;
  std::string config;
  std::string out;
  bool quiet = false;
  bool timing = false;
  std::string ids;
  for (const auto& id : weilks::known_checks()) ids += (ids.empty() ? "" : ", ") + id;
  app.add_option("--check", check, "check id: " + ids);
  app.add_option("--param", params, "parameter key=value (repeatable)")->take_all();
  app.add_option("--config", config, "suite config file (runs the suite)");
  app.add_option("--out", out, "write the reports to this file instead of standard output");
  app.add_flag("--quiet", quiet, "print nothing; only the exit code reports the result");
  app.add_flag("--timing", timing, "add elapsed_ms to each report");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  weilks::CheckRequest req;
  req.check_id = check;
  for (const auto& p : params) {
    auto eq = p.find('=');
    if (eq == std::string::npos) {
      if (!quiet) std::cerr << "weilks: malformed --param '" << p << "', expected key=value\n";
      return 2;
    }
    req.params.emplace_back(p.substr(0, eq), p.substr(eq + 1));
  }
  if (!config.empty()) {
    if (!check.empty() && check != "suite") {
      if (!quiet) std::cerr << "weilks: --config runs the suite and cannot be combined with --check " << check << "\n";
      return 2;
    }
    req.check_id = "suite";
    req.params.emplace_back("config", config);
  }
  if (req.check_id.empty()) {
    if (!quiet) std::cerr << "weilks: one of --check or --config is required\n" << app.help();
    return 2;
  }

  std::vector<weilks::Json> lines;
  weilks::Status status;
  if (req.check_id == "suite") {
    auto path = req.find("config");
    if (!path || req.params.size() != 1) {
      if (!quiet) std::cerr << "weilks: suite takes exactly one parameter, config=<path>\n";
      return 2;
    }
    weilks::SuiteResult res = weilks::run_suite(*path);
    if (!quiet)
      for (const auto& w : res.warnings) std::cerr << "weilks: warning: " << w << "\n";
    if (!quiet && !res.message.empty()) std::cerr << "weilks: " << res.message << "\n";
    lines = res.lines(timing);
    status = res.status;
  } else {
    weilks::VerificationReport r = weilks::run_check(req);
    lines.push_back(r.to_json(timing));
    status = r.status;
  }

  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) {
      if (!quiet) std::cerr << "weilks: cannot write '" << out << "'\n";
      return 2;
    }
    emit(lines, f);
  } else if (!quiet) {
    emit(lines, std::cout);
  }
  return weilks::exit_code(status);
}
