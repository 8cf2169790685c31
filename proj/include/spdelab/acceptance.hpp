// Acceptance suite: criteria 1-12, each a list of checks with a measured
// value, a tolerance and a verdict, plus a runtime check.
#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace spdelab {

struct RunConfig;

enum class RowStatus {
  Pass,
  Fail,
  Info,       // reported, not judged
  KnownFail,  // fails for a documented reason (target not attainable as written)
};

struct CheckRow {
  std::string id;      // "<criterion>.<check>"
  std::string target;  // what is compared, in words
  double measured = 0.0;
  double tolerance = 0.0;
  RowStatus status = RowStatus::Info;
  std::string note;
};

struct CriterionReport {
  int id = 0;
  std::string title;
  double seconds = 0.0;
  double budget_seconds = 0.0;
  std::vector<CheckRow> rows;
  std::string error;  // set when the criterion threw

  bool passed() const;
  // No plain failures; at least one KnownFail.
  bool only_known_failures() const;
};

const std::map<std::string, double>& default_tolerances();

// Criterion ids from names: numbers "1".."12" or module names (specfun,
// kernels, covariance, spectral, sampler, moduli, determinism). Empty → all.
std::vector<int> select_criteria(const std::vector<std::string>& only);

std::string criterion_title(int id);
CriterionReport run_criterion(int id, const RunConfig& cfg);

// Runs the selection in id order, printing every row as it is produced.
std::vector<CriterionReport> run_acceptance(const RunConfig& cfg, std::ostream& out);

std::string status_name(RowStatus s);
std::string format_row(const CheckRow& r);
// Columns: id, target, measured, tolerance, pass, status, note.
std::string acceptance_csv(const std::vector<CriterionReport>& reps);

}  // namespace spdelab
