#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nonharm {

enum class CheckStatus { Pass, Fail, Info };

struct ReportRow {
  std::string suite;
  std::string check;
  std::string param1;
  std::string param2;
  double measured = 0.0;
  double target = 0.0;
  double tol = 0.0;
  CheckStatus status = CheckStatus::Info;
};

/// Campaign result: fixed-column CSV or JSON, with the version string and the
/// full configuration embedded so runs are reproducible from the artifact.
class Report {
 public:
  Report(std::string suite, std::string config_json)
      : suite_(std::move(suite)), config_json_(std::move(config_json)) {}

  /// Hard check: contributes to the exit code.
  void check(const std::string& name, const std::string& p1, const std::string& p2,
             double measured, double target, double tol, bool pass);
  /// Soft metric: logged, never affects the exit code.
  void info(const std::string& name, const std::string& p1, const std::string& p2,
            double measured, double target = 0.0, double tol = 0.0);

  bool pass() const;
  const std::vector<ReportRow>& rows() const { return rows_; }
  const std::string& suite() const { return suite_; }

  void write_csv(std::ostream& os) const;
  void write_json(std::ostream& os) const;

 private:
  std::string suite_;
  std::string config_json_;
  std::vector<ReportRow> rows_;
};

} // namespace nonharm
