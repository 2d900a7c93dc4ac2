#include "nonharm/report.hpp"

#include <ostream>

#include <json.hpp>

#include "nonharm/common.hpp"
#include "nonharm/version.hpp"

namespace nonharm {

namespace {
const char* status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    default: return "info";
  }
}
} // namespace

void Report::check(const std::string& name, const std::string& p1, const std::string& p2,
                   double measured, double target, double tol, bool pass) {
  rows_.push_back({suite_, name, p1, p2, measured, target, tol,
                   pass ? CheckStatus::Pass : CheckStatus::Fail});
}

void Report::info(const std::string& name, const std::string& p1, const std::string& p2,
                  double measured, double target, double tol) {
  rows_.push_back({suite_, name, p1, p2, measured, target, tol, CheckStatus::Info});
}

bool Report::pass() const {
  for (const ReportRow& r : rows_)
    if (r.status == CheckStatus::Fail) return false;
  return true;
}

void Report::write_csv(std::ostream& os) const {
  os << "# " << kVersion << "\n";
  os << "# config " << config_json_ << "\n";
  os << "suite,check,param1,param2,measured,target,tol,pass\n";
  for (const ReportRow& r : rows_) {
    os << r.suite << ',' << r.check << ',' << r.param1 << ',' << r.param2 << ','
       << fmt_double(r.measured) << ',' << fmt_double(r.target) << ',' << fmt_double(r.tol) << ','
       << status_name(r.status) << "\n";
  }
}

void Report::write_json(std::ostream& os) const {
  nlohmann::json rows = nlohmann::json::array();
  for (const ReportRow& r : rows_) {
    rows.push_back({{"suite", r.suite},
                    {"check", r.check},
                    {"param1", r.param1},
                    {"param2", r.param2},
                    {"measured", r.measured},
                    {"target", r.target},
                    {"tol", r.tol},
                    {"pass", status_name(r.status)}});
  }
  nlohmann::json doc{{"version", kVersion},
                     {"config", nlohmann::json::parse(config_json_)},
                     {"pass", pass()},
                     {"rows", rows}};
  os << doc.dump(2) << "\n";
}

} // namespace nonharm
