#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <string>
#include <vector>

#include "tfr/bench/cross_validation.hpp"
#include "tfr/bench/stats.hpp"

namespace tfr::bench {

std::string report_to_json(const EvalReport& report);
EvalReport report_from_json(const std::string& text);

std::string confusion_to_csv(const Eigen::MatrixXi& confusion);

void write_report(const EvalReport& report, const std::filesystem::path& out_dir);
EvalReport read_report(const std::filesystem::path& json_path);

struct NamedGroup {
  std::string name;
  std::vector<double> values;
};

std::string significance_to_json(const std::vector<NamedGroup>& groups,
                                 const SignificanceResult& result, double alpha);

}  // namespace tfr::bench
