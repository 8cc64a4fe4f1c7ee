#include "tfr/bench/report.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "tfr/error.hpp"

namespace tfr::bench {
namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXi& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXi matrix_from_json(const json& j) {
  const auto n = static_cast<Eigen::Index>(j.size());
  Eigen::MatrixXi m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    if (j[r].size() != static_cast<std::size_t>(n)) throw Error("report: confusion matrix is not square");
    for (Eigen::Index c = 0; c < n; ++c) m(r, c) = j[r][c].get<int>();
  }
  return m;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write " + path.string());
}

}  // namespace

std::string report_to_json(const EvalReport& r) {
  json j;
  j["transform"] = r.transform;
  j["model"] = r.model;
  j["filter"] = r.filter;
  j["num_folds"] = r.num_folds;
  j["num_runs"] = r.num_runs;
  j["num_classes"] = r.num_classes;
  j["epochs"] = r.epochs;
  j["seed"] = r.seed;
  j["summary"] = {{"median_accuracy", r.summary.median}, {"mad", r.summary.mad}};
  j["confusion"] = {{"run", r.confusion_run}, {"fold", r.confusion_fold},
                    {"matrix", matrix_to_json(r.confusion)}};
  json results = json::array();
  for (const auto& f : r.results) {
    results.push_back({{"run", f.run},
                       {"fold", f.fold},
                       {"seed", f.seed},
                       {"train_size", f.train_size},
                       {"test_size", f.test_size},
                       {"best_epoch", f.best_epoch},
                       {"best_accuracy", f.best_accuracy},
                       {"test_accuracy", f.test_accuracy},
                       {"train_loss", f.train_loss},
                       {"confusion", matrix_to_json(f.confusion)}});
  }
  j["results"] = std::move(results);
  return j.dump(2) + "\n";
}

EvalReport report_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    EvalReport r;
    r.transform = j.at("transform").get<std::string>();
    r.model = j.at("model").get<std::string>();
    r.filter = j.at("filter").get<std::string>();
    r.num_folds = j.at("num_folds").get<int>();
    r.num_runs = j.at("num_runs").get<int>();
    r.num_classes = j.at("num_classes").get<int>();
    r.epochs = j.at("epochs").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.summary.median = j.at("summary").at("median_accuracy").get<double>();
    r.summary.mad = j.at("summary").at("mad").get<double>();
    r.confusion_run = j.at("confusion").at("run").get<int>();
    r.confusion_fold = j.at("confusion").at("fold").get<int>();
    r.confusion = matrix_from_json(j.at("confusion").at("matrix"));
    for (const auto& f : j.at("results")) {
      FoldResult fr;
      fr.run = f.at("run").get<int>();
      fr.fold = f.at("fold").get<int>();
      fr.seed = f.at("seed").get<std::uint64_t>();
      fr.train_size = f.at("train_size").get<std::size_t>();
      fr.test_size = f.at("test_size").get<std::size_t>();
      fr.best_epoch = f.at("best_epoch").get<int>();
      fr.best_accuracy = f.at("best_accuracy").get<double>();
      fr.test_accuracy = f.at("test_accuracy").get<std::vector<double>>();
      fr.train_loss = f.at("train_loss").get<std::vector<double>>();
      fr.confusion = matrix_from_json(f.at("confusion"));
      r.results.push_back(std::move(fr));
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(std::string("report: malformed JSON: ") + e.what());
  }
}

std::string confusion_to_csv(const Eigen::MatrixXi& m) {
  std::ostringstream os;
  os << "true\\predicted";
  for (Eigen::Index c = 0; c < m.cols(); ++c) os << "," << c;
  os << "\n";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    os << r;
    for (Eigen::Index c = 0; c < m.cols(); ++c) os << "," << m(r, c);
    os << "\n";
  }
  return os.str();
}

void write_report(const EvalReport& report, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  write_text(out_dir / "report.json", report_to_json(report));
  write_text(out_dir / "confusion.csv", confusion_to_csv(report.confusion));
}

EvalReport read_report(const std::filesystem::path& json_path) {
  std::ifstream in(json_path, std::ios::binary);
  if (!in) throw Error("cannot open " + json_path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return report_from_json(ss.str());
}

std::string significance_to_json(const std::vector<NamedGroup>& groups,
                                 const SignificanceResult& result, double alpha) {
  auto name = [&](std::size_t i) { return groups.at(i).name; };
  json j;
  j["alpha"] = alpha;
  json g = json::array();
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto mm = median_mad(groups[i].values);
    g.push_back({{"name", name(i)},
                 {"n", groups[i].values.size()},
                 {"mean", result.means.at(i)},
                 {"median", mm.median},
                 {"mad", mm.mad}});
  }
  j["groups"] = std::move(g);
  const auto& a = result.anova;
  j["anova"] = {{"f_statistic", std::isinf(a.f_statistic) ? json("inf") : json(a.f_statistic)},
                {"df_between", a.df_between},
                {"df_within", a.df_within},
                {"p_value", a.p_value},
                {"rejected", result.rejected}};
  json cmp = json::array();
  for (const auto& c : result.comparisons) {
    cmp.push_back({{"first", name(c.first)},
                   {"second", name(c.second)},
                   {"mean_difference", c.mean_difference},
                   {"q", std::isinf(c.q_statistic) ? json("inf") : json(c.q_statistic)},
                   {"p_value", c.p_value},
                   {"significant", c.significant}});
  }
  j["tukey"] = std::move(cmp);
  j["best"] = name(result.best);
  json top = json::array();
  for (auto i : result.top_performers) top.push_back(name(i));
  j["top_performers"] = std::move(top);
  return j.dump(2) + "\n";
}

}  // namespace tfr::bench
