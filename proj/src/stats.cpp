#include "heatflow/stats.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "json.hpp"

#include "heatflow/error.hpp"
#include "heatflow/special_functions.hpp"

namespace heatflow {

using Eigen::Index;
namespace {

double student_t_two_sided(double t, double dof) {
  if (!std::isfinite(t)) return 0.0;
  return regularized_incomplete_beta(0.5 * dof, 0.5, dof / (dof + t * t));
}

double f_upper_tail(double f, double d1, double d2) {
  if (!(f > 0.0)) return 1.0;
  if (!std::isfinite(f)) return 0.0;
  return regularized_incomplete_beta(0.5 * d2, 0.5 * d1, d2 / (d2 + d1 * f));
}

void check_subject_stack(const FieldStack& s, const char* name) {
  s.validate();
  if (s.num_columns() < 2) throw DomainError(std::string(name) + " needs at least 2 subjects");
}

StatMap empty_map(std::string test, Index n, int n_a, int n_b) {
  StatMap map;
  map.test = std::move(test);
  map.statistic = Eigen::VectorXd::Zero(n);
  map.p_values = Eigen::VectorXd::Ones(n);
  map.flagged = Mask::Constant(n, false);
  map.significant = Mask::Constant(n, false);
  map.n_a = n_a;
  map.n_b = n_b;
  return map;
}

}  // namespace

StatMap two_sample_t_map(const FieldStack& group_a, const FieldStack& group_b) {
  check_subject_stack(group_a, "group A");
  check_subject_stack(group_b, "group B");
  if (group_a.num_vertices() != group_b.num_vertices())
    throw DimensionError("group A has " + std::to_string(group_a.num_vertices()) + " vertices, group B has " +
                         std::to_string(group_b.num_vertices()));
  const Index n = group_a.num_vertices();
  const int na = static_cast<int>(group_a.num_columns());
  const int nb = static_cast<int>(group_b.num_columns());
  const double dof = na + nb - 2;

  StatMap map = empty_map("ttest", n, na, nb);
  map.dof = {dof};
  const Eigen::VectorXd mean_a = group_a.values.rowwise().mean();
  const Eigen::VectorXd mean_b = group_b.values.rowwise().mean();
  const Eigen::VectorXd ss_a = (group_a.values.colwise() - mean_a).rowwise().squaredNorm();
  const Eigen::VectorXd ss_b = (group_b.values.colwise() - mean_b).rowwise().squaredNorm();
  const double scale = (1.0 / na + 1.0 / nb);
  for (Index i = 0; i < n; ++i) {
    const double pooled = (ss_a[i] + ss_b[i]) / dof;
    const double level = 1e-14 * std::max(std::abs(mean_a[i]), std::abs(mean_b[i]));
    if (!(pooled > level * level)) {
      map.flagged[i] = true;
      continue;
    }
    const double t = (mean_a[i] - mean_b[i]) / std::sqrt(pooled * scale);
    map.statistic[i] = t;
    map.p_values[i] = student_t_two_sided(t, dof);
  }
  return map;
}

StatMap hotelling_t2_map(const std::vector<FieldStack>& group_a, const std::vector<FieldStack>& group_b) {
  const int na = static_cast<int>(group_a.size());
  const int nb = static_cast<int>(group_b.size());
  if (na < 2 || nb < 2) throw DomainError("Hotelling T^2 needs at least 2 subjects per group");
  const Index n_vertices = group_a.front().num_vertices();
  const Index s = group_a.front().num_columns();
  auto check = [&](const FieldStack& st, const char* group, int idx) {
    st.validate();
    if (st.num_vertices() != n_vertices || st.num_columns() != s)
      throw DimensionError(std::string(group) + " subject " + std::to_string(idx) + " is " +
                           std::to_string(st.num_vertices()) + " x " + std::to_string(st.num_columns()) +
                           ", expected " + std::to_string(n_vertices) + " x " + std::to_string(s));
  };
  for (int k = 0; k < na; ++k) check(group_a[k], "group A", k);
  for (int k = 0; k < nb; ++k) check(group_b[k], "group B", k);
  const int total = na + nb;
  if (!(total - 2 > s))
    throw DomainError("Hotelling T^2 needs n_a + n_b - 2 > S (got " + std::to_string(total - 2) + " and S = " +
                      std::to_string(s) + ")");

  const double d1 = static_cast<double>(s);
  const double d2 = static_cast<double>(total - s - 1);
  StatMap map = empty_map("hotelling", n_vertices, na, nb);
  map.dof = {d1, d2};

  Eigen::MatrixXd xa(na, s), xb(nb, s);
  for (Index i = 0; i < n_vertices; ++i) {
    for (int k = 0; k < na; ++k) xa.row(k) = group_a[k].values.row(i);
    for (int k = 0; k < nb; ++k) xb.row(k) = group_b[k].values.row(i);
    const Eigen::RowVectorXd ma = xa.colwise().mean();
    const Eigen::RowVectorXd mb = xb.colwise().mean();
    const Eigen::MatrixXd ca = xa.rowwise() - ma;
    const Eigen::MatrixXd cb = xb.rowwise() - mb;
    Eigen::MatrixXd pooled = (ca.transpose() * ca + cb.transpose() * cb) / static_cast<double>(total - 2);
    const Eigen::VectorXd d = (ma - mb).transpose();

    const double trace = pooled.trace();
    if (!(trace > 0.0)) {
      map.flagged[i] = true;
      continue;
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(pooled);
    const Eigen::VectorXd diag = ldlt.vectorD();
    const bool singular = ldlt.info() != Eigen::Success || !(diag.minCoeff() > 1e-12 * diag.cwiseAbs().maxCoeff());
    if (singular) {
      pooled.diagonal().array() += 1e-10 * trace / d1;
      ldlt.compute(pooled);
      map.flagged[i] = true;
    }
    const double t2 = static_cast<double>(na) * nb / total * d.dot(ldlt.solve(d));
    map.statistic[i] = t2;
    map.p_values[i] = f_upper_tail(t2 * d2 / (d1 * (total - 2)), d1, d2);
  }
  return map;
}

FdrResult bh_fdr(const Eigen::VectorXd& p_values, double q) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("FDR rate must lie in (0, 1)");
  const Index n = p_values.size();
  for (Index i = 0; i < n; ++i)
    if (!(p_values[i] >= 0.0 && p_values[i] <= 1.0))
      throw DomainError("p-value at index " + std::to_string(i) + " is outside [0, 1]");

  std::vector<double> sorted(p_values.data(), p_values.data() + n);
  std::sort(sorted.begin(), sorted.end());
  FdrResult result;
  for (Index k = n; k >= 1; --k) {
    if (sorted[k - 1] <= static_cast<double>(k) * q / static_cast<double>(n)) {
      result.threshold = sorted[k - 1];
      break;
    }
  }
  result.mask = result.threshold ? Mask(p_values.array() <= *result.threshold) : Mask::Constant(n, false);
  return result;
}

void apply_fdr(StatMap& map, double q) {
  FdrResult fdr = bh_fdr(map.p_values, q);
  map.fdr_q = q;
  map.fdr_threshold = fdr.threshold;
  map.significant = std::move(fdr.mask);
  map.stat_threshold.reset();
  for (Index i = 0; i < map.size(); ++i) {
    if (!map.significant[i]) continue;
    const double s = std::abs(map.statistic[i]);
    if (!map.stat_threshold || s < *map.stat_threshold) map.stat_threshold = s;
  }
}

StatMap correlation_map(const FieldStack& stack_a, const FieldStack& stack_b, bool paired) {
  if (!paired) throw DomainError("correlation maps need paired subjects (columns aligned across stacks)");
  stack_a.validate();
  stack_b.validate();
  if (stack_a.num_vertices() != stack_b.num_vertices() || stack_a.num_columns() != stack_b.num_columns())
    throw DimensionError("correlation stacks differ in shape: " + std::to_string(stack_a.num_vertices()) + " x " +
                         std::to_string(stack_a.num_columns()) + " vs " + std::to_string(stack_b.num_vertices()) +
                         " x " + std::to_string(stack_b.num_columns()));
  const int n = static_cast<int>(stack_a.num_columns());
  if (n < 3) throw DomainError("correlation maps need at least 3 subjects");

  StatMap map = empty_map("corr", stack_a.num_vertices(), n, n);
  map.dof = {static_cast<double>(n - 3)};
  const Eigen::MatrixXd ca = stack_a.values.colwise() - stack_a.values.rowwise().mean();
  const Eigen::MatrixXd cb = stack_b.values.colwise() - stack_b.values.rowwise().mean();
  for (Index i = 0; i < map.size(); ++i) {
    const double saa = ca.row(i).squaredNorm();
    const double sbb = cb.row(i).squaredNorm();
    if (!(saa > 0.0 && sbb > 0.0)) {
      map.flagged[i] = true;
      continue;
    }
    const double r = std::clamp(ca.row(i).dot(cb.row(i)) / std::sqrt(saa * sbb), -1.0, 1.0);
    map.statistic[i] = r;
    if (n == 3) continue;  // Fisher z has infinite standard error; p stays 1
    const double z = std::atanh(r) * std::sqrt(n - 3.0);
    map.p_values[i] = std::isfinite(z) ? std::erfc(std::abs(z) / std::sqrt(2.0)) : 0.0;
  }
  return map;
}

void write_stat_map(const StatMap& map, const std::filesystem::path& csv_path,
                    const std::filesystem::path& json_path) {
  std::ofstream csv(csv_path);
  if (!csv) throw IoError("cannot write '" + csv_path.string() + "'");
  csv << "vertex,stat,p,significant\n";
  for (Index i = 0; i < map.size(); ++i) {
    const bool sig = map.significant.size() == map.size() && map.significant[i];
    csv << i << ',' << format_double(map.statistic[i]) << ',' << format_double(map.p_values[i]) << ','
        << (sig ? 1 : 0) << '\n';
  }
  if (!csv) throw IoError("failed writing '" + csv_path.string() + "'");

  nlohmann::ordered_json j;
  j["test"] = map.test;
  j["dof"] = map.dof;
  j["fdr_q"] = map.fdr_q ? nlohmann::ordered_json(*map.fdr_q) : nlohmann::ordered_json(nullptr);
  j["fdr_threshold"] = map.fdr_threshold ? nlohmann::ordered_json(*map.fdr_threshold) : nlohmann::ordered_json(nullptr);
  j["stat_threshold"] =
      map.stat_threshold ? nlohmann::ordered_json(*map.stat_threshold) : nlohmann::ordered_json(nullptr);
  j["n_a"] = map.n_a;
  j["n_b"] = map.n_b;
  j["flagged"] = map.flagged.count();
  j["significant"] = map.significant.count();
  std::ofstream js(json_path);
  if (!js) throw IoError("cannot write '" + json_path.string() + "'");
  js << j.dump(2) << '\n';
  if (!js) throw IoError("failed writing '" + json_path.string() + "'");
}

}  // namespace heatflow
