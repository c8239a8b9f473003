#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "heatflow/field_io.hpp"

namespace heatflow {

using Mask = Eigen::Array<bool, Eigen::Dynamic, 1>;

/// Per-vertex test statistic with two-sided p-values.
struct StatMap {
  std::string test;                      // "ttest", "hotelling" or "corr"
  Eigen::VectorXd statistic;
  Eigen::VectorXd p_values;
  std::vector<double> dof;               // (n-2), (S, n-S-1) or (n-3)
  int n_a = 0;
  int n_b = 0;
  Mask flagged;                          // zero variance, ridge-regularized or undefined r
  std::optional<double> fdr_q;
  std::optional<double> fdr_threshold;   // largest rejected p
  std::optional<double> stat_threshold;  // smallest rejected |statistic|
  Mask significant;

  Eigen::Index size() const noexcept { return statistic.size(); }
};

/// Pooled-variance two-sample T with dof n_a + n_b - 2; positive when mean(A)
/// exceeds mean(B). Vertices with zero pooled variance get T = 0, p = 1 and a
/// flag. Both stacks are N x subjects.
StatMap two_sample_t_map(const FieldStack& group_a, const FieldStack& group_b);

/// Hotelling's T^2 on per-vertex feature vectors. Each element of a group is
/// one subject's N x S stack (S scales). p from F = T^2 (n-S-1) / (S (n-2)) on
/// (S, n-S-1) dof. A singular pooled covariance is ridged by 1e-10 trace/S.
StatMap hotelling_t2_map(const std::vector<FieldStack>& group_a, const std::vector<FieldStack>& group_b);

struct FdrResult {
  std::optional<double> threshold;  // p_(k), none when nothing is rejected
  Mask mask;
};

/// Benjamini-Hochberg at rate q: the largest k with p_(k) <= k q / N, and
/// every p <= p_(k) rejected.
FdrResult bh_fdr(const Eigen::VectorXd& p_values, double q);

/// Runs bh_fdr on map.p_values and records the thresholds in the map.
void apply_fdr(StatMap& map, double q);

/// Per-vertex Pearson r across subjects (columns aligned), p from the Fisher
/// z with standard error 1/sqrt(n-3). Unpaired stacks are rejected.
StatMap correlation_map(const FieldStack& stack_a, const FieldStack& stack_b, bool paired);

/// CSV with columns vertex,stat,p,significant plus a JSON sidecar
/// {test, dof, fdr_q, fdr_threshold, stat_threshold, n_a, n_b, flagged}.
void write_stat_map(const StatMap& map, const std::filesystem::path& csv_path,
                    const std::filesystem::path& json_path);

}  // namespace heatflow
