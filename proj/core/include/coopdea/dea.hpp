#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

#include "coopdea/lp.hpp"

namespace coopdea::dea {

// Dimension counts of a two-stage panel: s initial inputs, q intermediate
// products, t final outputs.
struct Dimensions {
  std::size_t inputs = 0;
  std::size_t intermediates = 0;
  std::size_t outputs = 0;

  friend bool operator==(const Dimensions&, const Dimensions&) = default;
};

enum class Stage { kFirst = 1, kSecond = 2 };

inline int stage_number(Stage stage) { return static_cast<int>(stage); }

// Raw measurements of n two-stage DMUs. Row j of each matrix belongs to
// dmu_ids[j].
class DmuPanel {
 public:
  DmuPanel(std::vector<std::string> ids, Dimensions dims, Eigen::MatrixXd inputs,
           Eigen::MatrixXd intermediates, Eigen::MatrixXd outputs);

  std::size_t size() const { return ids_.size(); }
  const Dimensions& dims() const { return dims_; }
  const std::vector<std::string>& ids() const { return ids_; }
  const Eigen::MatrixXd& inputs() const { return inputs_; }
  const Eigen::MatrixXd& intermediates() const { return intermediates_; }
  const Eigen::MatrixXd& outputs() const { return outputs_; }

  // Throws InputError unless n >= 2 and every entry is strictly positive.
  void validate_for_allocation() const;

 private:
  std::vector<std::string> ids_;
  Dimensions dims_;
  Eigen::MatrixXd inputs_;
  Eigen::MatrixXd intermediates_;
  Eigen::MatrixXd outputs_;
};

// Divides every column by its sum. Throws InputError on a non-positive column sum.
DmuPanel normalize_panel(const DmuPanel& panel);

struct SubDmuOrigin {
  std::size_t dmu;  // zero-based row of the panel
  Stage stage;
};

// 2n single-stage units in the common (s+q)-input / (q+t)-output space.
// Units 0..n-1 are the stage-1 halves of DMUs 1..n, units n..2n-1 the stage-2
// halves, in panel order.
//
//   stage 1 of DMU j:  inputs (x_j, 0_q)   outputs (z_j, 0_t)
//   stage 2 of DMU j:  inputs (0_s, z_j)   outputs (0_q, y_j)
class SubDmuSet {
 public:
  SubDmuSet(Eigen::MatrixXd inputs, Eigen::MatrixXd outputs, std::vector<SubDmuOrigin> origins);

  std::size_t size() const { return origins_.size(); }
  const Eigen::MatrixXd& inputs() const { return inputs_; }
  const Eigen::MatrixXd& outputs() const { return outputs_; }
  const SubDmuOrigin& origin(std::size_t unit) const { return origins_[unit]; }
  // "j.1" / "j.2" with j one-based.
  std::string label(std::size_t unit) const;

 private:
  Eigen::MatrixXd inputs_;
  Eigen::MatrixXd outputs_;
  std::vector<SubDmuOrigin> origins_;
};

SubDmuSet split_to_subdmus(const DmuPanel& panel);

std::string unit_label(std::size_t dmu, Stage stage);

// E(d, l) is the efficiency of unit l under the weights chosen by evaluator d.
class CrossEfficiencyMatrix {
 public:
  CrossEfficiencyMatrix(Eigen::MatrixXd values, std::vector<std::string> labels,
                        std::vector<Stage> stages);

  std::size_t size() const { return labels_.size(); }
  double operator()(std::size_t evaluator, std::size_t target) const {
    return values_(static_cast<Eigen::Index>(evaluator), static_cast<Eigen::Index>(target));
  }
  const Eigen::MatrixXd& values() const { return values_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<Stage>& stages() const { return stages_; }

 private:
  Eigen::MatrixXd values_;
  std::vector<std::string> labels_;
  std::vector<Stage> stages_;
};

struct DeaOptions {
  lp::SolverOptions solver;
  // Worker threads for build_cem; the matrix does not depend on this value.
  unsigned threads = 1;
};

// CCR self-efficiency of unit d: max mu.y_d s.t. mu.y_l - w.x_l <= 0 for all l,
// w.x_d = 1, mu, w >= 0.
double ccr_efficiency(const SubDmuSet& units, std::size_t d, const DeaOptions& options = {});

// Aggressive secondary-goal cross-efficiency: with d's self-efficiency pinned
// at theta_d (theta_d * w.x_d - mu.y_d = 0), minimize mu.y_l subject to
// w.x_l = 1 and the CCR ratio constraints over every unit.
double aggressive_cross_efficiency(const SubDmuSet& units, std::size_t d, std::size_t l,
                                   double theta_d, const DeaOptions& options = {});

CrossEfficiencyMatrix build_cem(const SubDmuSet& units, const DeaOptions& options = {});

// The n x n block of same-stage entries of a 2n-unit matrix, labels preserved.
CrossEfficiencyMatrix stage_submatrix(const CrossEfficiencyMatrix& cem, Stage stage);

// Mean of column i over all evaluators, self-evaluation included.
double average_cree(const CrossEfficiencyMatrix& cem, std::size_t i);

}  // namespace coopdea::dea
