#pragma once

#include <cstddef>

#include "bntune/graph.hpp"

namespace bntune {

/// Arc-level agreement between a learned DAG and the true DAG. An arc counts
/// as a true positive only with matching direction; a reversed arc is one
/// false positive and one false negative.
struct GraphMetrics {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t shd = 0;
};

/// Precision, recall, F1 and SHD. Throws ArgumentError on node-count mismatch.
GraphMetrics f1_score(const Dag& learned, const Dag& truth);

/// Structural Hamming distance: additions + deletions + reversals (a reversal
/// counts once).
std::size_t shd(const Dag& learned, const Dag& truth);

struct RelativeChange {
  double value = 0.0;
  /// True when the default was 0 and `value` is an absolute difference.
  bool absolute = false;
};

enum class MetricSense { HigherIsBetter, LowerIsBetter };

/// Percentage change of `tuned` against `default_value`, signed so that an
/// improvement is positive (for SHD a reduction is an improvement).
RelativeChange relative_change(double tuned, double default_value, MetricSense sense = MetricSense::HigherIsBetter);

}  // namespace bntune
