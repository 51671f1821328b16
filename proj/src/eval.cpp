#include "bntune/eval.hpp"

#include <cmath>

#include "bntune/error.hpp"

namespace bntune {

namespace {

void check_sizes(const Dag& learned, const Dag& truth) {
  if (learned.size() != truth.size())
    throw ArgumentError("graphs differ in node count (" + std::to_string(learned.size()) + " vs " +
                        std::to_string(truth.size()) + ")");
}

}  // namespace

GraphMetrics f1_score(const Dag& learned, const Dag& truth) {
  check_sizes(learned, truth);
  GraphMetrics m;
  const std::size_t learned_arcs = learned.arc_count();
  const std::size_t true_arcs = truth.arc_count();
  for (const auto& [u, v] : learned.arcs())
    if (truth.has_arc(u, v)) ++m.tp;
  m.fp = learned_arcs - m.tp;
  m.fn = true_arcs - m.tp;
  m.precision = learned_arcs == 0 ? 0.0 : static_cast<double>(m.tp) / static_cast<double>(learned_arcs);
  m.recall = true_arcs == 0 ? 0.0 : static_cast<double>(m.tp) / static_cast<double>(true_arcs);
  m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  m.shd = shd(learned, truth);
  return m;
}

std::size_t shd(const Dag& learned, const Dag& truth) {
  check_sizes(learned, truth);
  std::size_t d = 0;
  const std::size_t n = truth.size();
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      const bool in_learned = learned.adjacent(u, v);
      const bool in_truth = truth.adjacent(u, v);
      if (in_learned != in_truth)
        ++d;
      else if (in_learned && learned.has_arc(u, v) != truth.has_arc(u, v))
        ++d;
    }
  }
  return d;
}

RelativeChange relative_change(double tuned, double default_value, MetricSense sense) {
  const double sign = sense == MetricSense::HigherIsBetter ? 1.0 : -1.0;
  if (default_value == 0.0) return {sign * (tuned - default_value), true};
  return {sign * (tuned - default_value) / std::fabs(default_value) * 100.0, false};
}

}  // namespace bntune
