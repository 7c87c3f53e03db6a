#include "deepesn/metrics.hpp"

namespace deepesn {

FrameCounts frame_counts(const NoteMatrix& predicted, const NoteMatrix& target) {
  require(predicted.rows() == target.rows() && predicted.cols() == target.cols(),
          "frame_counts: prediction and target shapes differ");
  require((predicted.array() <= 1).all() && (target.array() <= 1).all(), "frame_counts: entries must be 0 or 1");
  const auto p = predicted.array().cast<std::int64_t>();
  const auto t = target.array().cast<std::int64_t>();
  FrameCounts counts;
  counts.tp = (p * t).sum();
  counts.fp = (p * (1 - t)).sum();
  counts.fn = ((1 - p) * t).sum();
  return counts;
}

double acc(const FrameCounts& counts) {
  const std::int64_t denom = counts.tp + counts.fp + counts.fn;
  if (denom == 0) return 1.0;
  return static_cast<double>(counts.tp) / static_cast<double>(denom);
}

double pooled_acc(std::span<const FrameCounts> per_sequence) {
  FrameCounts total;
  for (const auto& c : per_sequence) total += c;
  return acc(total);
}

double macro_acc(std::span<const FrameCounts> per_sequence) {
  require(!per_sequence.empty(), "macro_acc: no sequences");
  double sum = 0.0;
  for (const auto& c : per_sequence) sum += acc(c);
  return sum / static_cast<double>(per_sequence.size());
}

}  // namespace deepesn
