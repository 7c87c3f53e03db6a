#pragma once

#include <cstdint>
#include <span>

#include "deepesn/core.hpp"

namespace deepesn {

/// Note-level confusion totals pooled over time steps.
struct FrameCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;

  FrameCounts& operator+=(const FrameCounts& other) {
    tp += other.tp;
    fp += other.fp;
    fn += other.fn;
    return *this;
  }
  friend FrameCounts operator+(FrameCounts lhs, const FrameCounts& rhs) { return lhs += rhs; }
  friend bool operator==(const FrameCounts&, const FrameCounts&) = default;
};

FrameCounts frame_counts(const NoteMatrix& predicted, const NoteMatrix& target);

/// Frame-level accuracy TP / (TP + FP + FN); 1.0 when nothing was active in
/// either prediction or target.
double acc(const FrameCounts& counts);

/// Pooled accuracy: counts are summed first, then divided once.
double pooled_acc(std::span<const FrameCounts> per_sequence);

/// Mean of per-sequence accuracies.
double macro_acc(std::span<const FrameCounts> per_sequence);

}  // namespace deepesn
