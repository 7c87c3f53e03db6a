#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "deepesn/core.hpp"

namespace deepesn {

/// Sequence of frames; each frame lists the active note indices.
struct PianoRollSequence {
  std::vector<std::vector<int>> frames;

  Index length() const { return static_cast<Index>(frames.size()); }
  friend bool operator==(const PianoRollSequence&, const PianoRollSequence&) = default;
};

enum class Split { kTrain, kValid, kTest };

std::string_view split_name(Split split);

struct PianoRollDataset {
  std::string name;
  int dim = 0;
  std::vector<PianoRollSequence> train;
  std::vector<PianoRollSequence> valid;
  std::vector<PianoRollSequence> test;

  const std::vector<PianoRollSequence>& split(Split s) const;
  std::vector<PianoRollSequence>& split(Split s);

  friend bool operator==(const PianoRollDataset&, const PianoRollDataset&) = default;
};

/// Known note-vector width of a standard benchmark, looked up by a name
/// normalized to lowercase alphanumerics ("JSB Chorales" -> "jsbchorales").
std::optional<int> benchmark_dimension(std::string_view name);

/// Checks note ranges, frame ordering and benchmark widths. Throws
/// ParseError naming the offending record.
void validate_dataset(const PianoRollDataset& dataset);

PianoRollDataset parse_dataset(std::string_view json_text);
PianoRollDataset load_dataset(const std::filesystem::path& path);
std::string dump_dataset(const PianoRollDataset& dataset);
void save_dataset(const PianoRollDataset& dataset, const std::filesystem::path& path);

NoteMatrix to_dense_frames(const PianoRollSequence& seq, int dim);
PianoRollSequence from_dense_frames(const NoteMatrix& frames);

struct NextStepPairs {
  NoteMatrix inputs;
  NoteMatrix targets;
};

/// Inputs are frames[0 .. T-2], targets frames[1 .. T-1]. Sequences
/// shorter than two frames have no pairs and yield nullopt.
std::optional<NextStepPairs> next_step_pairs(const PianoRollSequence& seq, int dim);

struct SplitDiagnostics {
  std::string split;
  std::size_t sequences = 0;
  std::size_t frames = 0;
  std::size_t active_notes = 0;
  std::size_t empty_frames = 0;
  std::size_t too_short = 0;
  std::size_t min_length = 0;
  std::size_t max_length = 0;
};

struct DatasetDiagnostics {
  std::string name;
  int dim = 0;
  std::optional<int> expected_dim;
  std::vector<SplitDiagnostics> splits;
};

DatasetDiagnostics diagnose(const PianoRollDataset& dataset);

struct SyntheticSpec {
  std::string name = "synthetic";
  int dim = 4;
  int train_sequences = 6;
  int valid_sequences = 2;
  int test_sequences = 2;
  int min_length = 8;
  int max_length = 16;
  std::uint64_t seed = 7;
};

/// Learnable toy corpus: each sequence walks through the notes with a
/// per-sequence stride and occasionally doubles a note.
PianoRollDataset make_synthetic_dataset(const SyntheticSpec& spec);

}  // namespace deepesn
