#include "deepesn/data.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "deepesn/random.hpp"

namespace deepesn {

namespace {

using nlohmann::json;

constexpr Split kSplits[] = {Split::kTrain, Split::kValid, Split::kTest};

std::string normalize_name(std::string_view name) {
  std::string out;
  for (char c : name)
    if (std::isalnum(static_cast<unsigned char>(c))) out.push_back(static_cast<char>(std::tolower(c)));
  return out;
}

std::string record(Split split, std::size_t seq, std::size_t frame) {
  std::ostringstream os;
  os << "splits." << split_name(split) << "[" << seq << "][" << frame << "]";
  return os.str();
}

PianoRollSequence parse_sequence(const json& j, Split split, std::size_t index) {
  if (!j.is_array()) {
    std::ostringstream os;
    os << "splits." << split_name(split) << "[" << index << "]: sequence must be an array of frames";
    throw ParseError(os.str());
  }
  PianoRollSequence seq;
  seq.frames.reserve(j.size());
  for (std::size_t f = 0; f < j.size(); ++f) {
    const json& frame = j[f];
    if (!frame.is_array()) throw ParseError(record(split, index, f) + ": frame must be an array of note indices");
    std::vector<int> notes;
    notes.reserve(frame.size());
    for (const json& note : frame) {
      if (!note.is_number_integer())
        throw ParseError(record(split, index, f) + ": note indices must be integers");
      const auto value = note.get<std::int64_t>();
      if (value < 0 || value > std::numeric_limits<int>::max())
        throw ParseError(record(split, index, f) + ": note index out of range");
      notes.push_back(static_cast<int>(value));
    }
    seq.frames.push_back(std::move(notes));
  }
  return seq;
}

}  // namespace

std::string_view split_name(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kValid:
      return "valid";
    case Split::kTest:
      return "test";
  }
  return "unknown";
}

const std::vector<PianoRollSequence>& PianoRollDataset::split(Split s) const {
  switch (s) {
    case Split::kTrain:
      return train;
    case Split::kValid:
      return valid;
    case Split::kTest:
      return test;
  }
  throw ContractViolation("unknown split");
}

std::vector<PianoRollSequence>& PianoRollDataset::split(Split s) {
  return const_cast<std::vector<PianoRollSequence>&>(std::as_const(*this).split(s));
}

std::optional<int> benchmark_dimension(std::string_view name) {
  const std::string key = normalize_name(name);
  if (key == "pianomidide" || key == "pianomidi") return 88;
  if (key == "musedata") return 82;
  if (key == "jsbchorales" || key == "jsb") return 52;
  if (key == "nottingham") return 58;
  return std::nullopt;
}

void validate_dataset(const PianoRollDataset& dataset) {
  if (dataset.dim <= 0) throw ParseError("dim must be a positive integer");
  if (auto expected = benchmark_dimension(dataset.name); expected && *expected != dataset.dim) {
    std::ostringstream os;
    os << "dataset '" << dataset.name << "' must have dim " << *expected << ", found " << dataset.dim;
    throw ParseError(os.str());
  }
  for (Split split : kSplits) {
    const auto& seqs = dataset.split(split);
    for (std::size_t s = 0; s < seqs.size(); ++s) {
      for (std::size_t f = 0; f < seqs[s].frames.size(); ++f) {
        const auto& frame = seqs[s].frames[f];
        for (std::size_t k = 0; k < frame.size(); ++k) {
          if (frame[k] < 0 || frame[k] >= dataset.dim) {
            std::ostringstream os;
            os << record(split, s, f) << ": note index " << frame[k] << " outside [0, " << dataset.dim << ")";
            throw ParseError(os.str());
          }
          if (k > 0 && frame[k] <= frame[k - 1])
            throw ParseError(record(split, s, f) + ": note indices must be sorted and unique");
        }
      }
    }
  }
}

PianoRollDataset parse_dataset(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("top-level value must be an object");
  if (!doc.contains("name") || !doc["name"].is_string()) throw ParseError("missing string field 'name'");
  if (!doc.contains("dim") || !doc["dim"].is_number_integer()) throw ParseError("missing integer field 'dim'");
  if (!doc.contains("splits") || !doc["splits"].is_object()) throw ParseError("missing object field 'splits'");

  PianoRollDataset dataset;
  dataset.name = doc["name"].get<std::string>();
  const auto dim = doc["dim"].get<std::int64_t>();
  if (dim <= 0 || dim > std::numeric_limits<int>::max()) throw ParseError("dim must be a positive integer");
  dataset.dim = static_cast<int>(dim);

  const json& splits = doc["splits"];
  for (Split split : kSplits) {
    const std::string key(split_name(split));
    if (!splits.contains(key)) throw ParseError("missing split 'splits." + key + "'");
    const json& arr = splits[key];
    if (!arr.is_array()) throw ParseError("splits." + key + " must be an array of sequences");
    auto& out = dataset.split(split);
    out.reserve(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(parse_sequence(arr[i], split, i));
  }
  validate_dataset(dataset);
  return dataset;
}

PianoRollDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open dataset file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_dataset(buffer.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string dump_dataset(const PianoRollDataset& dataset) {
  nlohmann::ordered_json doc;
  doc["name"] = dataset.name;
  doc["dim"] = dataset.dim;
  nlohmann::ordered_json splits = nlohmann::ordered_json::object();
  for (Split split : kSplits) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& seq : dataset.split(split)) arr.push_back(seq.frames);
    splits[std::string(split_name(split))] = std::move(arr);
  }
  doc["splits"] = std::move(splits);
  return doc.dump();
}

void save_dataset(const PianoRollDataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write dataset file '" + path.string() + "'");
  out << dump_dataset(dataset) << '\n';
}

NoteMatrix to_dense_frames(const PianoRollSequence& seq, int dim) {
  require(dim > 0, "to_dense_frames: dim must be positive");
  NoteMatrix m = NoteMatrix::Zero(seq.length(), dim);
  for (Index t = 0; t < seq.length(); ++t)
    for (int note : seq.frames[static_cast<std::size_t>(t)]) {
      require(note >= 0 && note < dim, "to_dense_frames: note index outside [0, dim)");
      m(t, note) = 1;
    }
  return m;
}

PianoRollSequence from_dense_frames(const NoteMatrix& frames) {
  PianoRollSequence seq;
  seq.frames.resize(static_cast<std::size_t>(frames.rows()));
  for (Index t = 0; t < frames.rows(); ++t)
    for (Index k = 0; k < frames.cols(); ++k)
      if (frames(t, k) != 0) seq.frames[static_cast<std::size_t>(t)].push_back(static_cast<int>(k));
  return seq;
}

std::optional<NextStepPairs> next_step_pairs(const PianoRollSequence& seq, int dim) {
  if (seq.length() < 2) return std::nullopt;
  const NoteMatrix dense = to_dense_frames(seq, dim);
  const Index pairs = dense.rows() - 1;
  return NextStepPairs{dense.topRows(pairs), dense.bottomRows(pairs)};
}

DatasetDiagnostics diagnose(const PianoRollDataset& dataset) {
  DatasetDiagnostics diag;
  diag.name = dataset.name;
  diag.dim = dataset.dim;
  diag.expected_dim = benchmark_dimension(dataset.name);
  for (Split split : kSplits) {
    SplitDiagnostics s;
    s.split = std::string(split_name(split));
    const auto& seqs = dataset.split(split);
    s.sequences = seqs.size();
    for (std::size_t i = 0; i < seqs.size(); ++i) {
      const std::size_t len = seqs[i].frames.size();
      s.frames += len;
      s.min_length = (i == 0) ? len : std::min(s.min_length, len);
      s.max_length = std::max(s.max_length, len);
      if (len < 2) ++s.too_short;
      for (const auto& frame : seqs[i].frames) {
        s.active_notes += frame.size();
        if (frame.empty()) ++s.empty_frames;
      }
    }
    diag.splits.push_back(s);
  }
  return diag;
}

PianoRollDataset make_synthetic_dataset(const SyntheticSpec& spec) {
  require(spec.dim > 0, "make_synthetic_dataset: dim must be positive");
  require(spec.min_length >= 2 && spec.max_length >= spec.min_length,
          "make_synthetic_dataset: lengths must satisfy 2 <= min_length <= max_length");
  Rng rng(spec.seed);
  PianoRollDataset dataset;
  dataset.name = spec.name;
  dataset.dim = spec.dim;
  auto make_split = [&](int count) {
    std::vector<PianoRollSequence> out;
    for (int i = 0; i < count; ++i) {
      const auto span = static_cast<std::uint64_t>(spec.max_length - spec.min_length + 1);
      const int length = spec.min_length + static_cast<int>(rng.below(span));
      const int start = static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.dim)));
      const int stride = spec.dim > 1 ? 1 + static_cast<int>(rng.below(std::min<std::uint64_t>(2, spec.dim - 1))) : 0;
      PianoRollSequence seq;
      for (int t = 0; t < length; ++t) {
        std::vector<int> frame{(start + t * stride) % spec.dim};
        if (spec.dim > 2 && t % 4 == 3) frame.push_back((frame.front() + spec.dim / 2) % spec.dim);
        std::sort(frame.begin(), frame.end());
        frame.erase(std::unique(frame.begin(), frame.end()), frame.end());
        seq.frames.push_back(std::move(frame));
      }
      out.push_back(std::move(seq));
    }
    return out;
  };
  dataset.train = make_split(spec.train_sequences);
  dataset.valid = make_split(spec.valid_sequences);
  dataset.test = make_split(spec.test_sequences);
  return dataset;
}

}  // namespace deepesn
