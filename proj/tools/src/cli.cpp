// Copyright 2026 The bitesense Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "bitesense/cli/cli.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "bitesense/cli/digest.hpp"
#include "bitesense/cli/manifest.hpp"
#include "bitesense/cli/service.hpp"
#include "bitesense/cli/zip.hpp"
#include "bitesense/dataset_io.hpp"
#include "bitesense/error.hpp"
#include "bitesense/evaluator.hpp"
#include "bitesense/lstm/checkpoint.hpp"
#include "bitesense/parallel.hpp"
#include "bitesense/signal_ingest.hpp"
#include "bitesense/synthetic.hpp"
#include "bitesense/trainer.hpp"
#include "bitesense/window_pipeline.hpp"
#include "httplib.h"
#include "json.hpp"

namespace bitesense::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

// Builds an output directory next to its destination and swaps it into
// place on commit. Anything not committed is removed, so a failed command
// leaves no partial output behind.
class StagedDir {
 public:
  explicit StagedDir(const fs::path& dest) : given_(dest) {
    dest_ = fs::absolute(dest).lexically_normal();
    if (dest_.filename().empty()) dest_ = dest_.parent_path();
    static std::atomic<unsigned> counter{0};
    tmp_ = dest_.parent_path() / ("." + dest_.filename().string() + ".tmp-" +
                                  std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(tmp_);
    fs::create_directories(tmp_);
  }
  StagedDir(const StagedDir&) = delete;
  StagedDir& operator=(const StagedDir&) = delete;
  ~StagedDir() {
    if (!committed_) {
      std::error_code ec;
      fs::remove_all(tmp_, ec);
    }
  }

  // Writes one file and records it as an output of `m`.
  void put(Manifest& m, const std::string& role, const std::string& name,
           std::string_view bytes) {
    write_file_atomic(tmp_ / name, bytes);
    m.add_output(role, final_path(name), bytes);
  }

  fs::path final_path(const std::string& name) const { return given_ / name; }

  void commit(const Manifest& m) {
    write_file_atomic(tmp_ / "manifest.json", m.dump());
    const fs::path old = tmp_.string() + ".old";
    const bool had_old = fs::exists(dest_);
    if (had_old) fs::rename(dest_, old);
    fs::rename(tmp_, dest_);
    committed_ = true;
    if (had_old) {
      std::error_code ec;
      fs::remove_all(old, ec);
    }
  }

 private:
  fs::path given_;
  fs::path dest_;
  fs::path tmp_;
  bool committed_ = false;
};

struct Io {
  std::ostream& out;
  std::ostream& err;
};

// ---------------------------------------------------------------------------
// Option plumbing shared by every subcommand.

Json typed_value(const std::string& text) {
  if (text.empty()) return text;
  std::int64_t i = 0;
  const char* end = text.data() + text.size();
  if (auto [p, ec] = std::from_chars(text.data(), end, i); ec == std::errc() && p == end &&
                                                           (text[0] != '0' || text.size() == 1)) {
    return i;
  }
  double d = 0;
  if (auto [p, ec] = std::from_chars(text.data(), end, d); ec == std::errc() && p == end) {
    return d;
  }
  return text;
}

// Effective value of every option, keyed by its long name.
Json collect_params(CLI::App* sub) {
  Json params = Json::object();
  for (CLI::Option* opt : sub->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string key = opt->get_lnames().front();
    if (key == "help" || key == "config") continue;
    if (opt->get_type_size_max() == 0) {
      params[key] = opt->count() > 0 && opt->as<bool>();
      continue;
    }
    std::vector<std::string> values = opt->count() > 0 ? opt->reduced_results()
                                                       : std::vector<std::string>{};
    if (values.empty() && !opt->get_default_str().empty() && opt->get_items_expected_max() <= 1) {
      values.push_back(opt->get_default_str());
    }
    if (opt->get_items_expected_max() > 1) {
      Json arr = Json::array();
      for (const auto& v : values) arr.push_back(v);
      params[key] = std::move(arr);
    } else if (!values.empty()) {
      params[key] = typed_value(values.front());
    }
  }
  return params;
}

std::vector<std::string> split_list(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (!part.empty()) out.push_back(to_lower(part));
    }
  }
  return out;
}

void usage_if(bool bad, const std::string& message) {
  if (bad) throw UsageError(message);
}

// ---------------------------------------------------------------------------
// ingest

struct IngestOptions {
  std::vector<std::string> recordings;
  std::vector<std::string> annotations;
  std::vector<std::string> zips;
  std::string out;
  std::vector<std::string> classes;
  double rate_hz = 25.0;
  std::int64_t gap_tol_ms = 0;
};

struct IngestInput {
  std::string id;
  RawRecording recording;
  std::vector<AnnotationSpan> spans;
};

int cmd_ingest(const IngestOptions& o, Manifest& m, const Io& io) {
  usage_if(o.recordings.size() != o.annotations.size(),
           "ingest: every --recording needs a matching --annotations");
  usage_if(o.recordings.empty() && o.zips.empty(), "ingest: no inputs given");
  std::vector<std::string> classes = split_list(o.classes);
  if (classes.empty()) classes = default_class_set();

  // Parse everything before creating any output.
  std::vector<IngestInput> inputs;
  for (std::size_t i = 0; i < o.recordings.size(); ++i) {
    const fs::path rec_path = o.recordings[i];
    const fs::path ann_path = o.annotations[i];
    const std::string id = rec_path.stem().string();
    m.add_input("recording:" + id, rec_path);
    m.add_input("annotations:" + id, ann_path);
    inputs.push_back({id, parse_recording(read_file(rec_path), id),
                      parse_annotations(read_file(ann_path), classes)});
  }
  for (const auto& z : o.zips) {
    const fs::path path = z;
    const std::string id = path.stem().string();
    m.add_input("zip:" + id, path);
    const UploadPair pair = split_upload(read_file(path), classes);
    inputs.push_back(
        {id, parse_recording(pair.recording, id), parse_annotations(pair.annotations, classes)});
  }
  std::map<std::string, int> seen;
  for (const auto& in : inputs) {
    if (seen[in.id]++ > 0) {
      throw Error(Errc::kMalformedDescriptor, "ingest: duplicate recording id '" + in.id + "'");
    }
  }

  StagedDir dir(o.out);
  Json index = Json::array();
  for (const auto& in : inputs) {
    for (std::size_t s = 0; s < in.spans.size(); ++s) {
      const AnnotationSpan& span = in.spans[s];
      if (!span.confirmed) {
        io.err << "warning: " << in.id << ": skipping unconfirmed span " << s << " ("
               << span.label << ")\n";
        continue;
      }
      LabeledSegment seg = apply_trim(in.recording, span, s);
      seg.source.recording_id = in.id;
      Json entry{{"file", in.id + "." + std::to_string(s) + "." + seg.label + ".csv"},
                 {"label", seg.label},
                 {"recording_id", in.id},
                 {"span_index", s},
                 {"samples", seg.samples.size()},
                 {"start_ms", seg.samples.front().t_ms},
                 {"stop_ms", seg.samples.back().t_ms}};
      if (seg.samples.size() >= 2) {
        const RateReport r = validate_rate(seg.samples, o.rate_hz, o.gap_tol_ms);
        entry["mean_rate_hz"] = r.mean_rate_hz;
        entry["max_gap_ms"] = r.max_gap_ms;
        entry["gaps_over_tol"] = r.gap_count_over_tol;
        if (r.gap_count_over_tol > 0) {
          io.err << "warning: " << in.id << ": span " << s << " has " << r.gap_count_over_tol
                 << " gap(s), longest " << r.max_gap_ms << " ms\n";
        }
      }
      RawRecording out_rec{in.id, seg.samples, o.rate_hz};
      const std::string file = entry["file"].get<std::string>();
      dir.put(m, "segment:" + file, file, serialize_recording(out_rec));
      index.push_back(std::move(entry));
    }
  }
  if (index.empty()) io.err << "warning: no confirmed spans; the segment index is empty\n";
  dir.put(m, "index", "segments.json", Json{{"segments", index}}.dump(2) + "\n");
  dir.commit(m);
  io.out << "wrote " << index.size() << " segment(s) to " << o.out << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// window

struct WindowOptions {
  std::string segments;
  std::string out;
  std::size_t window_size = 150;
  std::size_t step = 10;
  std::uint64_t balance_seed = 0;
  std::uint64_t split_seed = 0;
  double ratio = 0.8;
  std::string positive = "eating";
  std::vector<std::string> classes;
  bool keep_classes = false;
  std::string other = "other";
};

std::vector<std::string> order_classes(const std::vector<LabeledSegment>& segs) {
  std::vector<std::string> present;
  for (const auto& s : segs) {
    if (std::find(present.begin(), present.end(), s.label) == present.end()) {
      present.push_back(s.label);
    }
  }
  std::vector<std::string> out;
  for (const auto& name : default_class_set()) {
    if (std::find(present.begin(), present.end(), name) != present.end()) out.push_back(name);
  }
  for (const auto& name : present) {
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
  }
  return out;
}

std::string class_counts(const WindowedDataset& ds) {
  std::vector<std::size_t> counts(ds.class_map.size(), 0);
  for (auto l : ds.labels) ++counts[l];
  std::string out;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (c) out += ", ";
    out += ds.class_map.names[c] + "=" + std::to_string(counts[c]);
  }
  return out;
}

int cmd_window(const WindowOptions& o, Manifest& m, const Io& io) {
  usage_if(o.window_size == 0 || o.step == 0, "window: --window_size and --step must be positive");
  usage_if(o.step > o.window_size, "window: --step (" + std::to_string(o.step) +
                                       ") must not exceed --window_size (" +
                                       std::to_string(o.window_size) + ")");
  usage_if(!(o.ratio > 0.0 && o.ratio < 1.0), "window: --ratio must lie strictly between 0 and 1");

  const fs::path seg_dir = o.segments;
  const fs::path index_path = seg_dir / "segments.json";
  m.add_input("index", index_path);
  const Json index = Json::parse(read_file(index_path), nullptr, false);
  if (index.is_discarded() || !index.contains("segments") || !index["segments"].is_array()) {
    throw Error(Errc::kMalformedDescriptor, "window: " + index_path.string() +
                                                " is not a segment index");
  }
  std::vector<LabeledSegment> segs;
  for (const auto& e : index["segments"]) {
    const std::string file = e.at("file").get<std::string>();
    m.add_input("segment:" + file, seg_dir / file);
    LabeledSegment seg;
    seg.label = e.at("label").get<std::string>();
    seg.source = {e.at("recording_id").get<std::string>(), e.at("span_index").get<std::size_t>()};
    seg.samples = parse_recording(read_file(seg_dir / file), seg.source.recording_id).samples;
    segs.push_back(std::move(seg));
  }

  std::vector<std::string> classes = split_list(o.classes);
  if (classes.empty()) classes = order_classes(segs);
  const std::size_t before = segs.size();
  std::erase_if(segs, [&](const LabeledSegment& s) {
    return std::find(classes.begin(), classes.end(), s.label) == classes.end();
  });
  if (segs.size() != before) {
    io.err << "warning: dropped " << before - segs.size()
           << " segment(s) whose label is not in --classes\n";
  }
  const ClassMap cmap = ClassMap::make(classes, to_lower(o.positive));

  const auto balanced = balance(segs, o.balance_seed, o.window_size, o.step, classes);
  WindowedDataset ds = slide(balanced, cmap, o.window_size, o.step);
  if (!o.keep_classes) ds = collapse_binary(ds, o.other);
  const SplitPair sp = split(ds, o.ratio, o.split_seed);

  StagedDir dir(o.out);
  dir.put(m, "train", "train.bwds", encode_dataset(sp.train));
  dir.put(m, "test", "test.bwds", encode_dataset(sp.test));
  dir.commit(m);
  io.out << "segments: " << segs.size() << " (" << balanced.size() << " after balancing)\n"
         << "windows:  " << ds.size() << " (" << class_counts(ds) << ")\n"
         << "train:    " << sp.train.size() << "\ntest:     " << sp.test.size() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// train / eval / predict

struct TrainOptions {
  std::string train;
  std::string test;
  std::string out;
  std::size_t window_size = 0;  // 0: take it from the dataset
  TrainConfig cfg;
  std::string precision = "32";
  std::string optimizer = "adam";
};

void write_report(StagedDir& dir, Manifest& m, const EvalReport& report) {
  dir.put(m, "report", "report.txt", render_report(report));
  dir.put(m, "report_json", "report.json", report_json(report));
  dir.put(m, "confusion", "confusion.csv", confusion_csv(report.matrix, report.class_names));
}

template <typename T>
EvalReport evaluate_model(const lstm::ModelParams<T>& p, const WindowedDataset& ds,
                          std::size_t window, double beta, unsigned workers) {
  const auto pred = predict(p, ds, window, workers);
  std::vector<std::size_t> truth(ds.labels.begin(), ds.labels.end());
  return evaluate(confusion(truth, pred, ds.class_map.size()), ds.class_map.names, beta);
}

std::string timing_csv(const TrainHistory& h) {
  std::string out = "epoch,seconds\n";
  char buf[64];
  for (const auto& r : h) {
    std::snprintf(buf, sizeof(buf), "%zu,%.3f\n", r.epoch, r.seconds);
    out += buf;
  }
  return out;
}

template <typename T>
int train_typed(const TrainOptions& o, const TrainConfig& cfg, const SplitPair& sp,
                Manifest& m, const Io& io) {
  // Wall-clock time is the one non-reproducible column; 64-bit runs keep it
  // out of history.csv so that file is bit-identical across reruns.
  const bool f64 = cfg.precision == Precision::kF64;
  const auto progress = [&](const EpochRecord& r) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "epoch %3zu  loss %.4f  acc %.4f  test_loss %.4f  test_acc %.4f  %.1fs\n",
                  r.epoch, r.train_loss, r.train_acc, r.test_loss, r.test_acc, r.seconds);
    io.err << buf << std::flush;
  };
  lstm::Checkpoint<T> ckpt;
  ckpt.class_map = sp.train.class_map;
  ckpt.window_size = sp.train.window_size;

  StagedDir dir(o.out);
  TrainResult<T> result;
  try {
    result = train<T>(sp, cfg, progress);
  } catch (const DivergedLoss<T>& e) {
    ckpt.params = e.last_good();
    dir.put(m, "checkpoint_last_good", "checkpoint.last_good.json", lstm::encode_checkpoint(ckpt));
    dir.put(m, "history", "history.csv", history_csv(e.history(), !f64));
    m.params["status"] = "diverged";
    dir.commit(m);
    io.err << "error: " << e.what() << "\n";
    return kExitNumericFailure;
  }
  ckpt.params = result.params;
  ckpt.optimizer = result.optimizer;
  dir.put(m, "checkpoint", "checkpoint.json", lstm::encode_checkpoint(ckpt));
  dir.put(m, "history", "history.csv", history_csv(result.history, !f64));
  if (f64) dir.put(m, "timing", "timing.csv", timing_csv(result.history));
  const EvalReport report =
      evaluate_model(result.params, sp.test, sp.train.window_size, 1.0, cfg.workers);
  write_report(dir, m, report);
  dir.commit(m);
  io.out << render_report(report);
  return kExitOk;
}

int cmd_train(TrainOptions o, Manifest& m, const Io& io) {
  TrainConfig cfg = o.cfg;
  usage_if(o.precision != "32" && o.precision != "64", "train: --precision must be 32 or 64");
  cfg.precision = o.precision == "64" ? Precision::kF64 : Precision::kF32;
  try {
    cfg.optimizer = lstm::parse_optimizer(o.optimizer);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (cfg.workers == 0) cfg.workers = default_workers();

  m.add_input("train", o.train);
  m.add_input("test", o.test);
  SplitPair sp;
  sp.train = load_dataset(o.train);
  sp.test = load_dataset(o.test);
  sp.seed = cfg.seed;
  if (sp.train.window_size != sp.test.window_size || !(sp.train.class_map == sp.test.class_map)) {
    throw Error(Errc::kShapeMismatch,
                "train: train and test datasets differ in window size or classes (" +
                    std::to_string(sp.train.window_size) + " vs " +
                    std::to_string(sp.test.window_size) + ")");
  }
  if (o.window_size != 0 && o.window_size != sp.train.window_size) {
    throw Error(Errc::kShapeMismatch, "train: --window_size " + std::to_string(o.window_size) +
                                          " does not match the dataset window size " +
                                          std::to_string(sp.train.window_size));
  }
  cfg.window_size = sp.train.window_size;
  cfg.step = std::max<std::size_t>(1, std::min(sp.train.step, cfg.window_size));
  m.params["window_size"] = cfg.window_size;
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw UsageError(std::string("train: ") + e.what());
  }
  return cfg.precision == Precision::kF64 ? train_typed<double>(o, cfg, sp, m, io)
                                          : train_typed<float>(o, cfg, sp, m, io);
}

struct EvalOptions {
  std::string checkpoint;
  std::string dataset;
  std::string out;
  double beta = 1.0;
  unsigned workers = 0;
};

template <typename T>
int eval_typed(const EvalOptions& o, std::string_view text, const WindowedDataset& ds,
               Manifest& m, const Io& io) {
  const lstm::Checkpoint<T> ckpt = lstm::decode_checkpoint<T>(text);
  if (!(ckpt.class_map == ds.class_map)) {
    throw Error(Errc::kShapeMismatch, "eval: the dataset classes do not match the checkpoint");
  }
  const unsigned workers = o.workers ? o.workers : default_workers();
  const EvalReport report = evaluate_model(ckpt.params, ds, ckpt.window_size, o.beta, workers);
  if (!o.out.empty()) {
    StagedDir dir(o.out);
    write_report(dir, m, report);
    dir.commit(m);
  }
  io.out << render_report(report);
  return kExitOk;
}

int cmd_eval(const EvalOptions& o, Manifest& m, const Io& io) {
  usage_if(!(o.beta > 0.0), "eval: --beta must be positive");
  m.add_input("checkpoint", o.checkpoint);
  m.add_input("dataset", o.dataset);
  const std::string text = read_file(o.checkpoint);
  const WindowedDataset ds = load_dataset(o.dataset);
  return lstm::checkpoint_dtype(text) == "f64" ? eval_typed<double>(o, text, ds, m, io)
                                               : eval_typed<float>(o, text, ds, m, io);
}

struct PredictOptions {
  std::string checkpoint;
  std::string dataset;
  std::string out;
  unsigned workers = 0;
};

template <typename T>
std::string predictions_csv(std::string_view text, const WindowedDataset& ds, unsigned workers) {
  const lstm::Checkpoint<T> ckpt = lstm::decode_checkpoint<T>(text);
  const auto pred = predict(ckpt.params, ds, ckpt.window_size, workers);
  std::vector<std::size_t> idx(ds.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const auto probs = lstm::predict_probs(ckpt.params, ds, idx, workers);
  const auto& names = ckpt.class_map.names;
  std::string out = "index,truth,predicted";
  for (const auto& n : names) out += ",p_" + n;
  out += "\n";
  char buf[64];
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const std::string truth =
        ds.labels[i] < ds.class_map.size() ? ds.class_map.names[ds.labels[i]] : "";
    out += std::to_string(i) + "," + truth + "," + names[pred[i]];
    for (Eigen::Index c = 0; c < probs.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), ",%.6f", static_cast<double>(probs(static_cast<Eigen::Index>(i), c)));
      out += buf;
    }
    out += "\n";
  }
  return out;
}

int cmd_predict(const PredictOptions& o, Manifest& m, const Io& io) {
  m.add_input("checkpoint", o.checkpoint);
  m.add_input("dataset", o.dataset);
  const std::string text = read_file(o.checkpoint);
  const WindowedDataset ds = load_dataset(o.dataset);
  const unsigned workers = o.workers ? o.workers : default_workers();
  const std::string csv = lstm::checkpoint_dtype(text) == "f64"
                              ? predictions_csv<double>(text, ds, workers)
                              : predictions_csv<float>(text, ds, workers);
  if (o.out.empty()) {
    io.out << csv;
    return kExitOk;
  }
  StagedDir dir(o.out);
  dir.put(m, "predictions", "predictions.csv", csv);
  dir.commit(m);
  io.out << "wrote " << ds.size() << " prediction(s) to " << o.out << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// synth

struct SynthOptions {
  std::string out;
  synthetic::Options gen;
  std::vector<std::string> activities;
  bool zip = false;
};

int cmd_synth(const SynthOptions& o, Manifest& m, const Io& io) {
  synthetic::Options gen = o.gen;
  if (!o.activities.empty()) gen.activities = split_list(o.activities);
  usage_if(gen.sessions_per_activity == 0, "synth: --sessions must be positive");
  usage_if(!(gen.activity_seconds > 0.0 && gen.rate_hz > 0.0),
           "synth: --seconds and --rate must be positive");
  const auto corpus = synthetic::generate_corpus(gen);
  StagedDir dir(o.out);
  for (const auto& s : corpus) {
    const std::string csv = serialize_recording(s.recording);
    const std::string ann = serialize_annotations(s.spans);
    if (o.zip) {
      dir.put(m, s.recording_id, s.recording_id + ".zip",
              write_zip({{"recording.csv", csv}, {"annotations.json", ann}}));
    } else {
      dir.put(m, s.recording_id + ":recording", s.recording_id + ".csv", csv);
      dir.put(m, s.recording_id + ":annotations", s.recording_id + ".json", ann);
    }
  }
  dir.commit(m);
  io.out << "wrote " << corpus.size() << " session(s) to " << o.out << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// serve

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string store;
  std::string ui;
  std::vector<std::string> classes;
};

int cmd_serve(const ServeOptions& o, const Io& io) {
  std::string store_dir = o.store;
  if (store_dir.empty()) {
    const char* env = std::getenv("BITESENSE_STORE");
    store_dir = env && *env ? env : "store";
  }
  std::vector<std::string> classes = split_list(o.classes);
  if (classes.empty()) classes = default_class_set();
  UploadStore store(store_dir, classes);
  httplib::Server server;
  register_routes(server, store, o.ui);
  if (!server.bind_to_port(o.host, o.port)) {
    throw Error(Errc::kIoError, "serve: cannot bind " + o.host + ":" + std::to_string(o.port));
  }
  io.err << "serving " << fs::absolute(store_dir).string() << " on http://" << o.host << ":"
         << o.port << "\n";
  return server.listen_after_bind() ? kExitOk : kExitDataError;
}

std::vector<const char*> to_argv(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return argv;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const Io io{out, err};
  CLI::App app{"bitesense: eating-gesture detection from wrist accelerometer data", "bitesense"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default()->multi_option_policy(
      CLI::MultiOptionPolicy::TakeLast);
  app.set_version_flag("--version", "bitesense 0.3.0");

  std::string config_path;  // consumed before parsing; declared for --help
  const auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Replay the parameters of a run manifest");
  };

  IngestOptions ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Trim annotated recordings into labeled segments");
  c_ingest->add_option("--recording", ingest.recordings, "Recording CSV (repeatable)");
  c_ingest->add_option("--annotations", ingest.annotations,
                       "Annotation JSON, paired with --recording in order");
  c_ingest->add_option("--zip", ingest.zips, "Zipped recording + annotation pair (repeatable)");
  c_ingest->add_option("--out", ingest.out, "Output segment directory")->required();
  c_ingest->add_option("--classes", ingest.classes, "Allowed labels (comma separated)");
  c_ingest->add_option("--rate_hz", ingest.rate_hz, "Nominal sampling rate");
  c_ingest->add_option("--gap_tol_ms", ingest.gap_tol_ms,
                       "Gap threshold for the rate report (0: derived from the rate)");
  add_config(c_ingest);

  WindowOptions window;
  auto* c_window = app.add_subcommand("window", "Balance, window and split segments");
  c_window->add_option("--segments", window.segments, "Segment directory from ingest")->required();
  c_window->add_option("--out", window.out, "Output dataset directory")->required();
  c_window->add_option("--window_size", window.window_size, "Window length W in samples");
  c_window->add_option("--step", window.step, "Window step S in samples");
  c_window->add_option("--balance_seed", window.balance_seed, "Seed for segment duplication");
  c_window->add_option("--split_seed", window.split_seed, "Seed for the train/test shuffle");
  c_window->add_option("--ratio", window.ratio, "Train fraction");
  c_window->add_option("--positive", window.positive, "Positive class");
  c_window->add_option("--classes", window.classes, "Class order (comma separated)");
  c_window->add_flag("--keep_classes", window.keep_classes,
                     "Keep every class instead of collapsing to positive vs other");
  c_window->add_option("--other", window.other, "Name of the collapsed negative class");
  add_config(c_window);

  TrainOptions trainopt;
  auto* c_train = app.add_subcommand("train", "Train the classifier");
  c_train->add_option("--train", trainopt.train, "Train dataset (.bwds)")->required();
  c_train->add_option("--test", trainopt.test, "Test dataset (.bwds)")->required();
  c_train->add_option("--out", trainopt.out, "Run directory")->required();
  c_train->add_option("--window_size", trainopt.window_size,
                      "Expected window size (0: take it from the dataset)");
  c_train->add_option("--learning_rate,--lr", trainopt.cfg.learning_rate, "Learning rate");
  c_train->add_option("--epochs", trainopt.cfg.epochs, "Epochs");
  c_train->add_option("--batch_size", trainopt.cfg.batch_size, "Mini-batch size");
  c_train->add_option("--lambda", trainopt.cfg.lambda, "L2 coefficient on weights");
  c_train->add_option("--seed", trainopt.cfg.seed, "Initialization and shuffle seed");
  c_train->add_option("--precision", trainopt.precision, "32 or 64");
  c_train->add_option("--optimizer", trainopt.optimizer, "adam or sgd");
  c_train->add_option("--clip_norm", trainopt.cfg.clip_norm, "Gradient clip norm (0: off)");
  c_train->add_option("--fc_units", trainopt.cfg.fc_units, "Per-step dense units");
  c_train->add_option("--hidden", trainopt.cfg.hidden, "LSTM units per layer");
  c_train->add_option("--workers", trainopt.cfg.workers,
                      "Worker threads (0: all cores; results do not depend on it)");
  add_config(c_train);

  EvalOptions evalopt;
  auto* c_eval = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset");
  c_eval->add_option("--checkpoint", evalopt.checkpoint, "Checkpoint JSON")->required();
  c_eval->add_option("--dataset", evalopt.dataset, "Dataset (.bwds)")->required();
  c_eval->add_option("--beta", evalopt.beta, "F-measure beta");
  c_eval->add_option("--out", evalopt.out, "Directory for report files and the manifest");
  c_eval->add_option("--workers", evalopt.workers, "Worker threads (0: all cores)");
  add_config(c_eval);

  PredictOptions predictopt;
  auto* c_predict = app.add_subcommand("predict", "Per-window predictions as CSV");
  c_predict->add_option("--checkpoint", predictopt.checkpoint, "Checkpoint JSON")->required();
  c_predict->add_option("--dataset", predictopt.dataset, "Dataset (.bwds)")->required();
  c_predict->add_option("--out", predictopt.out, "Output directory (default: stdout)");
  c_predict->add_option("--workers", predictopt.workers, "Worker threads (0: all cores)");
  add_config(c_predict);

  SynthOptions synth;
  auto* c_synth = app.add_subcommand("synth", "Generate synthetic annotated sessions");
  c_synth->add_option("--out", synth.out, "Output directory")->required();
  c_synth->add_option("--seed", synth.gen.seed, "Generator seed");
  c_synth->add_option("--sessions", synth.gen.sessions_per_activity, "Sessions per activity");
  c_synth->add_option("--seconds", synth.gen.activity_seconds, "Activity length per session");
  c_synth->add_option("--rate_hz", synth.gen.rate_hz, "Sampling rate");
  c_synth->add_option("--noise", synth.gen.noise_stddev, "Sensor noise stddev (m/s^2)");
  c_synth->add_option("--activities", synth.activities, "Activities (comma separated)");
  c_synth->add_flag("--zip", synth.zip, "Write each session as an upload zip");
  add_config(c_synth);

  ServeOptions serve;
  auto* c_serve = app.add_subcommand("serve", "Run the upload and annotation service");
  c_serve->add_option("--host", serve.host, "Bind address");
  c_serve->add_option("--port", serve.port, "Port");
  c_serve->add_option("--store", serve.store, "Store directory (default: $BITESENSE_STORE or ./store)");
  c_serve->add_option("--ui", serve.ui, "Directory of static UI assets");
  c_serve->add_option("--classes", serve.classes, "Allowed labels (comma separated)");

  try {
    // A run manifest given with --config is expanded into flags before
    // parsing: recorded values first, then the user's own flags, which win.
    std::vector<std::string> effective = args;
    const auto sub_pos = std::find_if(args.begin() + (args.empty() ? 0 : 1), args.end(),
                                      [&](const std::string& a) {
                                        return !a.starts_with("-") && app.get_subcommand_no_throw(a);
                                      });
    if (sub_pos != args.end()) {
      std::string config;
      std::vector<std::string> rest;
      for (auto a = sub_pos + 1; a < args.end(); ++a) {
        if (*a == "--config" && a + 1 < args.end()) {
          config = *++a;
        } else if (a->starts_with("--config=")) {
          config = a->substr(9);
        } else {
          rest.push_back(*a);
        }
      }
      if (!config.empty()) {
        const Manifest recorded = Manifest::parse(read_file(config));
        usage_if(recorded.command != *sub_pos, "--config: manifest was written by '" +
                                                   recorded.command + "', not '" + *sub_pos + "'");
        verify_inputs(recorded);
        effective.assign(args.begin(), sub_pos + 1);
        const auto extra = replay_args(recorded);
        effective.insert(effective.end(), extra.begin(), extra.end());
        effective.insert(effective.end(), rest.begin(), rest.end());
      }
    }
    auto argv = to_argv(effective);
    app.parse(static_cast<int>(argv.size()), argv.data());
    CLI::App* sub = app.get_subcommands().front();

    Manifest m;
    m.command = sub->get_name();
    m.params = collect_params(sub);
    if (sub == c_ingest) return cmd_ingest(ingest, m, io);
    if (sub == c_window) return cmd_window(window, m, io);
    if (sub == c_train) return cmd_train(trainopt, m, io);
    if (sub == c_eval) return cmd_eval(evalopt, m, io);
    if (sub == c_predict) return cmd_predict(predictopt, m, io);
    if (sub == c_synth) return cmd_synth(synth, m, io);
    return cmd_serve(serve, io);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error [" << errc_name(e.code()) << "]: " << e.what() << "\n";
    return e.code() == Errc::kDivergedLoss ? kExitNumericFailure : kExitDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDataError;
  }
}

}  // namespace bitesense::cli
