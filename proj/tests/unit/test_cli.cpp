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


#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "bitesense/cli/cli.hpp"
#include "bitesense/cli/digest.hpp"
#include "bitesense/cli/manifest.hpp"
#include "bitesense/cli/zip.hpp"
#include "bitesense/dataset_io.hpp"
#include "bitesense/lstm/checkpoint.hpp"
#include "json.hpp"
#include "test_util.hpp"

namespace bitesense::cli {
namespace {

namespace fs = std::filesystem;
using bitesense::testing::TempDir;

const fs::path kFixtures = BITESENSE_FIXTURE_DIR;

struct Result {
  int rc;
  std::string out;
  std::string err;
};

Result bitesense(std::vector<std::string> args) {
  args.insert(args.begin(), "bitesense");
  std::ostringstream out;
  std::ostringstream err;
  const int rc = run(args, out, err);
  return {rc, out.str(), err.str()};
}

nlohmann::json manifest_params(const fs::path& dir) {
  return nlohmann::json::parse(read_file(dir / "manifest.json"))["params"];
}

std::vector<std::string> fixture_ingest(const TempDir& dir) {
  return {"ingest", "--recording", (kFixtures / "recording.csv").string(), "--annotations",
          (kFixtures / "annotations.json").string(), "--out", (dir / "seg").string()};
}

TEST(Digest, KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Zip, ReadsStoredAndDeflatedArchives) {
  for (const char* name : {"upload_stored.zip", "upload_deflate.zip"}) {
    const auto members = read_zip(read_file(kFixtures / name));
    ASSERT_EQ(members.size(), 2u) << name;
    EXPECT_EQ(members[0].name, "session/annotations.json");
    EXPECT_EQ(members[1].data, read_file(kFixtures / "recording.csv"));
  }
}

TEST(Zip, WriteReadRoundTripAndCorruption) {
  const std::vector<ZipMember> in = {{"a.txt", "hello"}, {"b/c.bin", std::string(5000, '\x07')}, {"empty", ""}};
  std::string bytes = write_zip(in);
  const auto out = read_zip(bytes);
  ASSERT_EQ(out.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(out[i].name, in[i].name);
    EXPECT_EQ(out[i].data, in[i].data);
  }
  EXPECT_ERRC(read_zip("not a zip at all, definitely not"), Errc::kMalformedDescriptor);
  // Break the stored CRC of the first member.
  bytes[14] = static_cast<char>(bytes[14] ^ 0x55);
  const auto cd = bytes.find("PK\x01\x02");
  bytes[cd + 16] = static_cast<char>(bytes[cd + 16] ^ 0x55);
  EXPECT_ERRC(read_zip(bytes), Errc::kMalformedDescriptor);
}

TEST(Ingest, ConfirmedSpansBecomeSegments) {
  TempDir dir;
  const auto r = bitesense(fixture_ingest(dir));
  ASSERT_EQ(r.rc, 0) << r.err;
  EXPECT_NE(r.err.find("skipping unconfirmed span 2"), std::string::npos) << r.err;
  const auto index = nlohmann::json::parse(read_file(dir / "seg" / "segments.json"))["segments"];
  ASSERT_EQ(index.size(), 2u);
  EXPECT_EQ(index[0]["label"], "eating");
  EXPECT_EQ(index[1]["label"], "jogging");
  std::size_t csv_files = 0;
  for (const auto& e : fs::directory_iterator(dir / "seg")) csv_files += e.path().extension() == ".csv";
  EXPECT_EQ(csv_files, 2u);
  // Trimmed bounds: reported 3600..22800 with 400 ms trims.
  const auto seg = parse_recording(read_file(dir / "seg" / index[0]["file"].get<std::string>()));
  EXPECT_EQ(seg.samples.front().t_ms, 1700000000000 + 4000);
  EXPECT_EQ(seg.samples.back().t_ms, 1700000000000 + 22400);
}

TEST(Ingest, ZipInputMatchesLooseFiles) {
  TempDir dir;
  ASSERT_EQ(bitesense(fixture_ingest(dir)).rc, 0);
  ASSERT_EQ(bitesense({"ingest", "--zip", (kFixtures / "upload_deflate.zip").string(), "--out",
                       (dir / "segz").string()})
                .rc,
            0);
  EXPECT_EQ(read_file(dir / "seg" / "recording.0.eating.csv"),
            read_file(dir / "segz" / "upload_deflate.0.eating.csv"));
}

TEST(Ingest, MissingAnnotationLeavesNoOutput) {
  TempDir dir;
  const auto r = bitesense({"ingest", "--recording", (kFixtures / "recording.csv").string(),
                            "--annotations", (dir / "absent.json").string(), "--out",
                            (dir / "seg").string()});
  EXPECT_EQ(r.rc, kExitDataError);
  EXPECT_FALSE(fs::exists(dir / "seg"));
  for (const auto& e : fs::directory_iterator(dir.path())) ADD_FAILURE() << "left " << e.path();
}

TEST(Ingest, UnpairedFlagsAreAUsageError) {
  TempDir dir;
  const auto r = bitesense({"ingest", "--recording", (kFixtures / "recording.csv").string(), "--out",
                            (dir / "seg").string()});
  EXPECT_EQ(r.rc, kExitUsage);
}

TEST(Window, DefaultsAreRecordedAndRerunsAreByteIdentical) {
  TempDir dir;
  ASSERT_EQ(bitesense(fixture_ingest(dir)).rc, 0);
  const auto seg = (dir / "seg").string();
  const auto a = bitesense({"window", "--segments", seg, "--out", (dir / "a").string()});
  ASSERT_EQ(a.rc, 0) << a.err;
  const auto params = manifest_params(dir / "a");
  EXPECT_EQ(params["window_size"], 150);
  EXPECT_EQ(params["step"], 10);
  EXPECT_EQ(params["ratio"], 0.8);
  ASSERT_EQ(bitesense({"window", "--segments", seg, "--out", (dir / "b").string()}).rc, 0);
  for (const char* f : {"train.bwds", "test.bwds"}) {
    EXPECT_EQ(read_file(dir / "a" / f), read_file(dir / "b" / f)) << f;
  }
  const auto train = load_dataset(dir / "a" / "train.bwds");
  EXPECT_EQ(train.window_size, 150u);
  EXPECT_EQ(train.class_map.names, (std::vector<std::string>{"eating", "other"}));
}

TEST(Window, StepLargerThanWindowIsRejectedBeforeIo) {
  TempDir dir;
  const auto r = bitesense({"window", "--segments", (dir / "does-not-exist").string(), "--out",
                            (dir / "ds").string(), "--window_size", "50", "--step", "60"});
  EXPECT_EQ(r.rc, kExitUsage);
  EXPECT_NE(r.err.find("--step"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "ds"));
}

class TrainCommand : public ::testing::Test {
 protected:
  void SetUp() override {
    ASSERT_EQ(bitesense(fixture_ingest(dir_)).rc, 0);
    ASSERT_EQ(bitesense({"window", "--segments", (dir_ / "seg").string(), "--out", ds()}).rc, 0);
  }
  std::string ds() const { return (dir_ / "ds").string(); }
  std::vector<std::string> train_args(const std::string& out) const {
    return {"train", "--train", ds() + "/train.bwds", "--test", ds() + "/test.bwds", "--out",
            (dir_ / out).string()};
  }
  TempDir dir_;
};

TEST_F(TrainCommand, ZeroEpochsWritesTheInitialisationAndEchoesDefaults) {
  auto args = train_args("run");
  args.insert(args.end(), {"--epochs", "0", "--seed", "3"});
  const auto r = bitesense(args);
  ASSERT_EQ(r.rc, 0) << r.err;
  const auto params = manifest_params(dir_ / "run");
  EXPECT_EQ(params["learning_rate"], 0.0025);
  EXPECT_EQ(params["batch_size"], 1024);
  EXPECT_EQ(params["lambda"], 0.0015);
  EXPECT_EQ(params["epochs"], 0);
  const auto ck = lstm::load_checkpoint<float>(dir_ / "run" / "checkpoint.json");
  EXPECT_TRUE(ck.params.identical(lstm::init_params<float>(3, lstm::ModelDims{})));
  EXPECT_EQ(ck.window_size, 150u);
  EXPECT_EQ(read_file(dir_ / "run" / "history.csv"),
            "epoch,train_loss,train_acc,test_loss,test_acc,seconds\n");
  for (const char* f : {"report.txt", "report.json", "confusion.csv"}) {
    EXPECT_TRUE(fs::exists(dir_ / "run" / f)) << f;
  }
}

TEST_F(TrainCommand, DefaultEpochCountIsFifty) {
  const auto r = bitesense(train_args("run"));
  ASSERT_EQ(r.rc, 0) << r.err;
  EXPECT_EQ(manifest_params(dir_ / "run")["epochs"], 50);
  std::istringstream history(read_file(dir_ / "run" / "history.csv"));
  std::size_t lines = 0;
  for (std::string line; std::getline(history, line);) ++lines;
  EXPECT_EQ(lines, 51u);
}

TEST_F(TrainCommand, DoublePrecisionRunsAreReproducible) {
  for (const char* out : {"a", "b"}) {
    auto args = train_args(out);
    args.insert(args.end(), {"--precision", "64", "--seed", "7", "--epochs", "2", "--hidden", "16"});
    ASSERT_EQ(bitesense(args).rc, 0);
  }
  EXPECT_EQ(read_file(dir_ / "a" / "history.csv"), read_file(dir_ / "b" / "history.csv"));
  EXPECT_EQ(read_file(dir_ / "a" / "checkpoint.json"), read_file(dir_ / "b" / "checkpoint.json"));
  EXPECT_EQ(lstm::checkpoint_dtype(read_file(dir_ / "a" / "checkpoint.json")), "f64");
}

TEST_F(TrainCommand, ReplayFromManifestAndOverride) {
  auto args = train_args("a");
  args.insert(args.end(), {"--precision", "64", "--epochs", "1", "--hidden", "8"});
  ASSERT_EQ(bitesense(args).rc, 0);
  const std::string manifest = (dir_ / "a" / "manifest.json").string();
  ASSERT_EQ(bitesense({"train", "--config", manifest, "--out", (dir_ / "b").string()}).rc, 0);
  EXPECT_EQ(read_file(dir_ / "a" / "checkpoint.json"), read_file(dir_ / "b" / "checkpoint.json"));
  ASSERT_EQ(bitesense({"train", "--config", manifest, "--out", (dir_ / "c").string(), "--epochs", "2"}).rc,
            0);
  EXPECT_EQ(manifest_params(dir_ / "c")["epochs"], 2);
  EXPECT_EQ(manifest_params(dir_ / "c")["hidden"], 8);

  // A changed input makes the replay refuse to run.
  std::ofstream(ds() + "/test.bwds", std::ios::app) << "x";
  const auto r = bitesense({"train", "--config", manifest, "--out", (dir_ / "d").string()});
  EXPECT_EQ(r.rc, kExitDataError);
  EXPECT_FALSE(fs::exists(dir_ / "d"));
  // And a manifest from another command is a usage error.
  EXPECT_EQ(bitesense({"window", "--config", manifest}).rc, kExitUsage);
}

TEST_F(TrainCommand, EvalAndPredict) {
  auto args = train_args("run");
  args.insert(args.end(), {"--epochs", "1", "--hidden", "8", "--fc_units", "8"});
  ASSERT_EQ(bitesense(args).rc, 0);
  const std::string ck = (dir_ / "run" / "checkpoint.json").string();
  const auto e = bitesense({"eval", "--checkpoint", ck, "--dataset", ds() + "/test.bwds", "--out",
                            (dir_ / "eval").string()});
  ASSERT_EQ(e.rc, 0) << e.err;
  EXPECT_EQ(e.out, read_file(dir_ / "run" / "report.txt"));
  EXPECT_EQ(manifest_params(dir_ / "eval")["beta"], 1);

  const auto p = bitesense({"predict", "--checkpoint", ck, "--dataset", ds() + "/test.bwds"});
  ASSERT_EQ(p.rc, 0);
  const auto test = load_dataset(ds() + "/test.bwds");
  EXPECT_EQ(static_cast<std::size_t>(std::count(p.out.begin(), p.out.end(), '\n')), test.size() + 1);
  EXPECT_TRUE(p.out.starts_with("index,truth,predicted,p_eating,p_other\n"));

  // A dataset cut with another window size.
  ASSERT_EQ(bitesense({"window", "--segments", (dir_ / "seg").string(), "--out",
                       (dir_ / "ds100").string(), "--window_size", "100"})
                .rc,
            0);
  const auto bad = bitesense({"eval", "--checkpoint", ck, "--dataset",
                              (dir_ / "ds100" / "test.bwds").string()});
  EXPECT_EQ(bad.rc, kExitDataError);
  EXPECT_NE(bad.err.find("ShapeMismatch"), std::string::npos);
  EXPECT_NE(bad.err.find("150"), std::string::npos);
  EXPECT_NE(bad.err.find("100"), std::string::npos);
}

TEST(EvalCommand, GoldenReport) {
  const auto r = bitesense({"eval", "--checkpoint", (kFixtures / "eval" / "checkpoint.json").string(),
                            "--dataset", (kFixtures / "eval" / "test.bwds").string()});
  ASSERT_EQ(r.rc, 0) << r.err;
  EXPECT_EQ(r.out, read_file(kFixtures / "eval" / "report.txt"));
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(bitesense({}).rc, kExitUsage);
  EXPECT_EQ(bitesense({"frobnicate"}).rc, kExitUsage);
  EXPECT_EQ(bitesense({"train", "--train", "x"}).rc, kExitUsage);
  EXPECT_EQ(bitesense({"--help"}).rc, kExitOk);
}

TEST(Manifest, ReplayArgs) {
  Manifest m;
  m.command = "window";
  m.params = {{"window_size", 150}, {"ratio", 0.8}, {"keep_classes", false},
              {"classes", {"eating", "jogging"}}, {"positive", "eating"}};
  EXPECT_EQ(replay_args(m),
            (std::vector<std::string>{"--window_size", "150", "--ratio", "0.8", "--classes", "eating",
                                      "--classes", "jogging", "--positive", "eating"}));
  EXPECT_EQ(Manifest::parse(m.dump()).params, m.params);
  EXPECT_ERRC(Manifest::parse("{}"), Errc::kMalformedDescriptor);
}

}  // namespace
}  // namespace bitesense::cli
