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

#include <algorithm>
#include <set>
#include <thread>

#include "bitesense/cli/service.hpp"
#include "bitesense/cli/zip.hpp"
#include "bitesense/dataset_io.hpp"
#include "httplib.h"
#include "json.hpp"
#include "test_util.hpp"

namespace bitesense::cli {
namespace {

namespace fs = std::filesystem;
using bitesense::testing::spaced_samples;
using bitesense::testing::TempDir;

const fs::path kFixtures = BITESENSE_FIXTURE_DIR;

TEST(UniqueName, KeepsExtensionAndPadsSuffix) {
  EXPECT_EQ(unique_name(1700000000123, 0xab, "session.zip"), "1700000000123-0000ab.zip");
  EXPECT_EQ(unique_name(5, 0xffffffff, "x"), "5-ffffff");
}

TEST(Trace, ShortInputIsReturnedVerbatim) {
  const auto s = spaced_samples(100);
  const auto tr = downsample_trace(s, 5000);
  ASSERT_EQ(tr.t.size(), 100u);
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_EQ(tr.t[i], s[i].t_ms);
    EXPECT_EQ(tr.x[i], s[i].x);
  }
}

TEST(Trace, LongInputKeepsExtremaWithinBudget) {
  auto s = spaced_samples(200000);
  s[123457].y = 1e6;
  s[77].z = -1e6;
  const auto tr = downsample_trace(s, 5000);
  EXPECT_LE(tr.t.size(), 5000u);
  EXPECT_EQ(tr.source_samples, 200000u);
  EXPECT_TRUE(std::is_sorted(tr.t.begin(), tr.t.end()));
  EXPECT_EQ(tr.t.front(), s.front().t_ms);
  EXPECT_EQ(tr.t.back(), s.back().t_ms);
  EXPECT_EQ(*std::max_element(tr.y.begin(), tr.y.end()), 1e6);
  EXPECT_EQ(*std::min_element(tr.z.begin(), tr.z.end()), -1e6);
  EXPECT_EQ(*std::max_element(tr.x.begin(), tr.x.end()), 199999.0);
}

TEST(SplitUpload, AcceptsEitherMemberOrderAndRejectsJunk) {
  const std::string rec = read_file(kFixtures / "recording.csv");
  const std::string ann = read_file(kFixtures / "annotations.json");
  const auto a = split_upload(write_zip({{"r.csv", rec}, {"a.json", ann}}), default_class_set());
  const auto b = split_upload(write_zip({{"a.json", ann}, {"r.csv", rec}}), default_class_set());
  EXPECT_EQ(a.recording, rec);
  EXPECT_EQ(b.annotations, ann);
  EXPECT_ERRC(split_upload(write_zip({{"r.csv", rec}}), default_class_set()),
              Errc::kMalformedDescriptor);
  EXPECT_ERRC(split_upload(write_zip({{"r.csv", rec}, {"b.csv", rec}}), default_class_set()),
              Errc::kMalformedDescriptor);
}

class Service : public ::testing::Test {
 protected:
  void SetUp() override {
    fs::create_directories(dir_ / "ui");
    std::ofstream(dir_ / "ui" / "index.html") << "<html>ui</html>\n";
    store_ = std::make_unique<UploadStore>(dir_ / "store");
    register_routes(server_, *store_, dir_ / "ui");
    port_ = server_.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  void TearDown() override {
    server_.stop();
    thread_.join();
  }
  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(30, 0);
    return c;
  }
  httplib::Result upload(const std::string& name, const std::string& bytes) const {
    httplib::MultipartFormDataItems items = {{"file", bytes, name, "application/zip"}};
    return client().Post("/upload", items);
  }
  std::string first_id() const { return store_->recording_ids().at(0); }

  TempDir dir_;
  std::unique_ptr<UploadStore> store_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

TEST_F(Service, ConcurrentUploadsAreAllKept) {
  const std::string zip = read_file(kFixtures / "upload_deflate.zip");
  constexpr int kClients = 8;
  std::vector<std::thread> clients;
  std::vector<int> status(kClients, 0);
  for (int i = 0; i < kClients; ++i) {
    clients.emplace_back([&, i] {
      const auto r = upload("session.zip", zip);
      status[static_cast<std::size_t>(i)] = r ? r->status : -1;
    });
  }
  for (auto& t : clients) t.join();
  for (int s : status) EXPECT_EQ(s, 201);

  const auto log = store_->log();
  ASSERT_EQ(log.size(), static_cast<std::size_t>(kClients));
  std::set<std::string> names;
  for (const auto& r : log) {
    names.insert(r.stored);
    EXPECT_EQ(r.original, "session.zip");
    EXPECT_EQ(r.bytes, zip.size());
    EXPECT_EQ(read_file(dir_ / "store" / "uploads" / r.stored), zip);
  }
  EXPECT_EQ(names.size(), static_cast<std::size_t>(kClients));
  EXPECT_EQ(store_->recording_ids().size(), static_cast<std::size_t>(kClients));

  const auto listing = client().Get("/recordings");
  ASSERT_TRUE(listing);
  EXPECT_EQ(nlohmann::json::parse(listing->body)["recordings"].size(),
            static_cast<std::size_t>(kClients));
}

TEST_F(Service, RawBodyUploadUsesQueryFileName) {
  const auto r = client().Post("/upload?filename=raw.zip", read_file(kFixtures / "upload_stored.zip"),
                               "application/zip");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 201) << r->body;
  EXPECT_TRUE(nlohmann::json::parse(r->body)["stored"].get<std::string>().ends_with(".zip"));
}

TEST_F(Service, AnnotationsRoundTripByteForByte) {
  ASSERT_EQ(upload("s.zip", read_file(kFixtures / "upload_stored.zip"))->status, 201);
  const std::string path = "/recordings/" + first_id() + "/annotations";
  const auto before = client().Get(path);
  ASSERT_TRUE(before);
  EXPECT_EQ(before->body, read_file(kFixtures / "annotations.json"));

  // Odd spacing and key order must be preserved exactly.
  const std::string doc =
      "{ \"spans\" : [ {\"label\":\"Eating\",\"start_ms\":1700000003600,\"stop_ms\":1700000022800,"
      "\"trim_head_ms\":0,\"trim_tail_ms\":0,\"confirmed\":true} ] }\n";
  const auto put = client().Put(path, doc, "application/json");
  ASSERT_TRUE(put);
  ASSERT_EQ(put->status, 204) << put->body;
  EXPECT_EQ(client().Get(path)->body, doc);

  const auto bad = client().Put(path, "{\"spans\": [{\"label\": \"dancing\"}]}", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
  EXPECT_EQ(client().Get(path)->body, doc);
}

TEST_F(Service, MalformedUploadIsRejectedAndServiceStaysUp) {
  const auto r = upload("junk.zip", "this is not a zip archive");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 400);
  EXPECT_TRUE(store_->log().empty());
  EXPECT_FALSE(fs::exists(dir_ / "store" / "uploads") &&
               !fs::is_empty(dir_ / "store" / "uploads"));
  EXPECT_EQ(upload("ok.zip", read_file(kFixtures / "upload_deflate.zip"))->status, 201);
}

TEST_F(Service, UnknownRecordingIs404) {
  EXPECT_EQ(client().Get("/recordings/nope/trace")->status, 404);
  EXPECT_EQ(client().Get("/recordings/nope/annotations")->status, 404);
  EXPECT_EQ(client().Put("/recordings/nope/annotations", "{}", "application/json")->status, 404);
}

TEST_F(Service, TraceWindowing) {
  ASSERT_EQ(upload("s.zip", read_file(kFixtures / "upload_deflate.zip"))->status, 201);
  const std::string base = "/recordings/" + first_id() + "/trace";
  const auto full = nlohmann::json::parse(client().Get(base)->body);
  EXPECT_EQ(full["t"].size(), 1200u);
  const auto part =
      nlohmann::json::parse(client().Get(base + "?start_ms=1700000004000&stop_ms=1700000007960")->body);
  ASSERT_EQ(part["t"].size(), 100u);
  EXPECT_EQ(part["t"][0], 1700000004000);
  const auto small = nlohmann::json::parse(client().Get(base + "?max_points=100")->body);
  EXPECT_LE(small["t"].size(), 100u);
  EXPECT_EQ(client().Get(base + "?max_points=abc")->status, 400);
}

TEST_F(Service, ServesStaticUi) {
  const auto r = client().Get("/index.html");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(r->body, "<html>ui</html>\n");
}

}  // namespace
}  // namespace bitesense::cli
