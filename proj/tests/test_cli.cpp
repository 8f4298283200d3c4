#include <gtest/gtest.h>

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "oadino/cli.hpp"
#include "oadino/util/binary_io.hpp"

namespace fs = std::filesystem;
using oadino::cli::run;

namespace {

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "oadino");
  return run(args);
}

// Captures std::cout for the duration of a call.
std::string captured(const std::vector<std::string>& args, int* code) {
  std::ostringstream out;
  auto* old = std::cout.rdbuf(out.rdbuf());
  *code = cli(args);
  std::cout.rdbuf(old);
  return out.str();
}

std::vector<std::pair<std::string, oadino::io::Bytes>> snapshot(const fs::path& dir) {
  std::vector<std::pair<std::string, oadino::io::Bytes>> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out.emplace_back(fs::relative(e.path(), dir).generic_string(), oadino::io::read_file(e.path()));
  }
  std::sort(out.begin(), out.end());
  return out;
}

class Pipeline : public ::testing::Test {
 protected:
  static fs::path root() { return fs::temp_directory_path() / "oadino_test_cli"; }

  static void SetUpTestSuite() {
    fs::remove_all(root());
    const std::string r = root().string();
    ASSERT_EQ(cli({"gen-synthetic", "--out", r + "/corpus", "--seed", "7", "--n", "72", "--train", "12", "--queries",
                   "12"}),
              0);
    ASSERT_EQ(cli({"segment", "--manifest", r + "/corpus/train.jsonl", "--manifest",
                   r + "/corpus/validation-query.jsonl", "--manifest", r + "/corpus/candidates.jsonl", "--t", "50",
                   "--out", r + "/seg", "--visualize"}),
              0);
    ASSERT_EQ(cli({"extract-patches", "--manifest", r + "/corpus/train.jsonl", "--masks", r + "/seg/masks", "--out",
                   r + "/patches"}),
              0);
    ASSERT_EQ(cli({"train-vae", "--patches", r + "/patches", "--out", r + "/vae", "--epochs", "1", "--max-patches",
                   "128"}),
              0);
  }
};

}  // namespace

TEST(Cli, UsageErrors) {
  int code = -1;
  captured({}, &code);
  EXPECT_EQ(code, oadino::cli::kUsage);
  captured({"no-such-command"}, &code);
  EXPECT_EQ(code, oadino::cli::kUsage);
  captured({"segment", "--out", "x"}, &code);
  EXPECT_EQ(code, oadino::cli::kUsage);
  captured({"embed", "--manifest", "m", "--out", "o", "--mode", "other"}, &code);
  EXPECT_EQ(code, oadino::cli::kUsage);
}

TEST(Cli, HelpListsDefaults) {
  int code = -1;
  const std::string ev = captured({"evaluate", "--help"}, &code);
  EXPECT_EQ(code, 0);
  for (const char* flag : {"--k", "--trials", "--queries", "--candidates", "--seed", "--families", "--base"}) {
    EXPECT_NE(ev.find(flag), std::string::npos) << flag;
  }
  EXPECT_NE(ev.find("5000"), std::string::npos);
  const std::string tr = captured({"train-vae", "--help"}, &code);
  EXPECT_NE(tr.find("0.0001"), std::string::npos);
  EXPECT_NE(tr.find("32"), std::string::npos);
  const std::string sg = captured({"segment", "--help"}, &code);
  EXPECT_NE(sg.find("50"), std::string::npos);
}

TEST(Cli, EmptyManifestIsADataError) {
  const fs::path dir = fs::temp_directory_path() / "oadino_test_cli_empty";
  fs::remove_all(dir);
  fs::create_directories(dir);
  oadino::io::write_text(dir / "empty.jsonl", "");
  testing::internal::CaptureStderr();
  EXPECT_EQ(cli({"segment", "--manifest", (dir / "empty.jsonl").string(), "--out", (dir / "out").string()}),
            oadino::cli::kDataError);
  EXPECT_NE(testing::internal::GetCapturedStderr().find("empty manifest"), std::string::npos);

  oadino::io::write_text(dir / "header.jsonl", "{\"format\":\"oadino-manifest\",\"version\":1,\"split\":\"train\"}\n");
  testing::internal::CaptureStderr();
  EXPECT_EQ(cli({"segment", "--manifest", (dir / "header.jsonl").string(), "--out", (dir / "out").string()}),
            oadino::cli::kDataError);
  EXPECT_NE(testing::internal::GetCapturedStderr().find("empty manifest"), std::string::npos);
}

TEST(Cli, MissingFilesAreDataErrors) {
  testing::internal::CaptureStderr();
  EXPECT_EQ(cli({"report", "--report", "/nonexistent/report.json"}), oadino::cli::kDataError);
  EXPECT_EQ(cli({"train-vae", "--patches", "/nonexistent", "--out", "/tmp/oadino_test_cli_x"}), oadino::cli::kDataError);
  testing::internal::GetCapturedStderr();
}

TEST_F(Pipeline, SegmentationOutputs) {
  const fs::path r = root();
  EXPECT_TRUE(fs::exists(r / "seg/masks/s000000.oamk"));
  EXPECT_TRUE(fs::exists(r / "seg/masks_first/s000071.oamk"));
  EXPECT_TRUE(fs::exists(r / "seg/masks_vis/s000003.ppm"));
  auto j = nlohmann::json::parse(oadino::io::read_text(r / "seg/segment.json"));
  EXPECT_EQ(j["t"], 50);
  EXPECT_FALSE(j["batches"].empty());
  EXPECT_TRUE(fs::exists(r / "vae/vae.oavm"));
  EXPECT_TRUE(fs::exists(r / "vae/loss_trace.csv"));
}

TEST_F(Pipeline, EmbedRetrieveEvaluateReport) {
  const std::string r = root().string();
  const std::string q = r + "/corpus/validation-query.jsonl", c = r + "/corpus/candidates.jsonl";
  ASSERT_EQ(cli({"embed", "--manifest", q, "--manifest", c, "--masks", r + "/seg/masks", "--model", r + "/vae/vae.oavm",
                 "--out", r + "/reps"}),
            0);
  ASSERT_EQ(cli({"embed", "--manifest", q, "--manifest", c, "--mode", "global", "--out", r + "/reps_g"}), 0);
  ASSERT_EQ(cli({"retrieve", "--query-manifest", q, "--candidate-manifest", c, "--reps", r + "/reps", "--out",
                 r + "/ranked"}),
            0);
  const std::string csv = oadino::io::read_text(r + "/ranked/s000012.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "rank,candidate_id,score");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 49);

  const std::vector<std::string> ev = {"evaluate", "--query-manifest", q, "--candidate-manifest", c, "--reps",
                                       r + "/reps", "--trials", "2", "--queries", "6", "--candidates", "30",
                                       "--masks", r + "/seg/masks", "--contact-sheets", "2"};
  auto with_out = [&](const std::string& out) {
    auto a = ev;
    a.push_back("--out");
    a.push_back(out);
    return a;
  };
  ASSERT_EQ(cli(with_out(r + "/ev1")), 0);
  ASSERT_EQ(cli(with_out(r + "/ev2")), 0);
  EXPECT_EQ(snapshot(r + "/ev1"), snapshot(r + "/ev2"));
  auto rep = nlohmann::json::parse(oadino::io::read_text(r + "/ev1/report.json"));
  EXPECT_EQ(rep["trials"].size(), 2u);
  EXPECT_EQ(rep["summary"].size(), 10u);
  EXPECT_TRUE(fs::exists(r + "/ev1/report.csv"));
  EXPECT_EQ(std::distance(fs::directory_iterator(r + "/ev1/contact"), fs::directory_iterator{}), 2);

  ASSERT_EQ(cli({"evaluate", "--query-manifest", q, "--candidate-manifest", c, "--reps", r + "/reps_g", "--trials", "2",
                 "--queries", "6", "--candidates", "30", "--out", r + "/evg", "--contact-sheets", "0"}),
            0);
  int code = -1;
  const std::string text = captured({"report", "--report", r + "/ev1/report.json", "--baseline", r + "/evg/report.json"}, &code);
  EXPECT_EQ(code, 0);
  EXPECT_NE(text.find("P3+C"), std::string::npos);
  EXPECT_NE(text.find("baseline"), std::string::npos);

  // Asking for more candidates than exist is a configuration error.
  testing::internal::CaptureStderr();
  EXPECT_EQ(cli({"evaluate", "--query-manifest", q, "--candidate-manifest", c, "--reps", r + "/reps", "--out",
                 r + "/ev_bad"}),
            oadino::cli::kDataError);
  testing::internal::GetCapturedStderr();
}

TEST_F(Pipeline, SubcommandsAreIdempotent) {
  const std::string r = root().string();
  ASSERT_EQ(cli({"gen-synthetic", "--out", r + "/corpus2", "--seed", "7", "--n", "72", "--train", "12", "--queries",
                 "12"}),
            0);
  EXPECT_EQ(snapshot(r + "/corpus"), snapshot(r + "/corpus2"));
  ASSERT_EQ(cli({"segment", "--manifest", r + "/corpus/train.jsonl", "--manifest", r + "/corpus/validation-query.jsonl",
                 "--manifest", r + "/corpus/candidates.jsonl", "--t", "50", "--out", r + "/seg2", "--visualize",
                 "--threads", "2"}),
            0);
  EXPECT_EQ(snapshot(r + "/seg"), snapshot(r + "/seg2"));
  ASSERT_EQ(cli({"mask-apply", "--manifest", r + "/corpus/train.jsonl", "--masks", r + "/seg/masks", "--out",
                 r + "/masked"}),
            0);
  EXPECT_TRUE(fs::exists(r + "/masked/s000000.ppm"));
  ASSERT_EQ(cli({"train-vae", "--patches", r + "/patches", "--out", r + "/vae2", "--epochs", "1", "--max-patches",
                 "128"}),
            0);
  EXPECT_EQ(snapshot(r + "/vae"), snapshot(r + "/vae2"));
}

TEST_F(Pipeline, ImportBuildsAManifest) {
  const std::string r = root().string();
  ASSERT_EQ(cli({"import", "--images", r + "/corpus/images", "--embeddings", r + "/corpus/embeddings", "--globals",
                 r + "/corpus/globals_masked", "--annotations", r + "/corpus/annotations.jsonl", "--out",
                 r + "/imported.jsonl"}),
            0);
  const std::string text = oadino::io::read_text(r + "/imported.jsonl");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 73);
}
