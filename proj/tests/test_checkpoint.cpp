#include <gtest/gtest.h>

#include <filesystem>

#include "rsaqfs/nnsum.hpp"

using namespace rsaqfs;
using namespace rsaqfs::nnsum;
namespace fs = std::filesystem;

namespace {

ToyModel sample_model() {
  ToyModel m;
  m.vocab = text::Vocabulary({"alpha", "beta", ".", "gamma"});
  m.params = init_params({m.vocab.size(), 3, 4, 5, 2}, 77, 0.7, true);
  m.params.out_b[2] = 1.0 / 3.0;  // not exactly representable in decimal
  return m;
}

}  // namespace

TEST(Checkpoint, BitExactRoundTrip) {
  const auto m = sample_model();
  const auto back = deserialize_model(serialize_model(m));
  EXPECT_TRUE(back == m);
  EXPECT_EQ(serialize_model(back), serialize_model(m));
}

TEST(Checkpoint, SaveLoadFile) {
  const auto path = fs::temp_directory_path() / "rsaqfs_ckpt_test.bin";
  const auto m = sample_model();
  save_model(m, path);
  EXPECT_TRUE(load_model(path) == m);
  fs::remove(path);
  EXPECT_THROW(load_model(path), ConfigError);
}

TEST(Checkpoint, CorruptInputsRejected) {
  const std::string good = serialize_model(sample_model());
  EXPECT_THROW(deserialize_model("not a checkpoint at all"), ParseError);
  EXPECT_THROW(deserialize_model(good.substr(0, good.size() - 3)), ParseError);
  EXPECT_THROW(deserialize_model(good + "x"), ParseError);
  std::string bad_version = good;
  bad_version[8] = 9;
  EXPECT_THROW(deserialize_model(bad_version), ParseError);
}

TEST(Checkpoint, DecodingUnchangedAfterReload) {
  const auto m = sample_model();
  const auto back = deserialize_model(serialize_model(m));
  const std::vector<int> ids = {4, 5, 6, 7};
  EXPECT_EQ(generate(ids, std::nullopt, m.params, {20, false}).ids,
            generate(ids, std::nullopt, back.params, {20, false}).ids);
}
