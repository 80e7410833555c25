#include <unistd.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include "doctest.h"
#include "pbrs/error.hpp"
#include "pbrs/stripe_io.hpp"

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  explicit TempDir(const char* tag) {
    path = fs::temp_directory_path() /
           (std::string("pbrs-test-") + tag + "-" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::vector<std::vector<std::uint8_t>> random_blocks(int count, std::uint64_t size,
                                                     std::mt19937_64& rng) {
  std::vector<std::vector<std::uint8_t>> blocks(count);
  for (auto& block : blocks) {
    block.resize(size);
    for (auto& b : block) b = static_cast<std::uint8_t>(rng());
  }
  return blocks;
}

// Delegates to a FileBlockReader while recording every call, so tests can
// check the ledger against what was actually read.
struct SpyReader : pbrs::BlockReader {
  pbrs::FileBlockReader inner;
  std::vector<pbrs::TransferLedger::Entry> calls;

  SpyReader(const pbrs::StripeManifest& manifest, fs::path dir)
      : inner(manifest, std::move(dir)) {}

  bool readable(int index) override { return inner.readable(index); }
  std::vector<std::uint8_t> read_block(int index) override {
    auto bytes = inner.read_block(index);
    calls.push_back({index, pbrs::ReadKind::full, bytes.size()});
    return bytes;
  }
  std::vector<std::uint8_t> read_half(int index, pbrs::Sub sub) override {
    auto bytes = inner.read_half(index, sub);
    calls.push_back({index,
                     sub == pbrs::Sub::a ? pbrs::ReadKind::half_a : pbrs::ReadKind::half_b,
                     bytes.size()});
    return bytes;
  }
};

void flip_byte(const fs::path& file, std::uint64_t offset) {
  std::fstream f(file, std::ios::binary | std::ios::in | std::ios::out);
  REQUIRE(f.good());
  f.seekg(static_cast<std::streamoff>(offset));
  char b = 0;
  f.read(&b, 1);
  f.seekp(static_cast<std::streamoff>(offset));
  b = static_cast<char>(b ^ 0x01);
  f.write(&b, 1);
}

pbrs::BlockSetLayout pb_layout(std::uint64_t block_size) {
  pbrs::BlockSetLayout layout;
  layout.block_size = block_size;
  layout.params = pbrs::CodeParams(10, 4);
  layout.codec = pbrs::Codec::piggybacked_rs;
  layout.partition = pbrs::GroupPartition{{{0, 1, 2, 3}, {4, 5, 6}, {7, 8, 9}}};
  return layout;
}

}  // namespace

TEST_SUITE("stripe_io") {

TEST_CASE("codec names round-trip") {
  CHECK(pbrs::codec_name(pbrs::Codec::rs) == "rs");
  CHECK(pbrs::codec_name(pbrs::Codec::piggybacked_rs) == "piggybacked-rs");
  CHECK(pbrs::codec_from_name("rs") == pbrs::Codec::rs);
  CHECK(pbrs::codec_from_name("piggybacked-rs") == pbrs::Codec::piggybacked_rs);
  CHECK(pbrs::codec_from_name("pb") == pbrs::Codec::piggybacked_rs);
  CHECK_THROWS_AS(pbrs::codec_from_name("raid5"), pbrs::Error);
}

TEST_CASE("write_stripe persists blocks and a loadable manifest") {
  TempDir dir("write");
  std::mt19937_64 rng(31);
  const auto layout = pb_layout(4096);
  const auto data = random_blocks(10, 4096, rng);

  const pbrs::StripeManifest manifest =
      pbrs::write_stripe(data, layout, "s-000001", 17, dir.path);
  CHECK(manifest.stripe_id == "s-000001");
  CHECK(manifest.pad_len == 17);
  REQUIRE(manifest.blocks.size() == 14);
  for (int i = 0; i < 14; ++i) {
    CHECK(manifest.blocks[i].index == i);
    CHECK(manifest.blocks[i].role == (i < 10 ? "data" : "parity"));
    const fs::path file = dir.path / manifest.blocks[i].path;
    REQUIRE(fs::exists(file));
    CHECK(fs::file_size(file) == 4096);
  }

  const pbrs::StripeManifest loaded =
      pbrs::load_manifest(dir.path / "s-000001.manifest.json");
  CHECK(loaded.stripe_id == manifest.stripe_id);
  CHECK(loaded.codec == manifest.codec);
  CHECK(loaded.params == manifest.params);
  CHECK(loaded.block_size == manifest.block_size);
  CHECK(loaded.pad_len == manifest.pad_len);
  CHECK(loaded.partition.groups == manifest.partition.groups);
  for (int i = 0; i < 14; ++i) {
    CHECK(loaded.blocks[i].crc32 == manifest.blocks[i].crc32);
    CHECK(loaded.blocks[i].path == manifest.blocks[i].path);
  }

  CHECK_THROWS_AS(pbrs::load_manifest(dir.path / "nope.manifest.json"), pbrs::IoError);
}

TEST_CASE("fresh stripes verify clean, exhaustively and sampled") {
  TempDir dir("verify");
  std::mt19937_64 rng(32);
  for (pbrs::Codec codec : {pbrs::Codec::rs, pbrs::Codec::piggybacked_rs}) {
    auto layout = pb_layout(2048);
    layout.codec = codec;
    const auto data = random_blocks(10, 2048, rng);
    const auto manifest = pbrs::write_stripe(data, layout, pbrs::codec_name(codec),
                                             0, dir.path);
    pbrs::FileBlockReader reader(manifest, dir.path);
    CHECK(pbrs::verify_stripe(manifest, reader).empty());
    CHECK(pbrs::verify_stripe(manifest, reader, pbrs::kernels::Exec::serial).empty());
    CHECK(pbrs::verify_stripe(manifest, reader, pbrs::kernels::Exec::parallel, 64, 9)
              .empty());
  }
}

TEST_CASE("verify localizes a corrupted piggybacked parity byte") {
  TempDir dir("corrupt");
  std::mt19937_64 rng(33);
  const auto layout = pb_layout(2048);
  const auto data = random_blocks(10, 2048, rng);
  const auto manifest = pbrs::write_stripe(data, layout, "c", 0, dir.path);

  // parity index 11 is parity 1, the carrier of group 0; corrupt substripe b
  // at position 300 (byte offset 601 in the interleaved block)
  flip_byte(dir.path / manifest.blocks[11].path, 2 * 300 + 1);
  pbrs::FileBlockReader reader(manifest, dir.path);
  const auto violations = pbrs::verify_stripe(manifest, reader);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].parity_index == 1);
  CHECK(violations[0].sub == pbrs::Sub::b);
  CHECK(violations[0].position == 300);
}

TEST_CASE("verify fans out a corrupted data byte to every dependent equation") {
  TempDir dir("fanout");
  std::mt19937_64 rng(34);
  const auto layout = pb_layout(2048);
  const auto data = random_blocks(10, 2048, rng);
  const auto manifest = pbrs::write_stripe(data, layout, "f", 0, dir.path);

  // node 2 is in group 0: its substripe-a byte feeds the four a-parities and
  // the piggyback on parity 1's b-half
  flip_byte(dir.path / manifest.blocks[2].path, 2 * 5);
  pbrs::FileBlockReader reader(manifest, dir.path);
  const auto violations = pbrs::verify_stripe(manifest, reader);
  REQUIRE(violations.size() == 5);
  for (const auto& v : violations) CHECK(v.position == 5);
  int a_count = 0, b_count = 0;
  for (const auto& v : violations) (v.sub == pbrs::Sub::a ? a_count : b_count)++;
  CHECK(a_count == 4);
  CHECK(b_count == 1);
}

TEST_CASE("repair ledgers are exact: RS reads k blocks, piggyback reads k+|g| halves") {
  TempDir dir("ledger");
  std::mt19937_64 rng(35);
  const std::uint64_t bs = 4096;

  auto rs_layout = pb_layout(bs);
  rs_layout.codec = pbrs::Codec::rs;
  rs_layout.partition = {};
  const auto data = random_blocks(10, bs, rng);
  const auto rs_manifest = pbrs::write_stripe(data, rs_layout, "rs", 0, dir.path);
  const auto pb_manifest = pbrs::write_stripe(data, pb_layout(bs), "pb", 0, dir.path);

  SUBCASE("rs data block") {
    SpyReader spy(rs_manifest, dir.path);
    const auto result = pbrs::repair_block(rs_manifest, 3, spy, pbrs::kernels::Exec::serial);
    CHECK(result.ledger.total() == 10 * bs);
    REQUIRE(result.ledger.entries.size() == 10);
    for (const auto& e : result.ledger.entries) {
      CHECK(e.kind == pbrs::ReadKind::full);
      CHECK(e.bytes == bs);
      CHECK(e.index != 3);
    }
    CHECK(spy.calls.size() == 10);
    CHECK(result.block == data[3]);
  }

  SUBCASE("piggybacked data block in the 4-group costs exactly 70% of RS") {
    SpyReader spy(pb_manifest, dir.path);
    const auto result = pbrs::repair_block(pb_manifest, 1, spy);
    CHECK(result.ledger.total() == 14 * (bs / 2));  // (k + |g|) halves
    CHECK(result.ledger.total() * 10 == 7 * (10 * bs));
    REQUIRE(result.ledger.entries.size() == 14);
    int a_halves = 0, b_halves = 0;
    for (const auto& e : result.ledger.entries) {
      CHECK(e.bytes == bs / 2);
      (e.kind == pbrs::ReadKind::half_a ? a_halves : b_halves)++;
    }
    CHECK(a_halves == 3);   // groupmates 0, 2, 3
    CHECK(b_halves == 11);  // nine data + parity 0 + the group's parity
    CHECK(result.block == data[1]);
    // the ledger matches the reads that actually happened
    REQUIRE(spy.calls.size() == result.ledger.entries.size());
    for (std::size_t i = 0; i < spy.calls.size(); ++i) {
      CHECK(spy.calls[i].index == result.ledger.entries[i].index);
      CHECK(spy.calls[i].bytes == result.ledger.entries[i].bytes);
    }
  }

  SUBCASE("piggybacked data block in a 3-group costs k+3 halves") {
    SpyReader spy(pb_manifest, dir.path);
    const auto result = pbrs::repair_block(pb_manifest, 8, spy);
    CHECK(result.ledger.total() == 13 * (bs / 2));
    CHECK(result.block == data[8]);
  }

  SUBCASE("piggybacked parity block falls back to 2k halves") {
    SpyReader spy(pb_manifest, dir.path);
    const auto result = pbrs::repair_block(pb_manifest, 12, spy);
    CHECK(result.ledger.total() == 20 * (bs / 2));
    pbrs::FileBlockReader plain(pb_manifest, dir.path);
    const auto original = plain.read_block(12);
    CHECK(result.block == original);
  }
}

TEST_CASE("repair restores byte-identical blocks for every index of both codecs") {
  TempDir dir("roundtrip");
  std::mt19937_64 rng(36);
  const std::uint64_t bs = 1024;
  for (pbrs::Codec codec : {pbrs::Codec::rs, pbrs::Codec::piggybacked_rs}) {
    auto layout = pb_layout(bs);
    layout.codec = codec;
    const auto data = random_blocks(10, bs, rng);
    const auto manifest =
        pbrs::write_stripe(data, layout, pbrs::codec_name(codec), 0, dir.path);
    pbrs::FileBlockReader reference(manifest, dir.path);
    std::vector<std::vector<std::uint8_t>> originals;
    for (int i = 0; i < 14; ++i) originals.push_back(reference.read_block(i));

    for (int missing = 0; missing < 14; ++missing) {
      const fs::path file = dir.path / manifest.blocks[missing].path;
      std::vector<std::uint8_t> saved = originals[static_cast<std::size_t>(missing)];
      fs::remove(file);
      pbrs::FileBlockReader reader(manifest, dir.path);
      CHECK(!reader.readable(missing));
      const auto result = pbrs::repair_block(manifest, missing, reader);
      CHECK(result.block == saved);
      std::ofstream out(file, std::ios::binary);
      out.write(reinterpret_cast<const char*>(result.block.data()),
                static_cast<std::streamsize>(result.block.size()));
    }
  }
}

TEST_CASE("a corrupted source makes repair fail loudly instead of returning junk") {
  TempDir dir("poison");
  std::mt19937_64 rng(37);
  const auto layout = pb_layout(2048);
  const auto data = random_blocks(10, 2048, rng);
  const auto manifest = pbrs::write_stripe(data, layout, "p", 0, dir.path);

  flip_byte(dir.path / manifest.blocks[5].path, 2 * 7 + 1);  // b-half of node 5
  pbrs::FileBlockReader reader(manifest, dir.path);
  CHECK_THROWS_AS(pbrs::repair_block(manifest, 1, reader), pbrs::CorruptSource);
}

TEST_CASE("unrecoverable when fewer than k blocks survive") {
  TempDir dir("thin");
  std::mt19937_64 rng(38);
  const auto layout = pb_layout(512);
  const auto data = random_blocks(10, 512, rng);
  const auto manifest = pbrs::write_stripe(data, layout, "t", 0, dir.path);
  for (int i = 0; i < 5; ++i) fs::remove(dir.path / manifest.blocks[i].path);
  pbrs::FileBlockReader reader(manifest, dir.path);
  CHECK_THROWS_AS(pbrs::repair_block(manifest, 0, reader), pbrs::Unrecoverable);
}

TEST_CASE("file encode, per-block repair, reassemble round-trip") {
  TempDir dir("file");
  std::mt19937_64 rng(39);
  std::vector<std::uint8_t> payload(100'000);
  for (auto& b : payload) b = static_cast<std::uint8_t>(rng());
  const fs::path input = dir.path / "input.bin";
  {
    std::ofstream out(input, std::ios::binary);
    out.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size()));
  }

  auto layout = pb_layout(4096);
  const pbrs::FileManifest fm = pbrs::encode_file(input, dir.path, layout, "demo");
  CHECK(fm.file_size == payload.size());
  // 100000 bytes / (10 * 4096) per stripe -> 3 stripes
  REQUIRE(fm.stripe_ids.size() == 3);

  const pbrs::FileManifest loaded = pbrs::load_file_manifest(dir.path / "demo.file.json");
  CHECK(loaded.file_size == fm.file_size);
  CHECK(loaded.stripe_ids == fm.stripe_ids);
  CHECK(loaded.layout.partition.groups == layout.partition.groups);

  CHECK(pbrs::reassemble_file(loaded, dir.path) == payload);

  // knock out one block per stripe and repair through the file manifests
  for (const auto& stripe_id : loaded.stripe_ids) {
    const auto manifest = pbrs::load_manifest(dir.path / (stripe_id + ".manifest.json"));
    const int missing = 7;
    fs::remove(dir.path / manifest.blocks[missing].path);
    pbrs::FileBlockReader reader(manifest, dir.path);
    const auto result = pbrs::repair_block(manifest, missing, reader);
    std::ofstream out(dir.path / manifest.blocks[missing].path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(result.block.data()),
              static_cast<std::streamsize>(result.block.size()));
  }
  CHECK(pbrs::reassemble_file(loaded, dir.path) == payload);
}

TEST_CASE("layout validation") {
  auto layout = pb_layout(4097);  // odd size cannot interleave halves
  CHECK_THROWS_AS(layout.validate(), pbrs::DimensionMismatch);
  layout.block_size = 4096;
  CHECK_NOTHROW(layout.validate());
  layout.partition.groups[0].push_back(4);  // node 4 already in group 1
  CHECK_THROWS_AS(layout.validate(), pbrs::DimensionMismatch);
  layout.partition.groups[0].pop_back();
  layout.partition.groups.push_back({4});  // exceeds piggybackable parity count
  CHECK_THROWS_AS(layout.validate(), pbrs::NoPiggybackParity);
}

}  // TEST_SUITE
