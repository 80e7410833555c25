#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pbrs/error.hpp"
#include "pbrs/kernels.hpp"
#include "pbrs/piggyback.hpp"
#include "pbrs/rs_code.hpp"

namespace pbrs {

enum class Codec { rs, piggybacked_rs };

std::string codec_name(Codec codec);
Codec codec_from_name(const std::string& name);

// How blocks of one stripe are sized and coded. Piggybacked blocks
// interleave their two substripes byte-wise: even offsets are substripe a,
// odd offsets substripe b, so block_size must be even.
struct BlockSetLayout {
  std::uint64_t block_size = 268'435'456;
  CodeParams params{10, 4};
  Codec codec = Codec::rs;
  GroupPartition partition;  // consulted only when piggybacked

  void validate() const;
};

struct ManifestBlock {
  int index = 0;
  std::string role;  // "data" | "parity"
  std::uint32_t crc32 = 0;
  std::string path;  // relative to the manifest's directory
};

struct StripeManifest {
  int format_version = 1;
  std::string stripe_id;
  Codec codec = Codec::rs;
  CodeParams params{10, 4};
  std::uint64_t block_size = 0;  // stored length of every block file
  std::uint64_t pad_len = 0;     // zero bytes appended to the payload
  GroupPartition partition;
  std::vector<ManifestBlock> blocks;

  void validate() const;
};

StripeManifest load_manifest(const std::filesystem::path& path);
// Writes to a temp file in the target directory, then renames.
void save_manifest(const StripeManifest& manifest, const std::filesystem::path& path);

std::uint32_t block_crc32(std::span<const std::uint8_t> bytes);

// Parity block contents for k equal-length data blocks.
std::vector<std::vector<std::uint8_t>> encode_parity_blocks(
    std::span<const std::vector<std::uint8_t>> data_blocks, const BlockSetLayout& layout,
    kernels::Exec exec = kernels::Exec::parallel);

// Persists data + parity block files as <stripe_id>.<index>.blk plus
// <stripe_id>.manifest.json inside out_dir.
StripeManifest write_stripe(std::span<const std::vector<std::uint8_t>> data_blocks,
                            const BlockSetLayout& layout, const std::string& stripe_id,
                            std::uint64_t pad_len, const std::filesystem::path& out_dir,
                            kernels::Exec exec = kernels::Exec::parallel);

// Source of block bytes for repair/verify. Byte counts a reader hands back
// are what the TransferLedger records.
class BlockReader {
 public:
  virtual ~BlockReader() = default;
  virtual bool readable(int index) = 0;
  virtual std::vector<std::uint8_t> read_block(int index) = 0;
  // De-interleaved substripe half, block_size/2 bytes.
  virtual std::vector<std::uint8_t> read_half(int index, Sub sub) = 0;
};

class FileBlockReader : public BlockReader {
 public:
  FileBlockReader(const StripeManifest& manifest, std::filesystem::path base_dir);
  bool readable(int index) override;
  std::vector<std::uint8_t> read_block(int index) override;
  std::vector<std::uint8_t> read_half(int index, Sub sub) override;

 private:
  const StripeManifest& manifest_;
  std::filesystem::path base_dir_;
};

enum class ReadKind { full, half_a, half_b };

struct TransferLedger {
  struct Entry {
    int index = 0;
    ReadKind kind = ReadKind::full;
    std::uint64_t bytes = 0;
  };
  std::vector<Entry> entries;

  std::uint64_t total() const;
};

struct RepairResult {
  std::vector<std::uint8_t> block;
  TransferLedger ledger;
};

// Rebuilds one block, reading the fewest substripe halves the codec allows.
// The result is checked against the manifest checksum before returning.
RepairResult repair_block(const StripeManifest& manifest, int missing, BlockReader& reader,
                          kernels::Exec exec = kernels::Exec::parallel);

// One failed parity equation at one substripe position.
struct Violation {
  int parity_index = 0;  // 0..r-1
  Sub sub = Sub::a;      // always a for plain RS
  std::uint64_t position = 0;
};

// Recomputes every parity equation (or `sample` seeded random positions
// when sample > 0) and reports the mismatches.
std::vector<Violation> verify_stripe(const StripeManifest& manifest, BlockReader& reader,
                                     kernels::Exec exec = kernels::Exec::parallel,
                                     std::uint64_t sample = 0, std::uint64_t sample_seed = 0);

// Whole-file layer: a file is chunked into block_size pieces, grouped into
// sets of k, the last set zero-padded to full blocks.
struct FileManifest {
  int format_version = 1;
  std::string prefix;
  std::uint64_t file_size = 0;
  BlockSetLayout layout;
  std::vector<std::string> stripe_ids;
};

FileManifest encode_file(const std::filesystem::path& input, const std::filesystem::path& out_dir,
                         const BlockSetLayout& layout, const std::string& prefix,
                         kernels::Exec exec = kernels::Exec::parallel);

FileManifest load_file_manifest(const std::filesystem::path& path);
void save_file_manifest(const FileManifest& manifest, const std::filesystem::path& path);

// Reads the data blocks back and strips the padding.
std::vector<std::uint8_t> reassemble_file(const FileManifest& manifest,
                                          const std::filesystem::path& dir);

}  // namespace pbrs
