#include "pbrs/stripe_io.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>

#include "json_util.hpp"
#include "pbrs/gf256.hpp"
#include "pbrs/rng.hpp"

namespace pbrs {

namespace {

using nlohmann::ordered_json;

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const std::streamoff size = in.tellg();
  in.seekg(0, std::ios::beg);
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(size));
  if (size > 0 && !in.read(reinterpret_cast<char*>(bytes.data()), size))
    throw IoError("short read from " + path.string());
  return bytes;
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + path.string());
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create " + tmp.string());
    out << text;
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("rename " + tmp.string() + " -> " + path.string() + ": " + ec.message());
}

std::string block_file_name(const std::string& stripe_id, int index) {
  return stripe_id + "." + std::to_string(index) + ".blk";
}

Matrix parity_rows(const CodeParams& params) {
  GeneratorMatrix g = rs_generator(params.k, params.r);
  std::vector<int> idx(static_cast<std::size_t>(params.r));
  for (int j = 0; j < params.r; ++j) idx[static_cast<std::size_t>(j)] = params.k + j;
  return g.matrix.select_rows(idx);
}

// Row turning the symbols at `sel` (ascending, |sel| = k) into the symbol
// at `target`: generator_row(target) * inverse(generator rows at sel).
Matrix compose_row(const CodeParams& params, std::span<const int> sel, int target) {
  GeneratorMatrix g = rs_generator(params.k, params.r);
  Matrix inv = invert(g.matrix.select_rows(sel));
  Matrix tgt(1, static_cast<std::size_t>(params.k));
  for (int i = 0; i < params.k; ++i)
    tgt.at(0, static_cast<std::size_t>(i)) = g.matrix.at(static_cast<std::size_t>(target),
                                                         static_cast<std::size_t>(i));
  return tgt.mul(inv);
}

kernels::ConstView sub_view(const std::vector<std::uint8_t>& block, Sub sub) {
  return {block.data() + (sub == Sub::b ? 1 : 0), block.size() / 2, 2};
}

kernels::MutView sub_view_mut(std::vector<std::uint8_t>& block, Sub sub) {
  return {block.data() + (sub == Sub::b ? 1 : 0), block.size() / 2, 2};
}

kernels::ConstView flat_view(const std::vector<std::uint8_t>& buf) {
  return {buf.data(), buf.size(), 1};
}

kernels::MutView flat_view_mut(std::vector<std::uint8_t>& buf) {
  return {buf.data(), buf.size(), 1};
}

}  // namespace

std::string codec_name(Codec codec) {
  return codec == Codec::rs ? "rs" : "piggybacked-rs";
}

Codec codec_from_name(const std::string& name) {
  if (name == "rs") return Codec::rs;
  if (name == "piggybacked-rs" || name == "pb") return Codec::piggybacked_rs;
  throw DimensionMismatch("unknown codec: " + name);
}

void BlockSetLayout::validate() const {
  if (block_size == 0) throw DimensionMismatch("block_size must be positive");
  if (codec == Codec::piggybacked_rs) {
    if (block_size % 2 != 0)
      throw DimensionMismatch("piggybacked blocks interleave two substripes; "
                              "block_size must be even");
    partition.validate(params);
  }
}

void StripeManifest::validate() const {
  if (static_cast<int>(blocks.size()) != params.n())
    throw CorruptStripe("manifest holds " + std::to_string(blocks.size()) +
                        " blocks, expected " + std::to_string(params.n()));
  std::vector<char> seen(static_cast<std::size_t>(params.n()), 0);
  for (const auto& block : blocks) {
    if (block.index < 0 || block.index >= params.n() || seen[static_cast<std::size_t>(block.index)])
      throw CorruptStripe("manifest block indices must cover 0.." +
                          std::to_string(params.n() - 1) + " exactly once");
    seen[static_cast<std::size_t>(block.index)] = 1;
    const std::string expected = block.index < params.k ? "data" : "parity";
    if (block.role != expected)
      throw CorruptStripe("block " + std::to_string(block.index) + " role '" + block.role +
                          "' does not match its index");
  }
  if (pad_len > block_size * static_cast<std::uint64_t>(params.k))
    throw CorruptStripe("pad_len exceeds stripe payload");
  if (codec == Codec::piggybacked_rs) {
    if (block_size % 2 != 0) throw CorruptStripe("piggybacked block_size must be even");
    partition.validate(params);
  }
}

StripeManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  ordered_json doc;
  try {
    doc = ordered_json::parse(in);
  } catch (const std::exception& e) {
    throw CorruptStripe("manifest parse (" + path.string() + "): " + e.what());
  }
  StripeManifest m;
  try {
    m.format_version = doc.at("format_version").get<int>();
    m.stripe_id = doc.at("stripe_id").get<std::string>();
    m.codec = codec_from_name(doc.at("codec").get<std::string>());
    m.params = CodeParams(doc.at("k").get<int>(), doc.at("r").get<int>());
    m.block_size = doc.at("block_size").get<std::uint64_t>();
    m.pad_len = doc.at("pad_len").get<std::uint64_t>();
    m.partition = partition_from_json(doc.at("partition"));
    for (const auto& entry : doc.at("blocks")) {
      ManifestBlock block;
      block.index = entry.at("index").get<int>();
      block.role = entry.at("role").get<std::string>();
      block.crc32 = entry.at("crc32").get<std::uint32_t>();
      block.path = entry.at("path").get<std::string>();
      m.blocks.push_back(std::move(block));
    }
  } catch (const CorruptStripe&) {
    throw;
  } catch (const std::exception& e) {
    throw CorruptStripe("manifest schema (" + path.string() + "): " + e.what());
  }
  m.validate();
  return m;
}

void save_manifest(const StripeManifest& manifest, const std::filesystem::path& path) {
  manifest.validate();
  ordered_json doc;
  doc["format_version"] = manifest.format_version;
  doc["stripe_id"] = manifest.stripe_id;
  doc["codec"] = codec_name(manifest.codec);
  doc["k"] = manifest.params.k;
  doc["r"] = manifest.params.r;
  doc["block_size"] = manifest.block_size;
  doc["pad_len"] = manifest.pad_len;
  doc["partition"] = partition_to_json(manifest.partition);
  doc["blocks"] = ordered_json::array();
  for (const auto& block : manifest.blocks) {
    ordered_json entry;
    entry["index"] = block.index;
    entry["role"] = block.role;
    entry["crc32"] = block.crc32;
    entry["path"] = block.path;
    doc["blocks"].push_back(std::move(entry));
  }
  write_text_atomic(path, doc.dump(2) + "\n");
}

std::uint32_t block_crc32(std::span<const std::uint8_t> bytes) {
  return static_cast<std::uint32_t>(
      crc32_z(crc32_z(0, nullptr, 0), bytes.data(), bytes.size()));
}

std::vector<std::vector<std::uint8_t>> encode_parity_blocks(
    std::span<const std::vector<std::uint8_t>> data_blocks, const BlockSetLayout& layout,
    kernels::Exec exec) {
  layout.validate();
  if (static_cast<int>(data_blocks.size()) != layout.params.k)
    throw DimensionMismatch("expected " + std::to_string(layout.params.k) + " data blocks");
  const std::uint64_t len = data_blocks.empty() ? 0 : data_blocks[0].size();
  for (const auto& block : data_blocks)
    if (block.size() != len) throw DimensionMismatch("data blocks differ in length");
  if (len > layout.block_size) throw DimensionMismatch("data block longer than block_size");
  if (layout.codec == Codec::piggybacked_rs && len % 2 != 0)
    throw DimensionMismatch("piggybacked block length must be even");

  const int k = layout.params.k;
  const int r = layout.params.r;
  std::vector<std::vector<std::uint8_t>> parity(
      static_cast<std::size_t>(r), std::vector<std::uint8_t>(static_cast<std::size_t>(len)));
  if (len == 0) return parity;
  const Matrix prows = parity_rows(layout.params);

  if (layout.codec == Codec::rs) {
    std::vector<kernels::ConstView> in;
    std::vector<kernels::MutView> out;
    for (int i = 0; i < k; ++i) in.push_back(flat_view(data_blocks[static_cast<std::size_t>(i)]));
    for (int j = 0; j < r; ++j) out.push_back(flat_view_mut(parity[static_cast<std::size_t>(j)]));
    kernels::gf_matmul(prows, in, out, exec);
    return parity;
  }

  for (Sub sub : {Sub::a, Sub::b}) {
    std::vector<kernels::ConstView> in;
    std::vector<kernels::MutView> out;
    for (int i = 0; i < k; ++i) in.push_back(sub_view(data_blocks[static_cast<std::size_t>(i)], sub));
    for (int j = 0; j < r; ++j) out.push_back(sub_view_mut(parity[static_cast<std::size_t>(j)], sub));
    kernels::gf_matmul(prows, in, out, exec);
  }
  for (std::size_t g = 0; g < layout.partition.groups.size(); ++g)
    for (int member : layout.partition.groups[g])
      kernels::xor_into(sub_view(data_blocks[static_cast<std::size_t>(member)], Sub::a),
                        sub_view_mut(parity[g + 1], Sub::b), exec);
  return parity;
}

StripeManifest write_stripe(std::span<const std::vector<std::uint8_t>> data_blocks,
                            const BlockSetLayout& layout, const std::string& stripe_id,
                            std::uint64_t pad_len, const std::filesystem::path& out_dir,
                            kernels::Exec exec) {
  auto parity = encode_parity_blocks(data_blocks, layout, exec);
  StripeManifest m;
  m.stripe_id = stripe_id;
  m.codec = layout.codec;
  m.params = layout.params;
  m.block_size = data_blocks.empty() ? 0 : data_blocks[0].size();
  m.pad_len = pad_len;
  if (layout.codec == Codec::piggybacked_rs) m.partition = layout.partition;

  auto add_block = [&](int index, const std::vector<std::uint8_t>& bytes) {
    ManifestBlock block;
    block.index = index;
    block.role = index < layout.params.k ? "data" : "parity";
    block.crc32 = block_crc32(bytes);
    block.path = block_file_name(stripe_id, index);
    write_file_bytes(out_dir / block.path, bytes);
    m.blocks.push_back(std::move(block));
  };
  for (int i = 0; i < layout.params.k; ++i) add_block(i, data_blocks[static_cast<std::size_t>(i)]);
  for (int j = 0; j < layout.params.r; ++j)
    add_block(layout.params.k + j, parity[static_cast<std::size_t>(j)]);

  save_manifest(m, out_dir / (stripe_id + ".manifest.json"));
  return m;
}

FileBlockReader::FileBlockReader(const StripeManifest& manifest, std::filesystem::path base_dir)
    : manifest_(manifest), base_dir_(std::move(base_dir)) {}

bool FileBlockReader::readable(int index) {
  for (const auto& block : manifest_.blocks)
    if (block.index == index) {
      std::error_code ec;
      return std::filesystem::exists(base_dir_ / block.path, ec) && !ec;
    }
  return false;
}

std::vector<std::uint8_t> FileBlockReader::read_block(int index) {
  for (const auto& block : manifest_.blocks)
    if (block.index == index) {
      auto bytes = read_file_bytes(base_dir_ / block.path);
      if (bytes.size() != manifest_.block_size)
        throw CorruptSource("block " + std::to_string(index) + " is " +
                            std::to_string(bytes.size()) + " bytes, manifest says " +
                            std::to_string(manifest_.block_size));
      return bytes;
    }
  throw DimensionMismatch("block index " + std::to_string(index) + " not in manifest");
}

std::vector<std::uint8_t> FileBlockReader::read_half(int index, Sub sub) {
  auto full = read_block(index);
  std::vector<std::uint8_t> half(full.size() / 2);
  const std::size_t offset = sub == Sub::b ? 1 : 0;
  for (std::size_t t = 0; t < half.size(); ++t) half[t] = full[2 * t + offset];
  return half;
}

std::uint64_t TransferLedger::total() const {
  std::uint64_t sum = 0;
  for (const auto& entry : entries) sum += entry.bytes;
  return sum;
}

namespace {

struct LedgeredReader {
  BlockReader& reader;
  const StripeManifest& manifest;
  TransferLedger& ledger;

  std::vector<std::uint8_t> full(int index, bool crc_check = true) {
    auto bytes = reader.read_block(index);
    ledger.entries.push_back({index, ReadKind::full, bytes.size()});
    if (crc_check) {
      for (const auto& block : manifest.blocks)
        if (block.index == index && block_crc32(bytes) != block.crc32)
          throw CorruptSource("block " + std::to_string(index) + " fails its checksum");
    }
    return bytes;
  }

  std::vector<std::uint8_t> half(int index, Sub sub) {
    auto bytes = reader.read_half(index, sub);
    ledger.entries.push_back({index, sub == Sub::a ? ReadKind::half_a : ReadKind::half_b,
                              bytes.size()});
    return bytes;
  }
};

std::vector<std::uint8_t> interleave(const std::vector<std::uint8_t>& a,
                                     const std::vector<std::uint8_t>& b) {
  std::vector<std::uint8_t> out(a.size() + b.size());
  for (std::size_t t = 0; t < a.size(); ++t) {
    out[2 * t] = a[t];
    out[2 * t + 1] = b[t];
  }
  return out;
}

std::vector<std::uint8_t> repair_rs(const StripeManifest& manifest, const RepairPlan& plan,
                                    LedgeredReader& src, kernels::Exec exec) {
  std::vector<int> sel;
  std::vector<std::vector<std::uint8_t>> blocks;
  for (const auto& rd : plan.reads) {
    sel.push_back(rd.node);
    blocks.push_back(src.full(rd.node));
  }
  const Matrix w = compose_row(manifest.params, sel, plan.missing);
  std::vector<std::uint8_t> out(manifest.block_size);
  std::vector<kernels::ConstView> in;
  for (const auto& block : blocks) in.push_back(flat_view(block));
  const kernels::MutView out_views[] = {flat_view_mut(out)};
  kernels::gf_matmul(w, in, out_views, exec);
  return out;
}

std::vector<std::uint8_t> repair_pb_group_extract(const StripeManifest& manifest,
                                                  const RepairPlan& plan, LedgeredReader& src,
                                                  kernels::Exec exec) {
  const CodeParams& p = manifest.params;
  const std::uint64_t half_len = manifest.block_size / 2;

  std::map<int, std::vector<std::uint8_t>> b_halves, a_halves;
  for (const auto& rd : plan.reads) {
    auto bytes = src.half(rd.node, rd.sub);
    (rd.sub == Sub::b ? b_halves : a_halves).emplace(rd.node, std::move(bytes));
  }

  // b substripe: decode the missing half from the clean positions.
  std::vector<int> sel;
  for (const auto& [node, bytes] : b_halves)
    if (node <= p.k) sel.push_back(node);
  const Matrix w = compose_row(p, sel, plan.missing);
  std::vector<std::uint8_t> b_missing(half_len);
  {
    std::vector<kernels::ConstView> in;
    for (int node : sel) in.push_back(flat_view(b_halves.at(node)));
    const kernels::MutView out_views[] = {flat_view_mut(b_missing)};
    kernels::gf_matmul(w, in, out_views, exec);
  }

  // Clean value of the piggybacked parity, from all k b data halves.
  const int pnode = p.k + 1 + plan.group;
  std::vector<std::uint8_t> clean(half_len);
  {
    GeneratorMatrix g = rs_generator(p.k, p.r);
    Matrix prow(1, static_cast<std::size_t>(p.k));
    for (int i = 0; i < p.k; ++i)
      prow.at(0, static_cast<std::size_t>(i)) =
          g.matrix.at(static_cast<std::size_t>(pnode), static_cast<std::size_t>(i));
    std::vector<kernels::ConstView> in;
    for (int i = 0; i < p.k; ++i)
      in.push_back(flat_view(i == plan.missing ? b_missing : b_halves.at(i)));
    const kernels::MutView out_views[] = {flat_view_mut(clean)};
    kernels::gf_matmul(prow, in, out_views, exec);
  }

  // Stored parity minus clean value is the group sum; peel the groupmates.
  std::vector<std::uint8_t> a_missing = b_halves.at(pnode);
  kernels::xor_into(flat_view(clean), flat_view_mut(a_missing), exec);
  for (const auto& [node, bytes] : a_halves)
    kernels::xor_into(flat_view(bytes), flat_view_mut(a_missing), exec);

  return interleave(a_missing, b_missing);
}

std::vector<std::uint8_t> repair_pb_full_decode(const StripeManifest& manifest,
                                                const RepairPlan& plan, LedgeredReader& src,
                                                kernels::Exec exec) {
  const CodeParams& p = manifest.params;
  const std::uint64_t half_len = manifest.block_size / 2;

  std::vector<int> sel;
  std::map<int, std::vector<std::uint8_t>> blocks;
  for (const auto& rd : plan.reads)
    if (!blocks.count(rd.node)) {
      sel.push_back(rd.node);
      blocks.emplace(rd.node, src.full(rd.node));
    }

  GeneratorMatrix g = rs_generator(p.k, p.r);
  const Matrix inv = invert(g.matrix.select_rows(sel));

  auto decode_sub = [&](Sub sub,
                        const std::vector<std::vector<std::uint8_t>>* strip_with) {
    std::vector<std::vector<std::uint8_t>> data(
        static_cast<std::size_t>(p.k), std::vector<std::uint8_t>(half_len));
    std::vector<std::vector<std::uint8_t>> cleaned;
    std::vector<kernels::ConstView> in;
    for (int node : sel) {
      if (sub == Sub::b && strip_with && node > p.k) {
        const int gi = node - p.k - 1;
        if (gi < static_cast<int>(manifest.partition.groups.size())) {
          std::vector<std::uint8_t> buf(half_len);
          const kernels::ConstView stored = sub_view(blocks.at(node), sub);
          for (std::size_t t = 0; t < half_len; ++t) buf[t] = stored.data[t * stored.stride];
          for (int member : manifest.partition.groups[static_cast<std::size_t>(gi)])
            kernels::xor_into(flat_view((*strip_with)[static_cast<std::size_t>(member)]),
                              flat_view_mut(buf), exec);
          cleaned.push_back(std::move(buf));
          in.push_back(flat_view(cleaned.back()));
          continue;
        }
      }
      in.push_back(sub_view(blocks.at(node), sub));
    }
    std::vector<kernels::MutView> out;
    for (auto& buf : data) out.push_back(flat_view_mut(buf));
    kernels::gf_matmul(inv, in, out, exec);
    return data;
  };

  const auto a_data = decode_sub(Sub::a, nullptr);
  const auto b_data = decode_sub(Sub::b, &a_data);

  auto encode_position = [&](const std::vector<std::vector<std::uint8_t>>& data, int pos,
                             std::vector<std::uint8_t>& out) {
    if (pos < p.k) {
      out = data[static_cast<std::size_t>(pos)];
      return;
    }
    Matrix row(1, static_cast<std::size_t>(p.k));
    for (int i = 0; i < p.k; ++i)
      row.at(0, static_cast<std::size_t>(i)) =
          g.matrix.at(static_cast<std::size_t>(pos), static_cast<std::size_t>(i));
    std::vector<kernels::ConstView> in;
    for (const auto& buf : data) in.push_back(flat_view(buf));
    const kernels::MutView out_views[] = {flat_view_mut(out)};
    kernels::gf_matmul(row, in, out_views, exec);
  };

  std::vector<std::uint8_t> a_out(half_len), b_out(half_len);
  encode_position(a_data, plan.missing, a_out);
  encode_position(b_data, plan.missing, b_out);
  if (plan.missing > p.k) {
    const int gi = plan.missing - p.k - 1;
    if (gi < static_cast<int>(manifest.partition.groups.size()))
      for (int member : manifest.partition.groups[static_cast<std::size_t>(gi)])
        kernels::xor_into(flat_view(a_data[static_cast<std::size_t>(member)]),
                          flat_view_mut(b_out), exec);
  }
  return interleave(a_out, b_out);
}

}  // namespace

RepairResult repair_block(const StripeManifest& manifest, int missing, BlockReader& reader,
                          kernels::Exec exec) {
  manifest.validate();
  if (missing < 0 || missing >= manifest.params.n())
    throw DimensionMismatch("missing index out of range");

  std::set<int> alive;
  for (const auto& block : manifest.blocks)
    if (block.index != missing && reader.readable(block.index)) alive.insert(block.index);
  if (static_cast<int>(alive.size()) < manifest.params.k)
    throw Unrecoverable("only " + std::to_string(alive.size()) + " readable blocks, need " +
                        std::to_string(manifest.params.k));

  RepairResult result;
  LedgeredReader src{reader, manifest, result.ledger};

  if (manifest.codec == Codec::rs) {
    const RepairPlan plan = rs_repair_plan(manifest.params, missing, alive);
    result.block = repair_rs(manifest, plan, src, exec);
  } else {
    const RepairPlan plan = pb_repair_plan(manifest.params, manifest.partition, missing, alive);
    result.block = plan.recipe == RepairPlan::Recipe::pb_group_extract
                       ? repair_pb_group_extract(manifest, plan, src, exec)
                       : repair_pb_full_decode(manifest, plan, src, exec);
  }

  for (const auto& block : manifest.blocks)
    if (block.index == missing && block_crc32(result.block) != block.crc32)
      throw CorruptSource("repaired block " + std::to_string(missing) +
                          " fails the manifest checksum; a source block is corrupt");
  return result;
}

std::vector<Violation> verify_stripe(const StripeManifest& manifest, BlockReader& reader,
                                     kernels::Exec exec, std::uint64_t sample,
                                     std::uint64_t sample_seed) {
  manifest.validate();
  const CodeParams& p = manifest.params;
  std::vector<std::vector<std::uint8_t>> blocks;
  for (int i = 0; i < p.n(); ++i) {
    if (!reader.readable(i))
      throw CorruptSource("block " + std::to_string(i) + " is unreadable");
    blocks.push_back(reader.read_block(i));
  }

  std::vector<Violation> violations;
  const Matrix prows = parity_rows(p);

  auto check_sub = [&](Sub sub, bool interleaved) {
    const std::uint64_t len = interleaved ? manifest.block_size / 2 : manifest.block_size;
    std::vector<std::vector<std::uint8_t>> expected(
        static_cast<std::size_t>(p.r), std::vector<std::uint8_t>(static_cast<std::size_t>(len)));
    std::vector<kernels::ConstView> in;
    for (int i = 0; i < p.k; ++i)
      in.push_back(interleaved ? sub_view(blocks[static_cast<std::size_t>(i)], sub)
                               : flat_view(blocks[static_cast<std::size_t>(i)]));
    std::vector<kernels::MutView> out;
    for (auto& buf : expected) out.push_back(flat_view_mut(buf));
    kernels::gf_matmul(prows, in, out, exec);

    if (interleaved && sub == Sub::b) {
      for (std::size_t g = 0; g < manifest.partition.groups.size(); ++g)
        for (int member : manifest.partition.groups[g])
          kernels::xor_into(sub_view(blocks[static_cast<std::size_t>(member)], Sub::a),
                            flat_view_mut(expected[g + 1]), exec);
    }

    for (int j = 0; j < p.r; ++j) {
      const auto& stored = blocks[static_cast<std::size_t>(p.k + j)];
      const std::size_t offset = interleaved && sub == Sub::b ? 1 : 0;
      const std::size_t stride = interleaved ? 2 : 1;
      for (std::uint64_t t = 0; t < len; ++t)
        if (expected[static_cast<std::size_t>(j)][static_cast<std::size_t>(t)] !=
            stored[static_cast<std::size_t>(t) * stride + offset])
          violations.push_back({j, sub, t});
    }
  };

  auto check_sampled = [&](Sub sub, bool interleaved) {
    const std::uint64_t len = interleaved ? manifest.block_size / 2 : manifest.block_size;
    std::mt19937_64 rng(sample_seed ^ (sub == Sub::b ? 0x9e3779b97f4a7c15ULL : 0));
    const std::size_t offset = interleaved && sub == Sub::b ? 1 : 0;
    const std::size_t stride = interleaved ? 2 : 1;
    for (std::uint64_t s = 0; s < sample; ++s) {
      const std::uint64_t t = bounded_draw(rng, len);
      for (int j = 0; j < p.r; ++j) {
        std::uint8_t acc = 0;
        for (int i = 0; i < p.k; ++i) {
          const std::uint8_t sym =
              blocks[static_cast<std::size_t>(i)][static_cast<std::size_t>(t) * stride + offset];
          acc ^= gf256::mul(prows.at(static_cast<std::size_t>(j), static_cast<std::size_t>(i)), sym);
        }
        if (interleaved && sub == Sub::b && j >= 1 &&
            j - 1 < static_cast<int>(manifest.partition.groups.size()))
          for (int member : manifest.partition.groups[static_cast<std::size_t>(j - 1)])
            acc ^= blocks[static_cast<std::size_t>(member)][static_cast<std::size_t>(t) * 2];
        if (acc != blocks[static_cast<std::size_t>(p.k + j)]
                         [static_cast<std::size_t>(t) * stride + offset])
          violations.push_back({j, sub, t});
      }
    }
  };

  const bool interleaved = manifest.codec == Codec::piggybacked_rs;
  if (sample == 0) {
    if (interleaved) {
      check_sub(Sub::a, true);
      check_sub(Sub::b, true);
    } else {
      check_sub(Sub::a, false);
    }
  } else {
    if (interleaved) {
      check_sampled(Sub::a, true);
      check_sampled(Sub::b, true);
    } else {
      check_sampled(Sub::a, false);
    }
  }
  std::sort(violations.begin(), violations.end(), [](const Violation& x, const Violation& y) {
    if (x.position != y.position) return x.position < y.position;
    if (x.sub != y.sub) return x.sub < y.sub;
    return x.parity_index < y.parity_index;
  });
  return violations;
}

FileManifest encode_file(const std::filesystem::path& input, const std::filesystem::path& out_dir,
                         const BlockSetLayout& layout, const std::string& prefix,
                         kernels::Exec exec) {
  layout.validate();
  const auto bytes = read_file_bytes(input);
  std::filesystem::create_directories(out_dir);

  FileManifest fm;
  fm.prefix = prefix;
  fm.file_size = bytes.size();
  fm.layout = layout;

  const std::uint64_t L = layout.block_size;
  const std::uint64_t per_stripe = L * static_cast<std::uint64_t>(layout.params.k);
  const std::uint64_t stripes = (bytes.size() + per_stripe - 1) / per_stripe;

  for (std::uint64_t s = 0; s < stripes; ++s) {
    std::vector<std::vector<std::uint8_t>> data(
        static_cast<std::size_t>(layout.params.k),
        std::vector<std::uint8_t>(static_cast<std::size_t>(L), 0));
    const std::uint64_t base = s * per_stripe;
    const std::uint64_t payload = std::min<std::uint64_t>(per_stripe, bytes.size() - base);
    for (std::uint64_t off = 0; off < payload; ++off)
      data[static_cast<std::size_t>(off / L)][static_cast<std::size_t>(off % L)] =
          bytes[static_cast<std::size_t>(base + off)];

    char suffix[16];
    std::snprintf(suffix, sizeof suffix, "-%06llu", static_cast<unsigned long long>(s));
    const std::string stripe_id = prefix + suffix;
    write_stripe(data, layout, stripe_id, per_stripe - payload, out_dir, exec);
    fm.stripe_ids.push_back(stripe_id);
  }

  save_file_manifest(fm, out_dir / (prefix + ".file.json"));
  return fm;
}

FileManifest load_file_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  ordered_json doc;
  try {
    doc = ordered_json::parse(in);
  } catch (const std::exception& e) {
    throw CorruptStripe("file manifest parse (" + path.string() + "): " + e.what());
  }
  FileManifest fm;
  try {
    fm.format_version = doc.at("format_version").get<int>();
    fm.prefix = doc.at("prefix").get<std::string>();
    fm.file_size = doc.at("file_size").get<std::uint64_t>();
    fm.layout.codec = codec_from_name(doc.at("codec").get<std::string>());
    fm.layout.params = CodeParams(doc.at("k").get<int>(), doc.at("r").get<int>());
    fm.layout.block_size = doc.at("block_size").get<std::uint64_t>();
    fm.layout.partition = partition_from_json(doc.at("partition"));
    fm.stripe_ids = doc.at("stripes").get<std::vector<std::string>>();
  } catch (const std::exception& e) {
    throw CorruptStripe("file manifest schema (" + path.string() + "): " + e.what());
  }
  return fm;
}

void save_file_manifest(const FileManifest& manifest, const std::filesystem::path& path) {
  ordered_json doc;
  doc["format_version"] = manifest.format_version;
  doc["prefix"] = manifest.prefix;
  doc["file_size"] = manifest.file_size;
  doc["codec"] = codec_name(manifest.layout.codec);
  doc["k"] = manifest.layout.params.k;
  doc["r"] = manifest.layout.params.r;
  doc["block_size"] = manifest.layout.block_size;
  doc["partition"] = partition_to_json(manifest.layout.partition);
  doc["stripes"] = manifest.stripe_ids;
  write_text_atomic(path, doc.dump(2) + "\n");
}

std::vector<std::uint8_t> reassemble_file(const FileManifest& manifest,
                                          const std::filesystem::path& dir) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(manifest.file_size);
  for (const auto& stripe_id : manifest.stripe_ids) {
    const StripeManifest sm = load_manifest(dir / (stripe_id + ".manifest.json"));
    FileBlockReader reader(sm, dir);
    for (int i = 0; i < sm.params.k; ++i) {
      const auto block = reader.read_block(i);
      bytes.insert(bytes.end(), block.begin(), block.end());
    }
  }
  if (bytes.size() < manifest.file_size)
    throw CorruptStripe("stored blocks shorter than the original file");
  bytes.resize(manifest.file_size);
  return bytes;
}

}  // namespace pbrs
