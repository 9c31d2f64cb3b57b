#pragma once

#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "mdclab/block.hpp"
#include "mdclab/modes.hpp"

namespace mdclab {

/// Binary ciphertext container:
///   magic "MDC1" | version 0x01 | mode id (1) | width n (2, BE) |
///   block count t (4, BE) | flags (1, bit0 = sequence present) |
///   optional S (ceil(n/8) bytes) | t blocks of ceil(n/8) bytes each.
/// Blocks are serialized big-endian bit order (leftmost bit first).
struct ContainerView {
  std::uint8_t mode_id;
  BlockWidth width;
  SequencedCiphertext payload;
};

inline constexpr char kContainerMagic[4] = {'M', 'D', 'C', '1'};
inline constexpr std::uint8_t kContainerVersion = 0x01;

inline std::vector<std::uint8_t> encode_container(std::uint8_t mode_id, BlockWidth width,
                                                  const SequencedCiphertext& c) {
  if (c.blocks.empty()) throw format_error("container requires at least one block");
  std::vector<std::uint8_t> out;
  out.reserve(13 + (c.sequence ? width.bytes() : 0) + c.blocks.size() * width.bytes());
  out.insert(out.end(), kContainerMagic, kContainerMagic + 4);
  out.push_back(kContainerVersion);
  out.push_back(mode_id);
  out.push_back(static_cast<std::uint8_t>(width.bits() >> 8));
  out.push_back(static_cast<std::uint8_t>(width.bits() & 0xFF));
  const std::uint32_t t = static_cast<std::uint32_t>(c.blocks.size());
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>((t >> s) & 0xFF));
  out.push_back(c.sequence ? 0x01 : 0x00);
  if (c.sequence) {
    if (c.sequence->width() != width) throw width_error("sequence width mismatch");
    auto b = c.sequence->to_bytes();
    out.insert(out.end(), b.begin(), b.end());
  }
  for (const Block& blk : c.blocks) {
    if (blk.width() != width) throw width_error("ciphertext block width mismatch");
    auto b = blk.to_bytes();
    out.insert(out.end(), b.begin(), b.end());
  }
  return out;
}

inline ContainerView decode_container(std::span<const std::uint8_t> data) {
  if (data.size() < 13) throw format_error("container truncated (header)");
  if (!std::equal(kContainerMagic, kContainerMagic + 4, data.begin()))
    throw format_error("bad magic, not an MDC1 container");
  if (data[4] != kContainerVersion)
    throw format_error("unsupported container version " + std::to_string(data[4]));
  const std::uint8_t mode_id = data[5];
  if (mode_id > 2) throw format_error("unknown mode id " + std::to_string(mode_id));
  const unsigned n = (static_cast<unsigned>(data[6]) << 8) | data[7];
  BlockWidth width = [&] {
    try {
      return BlockWidth(n);
    } catch (const width_error& e) {
      throw format_error(std::string("bad width field: ") + e.what());
    }
  }();
  std::uint32_t t = 0;
  for (int i = 8; i < 12; ++i) t = (t << 8) | data[static_cast<std::size_t>(i)];
  if (t == 0) throw format_error("container must hold at least one block");
  const std::uint8_t flags = data[12];
  if (flags & ~0x01u) throw format_error("unknown flag bits set");
  const bool has_seq = (flags & 0x01) != 0;

  const std::size_t bb = width.bytes();
  const std::size_t expect = 13 + (has_seq ? bb : 0) + static_cast<std::size_t>(t) * bb;
  if (data.size() < expect) throw format_error("container truncated (payload)");
  if (data.size() > expect) throw format_error("trailing bytes after container payload");

  std::size_t off = 13;
  ContainerView view{mode_id, width, {}};
  if (has_seq) {
    view.payload.sequence = Block::from_bytes(width, data.subspan(off, bb));
    off += bb;
  }
  view.payload.blocks.reserve(t);
  for (std::uint32_t i = 0; i < t; ++i) {
    view.payload.blocks.push_back(Block::from_bytes(width, data.subspan(off, bb)));
    off += bb;
  }
  return view;
}

inline void write_container_file(const std::string& path, std::uint8_t mode_id, BlockWidth width,
                                 const SequencedCiphertext& c) {
  auto bytes = encode_container(mode_id, width, c);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw format_error("cannot open '" + path + "' for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw format_error("write failed for '" + path + "'");
}

inline ContainerView read_container_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw format_error("cannot open '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  return decode_container(bytes);
}

}  // namespace mdclab
