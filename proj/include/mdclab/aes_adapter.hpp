#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>

#include <openssl/evp.h>

#include "mdclab/cipher.hpp"

namespace mdclab {

namespace detail {

/// Adapter binding a standard external primitive (AES-128 via OpenSSL, used
/// as a raw 128-bit permutation) to the BlockCipher interface.
class Aes128Cipher final : public BlockCipher {
 public:
  explicit Aes128Cipher(const std::array<std::uint8_t, 16>& key)
      : width_(BlockWidth(128)), key_(key) {}

  BlockWidth width() const override { return width_; }

  Block encrypt_block(const Block& x) const override {
    check_width(x);
    return transform(x, true);
  }

  Block decrypt_block(const Block& x) const override {
    check_width(x);
    return transform(x, false);
  }

 private:
  Block transform(const Block& x, bool enc) const {
    std::unique_ptr<EVP_CIPHER_CTX, decltype(&EVP_CIPHER_CTX_free)> ctx(EVP_CIPHER_CTX_new(),
                                                                        EVP_CIPHER_CTX_free);
    if (!ctx) throw config_error("EVP context allocation failed");
    if (EVP_CipherInit_ex(ctx.get(), EVP_aes_128_ecb(), nullptr, key_.data(), nullptr,
                          enc ? 1 : 0) != 1)
      throw config_error("EVP init failed for aes128");
    EVP_CIPHER_CTX_set_padding(ctx.get(), 0);
    auto in = x.to_bytes();
    std::array<std::uint8_t, 32> out{};
    int outl = 0, finl = 0;
    if (EVP_CipherUpdate(ctx.get(), out.data(), &outl, in.data(), static_cast<int>(in.size())) !=
            1 ||
        EVP_CipherFinal_ex(ctx.get(), out.data() + outl, &finl) != 1 || outl + finl != 16)
      throw config_error("aes128 single-block transform failed");
    return Block::from_bytes(width_, std::span<const std::uint8_t>(out.data(), 16));
  }

  BlockWidth width_;
  std::array<std::uint8_t, 16> key_;
};

}  // namespace detail

/// Wrap a named external primitive as a BlockCipher. The declared width must
/// equal the primitive's block size; an unknown name is a configuration
/// error. Currently provided: "aes128" (128-bit blocks, 16-byte key).
inline CipherPtr external_cipher(std::string_view name, std::span<const std::uint8_t> key,
                                 BlockWidth declared) {
  if (name == "aes128") {
    if (declared.bits() != 128)
      throw config_error("aes128 has 128-bit blocks; declared width " +
                         std::to_string(declared.bits()) + " does not match");
    if (key.size() != 16) throw config_error("aes128 requires a 16-byte key");
    std::array<std::uint8_t, 16> k{};
    std::copy(key.begin(), key.end(), k.begin());
    return std::make_shared<detail::Aes128Cipher>(k);
  }
  throw config_error("unavailable external primitive '" + std::string(name) + "'");
}

}  // namespace mdclab
