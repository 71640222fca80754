#pragma once

#include <string>
#include <string_view>

namespace newsroom::store {

inline constexpr int kDefaultPasswordIterations = 10000;

/// Salted PBKDF2-HMAC-SHA256 digest in the self-describing form
/// `pbkdf2-sha256$<iterations>$<salt hex>$<hash hex>`.
std::string hash_password(std::string_view password, int iterations = kDefaultPasswordIterations);

/// Constant-time check of `password` against a digest from hash_password.
/// Malformed digests never verify.
bool verify_password(std::string_view password, std::string_view digest);

/// `n` bytes from the OpenSSL CSPRNG.
std::string random_bytes(std::size_t n);

/// 32 random bytes, hex-encoded.
std::string new_session_token();

}  // namespace newsroom::store
