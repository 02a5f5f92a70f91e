#include "doctest.h"

#include "puw/sha256.hpp"
#include "puw/task_types.hpp"

using namespace puw;

namespace {
Digest sha_of(const std::string& s) {
  return sha256(reinterpret_cast<const std::uint8_t*>(s.data()), s.size());
}
}  // namespace

TEST_CASE("sha256 matches reference digests") {
  CHECK(to_hex(sha_of("genesis")) ==
        "aeebad4a796fcc2e15dc4c6061b45ed9b373f26adfc798ca7d2d8cc58182718e");
  CHECK(to_hex(sha_of("payload")) ==
        "239f59ed55e737c77147cf55ad0c1b030b6d7ee748a7426952f9b852d5a935e5");
  // empty-input digest, the classic fixed point
  CHECK(to_hex(sha256(nullptr, 0)) ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("block context serializes to 96 canonical big-endian bytes") {
  BlockContext ctx;
  const auto bytes = context_serialize(ctx);
  REQUIRE(bytes.size() == 96);
  for (const auto b : bytes) CHECK(b == 0);
  CHECK(to_hex(context_digest(ctx)) ==
        "2ea9ab9198d1638007400cd2c3bef1cc745b864b76011a0e1bc52180ac6452d4");

  ctx.height = 7;
  const auto with_height = context_serialize(ctx);
  // height occupies bytes 64..71, big-endian
  CHECK(with_height[71] == 7);
  CHECK(with_height[64] == 0);
}

TEST_CASE("context digest is bound to every field") {
  BlockContext ctx;
  ctx.prev_block_id = sha_of("genesis");
  ctx.payload_digest = sha_of("payload");
  ctx.height = 7;
  ctx.timestamp = 1234567;
  ctx.miner_id = 3;
  ctx.extra_nonce = 42;
  CHECK(to_hex(context_digest(ctx)) ==
        "63e7d2a00c14ccccbd28fc68a87cf65c0fb3067b694ea36b4b42b712d26465ae");

  // flipping any single field moves the digest
  auto base = context_digest(ctx);
  BlockContext m = ctx;
  m.extra_nonce = 43;
  CHECK(context_digest(m) != base);
  m = ctx;
  m.miner_id = 4;
  CHECK(context_digest(m) != base);
  m = ctx;
  m.payload_digest[0] ^= 1;
  CHECK(context_digest(m) != base);
}
