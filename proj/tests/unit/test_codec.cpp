#include <gtest/gtest.h>

#include "support.hpp"

using namespace secalgo;
using codec::Tuple;
using codec::Value;
using testsupport::Gen;
using testsupport::hex;

namespace {

// Reference encoder written from the layout alone: tag, u32 big-endian
// length (element count for tuples), payload.
void ref_encode(const Value& v, Bytes& out) {
  auto header = [&](std::uint8_t tag, std::uint32_t len) {
    out.push_back(tag);
    for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(len >> s));
  };
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Bytes>) {
          header(0x01, static_cast<std::uint32_t>(x.size()));
          out.insert(out.end(), x.begin(), x.end());
        } else if constexpr (std::is_same_v<T, std::string>) {
          header(0x02, static_cast<std::uint32_t>(x.size()));
          out.insert(out.end(), x.begin(), x.end());
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          header(0x03, 8);
          const auto u = static_cast<std::uint64_t>(x);
          for (int s = 56; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(u >> s));
        } else if constexpr (std::is_same_v<T, bool>) {
          header(0x04, 1);
          out.push_back(x ? 1 : 0);
        } else {
          header(0x05, static_cast<std::uint32_t>(x.size()));
          for (const auto& e : x) ref_encode(e, out);
        }
      },
      v.storage());
}

Bytes ref_encode(const Value& v) {
  Bytes out;
  ref_encode(v, out);
  return out;
}

Value nested(std::size_t depth) {
  Value v(std::int64_t{1});
  for (std::size_t i = 0; i < depth; ++i) v = Value(Tuple{v});
  return v;
}

}  // namespace

TEST(Codec, BooleanLayout) { EXPECT_EQ(codec::encode(Value(true)), hex("040000000101")); }

TEST(Codec, EmptyTupleLayout) { EXPECT_EQ(codec::encode(Value(Tuple{})), hex("0500000000")); }

TEST(Codec, IntegerLayoutIsTwosComplement) {
  EXPECT_EQ(codec::encode(Value(std::int64_t{-2})), hex("0300000008fffffffffffffffe"));
  EXPECT_EQ(codec::decode(codec::encode(Value(42))), Value(42));
}

TEST(Codec, SingletonTupleRoundTrips) {
  Value v(Tuple{Value("secret")});
  EXPECT_EQ(codec::decode(codec::encode(v)), v);
}

TEST(Codec, UnknownTagIsMalformed) {
  EXPECT_THROW(codec::decode(hex("ff00000000")), MalformedEncoding);
  EXPECT_THROW(codec::decode(hex("00")), MalformedEncoding);
  EXPECT_THROW(codec::decode(Bytes{}), MalformedEncoding);
}

TEST(Codec, RejectsNonCanonicalScalars) {
  EXPECT_THROW(codec::decode(hex("040000000102")), MalformedEncoding);
  EXPECT_THROW(codec::decode(hex("04000000020000")), MalformedEncoding);
  EXPECT_THROW(codec::decode(hex("030000000700000000000000")), MalformedEncoding);
  EXPECT_THROW(codec::decode(hex("0100000005aabb")), MalformedEncoding);
  EXPECT_THROW(codec::decode(hex("05ffffffff")), MalformedEncoding);
}

TEST(Codec, StringsMustBeUtf8) {
  EXPECT_THROW(codec::encode(Value(std::string("\xC0\x80"))), UnsupportedType);
  EXPECT_THROW(codec::encode(Value(std::string("\xED\xA0\x80"))), UnsupportedType);
  EXPECT_THROW(codec::encode(Value(std::string("\xF4\x90\x80\x80"))), UnsupportedType);
  EXPECT_THROW(codec::encode(Value(std::string("\xE2\x82"))), UnsupportedType);
  EXPECT_THROW(codec::decode(hex("0200000001ff")), MalformedEncoding);
  EXPECT_EQ(codec::decode(codec::encode(Value("\xE2\x82\xAC"))), Value("\xE2\x82\xAC"));
}

TEST(Codec, DepthLimit) {
  EXPECT_EQ(codec::decode(codec::encode(nested(codec::kMaxDepth))), nested(codec::kMaxDepth));
  EXPECT_THROW(codec::encode(nested(codec::kMaxDepth + 1)), DepthExceeded);
  EXPECT_THROW(codec::decode(ref_encode(nested(codec::kMaxDepth + 1))), MalformedEncoding);
}

TEST(CodecProperty, MatchesReferenceEncoder) {
  Gen g(11);
  for (int i = 0; i < 2000; ++i) {
    Value v = g.value();
    ASSERT_EQ(codec::encode(v), ref_encode(v)) << codec::debug_string(v);
  }
}

TEST(CodecProperty, RoundTrip) {
  Gen g(12);
  for (int i = 0; i < 2000; ++i) {
    Value v = g.value();
    ASSERT_EQ(codec::decode(codec::encode(v)), v) << codec::debug_string(v);
  }
}

TEST(CodecProperty, Injective) {
  Gen g(13);
  for (int i = 0; i < 5000; ++i) {
    Value v = g.value(2), w = g.value(2);
    if (v == w) continue;
    ASSERT_NE(codec::encode(v), codec::encode(w)) << codec::debug_string(v) << " vs " << codec::debug_string(w);
  }
  // Values that differ only in type must still encode differently.
  EXPECT_NE(codec::encode(Value(to_bytes("ab"))), codec::encode(Value("ab")));
  EXPECT_NE(codec::encode(Value(true)), codec::encode(Value(std::int64_t{1})));
}

TEST(CodecProperty, RejectsEveryStrictExtension) {
  Gen g(14);
  for (int i = 0; i < 1000; ++i) {
    Bytes enc = codec::encode(g.value());
    Bytes tail = g.bytes(8);
    if (tail.empty()) tail.push_back(0);
    enc.insert(enc.end(), tail.begin(), tail.end());
    ASSERT_THROW(codec::decode(enc), MalformedEncoding);
  }
}

TEST(CodecProperty, FuzzedInputIsRejectedOrCanonical) {
  Gen g(15);
  auto check = [](const Bytes& in) {
    try {
      Value v = codec::decode(in);
      ASSERT_EQ(codec::encode(v), in);
    } catch (const MalformedEncoding&) {
    } catch (const DepthExceeded&) {
    }
  };
  for (int i = 0; i < 20000; ++i) check(g.bytes(40));
  // Mutations of valid encodings reach deeper into the decoder.
  for (int i = 0; i < 20000; ++i) {
    Bytes enc = codec::encode(g.value(3));
    const std::size_t flips = 1 + g.below(3);
    for (std::size_t f = 0; f < flips && !enc.empty(); ++f)
      enc[g.below(enc.size())] ^= static_cast<std::uint8_t>(1u << g.below(8));
    if (g.coin() && !enc.empty()) enc.resize(g.below(enc.size()));
    check(enc);
  }
}
