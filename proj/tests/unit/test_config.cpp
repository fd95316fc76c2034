#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "support.hpp"

using namespace secalgo;
using config::Item;
using config::Scope;
using testsupport::Gen;

namespace {

// Values a random binding may take: every allowed value plus a few sizes.
std::vector<std::string> candidates(Item item) {
  if (item == Item::key_size_shared) return {"128", "192", "256", "512"};
  if (item == Item::key_size_public) return {"2048", "3072", "4096", "P-256", "P-384"};
  return config::allowed_values(item);
}

bool member(Item item, const std::string& v) {
  if (item == Item::key_size_shared || item == Item::key_size_public) {
    if (!v.empty() && v.find_first_not_of("0123456789") == std::string::npos && v[0] != '0') return true;
  }
  for (const auto& a : config::allowed_values(item))
    if (a == v) return true;
  return false;
}

}  // namespace

TEST(Config, Defaults) {
  Scope root;
  EXPECT_EQ(root.resolve(Item::key_type), "shared");
  EXPECT_EQ(root.resolve(Item::key_type_shared), "AES");
  EXPECT_EQ(root.resolve(Item::key_type_public), "RSA");
  EXPECT_EQ(root.resolve(Item::key_size_shared), "256");
  EXPECT_EQ(root.resolve(Item::key_size_public), "2048");
  EXPECT_EQ(root.resolve(Item::block_cipher_mode), "GCM");
  EXPECT_EQ(root.resolve(Item::sign_hash), "SHA256");
  EXPECT_EQ(root.resolve(Item::sign_mode), "detached");
  EXPECT_EQ(root.resolve(Item::provider), "openssl");
}

TEST(Config, SetAndResolve) {
  Scope root;
  EXPECT_EQ(config::set_config(root, "sign_mode", "combined").resolve(Item::sign_mode), "combined");
  EXPECT_EQ(config::resolve(config::set_config(root, "block_cipher_mode", "GCM"), "block_cipher_mode"), "GCM");
  Scope outer = root.set(Item::sign_mode, "detached");
  EXPECT_EQ(outer.child().set(Item::sign_mode, "combined").resolve(Item::sign_mode), "combined");
  EXPECT_EQ(root.set(Item::key_type_shared, "ChaCha20").child().resolve(Item::key_type_shared), "ChaCha20");
}

TEST(Config, ValuesAreCanonicalised) {
  Scope s = Scope().set(Item::block_cipher_mode, "cbc").set(Item::key_type_shared, "chacha20");
  EXPECT_EQ(s.resolve(Item::block_cipher_mode), "CBC");
  EXPECT_EQ(s.resolve(Item::key_type_shared), "ChaCha20");
  EXPECT_EQ(Scope().set(Item::key_size_public, "p-384").resolve(Item::key_size_public), "P-384");
}

TEST(Config, DisallowedValuesCarryTheirMisuseClass) {
  auto misuse_of = [](Item item, std::string_view v) -> std::optional<MisuseClass> {
    try {
      Scope().set(item, v);
    } catch (const DisallowedValue& e) {
      return e.misuse();
    }
    ADD_FAILURE() << "accepted " << v;
    return std::nullopt;
  };
  EXPECT_EQ(misuse_of(Item::block_cipher_mode, "ECB"), MisuseClass::M1S);
  EXPECT_EQ(misuse_of(Item::key_type_shared, "DES"), MisuseClass::M3S);
  EXPECT_EQ(misuse_of(Item::key_type_shared, "RC4"), MisuseClass::M3S);
  EXPECT_EQ(misuse_of(Item::key_type_public, "ElGamal"), MisuseClass::M3S);
  EXPECT_EQ(misuse_of(Item::sign_hash, "MD5"), MisuseClass::M1H);
  EXPECT_EQ(misuse_of(Item::sign_hash, "SHA1"), MisuseClass::M1H);
  EXPECT_EQ(misuse_of(Item::key_size_shared, "0"), MisuseClass::M1K);
  EXPECT_EQ(misuse_of(Item::key_size_public, "big"), MisuseClass::M1K);
  EXPECT_EQ(misuse_of(Item::sign_mode, "both"), std::nullopt);
  EXPECT_EQ(misuse_of(Item::provider, "nonesuch"), std::nullopt);
}

TEST(Config, UnknownItem) {
  EXPECT_THROW(config::set_config(Scope(), "padding", "none"), UnknownItem);
  EXPECT_THROW(config::resolve(Scope(), "padding"), UnknownItem);
}

TEST(Config, ParseText) {
  EXPECT_EQ(config::parse_config("sign_mode = combined").resolve(Item::sign_mode), "combined");
  Scope empty = config::parse_config("");
  for (Item i : config::kAllItems) EXPECT_EQ(empty.resolve(i), config::default_value(i));
  EXPECT_TRUE(empty.bindings().empty());

  Scope s = config::parse_config("# comment\n\n  key_size_shared = 128  # trailing\nsign_hash=SHA512\n");
  EXPECT_EQ(s.resolve(Item::key_size_shared), "128");
  EXPECT_EQ(s.resolve(Item::sign_hash), "SHA512");

  EXPECT_THROW(config::parse_config("block_cipher_mode = ECB"), DisallowedValue);
  try {
    config::parse_config("sign_mode = combined\nno equals sign\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  try {
    config::parse_config("\n\nblock_cipher_mode = ECB\n");
    FAIL();
  } catch (const DisallowedValue& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Config, ParseChainsOntoParent) {
  Scope parent = Scope().set(Item::sign_mode, "combined");
  Scope s = config::parse_config("sign_hash = SHA384", parent);
  EXPECT_EQ(s.resolve(Item::sign_mode), "combined");
  EXPECT_EQ(s.depth(), parent.depth() + 1);
}

TEST(Config, LoadFile) {
  auto path = std::filesystem::temp_directory_path() / "secalgo_config_test.conf";
  {
    std::ofstream f(path);
    f << "key_type_shared = Blowfish\n";
  }
  EXPECT_EQ(config::load_config_file(path).resolve(Item::key_type_shared), "Blowfish");
  std::filesystem::remove(path);
  EXPECT_THROW(config::load_config_file(path), ParseError);
}

TEST(Config, GlobalScopeOverride) {
  Scope before = config::global_scope();
  {
    config::GlobalScopeOverride o(Scope().set(Item::sign_mode, "combined"));
    EXPECT_EQ(config::global_scope().resolve(Item::sign_mode), "combined");
  }
  EXPECT_EQ(config::global_scope().resolve(Item::sign_mode), before.resolve(Item::sign_mode));
}

// Random chains of child() and set(), checked against a flattened map built
// root-to-leaf.
TEST(ConfigProperty, ChainResolvesLikeFlattenedOverlay) {
  Gen g(21);
  for (int trial = 0; trial < 500; ++trial) {
    Scope s;
    std::vector<std::map<Item, std::string>> frames(1);
    const std::size_t steps = g.below(12);
    for (std::size_t k = 0; k < steps; ++k) {
      if (g.below(3) == 0) {
        s = s.child();
        frames.emplace_back();
      } else {
        Item item = config::kAllItems[g.below(std::size(config::kAllItems))];
        auto c = candidates(item);
        const std::string& v = c[g.below(c.size())];
        s = s.set(item, v);
        frames.back()[item] = v;
      }
    }
    std::map<Item, std::string> flat;
    for (const auto& f : frames)
      for (const auto& [k, v] : f) flat[k] = v;
    for (Item item : config::kAllItems) {
      std::string want = flat.count(item) ? flat[item] : std::string(config::default_value(item));
      ASSERT_EQ(s.resolve(item), want);
      ASSERT_TRUE(member(item, s.resolve(item))) << s.resolve(item);
    }
    ASSERT_EQ(s.depth(), frames.size() - 1);
  }
}

TEST(ConfigProperty, SetNeverTouchesTheParent) {
  Gen g(22);
  for (int trial = 0; trial < 300; ++trial) {
    Scope parent = Scope().set(Item::sign_hash, "SHA384").child();
    std::map<Item, std::string> before;
    for (Item i : config::kAllItems) before[i] = parent.resolve(i);
    Scope s = parent;
    for (int k = 0; k < 5; ++k) {
      Item item = config::kAllItems[g.below(std::size(config::kAllItems))];
      auto c = candidates(item);
      s = g.coin() ? s.set(item, c[g.below(c.size())]) : s.child().set(item, c[g.below(c.size())]);
    }
    for (Item i : config::kAllItems) ASSERT_EQ(parent.resolve(i), before[i]);
  }
}

TEST(ConfigProperty, EveryAcceptedValueIsInTheWhitelist) {
  Gen g(23);
  const char* junk[] = {"ECB", "MD5", "DES", "", " ", "-1", "007", "1e3", "gcm ", "SHA-1", "P-521"};
  for (Item item : config::kAllItems) {
    for (const char* j : junk) {
      if (config::is_allowed(item, j)) ASSERT_TRUE(member(item, config::canonicalize(item, j))) << j;
    }
    for (int k = 0; k < 200; ++k) {
      std::string v = g.utf8(6);
      if (config::is_allowed(item, v)) ASSERT_TRUE(member(item, config::canonicalize(item, v))) << v;
    }
  }
}
