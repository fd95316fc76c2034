#include "secalgo/config.hpp"

#include <charconv>
#include <fstream>
#include <mutex>
#include <sstream>

#include "secalgo/error.hpp"
#include "secalgo/labels.hpp"
#include "secalgo/provider.hpp"

namespace secalgo::config {

namespace {

struct ItemInfo {
  Item item;
  std::string_view name;
  std::string_view default_value;
  std::optional<MisuseClass> misuse;
};

constexpr ItemInfo kItems[] = {
    {Item::key_type, "key_type", "shared", std::nullopt},
    {Item::key_type_shared, "key_type_shared", "AES", MisuseClass::M3S},
    {Item::key_type_public, "key_type_public", "RSA", MisuseClass::M3S},
    {Item::key_size_shared, "key_size_shared", "256", MisuseClass::M1K},
    {Item::key_size_public, "key_size_public", "2048", MisuseClass::M1K},
    {Item::block_cipher_mode, "block_cipher_mode", "GCM", MisuseClass::M1S},
    {Item::sign_hash, "sign_hash", "SHA256", MisuseClass::M1H},
    {Item::sign_mode, "sign_mode", "detached", std::nullopt},
    {Item::provider, "provider", "openssl", std::nullopt},
};

const ItemInfo& info(Item item) { return kItems[static_cast<std::size_t>(item)]; }

std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

// Decimal text of a positive integer, or nullopt.
std::optional<std::string> positive_integer(std::string_view v) {
  if (v.empty() || v.size() > 9) return std::nullopt;
  int n = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
  if (ec != std::errc() || p != v.data() + v.size() || n <= 0) return std::nullopt;
  return std::to_string(n);
}

[[noreturn]] void disallowed(Item item, std::string_view value) {
  throw DisallowedValue("value '" + std::string(value) + "' is not allowed for " +
                            std::string(name(item)),
                        info(item).misuse);
}

}  // namespace

std::string_view name(Item item) { return info(item).name; }

Item parse_item(std::string_view n) {
  for (const auto& i : kItems)
    if (i.name == n) return i.item;
  throw UnknownItem("unknown configuration item '" + std::string(n) + "'");
}

std::string_view default_value(Item item) { return info(item).default_value; }

std::vector<std::string> allowed_values(Item item) {
  switch (item) {
    case Item::key_type:
      return {"shared", "public"};
    case Item::key_type_shared:
      return {"AES", "Blowfish", "3DES", "Salsa20", "ChaCha20"};
    case Item::key_type_public:
      return {"RSA", "DSA", "ECDSA"};
    case Item::key_size_shared:
      return {};
    case Item::key_size_public:
      return {"P-256", "P-384"};
    case Item::block_cipher_mode:
      return {"CBC", "CTR", "CFB", "EAX", "GCM", "CCM", "SIV", "OCB"};
    case Item::sign_hash:
      return {"SHA224", "SHA256", "SHA384", "SHA512"};
    case Item::sign_mode:
      return {"detached", "combined"};
    case Item::provider:
      return provider::registered();
  }
  return {};
}

std::string canonicalize(Item item, std::string_view value) {
  value = trim(value);
  if (item == Item::key_size_shared || item == Item::key_size_public) {
    if (auto n = positive_integer(value)) return *n;
  }
  for (const auto& v : allowed_values(item))
    if (iequals(v, value)) return v;
  disallowed(item, value);
}

bool is_allowed(Item item, std::string_view value) {
  try {
    canonicalize(item, value);
    return true;
  } catch (const DisallowedValue&) {
    return false;
  }
}

struct Scope::Frame {
  std::shared_ptr<const Frame> parent;
  std::map<Item, std::string> bindings;
  std::size_t depth = 0;
};

Scope::Scope() : frame_(std::make_shared<const Frame>()) {}

Scope::Scope(std::shared_ptr<const Frame> f) : frame_(std::move(f)) {}

Scope Scope::set(Item item, std::string_view value) const {
  auto f = std::make_shared<Frame>(*frame_);
  f->bindings[item] = canonicalize(item, value);
  return Scope(std::move(f));
}

Scope Scope::child() const {
  auto f = std::make_shared<Frame>();
  f->parent = frame_;
  f->depth = frame_->depth + 1;
  return Scope(std::move(f));
}

std::optional<std::string> Scope::bound(Item item) const {
  for (const Frame* f = frame_.get(); f; f = f->parent.get()) {
    auto it = f->bindings.find(item);
    if (it != f->bindings.end()) return it->second;
  }
  return std::nullopt;
}

std::string Scope::resolve(Item item) const {
  if (auto v = bound(item)) return *v;
  return std::string(default_value(item));
}

const std::map<Item, std::string>& Scope::bindings() const { return frame_->bindings; }

std::optional<Scope> Scope::parent() const {
  if (!frame_->parent) return std::nullopt;
  return Scope(frame_->parent);
}

std::size_t Scope::depth() const { return frame_->depth; }

Scope set_config(const Scope& scope, std::string_view item, std::string_view value) {
  return scope.set(parse_item(item), value);
}

std::string resolve(const Scope& scope, std::string_view item) {
  return scope.resolve(parse_item(item));
}

Scope parse_config(std::string_view text, const Scope& parent) {
  Scope scope = parent.child();
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ParseError("line " + std::to_string(line_no) + ": expected 'name = value'", line_no);
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ParseError("line " + std::to_string(line_no) + ": expected 'name = value'", line_no);

    const std::string where = "line " + std::to_string(line_no) + ": ";
    try {
      scope = scope.set(parse_item(key), value);
    } catch (const UnknownItem& e) {
      throw UnknownItem(where + e.what());
    } catch (const DisallowedValue& e) {
      throw DisallowedValue(where + e.what(), e.misuse());
    }
  }
  return scope;
}

Scope load_config_file(const std::filesystem::path& path, const Scope& parent) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), parent);
}

namespace {

std::mutex& global_mutex() {
  static std::mutex m;
  return m;
}

Scope& global_storage() {
  static Scope s;
  return s;
}

}  // namespace

Scope global_scope() {
  std::lock_guard lock(global_mutex());
  return global_storage();
}

void set_global_scope(const Scope& scope) {
  std::lock_guard lock(global_mutex());
  global_storage() = scope;
}

GlobalScopeOverride::GlobalScopeOverride(const Scope& scope) : previous_(global_scope()) {
  set_global_scope(scope);
}

GlobalScopeOverride::~GlobalScopeOverride() { set_global_scope(previous_); }

}  // namespace secalgo::config
