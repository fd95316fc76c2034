#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace secalgo::config {

enum class Item {
  key_type,
  key_type_shared,
  key_type_public,
  key_size_shared,
  key_size_public,
  block_cipher_mode,
  sign_hash,
  sign_mode,
  provider,
};

inline constexpr Item kAllItems[] = {
    Item::key_type,        Item::key_type_shared, Item::key_type_public,
    Item::key_size_shared, Item::key_size_public, Item::block_cipher_mode,
    Item::sign_hash,       Item::sign_mode,       Item::provider,
};

std::string_view name(Item item);
/// Throws UnknownItem.
Item parse_item(std::string_view name);

std::string_view default_value(Item item);

/// Enumerated allowed values; empty for the open-ended size items.
std::vector<std::string> allowed_values(Item item);

/// Canonical spelling of `value` for `item`, or DisallowedValue. Matching is
/// case-insensitive.
std::string canonicalize(Item item, std::string_view value);
bool is_allowed(Item item, std::string_view value);

/// Immutable configuration scope. Copies share structure; set() and child()
/// return new scopes and never touch this one or its ancestors.
class Scope {
 public:
  /// An empty root: every item resolves to its default.
  Scope();

  /// Same parent, bindings plus item=value. Validates like set_config.
  Scope set(Item item, std::string_view value) const;
  /// New empty scope nested in this one.
  Scope child() const;

  /// Value from the nearest scope binding the item, else the default.
  std::string resolve(Item item) const;
  /// Value from the nearest scope binding the item, nullopt if none does.
  std::optional<std::string> bound(Item item) const;

  const std::map<Item, std::string>& bindings() const;
  std::optional<Scope> parent() const;
  std::size_t depth() const;

 private:
  struct Frame;
  explicit Scope(std::shared_ptr<const Frame> f);

  std::shared_ptr<const Frame> frame_;
};

Scope set_config(const Scope& scope, std::string_view item, std::string_view value);
std::string resolve(const Scope& scope, std::string_view item);

/// Text format: one `name = value` per line, `#` starts a comment. The
/// result is a child of `parent` holding one binding per entry. Throws
/// ParseError, UnknownItem or DisallowedValue; messages carry the line.
Scope parse_config(std::string_view text, const Scope& parent = Scope());
Scope load_config_file(const std::filesystem::path& path, const Scope& parent = Scope());

/// Process-wide scope used when a call does not pass one. Replaced
/// atomically; readers get a consistent snapshot.
Scope global_scope();
void set_global_scope(const Scope& scope);

/// Swaps the global scope for the lifetime of the object.
class GlobalScopeOverride {
 public:
  explicit GlobalScopeOverride(const Scope& scope);
  ~GlobalScopeOverride();
  GlobalScopeOverride(const GlobalScopeOverride&) = delete;
  GlobalScopeOverride& operator=(const GlobalScopeOverride&) = delete;

 private:
  Scope previous_;
};

}  // namespace secalgo::config
