#include <map>
#include <mutex>

#include "provider_internal.hpp"
#include "secalgo/config.hpp"
#include "secalgo/error.hpp"

namespace secalgo::provider {

namespace {

struct Registry {
  std::mutex mutex;
  std::map<std::string, std::unique_ptr<Provider>, std::less<>> providers;

  Registry() {
    auto p = make_openssl_provider();
    std::string n(p->name());
    providers.emplace(std::move(n), std::move(p));
  }
};

Registry& registry() {
  static Registry r;
  return r;
}

}  // namespace

Provider& get(std::string_view name) {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  auto it = r.providers.find(name);
  if (it == r.providers.end()) throw ConfigError("unknown provider '" + std::string(name) + "'");
  return *it->second;
}

std::vector<std::string> registered() {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  std::vector<std::string> out;
  for (const auto& [n, p] : r.providers) out.push_back(n);
  return out;
}

void register_provider(std::unique_ptr<Provider> p) {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  std::string n(p->name());
  r.providers[n] = std::move(p);
}

Provider& current() { return get(config::global_scope().resolve(config::Item::provider)); }

}  // namespace secalgo::provider
