#include "lcm/symbol.hpp"

#include <deque>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

#include "lcm/errors.hpp"

namespace lcm {
namespace {

struct Registry {
  std::shared_mutex mutex;
  std::deque<std::string> names;  // deque: references stay valid as we append
  std::unordered_map<std::string, int> index;
};

Registry& registry() {
  static Registry r;
  return r;
}

}  // namespace

Sym Sym::intern(std::string_view name) {
  if (name.empty()) throw InputError("symbol name must be non-empty");
  Registry& r = registry();
  std::string key(name);
  {
    std::shared_lock lock(r.mutex);
    auto it = r.index.find(key);
    if (it != r.index.end()) return Sym(it->second);
  }
  std::unique_lock lock(r.mutex);
  auto [it, inserted] = r.index.try_emplace(key, static_cast<int>(r.names.size()));
  if (inserted) r.names.push_back(key);
  return Sym(it->second);
}

const std::string& Sym::name() const {
  Registry& r = registry();
  std::shared_lock lock(r.mutex);
  return r.names.at(static_cast<std::size_t>(id_));
}

bool operator<(Sym a, Sym b) {
  if (a.id_ == b.id_) return false;
  return a.name() < b.name();
}

}  // namespace lcm
