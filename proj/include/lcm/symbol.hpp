#ifndef LCM_SYMBOL_HPP
#define LCM_SYMBOL_HPP

#include <string>
#include <string_view>

namespace lcm {

/* Interned symbol name. Copies are cheap ints; the backing registry is
 * append-only and thread-safe. Ordering is by name, not by interning order,
 * so every container keyed on Sym iterates in the same order regardless of
 * construction history. That property underwrites deterministic output. */
class Sym {
 public:
  Sym() : id_(-1) {}

  static Sym intern(std::string_view name);

  const std::string& name() const;
  int id() const { return id_; }
  bool valid() const { return id_ >= 0; }

  friend bool operator==(Sym a, Sym b) { return a.id_ == b.id_; }
  friend bool operator!=(Sym a, Sym b) { return a.id_ != b.id_; }
  friend bool operator<(Sym a, Sym b);

 private:
  explicit Sym(int id) : id_(id) {}
  int id_;
};

}  // namespace lcm

#endif
