#pragma once

// Session registry for symbols and function symbols.  Append-only under a
// mutex; records are immutable and shared by pointer, so expressions built on
// one workspace stay valid across threads.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "param.hpp"

namespace spgas {

enum class SKind : uint8_t { BosonVar, BosonParam, FermiVar, FermiParam };

inline int kind_parity(SKind k) {
  return (k == SKind::FermiVar || k == SKind::FermiParam) ? 1 : 0;
}

struct SymRec {
  uint32_t id;
  std::string name;
  SKind kind;
  int parity() const { return kind_parity(kind); }
};

// slot_default: index >= 0 encodes "symbol id", -2 - fid encodes "default app
// of function fid", -1 means the slot has no default
struct FuncRec {
  uint32_t id;
  std::string name;
  int parity;
  std::vector<std::string> slots;
  std::vector<int> slot_parity;
  std::vector<int64_t> slot_default;
};

class Workspace {
 public:
  std::shared_ptr<const SymRec> sym(const std::string& name, SKind kind) {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = byname_.find(name);
    if (it != byname_.end()) {
      if (it->second.second) throw SpgasError("name registered as function: " + name);
      auto rec = syms_[it->second.first];
      if (rec->kind != kind) throw SpgasError("symbol kind clash: " + name);
      return rec;
    }
    auto rec = std::make_shared<SymRec>(SymRec{static_cast<uint32_t>(syms_.size()), name, kind});
    syms_.push_back(rec);
    byname_[name] = {rec->id, false};
    return rec;
  }

  std::shared_ptr<const FuncRec> func(const std::string& name, int parity,
                                      const std::vector<std::string>& slots) {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = byname_.find(name);
    if (it != byname_.end()) {
      if (!it->second.second) throw SpgasError("name registered as symbol: " + name);
      return fns_[it->second.first];
    }
    FuncRec r;
    r.id = static_cast<uint32_t>(fns_.size());
    r.name = name;
    r.parity = parity;
    r.slots = slots;
    for (auto& s : slots) {
      auto jt = byname_.find(s);
      if (jt == byname_.end()) throw SpgasError("slot name not registered: " + s + " (for " + name + ")");
      if (jt->second.second) {
        r.slot_parity.push_back(fns_[jt->second.first]->parity);
        r.slot_default.push_back(-2 - static_cast<int64_t>(jt->second.first));
      } else {
        r.slot_parity.push_back(syms_[jt->second.first]->parity());
        r.slot_default.push_back(static_cast<int64_t>(jt->second.first));
      }
    }
    auto rec = std::make_shared<FuncRec>(std::move(r));
    fns_.push_back(rec);
    byname_[name] = {rec->id, true};
    return rec;
  }

  std::shared_ptr<const SymRec> sym_by_id(uint32_t id) const {
    std::lock_guard<std::mutex> lk(mu_);
    return syms_.at(id);
  }
  std::shared_ptr<const FuncRec> func_by_id(uint32_t id) const {
    std::lock_guard<std::mutex> lk(mu_);
    return fns_.at(id);
  }
  std::shared_ptr<const SymRec> find_sym(const std::string& name) const {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = byname_.find(name);
    if (it == byname_.end() || it->second.second) return nullptr;
    return syms_[it->second.first];
  }
  std::shared_ptr<const FuncRec> find_func(const std::string& name) const {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = byname_.find(name);
    if (it == byname_.end() || !it->second.second) return nullptr;
    return fns_[it->second.first];
  }
  std::string param_name(uint32_t id) const {
    std::lock_guard<std::mutex> lk(mu_);
    return syms_.at(id)->name;
  }
  size_t sym_count() const {
    std::lock_guard<std::mutex> lk(mu_);
    return syms_.size();
  }

 private:
  mutable std::mutex mu_;
  std::vector<std::shared_ptr<const SymRec>> syms_;
  std::vector<std::shared_ptr<const FuncRec>> fns_;
  std::map<std::string, std::pair<uint32_t, bool>> byname_;
};

}  // namespace spgas
