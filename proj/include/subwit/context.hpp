#pragma once

// Kinding context: what a type expression may refer to — type variables in
// scope (with kinds), declared ADTs and aliases, and the constructor index.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "subwit/ast.hpp"
#include "subwit/source.hpp"

namespace subwit {

struct AdtInfo {
  std::string name;
  std::vector<TypeParam> params;
  std::vector<CtorDef> ctors;

  const CtorDef* find_ctor(const std::string& c) const {
    for (const auto& d : ctors)
      if (d.name == c) return &d;
    return nullptr;
  }
};

struct AliasInfo {
  std::string name;
  std::vector<TypeParam> params;
  TypePtr body;
};

class KindingContext {
 public:
  // --- declared types ---
  const AdtInfo* find_adt(const std::string& n) const {
    auto it = adts_.find(n);
    return it == adts_.end() ? nullptr : &it->second;
  }
  const AliasInfo* find_alias(const std::string& n) const {
    auto it = aliases_.find(n);
    return it == aliases_.end() ? nullptr : &it->second;
  }
  bool has_type_name(const std::string& n) const { return find_adt(n) || find_alias(n); }

  void add_adt(AdtInfo info) {
    for (const auto& c : info.ctors) ctor_owner_[c.name] = info.name;
    adts_.emplace(info.name, std::move(info));
  }
  void add_alias(AliasInfo info) { aliases_.emplace(info.name, std::move(info)); }

  // Constructor name -> owning ADT, or null if unknown.
  const AdtInfo* adt_of_ctor(const std::string& ctor) const {
    auto it = ctor_owner_.find(ctor);
    return it == ctor_owner_.end() ? nullptr : find_adt(it->second);
  }

  // --- type variable scope (innermost last) ---
  void push_tyvar(const std::string& name, KindPtr k) { tyvars_.emplace_back(name, std::move(k)); }
  void pop_tyvar() { tyvars_.pop_back(); }
  std::vector<std::string> tyvar_names() const {
    std::vector<std::string> out;
    out.reserve(tyvars_.size());
    for (const auto& [n, k] : tyvars_) out.push_back(n);
    return out;
  }
  const KindPtr* lookup_tyvar(const std::string& name) const {
    for (auto it = tyvars_.rbegin(); it != tyvars_.rend(); ++it)
      if (it->first == name) return &it->second;
    return nullptr;
  }
  size_t tyvar_depth() const { return tyvars_.size(); }

 private:
  std::map<std::string, AdtInfo> adts_;
  std::map<std::string, AliasInfo> aliases_;
  std::map<std::string, std::string> ctor_owner_;
  std::vector<std::pair<std::string, KindPtr>> tyvars_;
};

// RAII scope for a type variable binding.
class TyVarScope {
 public:
  TyVarScope(KindingContext& ctx, const std::string& name, KindPtr k) : ctx_(ctx) {
    ctx_.push_tyvar(name, std::move(k));
  }
  ~TyVarScope() { ctx_.pop_tyvar(); }
  TyVarScope(const TyVarScope&) = delete;
  TyVarScope& operator=(const TyVarScope&) = delete;

 private:
  KindingContext& ctx_;
};

} // namespace subwit
