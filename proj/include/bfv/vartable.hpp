#pragma once

#include <cctype>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace bfv {

/// Ordered coordinate system for one problem: base variables x_1..x_n,
/// fiber variables y_1..y_k and an optional time variable. The ordering is
/// fixed for the lifetime of a problem; every Poly exponent vector follows it
/// (base first, then fiber, then time).
class VarTable {
 public:
  VarTable(std::vector<std::string> base_vars, std::vector<std::string> fiber_vars,
           std::optional<std::string> time_var = std::nullopt)
      : base_(std::move(base_vars)), fiber_(std::move(fiber_vars)), time_(std::move(time_var)) {
    if (fiber_.empty()) throw std::invalid_argument("VarTable: fiber rank must be at least 1");
    std::set<std::string> seen;
    auto check = [&seen](const std::string& name) {
      if (name.empty()) throw std::invalid_argument("VarTable: empty variable name");
      if (!std::isalpha(static_cast<unsigned char>(name[0])) && name[0] != '_')
        throw std::invalid_argument("VarTable: variable name must start with a letter: " + name);
      for (char c : name)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
          throw std::invalid_argument("VarTable: invalid character in variable name: " + name);
      if (name == "e" || name == "eps")
        throw std::invalid_argument("VarTable: 'e' and 'eps' are reserved for ghost generators");
      if (!seen.insert(name).second)
        throw std::invalid_argument("VarTable: duplicate variable name: " + name);
    };
    for (const auto& v : base_) check(v);
    for (const auto& v : fiber_) check(v);
    if (time_) check(*time_);
  }

  std::size_t base_count() const { return base_.size(); }
  std::size_t fiber_count() const { return fiber_.size(); }
  bool has_time() const { return time_.has_value(); }
  std::size_t var_count() const { return base_.size() + fiber_.size() + (time_ ? 1 : 0); }

  /// Flat index of the i-th fiber variable, i in [0, k).
  std::size_t fiber_index(std::size_t i) const { return base_.size() + i; }
  std::size_t time_index() const {
    if (!time_) throw std::logic_error("VarTable: no time variable");
    return base_.size() + fiber_.size();
  }

  bool is_fiber(std::size_t idx) const {
    return idx >= base_.size() && idx < base_.size() + fiber_.size();
  }
  bool is_time(std::size_t idx) const { return time_ && idx == base_.size() + fiber_.size(); }

  const std::string& name(std::size_t idx) const {
    if (idx < base_.size()) return base_[idx];
    idx -= base_.size();
    if (idx < fiber_.size()) return fiber_[idx];
    if (time_ && idx == fiber_.size()) return *time_;
    throw std::out_of_range("VarTable: variable index out of range");
  }

  std::optional<std::size_t> index_of(const std::string& name) const {
    for (std::size_t i = 0; i < base_.size(); ++i)
      if (base_[i] == name) return i;
    for (std::size_t i = 0; i < fiber_.size(); ++i)
      if (fiber_[i] == name) return base_.size() + i;
    if (time_ && *time_ == name) return base_.size() + fiber_.size();
    return std::nullopt;
  }

  const std::vector<std::string>& base_vars() const { return base_; }
  const std::vector<std::string>& fiber_vars() const { return fiber_; }
  const std::optional<std::string>& time_var() const { return time_; }

  friend bool operator==(const VarTable& a, const VarTable& b) {
    return a.base_ == b.base_ && a.fiber_ == b.fiber_ && a.time_ == b.time_;
  }

 private:
  std::vector<std::string> base_;
  std::vector<std::string> fiber_;
  std::optional<std::string> time_;
};

}  // namespace bfv
