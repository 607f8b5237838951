#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "chrtc/constraint.hpp"

namespace chrtc {

enum class RuleKind { simplification, propagation };

/// A goal or rule-body conjunct: a class constraint or a Herbrand equation.
using Item = std::variant<ClassConstraint, Equation>;

Item apply(const Substitution& s, const Item& item);
Item instantiate(const Matcher& m, const Item& item);
void collect_vars(const Item& item, std::vector<Var>& out);

struct ChrRule {
  std::string name;
  RuleKind kind = RuleKind::simplification;
  std::vector<ClassConstraint> head;
  std::vector<Guard> guard;
  std::vector<Item> body;
  bool body_false = false;  // the distinguished body False

  bool is_propagation() const { return kind == RuleKind::propagation; }
  friend bool operator==(const ChrRule&, const ChrRule&) = default;
};

/// Variables of the rule in order of first occurrence (head, guard, body).
std::vector<Var> rule_vars(const ChrRule& r);

/// Copy of `r` with every variable replaced by a fresh one.
ChrRule rename_apart(const ChrRule& r);

/// An ordered CHR program. Rule names are unique and propagation rules never
/// have a False body; the constructor throws std::invalid_argument otherwise.
class Program {
 public:
  Program() = default;
  explicit Program(std::vector<ChrRule> rules);

  const std::vector<ChrRule>& rules() const { return rules_; }
  const ChrRule* find(const std::string& name) const;
  std::size_t size() const { return rules_.size(); }
  bool empty() const { return rules_.empty(); }

  /// Appends rules, revalidating names.
  Program with(std::vector<ChrRule> more) const;
  /// Rules whose names appear in `names`, in program order.
  Program subset(const std::vector<std::string>& names) const;

 private:
  std::vector<ChrRule> rules_;
  std::map<std::string, std::size_t> index_;
};

}  // namespace chrtc
