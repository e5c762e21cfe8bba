#pragma once

#include <algorithm>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace isoalg {

/// One measured quantity of a check together with the bound it must respect.
struct Defect {
  std::string check;
  double value = 0.0;
  double limit = 0.0;

  // NaN never passes.
  bool ok() const { return value <= limit; }
};

/// Structured outcome of a condition checker.
///
/// A report passes iff every recorded defect is within its limit and no
/// failure was flagged explicitly.  Notes carry informational values (for
/// example measured truncation defects) that are not themselves pass/fail.
class ConditionReport {
 public:
  ConditionReport() = default;
  explicit ConditionReport(std::string name) : name_(std::move(name)) {}

  const std::string& name() const { return name_; }
  bool pass() const { return pass_; }
  const std::vector<Defect>& defects() const { return defects_; }
  const std::vector<std::string>& notes() const { return notes_; }

  /// Records a defect; returns whether it is within the limit.
  bool record(std::string check, double value, double limit) {
    Defect d{std::move(check), value, limit};
    const bool ok = d.ok();
    pass_ = pass_ && ok;
    defects_.push_back(std::move(d));
    return ok;
  }

  void note(std::string text) { notes_.push_back(std::move(text)); }

  void fail(std::string reason) {
    pass_ = false;
    notes_.push_back(std::move(reason));
  }

  /// Folds a sub-report in, prefixing its defect labels.
  void merge(const ConditionReport& other, std::string_view prefix = {}) {
    for (const auto& d : other.defects_) {
      std::string label = prefix.empty() ? d.check : std::string(prefix) + ": " + d.check;
      record(std::move(label), d.value, d.limit);
    }
    for (const auto& n : other.notes_) {
      notes_.push_back(prefix.empty() ? n : std::string(prefix) + ": " + n);
    }
    pass_ = pass_ && other.pass_;
  }

  const Defect* find(std::string_view check) const {
    auto it = std::find_if(defects_.begin(), defects_.end(),
                           [&](const Defect& d) { return d.check == check; });
    return it == defects_.end() ? nullptr : &*it;
  }

  double max_defect() const {
    double m = 0.0;
    for (const auto& d : defects_) m = std::max(m, d.value);
    return m;
  }

 private:
  std::string name_;
  bool pass_ = true;
  std::vector<Defect> defects_;
  std::vector<std::string> notes_;
};

}  // namespace isoalg
