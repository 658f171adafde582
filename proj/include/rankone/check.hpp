#ifndef RANKONE_CHECK_HPP
#define RANKONE_CHECK_HPP

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace rankone {

/// Outcome of a batch of exact checks. Failures carry a readable label.
struct CheckReport {
  std::string name;
  std::size_t checked = 0;
  std::vector<std::string> failures;
  std::vector<std::string> notes;

  CheckReport() = default;
  explicit CheckReport(std::string n) : name(std::move(n)) {}

  bool ok() const { return failures.empty(); }

  void expect(bool cond, const std::string &what) {
    ++checked;
    if (!cond)
      failures.push_back(what);
  }

  void note(const std::string &what) { notes.push_back(what); }

  void merge(const CheckReport &other) {
    checked += other.checked;
    for (const auto &f : other.failures)
      failures.push_back(other.name.empty() ? f : other.name + ": " + f);
    for (const auto &n : other.notes)
      notes.push_back(other.name.empty() ? n : other.name + ": " + n);
  }
};

} // namespace rankone

#endif // RANKONE_CHECK_HPP
