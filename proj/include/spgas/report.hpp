#pragma once

// Check records and report rendering.  The text form is for reading; the
// structured form is line-delimited with fixed field names and is
// deterministic apart from the trailing timing line.

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

namespace spgas {

struct CheckRecord {
  std::string name;    // stable check identifier, e.g. "table1/L1,P1"
  std::string anchor;  // label of the recorded display the check is pinned to
  std::string status;  // "pass" | "fail" | "diff"
  std::string detail;  // short payload, empty when there is nothing to add
};

inline bool record_fails(const CheckRecord& r) { return r.status == "fail"; }

struct Report {
  std::vector<CheckRecord> records;
  long long elapsed_ms = 0;

  void add(std::vector<CheckRecord> more) {
    for (auto& r : more) records.push_back(std::move(r));
  }

  void sort_records() {
    std::stable_sort(records.begin(), records.end(),
                     [](const CheckRecord& a, const CheckRecord& b) { return a.name < b.name; });
  }

  size_t count(const std::string& status) const {
    size_t n = 0;
    for (auto& r : records)
      if (r.status == status) ++n;
    return n;
  }

  bool ok() const { return count("fail") == 0; }

  // content hash of the records, so identical runs carry the same id
  std::string run_id() const {
    uint64_t h = 1469598103934665603ULL;
    auto eat = [&h](const std::string& s) {
      for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
      }
      h ^= 0x1f;
      h *= 1099511628211ULL;
    };
    for (auto& r : records) {
      eat(r.name);
      eat(r.anchor);
      eat(r.status);
      eat(r.detail);
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
  }
};

inline std::string one_line(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '\n')
      out += "; ";
    else if (c != '\r')
      out += c;
  }
  return out;
}

inline std::string format_structured(const Report& rep) {
  std::ostringstream os;
  os << "run id=" << rep.run_id() << " checks=" << rep.records.size()
     << " pass=" << rep.count("pass") << " diff=" << rep.count("diff")
     << " fail=" << rep.count("fail") << "\n";
  for (auto& r : rep.records)
    os << "check name=" << r.name << " anchor=" << r.anchor << " status=" << r.status
       << " detail=" << one_line(r.detail) << "\n";
  os << "timing elapsed_ms=" << rep.elapsed_ms << "\n";
  return os.str();
}

inline std::string format_text(const Report& rep) {
  std::ostringstream os;
  os << "run " << rep.run_id() << "\n";
  size_t w = 0;
  for (auto& r : rep.records) w = std::max(w, r.name.size());
  for (auto& r : rep.records) {
    os << "  " << r.status << std::string(5 - std::min<size_t>(4, r.status.size()), ' ')
       << r.name << std::string(w - r.name.size() + 2, ' ') << "anchor=" << r.anchor;
    if (!r.detail.empty()) os << "  " << one_line(r.detail);
    os << "\n";
  }
  size_t pass = rep.count("pass"), diffs = rep.count("diff"), fails = rep.count("fail");
  os << pass << "/" << rep.records.size() << " pass";
  if (diffs) os << ", " << diffs << " diff (archived)";
  if (fails) os << ", " << fails << " fail";
  os << "  [" << rep.elapsed_ms << " ms]\n";
  return os.str();
}

}  // namespace spgas
