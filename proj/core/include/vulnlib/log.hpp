#pragma once

#include <functional>
#include <string>
#include <vector>

namespace vulnlib::log {

using Sink = std::function<void(const std::string&)>;

// Non-fatal diagnostics (skipped references, excluded reports, tie rules).
// The default sink writes "warning: <msg>" to stderr.
void warn(const std::string& message);

// Replaces the warning sink and returns the previous one. Passing an empty
// function restores the default.
Sink set_warning_sink(Sink sink);

// RAII capture of warnings, mostly for tests.
class ScopedCapture {
 public:
  ScopedCapture();
  ~ScopedCapture();
  ScopedCapture(const ScopedCapture&) = delete;
  ScopedCapture& operator=(const ScopedCapture&) = delete;

  const std::vector<std::string>& messages() const { return messages_; }

 private:
  std::vector<std::string> messages_;
  Sink previous_;
};

}  // namespace vulnlib::log
