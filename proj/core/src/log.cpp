#include "vulnlib/log.hpp"

#include <iostream>
#include <mutex>

namespace vulnlib::log {
namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

Sink& current_sink() {
  static Sink sink;
  return sink;
}

}  // namespace

void warn(const std::string& message) {
  std::lock_guard<std::mutex> lock(sink_mutex());
  if (current_sink()) {
    current_sink()(message);
  } else {
    std::cerr << "warning: " << message << '\n';
  }
}

Sink set_warning_sink(Sink sink) {
  std::lock_guard<std::mutex> lock(sink_mutex());
  Sink previous = std::move(current_sink());
  current_sink() = std::move(sink);
  return previous;
}

ScopedCapture::ScopedCapture() {
  previous_ = set_warning_sink(
      [this](const std::string& m) { messages_.push_back(m); });
}

ScopedCapture::~ScopedCapture() { set_warning_sink(std::move(previous_)); }

}  // namespace vulnlib::log
