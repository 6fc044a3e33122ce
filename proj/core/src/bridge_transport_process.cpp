// Boost.Process and the full Asio header cannot share a translation unit on
// Boost 1.74, so the subprocess transport lives on its own.
#include <boost/process.hpp>

#include <chrono>

#include "uiknow/bridge_environment.hpp"
#include "uiknow/error.hpp"

namespace uiknow {

namespace {

namespace bp = boost::process;

class ProcessTransport final : public LineTransport {
 public:
  explicit ProcessTransport(const std::vector<std::string>& argv) {
    if (argv.empty()) throw Error(ErrorKind::EnvDisconnected, "empty bridge command");
    auto exe = bp::search_path(argv.front());
    if (exe.empty()) exe = argv.front();
    std::vector<std::string> args(argv.begin() + 1, argv.end());
    try {
      child_ = bp::child(exe, bp::args(args), bp::std_in < to_child_, bp::std_out > from_child_);
    } catch (const bp::process_error& e) {
      throw Error(ErrorKind::EnvDisconnected, std::string("cannot start bridge: ") + e.what());
    }
  }

  ~ProcessTransport() override {
    try {
      to_child_.pipe().close();
      if (child_.valid() && !child_.wait_for(std::chrono::seconds(2))) child_.terminate();
    } catch (...) {
      // Teardown of a dead child is best effort.
    }
  }

  std::string round_trip(const std::string& request_line) override {
    if (!child_.running()) throw Error(ErrorKind::EnvDisconnected, "bridge process exited");
    to_child_ << request_line << '\n' << std::flush;
    std::string line;
    if (!to_child_ || !std::getline(from_child_, line)) {
      throw Error(ErrorKind::EnvDisconnected, "bridge process closed its output");
    }
    return line;
  }

 private:
  bp::opstream to_child_;
  bp::ipstream from_child_;
  bp::child child_;
};

}  // namespace

std::unique_ptr<LineTransport> make_process_transport(const std::vector<std::string>& argv) {
  return std::make_unique<ProcessTransport>(argv);
}

}  // namespace uiknow
